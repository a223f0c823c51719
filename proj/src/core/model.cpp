#include "hdfsm/core/model.hpp"

#include <algorithm>

namespace hdfsm {

bool is_valid_identifier(std::string_view id) {
  if (id.empty()) return false;
  auto ok = [](char c) { return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9'); };
  if (!ok(id.front())) return false;
  return std::all_of(id.begin(), id.end(), [&](char c) { return ok(c) || c == '-'; });
}

std::string_view to_string(MaterialSource source) {
  switch (source) {
    case MaterialSource::pasted: return "pasted";
    case MaterialSource::imported_file: return "imported-file";
  }
  return "pasted";
}

std::optional<MaterialSource> material_source_from_string(std::string_view s) {
  if (s == "pasted") return MaterialSource::pasted;
  if (s == "imported-file") return MaterialSource::imported_file;
  return std::nullopt;
}

const SessionTopic* SessionPlan::find(std::string_view session_id) const {
  auto it = std::find_if(sessions.begin(), sessions.end(),
                         [&](const SessionTopic& t) { return t.session_id == session_id; });
  return it == sessions.end() ? nullptr : &*it;
}

void SessionPlan::renumber() {
  int ordinal = 1;
  for (auto& topic : sessions) topic.ordinal = ordinal++;
}

Target Target::parse(std::string_view text) {
  if (text == kEndName) return end();
  return state(std::string(text));
}

const ResponseOption* DialogueState::find_option(std::string_view option_id) const {
  auto it = std::find_if(options.begin(), options.end(),
                         [&](const ResponseOption& o) { return o.option_id == option_id; });
  return it == options.end() ? nullptr : &*it;
}

const DialogueState* DialogueFsm::find(std::string_view state_id) const {
  auto it = std::find_if(states.begin(), states.end(),
                         [&](const DialogueState& s) { return s.state_id == state_id; });
  return it == states.end() ? nullptr : &*it;
}

DialogueState* DialogueFsm::find(std::string_view state_id) {
  auto it = std::find_if(states.begin(), states.end(),
                         [&](const DialogueState& s) { return s.state_id == state_id; });
  return it == states.end() ? nullptr : &*it;
}

std::optional<std::size_t> DialogueFsm::index_of(std::string_view state_id) const {
  for (std::size_t i = 0; i < states.size(); ++i) {
    if (states[i].state_id == state_id) return i;
  }
  return std::nullopt;
}

std::string option_id_for(std::size_t index) { return "o" + std::to_string(index + 1); }

void normalize_option_ids(DialogueState& state) {
  for (std::size_t i = 0; i < state.options.size(); ++i) {
    state.options[i].option_id = option_id_for(i);
  }
}

void normalize_option_ids(DialogueFsm& fsm) {
  for (auto& state : fsm.states) normalize_option_ids(state);
}

bool structurally_equal(const DialogueFsm& a, const DialogueFsm& b) {
  DialogueFsm na = a;
  DialogueFsm nb = b;
  normalize_option_ids(na);
  normalize_option_ids(nb);
  return na == nb;
}

}  // namespace hdfsm
