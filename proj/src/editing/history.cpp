#include "hdfsm/editing/history.hpp"

#include <algorithm>
#include <set>
#include <unordered_map>

#include "hdfsm/core/digest.hpp"
#include "hdfsm/core/error.hpp"
#include "hdfsm/core/text.hpp"
#include "hdfsm/core/validate.hpp"

namespace hdfsm {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

const DialogueFsm& fsm_for(const ProjectContent& c, const std::string& session) {
  auto it = c.fsms.find(session);
  if (it == c.fsms.end()) {
    throw Error(ErrorCode::unknown_target, "no dialogue for session " + session);
  }
  return it->second;
}

std::size_t state_index(const DialogueFsm& fsm, const std::string& state) {
  auto idx = fsm.index_of(state);
  if (!idx) {
    throw Error(ErrorCode::unknown_target, "no state " + state + " in " + fsm.session_id);
  }
  return *idx;
}

std::size_t option_index(const DialogueState& s, const std::string& option) {
  for (std::size_t i = 0; i < s.options.size(); ++i) {
    if (s.options[i].option_id == option) return i;
  }
  throw Error(ErrorCode::unknown_target, "no option " + option + " in state " + s.state_id);
}

std::size_t topic_index(const SessionPlan& plan, const std::string& session) {
  for (std::size_t i = 0; i < plan.sessions.size(); ++i) {
    if (plan.sessions[i].session_id == session) return i;
  }
  throw Error(ErrorCode::unknown_target, "no session " + session + " in the plan");
}

void require_text(const std::string& text, const char* what) {
  if (text::is_blank(text)) {
    throw Error(ErrorCode::invalid_argument, std::string(what) + " must not be empty");
  }
  if (!text::is_valid_utf8(text)) {
    throw Error(ErrorCode::invalid_argument, std::string(what) + " is not valid UTF-8");
  }
}

void require_label(const DialogueState& s, const std::string& label,
                   std::optional<std::size_t> self = std::nullopt) {
  require_text(label, "option label");
  const auto key = text::comparison_key(label);
  for (std::size_t i = 0; i < s.options.size(); ++i) {
    if (self && *self == i) continue;
    if (text::comparison_key(s.options[i].label) == key) {
      throw Error(ErrorCode::duplicate_label,
                  "state " + s.state_id + " already offers \"" + s.options[i].label + "\"");
    }
  }
}

void require_target(const DialogueFsm& fsm, const Target& t) {
  if (!t.is_end() && fsm.find(t.state_id()) == nullptr) {
    throw Error(ErrorCode::unknown_target,
                "target " + t.state_id() + " is not a state of " + fsm.session_id);
  }
}

std::string new_state_id(const DialogueFsm& fsm, const std::optional<std::string>& wanted) {
  if (!wanted) {
    return next_free_id("s", [&](const std::string& id) { return fsm.find(id) != nullptr; });
  }
  if (!is_valid_identifier(*wanted) || *wanted == kEndName) {
    throw Error(ErrorCode::invalid_argument, "\"" + *wanted + "\" is not a usable state id");
  }
  if (fsm.find(*wanted) != nullptr) {
    throw Error(ErrorCode::conflict, "state " + *wanted + " already exists");
  }
  return *wanted;
}

void require_unique_title(const SessionPlan& plan, const std::string& title,
                          std::optional<std::size_t> self = std::nullopt) {
  require_text(title, "topic title");
  const auto key = text::comparison_key(title);
  for (std::size_t i = 0; i < plan.sessions.size(); ++i) {
    if (self && *self == i) continue;
    if (text::comparison_key(plan.sessions[i].title) == key) {
      throw Error(ErrorCode::duplicate_topic, "a session titled \"" + title + "\" exists");
    }
  }
}

patch::State replace(const DialogueFsm& fsm, std::size_t idx, DialogueState after) {
  normalize_option_ids(after);
  return patch::State{fsm.session_id, idx, fsm.states[idx], std::move(after)};
}

// New terminal state appended, then an option from `from` leading to it.
std::vector<Patch> wire_new_state(const DialogueFsm& fsm, std::size_t from, const std::string& id,
                                  const std::string& utterance, const std::string& label) {
  std::vector<Patch> out;
  out.push_back(patch::State{fsm.session_id, fsm.states.size(), std::nullopt,
                             DialogueState{id, utterance, {}, false, {}}});
  DialogueState src = fsm.states[from];
  src.options.push_back({"", label, Target::state(id)});
  out.push_back(replace(fsm, from, std::move(src)));
  return out;
}

std::vector<Patch> compile_raw(const EditCommand& command, const ProjectContent& c) {
  return std::visit(
      overloaded{
          [&](const cmd::EditUtterance& x) -> std::vector<Patch> {
            const auto& fsm = fsm_for(c, x.session);
            const auto i = state_index(fsm, x.state);
            require_text(x.text, "utterance");
            DialogueState s = fsm.states[i];
            s.utterance = x.text;
            return {replace(fsm, i, std::move(s))};
          },
          [&](const cmd::AddState& x) -> std::vector<Patch> {
            const auto& fsm = fsm_for(c, x.session);
            const auto from = state_index(fsm, x.from_state);
            require_text(x.utterance, "utterance");
            require_label(fsm.states[from], x.label);
            return wire_new_state(fsm, from, new_state_id(fsm, x.state), x.utterance, x.label);
          },
          [&](const cmd::DeleteState& x) -> std::vector<Patch> {
            const auto& fsm = fsm_for(c, x.session);
            const auto idx = state_index(fsm, x.state);
            if (x.state == fsm.entry) {
              throw Error(ErrorCode::would_orphan_entry,
                          "state " + x.state + " is the entry; designate another entry first");
            }
            std::vector<Patch> out;
            for (std::size_t i = 0; i < fsm.states.size(); ++i) {
              if (i == idx) continue;
              DialogueState s = fsm.states[i];
              const auto n = s.options.size();
              std::erase_if(s.options, [&](const ResponseOption& o) {
                return !o.target.is_end() && o.target.state_id() == x.state;
              });
              if (s.options.size() != n) out.push_back(replace(fsm, i, std::move(s)));
            }
            out.push_back(patch::State{fsm.session_id, idx, fsm.states[idx], std::nullopt});
            return out;
          },
          [&](const cmd::AddOption& x) -> std::vector<Patch> {
            const auto& fsm = fsm_for(c, x.session);
            const auto i = state_index(fsm, x.state);
            require_label(fsm.states[i], x.label);
            require_target(fsm, x.target);
            DialogueState s = fsm.states[i];
            s.options.push_back({"", x.label, x.target});
            return {replace(fsm, i, std::move(s))};
          },
          [&](const cmd::EditOptionLabel& x) -> std::vector<Patch> {
            const auto& fsm = fsm_for(c, x.session);
            const auto i = state_index(fsm, x.state);
            const auto k = option_index(fsm.states[i], x.option);
            require_label(fsm.states[i], x.label, k);
            DialogueState s = fsm.states[i];
            s.options[k].label = x.label;
            return {replace(fsm, i, std::move(s))};
          },
          [&](const cmd::DeleteOption& x) -> std::vector<Patch> {
            const auto& fsm = fsm_for(c, x.session);
            const auto i = state_index(fsm, x.state);
            const auto k = option_index(fsm.states[i], x.option);
            DialogueState s = fsm.states[i];
            s.options.erase(s.options.begin() + static_cast<std::ptrdiff_t>(k));
            return {replace(fsm, i, std::move(s))};
          },
          [&](const cmd::ConnectOption& x) -> std::vector<Patch> {
            const auto& fsm = fsm_for(c, x.session);
            const auto i = state_index(fsm, x.state);
            const auto k = option_index(fsm.states[i], x.option);
            require_target(fsm, x.target);
            DialogueState s = fsm.states[i];
            s.options[k].target = x.target;
            return {replace(fsm, i, std::move(s))};
          },
          [&](const cmd::SetEntry& x) -> std::vector<Patch> {
            const auto& fsm = fsm_for(c, x.session);
            const auto to = state_index(fsm, x.state);
            if (fsm.entry == x.state) return {};
            std::vector<Patch> out;
            for (std::size_t i = 0; i < fsm.states.size(); ++i) {
              if (fsm.states[i].is_entry != (i == to)) {
                DialogueState s = fsm.states[i];
                s.is_entry = i == to;
                out.push_back(replace(fsm, i, std::move(s)));
              }
            }
            out.push_back(patch::Entry{fsm.session_id, fsm.entry, x.state});
            return out;
          },
          [&](const cmd::ReorderTopics& x) -> std::vector<Patch> {
            std::vector<std::string> now;
            for (const auto& s : c.plan.sessions) now.push_back(s.session_id);
            auto a = now, b = x.order;
            std::sort(a.begin(), a.end());
            std::sort(b.begin(), b.end());
            if (a != b) {
              throw Error(ErrorCode::invalid_argument,
                          "order must list every session of the plan exactly once");
            }
            if (now == x.order) return {};
            return {patch::TopicOrder{now, x.order}};
          },
          [&](const cmd::AddTopic& x) -> std::vector<Patch> {
            SessionTopic t;
            if (x.session) {
              if (!is_valid_identifier(*x.session)) {
                throw Error(ErrorCode::invalid_argument, "\"" + *x.session + "\" is not a usable session id");
              }
              if (c.plan.find(*x.session) != nullptr) {
                throw Error(ErrorCode::conflict, "session " + *x.session + " already exists");
              }
              t.session_id = *x.session;
            } else {
              t.session_id = next_free_id(
                  "s", [&](const std::string& id) { return c.plan.find(id) != nullptr; });
            }
            require_unique_title(c.plan, x.title);
            if (x.key_points.empty()) {
              throw Error(ErrorCode::invalid_argument, "a session needs at least one key point");
            }
            for (const auto& kp : x.key_points) require_text(kp, "key point");
            t.title = x.title;
            t.key_points = x.key_points;
            const auto at = x.index.value_or(c.plan.sessions.size());
            if (at > c.plan.sessions.size()) {
              throw Error(ErrorCode::invalid_argument, "topic index out of range");
            }
            t.ordinal = static_cast<int>(at) + 1;
            return {patch::Topic{at, std::nullopt, t}};
          },
          [&](const cmd::DeleteTopic& x) -> std::vector<Patch> {
            const auto idx = topic_index(c.plan, x.session);
            if (c.plan.sessions.size() == 1) {
              throw Error(ErrorCode::conflict, "the plan must keep at least one session");
            }
            std::vector<Patch> out;
            if (auto it = c.fsms.find(x.session); it != c.fsms.end()) {
              out.push_back(patch::Fsm{x.session, it->second, std::nullopt});
            }
            out.push_back(patch::Topic{idx, c.plan.sessions[idx], std::nullopt});
            return out;
          },
          [&](const cmd::RenameTopic& x) -> std::vector<Patch> {
            const auto idx = topic_index(c.plan, x.session);
            require_unique_title(c.plan, x.title, idx);
            SessionTopic t = c.plan.sessions[idx];
            t.title = x.title;
            return {patch::Topic{idx, c.plan.sessions[idx], t}};
          },
          [&](const cmd::AcceptSuggestion& x) -> std::vector<Patch> {
            const auto& fsm = fsm_for(c, x.session);
            const auto i = state_index(fsm, x.state);
            require_label(fsm.states[i], x.label);
            if (x.target) {
              require_target(fsm, *x.target);
              DialogueState s = fsm.states[i];
              s.options.push_back({"", x.label, *x.target});
              return {replace(fsm, i, std::move(s))};
            }
            const std::string utterance = x.stub_utterance.value_or(std::string(kStubUtterance));
            require_text(utterance, "utterance");
            return wire_new_state(fsm, i, new_state_id(fsm, x.stub_state), utterance, x.label);
          },
          [&](const cmd::InstallPlan& x) -> std::vector<Patch> {
            SessionPlan plan = x.plan;
            plan.renumber();
            const auto issues = check_plan(plan);
            if (!issues.empty()) {
              std::vector<std::string> details;
              for (const auto& i : issues) details.push_back(i.message);
              throw Error(ErrorCode::invalid_argument, "plan is not well-formed", details);
            }
            std::vector<Patch> out;
            for (const auto& [sid, fsm] : c.fsms) {
              if (plan.find(sid) == nullptr) out.push_back(patch::Fsm{sid, fsm, std::nullopt});
            }
            out.push_back(patch::Plan{c.plan, std::move(plan)});
            return out;
          },
          [&](const cmd::InstallFsm& x) -> std::vector<Patch> {
            if (c.plan.find(x.fsm.session_id) == nullptr) {
              throw Error(ErrorCode::unknown_target,
                          "no session " + x.fsm.session_id + " in the plan");
            }
            DialogueFsm fsm = x.fsm;
            normalize_option_ids(fsm);
            std::optional<DialogueFsm> before;
            if (auto it = c.fsms.find(fsm.session_id); it != c.fsms.end()) before = it->second;
            return {patch::Fsm{fsm.session_id, std::move(before), std::move(fsm)}};
          },
      },
      command);
}

std::set<std::string> touched_sessions(const std::vector<Patch>& patches) {
  std::set<std::string> out;
  for (const auto& p : patches) {
    if (auto* s = std::get_if<patch::State>(&p)) out.insert(s->session);
    if (auto* e = std::get_if<patch::Entry>(&p)) out.insert(e->session);
    if (auto* f = std::get_if<patch::Fsm>(&p)) out.insert(f->session);
  }
  return out;
}

}  // namespace

std::vector<Patch> compile(const EditCommand& command, const ProjectContent& content) {
  auto patches = compile_raw(command, content);
  ProjectContent next = content;
  apply_patches(next, patches);
  for (const auto& sid : touched_sessions(patches)) {
    auto it = next.fsms.find(sid);
    if (it == next.fsms.end()) continue;
    const auto report = validate_fsm(it->second);
    if (report.ok()) continue;
    std::vector<std::string> details;
    for (const auto& d : report.defects) details.push_back(d.where() + ": " + d.message);
    if (report.count(DefectKind::unreachable_state) == report.defects.size()) {
      throw Error(ErrorCode::would_orphan_state,
                  "the edit would leave states of " + sid + " unreachable", details);
    }
    throw Error(ErrorCode::invalid_fsm, "the edit would leave " + sid + " invalid", details);
  }
  return patches;
}

std::vector<std::string> EditHistory::hash_trail() const {
  std::vector<std::string> out;
  out.reserve(applied.size());
  for (const auto& e : applied) out.push_back(e.hash);
  return out;
}

std::size_t revision_count(const EditHistory& history) {
  const std::size_t n = std::min(history.cursor, history.applied.size());
  // hashes[k] is the content after k commands; hashes[0] the base.
  std::vector<const std::string*> hashes{&history.base_hash};
  for (std::size_t k = 0; k < n; ++k) hashes.push_back(&history.applied[k].hash);

  // A recurrence hashes[i] == hashes[j] (i < j) reverts commands i..j-1
  // (0-based). The earliest i per hash value covers every other pair.
  std::unordered_map<std::string_view, std::size_t> first;
  std::vector<long> cover(n + 1, 0);
  for (std::size_t j = 0; j < hashes.size(); ++j) {
    auto [it, fresh] = first.emplace(*hashes[j], j);
    if (!fresh) {
      ++cover[it->second];
      --cover[j];
    }
  }
  std::size_t count = 0;
  long depth = 0;
  for (std::size_t k = 0; k < n; ++k) {
    depth += cover[k];
    if (depth == 0 && counts_as_revision(kind_of(history.applied[k].command))) ++count;
  }
  return count;
}

nlohmann::json log_event_to_json(const LogEvent& event) {
  nlohmann::json j;
  switch (event.op) {
    case LogEvent::Op::apply:
      j["op"] = "apply";
      j["command"] = command_to_json(event.entry->command);
      j["forward"] = patches_to_json(event.entry->forward);
      j["inverse"] = patches_to_json(event.entry->inverse);
      break;
    case LogEvent::Op::undo:
      j["op"] = "undo";
      break;
    case LogEvent::Op::redo:
      j["op"] = "redo";
      break;
  }
  j["hash"] = event.hash;
  return j;
}

LogEvent log_event_from_json(const nlohmann::json& j) {
  LogEvent e;
  try {
    const auto op = j.at("op").get<std::string>();
    e.hash = j.at("hash").get<std::string>();
    if (op == "apply") {
      e.op = LogEvent::Op::apply;
      e.entry = HistoryEntry{command_from_json(j.at("command")), patches_from_json(j.at("forward")),
                             patches_from_json(j.at("inverse")), e.hash};
    } else if (op == "undo") {
      e.op = LogEvent::Op::undo;
    } else if (op == "redo") {
      e.op = LogEvent::Op::redo;
    } else {
      throw Error(ErrorCode::storage, "unknown log op " + op);
    }
  } catch (const nlohmann::json::exception& ex) {
    throw Error(ErrorCode::storage, std::string("malformed edit log line: ") + ex.what());
  }
  return e;
}

Editor::Editor(ProjectContent content)
    : content_(std::move(content)), hash_(content_hash(content_)) {
  history_.base_hash = hash_;
}

LogEvent Editor::apply(const EditCommand& command) {
  HistoryEntry entry{command, compile(command, content_), {}, {}};
  entry.inverse = invert(entry.forward);
  apply_patches(content_, entry.forward);
  hash_ = content_hash(content_);
  entry.hash = hash_;
  history_.applied.resize(history_.cursor, entry);
  history_.applied.push_back(entry);
  ++history_.cursor;
  return {LogEvent::Op::apply, std::move(entry), hash_};
}

LogEvent Editor::undo() {
  if (!can_undo()) throw Error(ErrorCode::nothing_to_undo, "nothing to undo");
  apply_patches(content_, history_.applied[history_.cursor - 1].inverse);
  --history_.cursor;
  hash_ = content_hash(content_);
  const auto& expected =
      history_.cursor == 0 ? history_.base_hash : history_.applied[history_.cursor - 1].hash;
  if (hash_ != expected) throw Error(ErrorCode::storage, "undo diverged from the hash trail");
  return {LogEvent::Op::undo, std::nullopt, hash_};
}

LogEvent Editor::redo() {
  if (!can_redo()) throw Error(ErrorCode::nothing_to_redo, "nothing to redo");
  const auto& entry = history_.applied[history_.cursor];
  apply_patches(content_, entry.forward);
  ++history_.cursor;
  hash_ = content_hash(content_);
  if (hash_ != entry.hash) throw Error(ErrorCode::storage, "redo diverged from the hash trail");
  return {LogEvent::Op::redo, std::nullopt, hash_};
}

void Editor::replay(const LogEvent& event) {
  switch (event.op) {
    case LogEvent::Op::apply: {
      if (!event.entry) throw Error(ErrorCode::storage, "apply event without a command");
      apply_patches(content_, event.entry->forward);
      hash_ = content_hash(content_);
      if (hash_ != event.hash) throw Error(ErrorCode::storage, "edit log hash mismatch");
      history_.applied.resize(history_.cursor, *event.entry);
      history_.applied.push_back(*event.entry);
      ++history_.cursor;
      return;
    }
    case LogEvent::Op::undo:
      undo();
      break;
    case LogEvent::Op::redo:
      redo();
      break;
  }
  if (hash_ != event.hash) throw Error(ErrorCode::storage, "edit log hash mismatch");
}

}  // namespace hdfsm
