#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace hdfsm {

inline constexpr std::size_t kDefaultMaterialCap = 200'000;

// The reserved sink name used in markup and JSON for "conversation ends".
inline constexpr std::string_view kEndName = "END";

// Lowercase ASCII letters, digits and '-', starting with a letter or digit.
bool is_valid_identifier(std::string_view id);

enum class MaterialSource { pasted, imported_file };

std::string_view to_string(MaterialSource source);
std::optional<MaterialSource> material_source_from_string(std::string_view s);

struct Material {
  std::string id;
  std::string title;
  std::string body;
  MaterialSource source = MaterialSource::pasted;
  std::optional<std::string> imported_name;

  friend bool operator==(const Material&, const Material&) = default;
};

struct SessionTopic {
  std::string session_id;
  int ordinal = 0;
  std::string title;
  std::vector<std::string> key_points;

  friend bool operator==(const SessionTopic&, const SessionTopic&) = default;
};

struct SessionPlan {
  std::vector<SessionTopic> sessions;
  std::optional<std::string> revision_note;

  const SessionTopic* find(std::string_view session_id) const;
  // Rewrites ordinals to 1..n in list order.
  void renumber();

  friend bool operator==(const SessionPlan&, const SessionPlan&) = default;
};

// Where a response option leads: a state in the same FSM, or END.
class Target {
 public:
  Target() = default;  // END
  static Target end() { return Target{}; }
  static Target state(std::string id) { return Target{std::move(id)}; }
  // "END" maps to the sink, anything else to a state reference.
  static Target parse(std::string_view text);

  bool is_end() const noexcept { return state_.empty(); }
  const std::string& state_id() const noexcept { return state_; }
  std::string str() const { return is_end() ? std::string(kEndName) : state_; }

  friend bool operator==(const Target&, const Target&) = default;

 private:
  explicit Target(std::string id) : state_(std::move(id)) {}
  std::string state_;
};

struct ResponseOption {
  std::string option_id;
  std::string label;
  Target target;

  friend bool operator==(const ResponseOption&, const ResponseOption&) = default;
};

// Uninterpreted `TAG key=value` annotation; value is kept as written.
struct StateTag {
  std::string key;
  std::string value;

  friend bool operator==(const StateTag&, const StateTag&) = default;
};

struct DialogueState {
  std::string state_id;
  std::string utterance;
  std::vector<ResponseOption> options;
  bool is_entry = false;
  std::vector<StateTag> tags;

  bool is_terminal() const noexcept { return options.empty(); }
  const ResponseOption* find_option(std::string_view option_id) const;

  friend bool operator==(const DialogueState&, const DialogueState&) = default;
};

// States keep their authoring order; ids are unique within the FSM.
struct DialogueFsm {
  std::string session_id;
  std::vector<DialogueState> states;
  std::string entry;

  const DialogueState* find(std::string_view state_id) const;
  DialogueState* find(std::string_view state_id);
  std::optional<std::size_t> index_of(std::string_view state_id) const;
  const DialogueState* entry_state() const { return find(entry); }

  friend bool operator==(const DialogueFsm&, const DialogueFsm&) = default;
};

// Option ids are positional ("o1", "o2", ...) within their state.
std::string option_id_for(std::size_t index);
void normalize_option_ids(DialogueState& state);
void normalize_option_ids(DialogueFsm& fsm);

// Equality that ignores option ids.
bool structurally_equal(const DialogueFsm& a, const DialogueFsm& b);

// Smallest "<prefix><n>" (n >= 1) not already taken.
template <typename Taken>
std::string next_free_id(std::string_view prefix, const Taken& taken) {
  for (std::size_t n = 1;; ++n) {
    std::string candidate = std::string(prefix) + std::to_string(n);
    if (!taken(candidate)) return candidate;
  }
}

// The mutable part of a project: everything the content hash covers.
struct ProjectContent {
  SessionPlan plan;
  std::map<std::string, DialogueFsm> fsms;

  friend bool operator==(const ProjectContent&, const ProjectContent&) = default;
};

}  // namespace hdfsm
