#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "hdfsm/core/model.hpp"

namespace hdfsm {

enum class CommandKind {
  edit_utterance,
  add_state,
  delete_state,
  add_option,
  edit_option_label,
  delete_option,
  connect_option,
  set_entry,
  reorder_topics,
  add_topic,
  delete_topic,
  rename_topic,
  accept_suggestion,
  install_plan,
  install_fsm,
};

std::string_view to_string(CommandKind kind);
std::optional<CommandKind> command_kind_from_string(std::string_view s);

// Whether a command of this kind is an authored content change for the
// revision count. Transition wiring, topic order, entry moves and
// generator installs are not.
bool counts_as_revision(CommandKind kind);

namespace cmd {

struct EditUtterance {
  std::string session, state, text;
};
// The new state arrives already wired: `from_state` gains an option `label`
// leading to it. Without `state`, an id "s<n>" is picked.
struct AddState {
  std::string session;
  std::optional<std::string> state;
  std::string utterance, from_state, label;
};
struct DeleteState {
  std::string session, state;
};
struct AddOption {
  std::string session, state, label;
  Target target;
};
struct EditOptionLabel {
  std::string session, state, option, label;
};
struct DeleteOption {
  std::string session, state, option;
};
struct ConnectOption {
  std::string session, state, option;
  Target target;
};
struct SetEntry {
  std::string session, state;
};
struct ReorderTopics {
  std::vector<std::string> order;
};
struct AddTopic {
  std::optional<std::string> session;
  std::string title;
  std::vector<std::string> key_points;
  std::optional<std::size_t> index;  // default: append
};
struct DeleteTopic {
  std::string session;
};
struct RenameTopic {
  std::string session, title;
};
// A suggested reply becomes an option. With no target it leads to a new
// terminal stub state whose utterance the author still has to write.
struct AcceptSuggestion {
  std::string session, state, label;
  std::optional<Target> target;
  std::optional<std::string> stub_state;
  std::optional<std::string> stub_utterance;
};
struct InstallPlan {
  SessionPlan plan;
};
struct InstallFsm {
  DialogueFsm fsm;
};

}  // namespace cmd

using EditCommand =
    std::variant<cmd::EditUtterance, cmd::AddState, cmd::DeleteState, cmd::AddOption,
                 cmd::EditOptionLabel, cmd::DeleteOption, cmd::ConnectOption, cmd::SetEntry,
                 cmd::ReorderTopics, cmd::AddTopic, cmd::DeleteTopic, cmd::RenameTopic,
                 cmd::AcceptSuggestion, cmd::InstallPlan, cmd::InstallFsm>;

CommandKind kind_of(const EditCommand& command);

inline constexpr std::string_view kStubUtterance = "(write what the agent says here)";

// {"kind": "edit-utterance", "session": ..., ...}. Parsing throws
// hdfsm::Error(invalid_argument) on unknown kinds or missing fields.
nlohmann::json command_to_json(const EditCommand& command);
EditCommand command_from_json(const nlohmann::json& j);

}  // namespace hdfsm
