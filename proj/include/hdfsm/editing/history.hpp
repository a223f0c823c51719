#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "hdfsm/core/error.hpp"
#include "hdfsm/core/model.hpp"
#include "hdfsm/editing/command.hpp"
#include "hdfsm/editing/patch.hpp"

namespace hdfsm {

// Checks the command against `content` and returns the patches that carry
// it out. The result leaves every FSM valid and the plan well-formed.
// Errors: unknown-target, would-orphan-entry, would-orphan-state,
// duplicate-label, duplicate-topic, conflict, invalid-argument, invalid-fsm.
std::vector<Patch> compile(const EditCommand& command, const ProjectContent& content);

struct HistoryEntry {
  EditCommand command;
  std::vector<Patch> forward;
  std::vector<Patch> inverse;
  std::string hash;  // content hash after the command
};

// Linear undo/redo over applied commands. Entries past the cursor are the
// redo branch and are dropped by the next apply.
struct EditHistory {
  std::string base_hash;
  std::vector<HistoryEntry> applied;
  std::size_t cursor = 0;

  std::vector<std::string> hash_trail() const;
};

// Counted commands in effect (before the cursor), minus every command that
// lies inside a span whose end hash equals an earlier hash.
std::size_t revision_count(const EditHistory& history);

// One line of the append-only edit log.
struct LogEvent {
  enum class Op { apply, undo, redo } op = Op::apply;
  std::optional<HistoryEntry> entry;  // for apply
  std::string hash;                   // content hash after the event
};

nlohmann::json log_event_to_json(const LogEvent& event);
LogEvent log_event_from_json(const nlohmann::json& j);

class Editor {
 public:
  explicit Editor(ProjectContent content = {});

  const ProjectContent& content() const noexcept { return content_; }
  const EditHistory& history() const noexcept { return history_; }
  const std::string& hash() const noexcept { return hash_; }

  // Each returns the event to append to the log.
  LogEvent apply(const EditCommand& command);
  LogEvent undo();
  LogEvent redo();

  bool can_undo() const noexcept { return history_.cursor > 0; }
  bool can_redo() const noexcept { return history_.cursor < history_.applied.size(); }
  std::size_t revision_count() const { return hdfsm::revision_count(history_); }

  // Re-executes a logged event; verifies the recorded hash.
  void replay(const LogEvent& event);

 private:
  ProjectContent content_;
  EditHistory history_;
  std::string hash_;
};

}  // namespace hdfsm
