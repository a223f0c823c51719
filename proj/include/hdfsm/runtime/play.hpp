#pragma once

#include <cstddef>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "hdfsm/core/error.hpp"
#include "hdfsm/core/model.hpp"

namespace hdfsm {

// One agent turn and the reply the patient picked, if any yet.
struct TranscriptEntry {
  std::string state_id;
  std::string utterance;
  std::optional<std::string> chosen;

  friend bool operator==(const TranscriptEntry&, const TranscriptEntry&) = default;
};

struct PlaySession {
  std::shared_ptr<const DialogueFsm> fsm;  // immutable snapshot
  Target current;                          // END once an option leads there
  std::vector<TranscriptEntry> transcript;
  bool finished = false;

  // Labels offered now; empty once finished.
  std::vector<std::string> options() const;
};

// Positions at the entry and emits its utterance. Throws invalid_fsm if the
// FSM does not validate.
PlaySession start(std::shared_ptr<const DialogueFsm> fsm);

// Errors: already-finished, out-of-range.
void choose(PlaySession& play, std::size_t option_index);

struct PlayPath {
  std::vector<std::size_t> choices;
  std::vector<TranscriptEntry> transcript;
  bool truncated = false;  // cut at max_steps with options still open
};

inline constexpr std::size_t kDefaultMaxSteps = 50;

// Every distinct choice sequence from the entry, up to `max_steps` choices,
// in depth-first option order.
std::vector<PlayPath> enumerate_paths(const DialogueFsm& fsm,
                                      std::size_t max_steps = kDefaultMaxSteps);

// JSON lines {"speaker":"agent"|"patient","text":...,"state_id":...}.
std::string transcript_jsonl(const std::vector<TranscriptEntry>& transcript);

enum class Progress { not_started, in_progress, completed };

std::string_view to_string(Progress p);

// Per-project session progress. Statuses only move forward.
class ProgressLedger {
 public:
  // Sessions unlock in the given order unless `free_order`.
  ProgressLedger(std::vector<std::string> session_order, bool free_order = false);

  Progress status(const std::string& session_id) const;
  bool unlocked(const std::string& session_id) const;
  // Errors: not-found, session-locked.
  void mark_started(const std::string& session_id);
  // Requires a finished play of that session.
  void mark_completed(const std::string& session_id, const PlaySession& play);

  // Adopts a new session list; sessions that stay keep their records.
  void reorder(std::vector<std::string> session_order);

  struct Record {
    Progress status = Progress::not_started;
    std::string started_at, completed_at;
  };
  const std::map<std::string, Record>& records() const noexcept { return records_; }
  const std::vector<std::string>& order() const noexcept { return order_; }

 private:
  std::vector<std::string> order_;
  bool free_order_;
  std::map<std::string, Record> records_;
};

}  // namespace hdfsm
