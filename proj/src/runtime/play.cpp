#include "hdfsm/runtime/play.hpp"

#include <algorithm>
#include <ctime>

#include <nlohmann/json.hpp>

#include "hdfsm/core/validate.hpp"

namespace hdfsm {

namespace {

std::string utc_now() {
  const std::time_t t = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void enter(PlaySession& play, const DialogueState& s) {
  play.current = Target::state(s.state_id);
  play.transcript.push_back({s.state_id, s.utterance, std::nullopt});
  play.finished = s.options.empty();
}

}  // namespace

std::vector<std::string> PlaySession::options() const {
  std::vector<std::string> out;
  if (finished || current.is_end()) return out;
  for (const auto& o : fsm->find(current.state_id())->options) out.push_back(o.label);
  return out;
}

PlaySession start(std::shared_ptr<const DialogueFsm> fsm) {
  if (!fsm) throw Error(ErrorCode::not_found, "no dialogue to play");
  const auto report = validate_fsm(*fsm);
  if (!report.ok()) {
    std::vector<std::string> details;
    for (const auto& d : report.defects) details.push_back(d.where() + ": " + d.message);
    throw Error(ErrorCode::invalid_fsm, "dialogue " + fsm->session_id + " does not validate",
                details);
  }
  PlaySession play;
  play.fsm = std::move(fsm);
  enter(play, *play.fsm->entry_state());
  return play;
}

void choose(PlaySession& play, std::size_t option_index) {
  if (play.finished) throw Error(ErrorCode::already_finished, "the conversation has ended");
  const DialogueState* s = play.fsm->find(play.current.state_id());
  if (option_index >= s->options.size()) {
    throw Error(ErrorCode::out_of_range, "option " + std::to_string(option_index) +
                                             " out of range; state " + s->state_id + " offers " +
                                             std::to_string(s->options.size()));
  }
  const auto& opt = s->options[option_index];
  play.transcript.back().chosen = opt.label;
  if (opt.target.is_end()) {
    play.current = Target::end();
    play.finished = true;
    return;
  }
  enter(play, *play.fsm->find(opt.target.state_id()));
}

std::vector<PlayPath> enumerate_paths(const DialogueFsm& fsm, std::size_t max_steps) {
  std::vector<PlayPath> out;
  const DialogueState* entry = fsm.entry_state();
  if (entry == nullptr) return out;

  struct Frame {
    const DialogueState* state;
    std::size_t next = 0;
  };
  // Invariant at the loop head: one transcript entry per frame, one choice
  // per frame below the top.
  PlayPath cur;
  std::vector<Frame> stack;
  auto enter_state = [&](const DialogueState* s) {
    cur.transcript.push_back({s->state_id, s->utterance, std::nullopt});
    if (!s->options.empty() && cur.choices.size() < max_steps) {
      stack.push_back({s, 0});
      return true;
    }
    out.push_back(cur);
    out.back().truncated = !s->options.empty();
    cur.transcript.pop_back();
    return false;
  };
  auto undo_choice = [&] {
    cur.choices.pop_back();
    cur.transcript.back().chosen.reset();
  };

  enter_state(entry);
  while (!stack.empty()) {
    Frame& f = stack.back();
    if (f.next == f.state->options.size()) {
      stack.pop_back();
      cur.transcript.pop_back();
      if (!stack.empty()) undo_choice();
      continue;
    }
    const auto i = f.next++;
    const auto& opt = f.state->options[i];
    cur.choices.push_back(i);
    cur.transcript.back().chosen = opt.label;
    if (opt.target.is_end()) {
      out.push_back(cur);
      undo_choice();
    } else if (!enter_state(fsm.find(opt.target.state_id()))) {
      undo_choice();
    }
  }
  return out;
}

std::string transcript_jsonl(const std::vector<TranscriptEntry>& transcript) {
  std::string out;
  for (const auto& e : transcript) {
    out += nlohmann::json{{"speaker", "agent"}, {"text", e.utterance}, {"state_id", e.state_id}}
               .dump(-1, ' ', false, nlohmann::json::error_handler_t::replace);
    out += '\n';
    if (e.chosen) {
      out += nlohmann::json{{"speaker", "patient"}, {"text", *e.chosen}, {"state_id", e.state_id}}
                 .dump(-1, ' ', false, nlohmann::json::error_handler_t::replace);
      out += '\n';
    }
  }
  return out;
}

std::string_view to_string(Progress p) {
  switch (p) {
    case Progress::not_started: return "not-started";
    case Progress::in_progress: return "in-progress";
    case Progress::completed: return "completed";
  }
  return "not-started";
}

ProgressLedger::ProgressLedger(std::vector<std::string> session_order, bool free_order)
    : order_(std::move(session_order)), free_order_(free_order) {
  for (const auto& sid : order_) records_[sid];
}

void ProgressLedger::reorder(std::vector<std::string> session_order) {
  std::map<std::string, Record> next;
  for (const auto& sid : session_order) {
    auto it = records_.find(sid);
    next[sid] = it == records_.end() ? Record{} : it->second;
  }
  order_ = std::move(session_order);
  records_ = std::move(next);
}

Progress ProgressLedger::status(const std::string& session_id) const {
  auto it = records_.find(session_id);
  if (it == records_.end()) throw Error(ErrorCode::not_found, "no session " + session_id);
  return it->second.status;
}

bool ProgressLedger::unlocked(const std::string& session_id) const {
  status(session_id);
  if (free_order_) return true;
  for (const auto& sid : order_) {
    if (sid == session_id) return true;
    if (records_.at(sid).status != Progress::completed) return false;
  }
  return false;
}

void ProgressLedger::mark_started(const std::string& session_id) {
  if (!unlocked(session_id)) {
    throw Error(ErrorCode::session_locked, "session " + session_id + " unlocks after earlier sessions");
  }
  auto& r = records_.at(session_id);
  if (r.status == Progress::not_started) {
    r.status = Progress::in_progress;
    r.started_at = utc_now();
  }
}

void ProgressLedger::mark_completed(const std::string& session_id, const PlaySession& play) {
  if (!play.finished || !play.fsm || play.fsm->session_id != session_id) {
    throw Error(ErrorCode::conflict, "completion needs a finished play of " + session_id);
  }
  mark_started(session_id);
  auto& r = records_.at(session_id);
  if (r.status != Progress::completed) {
    r.status = Progress::completed;
    r.completed_at = utc_now();
  }
}

}  // namespace hdfsm
