#include "hdfsm/core/error.hpp"

namespace hdfsm {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::invalid_argument: return "invalid-argument";
    case ErrorCode::not_found: return "not-found";
    case ErrorCode::conflict: return "conflict";
    case ErrorCode::unknown_target: return "unknown-target";
    case ErrorCode::would_orphan_entry: return "would-orphan-entry";
    case ErrorCode::would_orphan_state: return "would-orphan-state";
    case ErrorCode::duplicate_label: return "duplicate-label";
    case ErrorCode::duplicate_topic: return "duplicate-topic";
    case ErrorCode::nothing_to_undo: return "nothing-to-undo";
    case ErrorCode::nothing_to_redo: return "nothing-to-redo";
    case ErrorCode::invalid_fsm: return "invalid-fsm";
    case ErrorCode::invalid_structured_output: return "invalid-structured-output";
    case ErrorCode::empty_dialogue: return "empty-dialogue";
    case ErrorCode::no_novel_options: return "no-novel-options";
    case ErrorCode::provider_unreachable: return "provider-unreachable";
    case ErrorCode::out_of_range: return "out-of-range";
    case ErrorCode::already_finished: return "already-finished";
    case ErrorCode::session_locked: return "session-locked";
    case ErrorCode::unsupported_media: return "unsupported-media";
    case ErrorCode::payload_too_large: return "payload-too-large";
    case ErrorCode::storage: return "storage";
    case ErrorCode::unauthorized: return "unauthorized";
  }
  return "unknown";
}

}  // namespace hdfsm
