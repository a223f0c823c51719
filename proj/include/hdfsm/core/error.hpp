#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace hdfsm {

enum class ErrorCode {
  invalid_argument,
  not_found,
  conflict,
  unknown_target,
  would_orphan_entry,
  would_orphan_state,
  duplicate_label,
  duplicate_topic,
  nothing_to_undo,
  nothing_to_redo,
  invalid_fsm,
  invalid_structured_output,
  empty_dialogue,
  no_novel_options,
  provider_unreachable,
  out_of_range,
  already_finished,
  session_locked,
  unsupported_media,
  payload_too_large,
  storage,
  unauthorized,
};

std::string_view to_string(ErrorCode code);

// Engine-level failure. `details` carries structured extras (parse errors,
// exchange summaries) as preformatted lines.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message,
        std::vector<std::string> details = {})
      : std::runtime_error(message), code_(code), details_(std::move(details)) {}

  ErrorCode code() const noexcept { return code_; }
  const std::vector<std::string>& details() const noexcept { return details_; }

 private:
  ErrorCode code_;
  std::vector<std::string> details_;
};

}  // namespace hdfsm
