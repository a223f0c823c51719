#pragma once

#include <string>
#include <string_view>

#include "hdfsm/core/model.hpp"
#include "hdfsm/markup/document.hpp"

namespace hdfsm::markup {

// Parses the planner contract:
//   {"sessions":[{"id":"s1","topic":"...","key_points":["..."]}, ...]}
// Ordinals follow array order. An optional top-level "revision_note" string
// is accepted. Never throws; every violated rule becomes a ParseError.
ParseResult<SessionPlan> parse_session_plan_json(std::string_view text);

// Pretty-printed form of the same contract (2-space indent, trailing newline).
std::string serialize_session_plan_json(const SessionPlan& plan);

}  // namespace hdfsm::markup
