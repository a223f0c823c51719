#include "hdfsm/markup/plan_json.hpp"

#include <nlohmann/json.hpp>

#include "hdfsm/core/json_io.hpp"
#include "hdfsm/core/validate.hpp"

namespace hdfsm::markup {

namespace {

using nlohmann::json;

ParseError at_offset(std::string_view text, std::size_t offset, ParseErrorKind kind,
                     std::string message) {
  if (text.empty()) return ParseError{1, 1, kind, std::move(message)};
  if (offset >= text.size()) offset = text.size() - 1;
  // A trailing newline is not a position of its own.
  while (offset > 0 && text[offset] == '\n') --offset;
  std::size_t line = 1;
  std::size_t line_start = 0;
  for (std::size_t i = 0; i < offset; ++i) {
    if (text[i] == '\n') {
      ++line;
      line_start = i + 1;
    }
  }
  return ParseError{line, offset - line_start + 1, kind, std::move(message)};
}

ParseErrorKind kind_for(PlanViolation v) {
  switch (v) {
    case PlanViolation::no_sessions: return ParseErrorKind::missing_field;
    case PlanViolation::bad_ordinals: return ParseErrorKind::malformed_container;
    case PlanViolation::empty_title: return ParseErrorKind::missing_field;
    case PlanViolation::empty_key_points: return ParseErrorKind::empty_key_points;
    case PlanViolation::duplicate_topic: return ParseErrorKind::duplicate_topic;
    case PlanViolation::invalid_identifier: return ParseErrorKind::invalid_identifier;
    case PlanViolation::duplicate_id: return ParseErrorKind::duplicate_id;
  }
  return ParseErrorKind::malformed_container;
}

}  // namespace

ParseResult<SessionPlan> parse_session_plan_json(std::string_view text) {
  ParseResult<SessionPlan> result;
  auto fail = [&](ParseErrorKind kind, std::string message) {
    result.errors.push_back(at_offset(text, 0, kind, std::move(message)));
  };

  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    const std::size_t offset = e.byte > 0 ? e.byte - 1 : 0;
    result.errors.push_back(at_offset(text, offset, ParseErrorKind::malformed_container,
                                      "invalid JSON: " + std::string(e.what())));
    return result;
  }

  if (!root.is_object()) {
    fail(ParseErrorKind::malformed_container, "plan must be a JSON object");
    return result;
  }
  auto sessions = root.find("sessions");
  if (sessions == root.end()) {
    fail(ParseErrorKind::missing_field, "missing field 'sessions'");
    return result;
  }
  if (!sessions->is_array()) {
    fail(ParseErrorKind::malformed_container, "'sessions' must be an array");
    return result;
  }

  SessionPlan plan;
  if (auto note = root.find("revision_note"); note != root.end() && !note->is_null()) {
    if (note->is_string()) {
      plan.revision_note = note->get<std::string>();
    } else {
      fail(ParseErrorKind::malformed_container, "'revision_note' must be a string");
    }
  }

  for (std::size_t i = 0; i < sessions->size(); ++i) {
    const json& entry = (*sessions)[i];
    const std::string where = "sessions[" + std::to_string(i) + "]";
    if (!entry.is_object()) {
      fail(ParseErrorKind::malformed_container, where + " must be an object");
      continue;
    }
    SessionTopic topic;
    topic.ordinal = static_cast<int>(i + 1);
    bool complete = true;
    auto string_field = [&](const char* name, std::string& out) {
      auto it = entry.find(name);
      if (it == entry.end()) {
        fail(ParseErrorKind::missing_field, where + " is missing '" + name + "'");
        complete = false;
      } else if (!it->is_string()) {
        fail(ParseErrorKind::malformed_container, where + "." + name + " must be a string");
        complete = false;
      } else {
        out = it->get<std::string>();
      }
    };
    string_field("id", topic.session_id);
    string_field("topic", topic.title);
    auto points = entry.find("key_points");
    if (points == entry.end()) {
      fail(ParseErrorKind::missing_field, where + " is missing 'key_points'");
      complete = false;
    } else if (!points->is_array()) {
      fail(ParseErrorKind::malformed_container, where + ".key_points must be an array");
      complete = false;
    } else {
      for (const auto& p : *points) {
        if (!p.is_string()) {
          fail(ParseErrorKind::malformed_container, where + ".key_points must hold strings");
          complete = false;
          break;
        }
        topic.key_points.push_back(p.get<std::string>());
      }
    }
    if (complete) plan.sessions.push_back(std::move(topic));
  }
  if (!result.errors.empty()) return result;

  for (const auto& issue : check_plan(plan)) {
    fail(kind_for(issue.violation),
         "sessions[" + std::to_string(issue.session_index) + "]: " + issue.message);
  }
  if (result.errors.empty()) result.value = std::move(plan);
  return result;
}

std::string serialize_session_plan_json(const SessionPlan& plan) {
  const json j = plan;
  return j.dump(2) + "\n";
}

}  // namespace hdfsm::markup
