#include "hdfsm/markup/document.hpp"

#include <algorithm>

namespace hdfsm::markup {

const Dialogue* MarkupDocument::find(std::string_view session_id) const {
  auto it = std::find_if(dialogues.begin(), dialogues.end(),
                         [&](const Dialogue& d) { return d.fsm.session_id == session_id; });
  return it == dialogues.end() ? nullptr : &*it;
}

bool structurally_equal(const MarkupDocument& a, const MarkupDocument& b) {
  if (a.header != b.header || a.dialogues.size() != b.dialogues.size()) return false;
  for (std::size_t i = 0; i < a.dialogues.size(); ++i) {
    if (a.dialogues[i].title != b.dialogues[i].title) return false;
    if (!hdfsm::structurally_equal(a.dialogues[i].fsm, b.dialogues[i].fsm)) return false;
  }
  return true;
}

std::string_view to_string(ParseErrorKind kind) {
  switch (kind) {
    case ParseErrorKind::syntax: return "syntax";
    case ParseErrorKind::duplicate_state: return "duplicate-state";
    case ParseErrorKind::dangling_target: return "dangling-target";
    case ParseErrorKind::missing_entry: return "missing-entry";
    case ParseErrorKind::bad_escape: return "bad-escape";
    case ParseErrorKind::unsupported_version: return "unsupported-version";
    case ParseErrorKind::multiple_entry: return "multiple-entry";
    case ParseErrorKind::unreachable_state: return "unreachable-state";
    case ParseErrorKind::duplicate_option_label: return "duplicate-option-label";
    case ParseErrorKind::empty_utterance: return "empty-utterance";
    case ParseErrorKind::empty_label: return "empty-label";
    case ParseErrorKind::duplicate_dialogue: return "duplicate-dialogue";
    case ParseErrorKind::malformed_container: return "malformed-container";
    case ParseErrorKind::missing_field: return "missing-field";
    case ParseErrorKind::duplicate_topic: return "duplicate-topic";
    case ParseErrorKind::empty_key_points: return "empty-key-points";
    case ParseErrorKind::invalid_identifier: return "invalid-identifier";
    case ParseErrorKind::duplicate_id: return "duplicate-id";
  }
  return "unknown";
}

std::string ParseError::str() const {
  return std::to_string(line) + ":" + std::to_string(column) + ": " +
         std::string(to_string(kind)) + ": " + message;
}

std::string format_errors(const std::vector<ParseError>& errors) {
  std::string out;
  for (const auto& e : errors) {
    out += e.str();
    out += '\n';
  }
  return out;
}

}  // namespace hdfsm::markup
