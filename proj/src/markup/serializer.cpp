#include "hdfsm/markup/serializer.hpp"

#include <set>

#include "hdfsm/core/error.hpp"
#include "hdfsm/core/validate.hpp"
#include "lexer.hpp"

namespace hdfsm::markup {

std::string quote(std::string_view s) {
  std::string out;
  out.reserve(s.size() + 2);
  out.push_back('"');
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      case '\r': out += "\\r"; break;
      default: out.push_back(c);
    }
  }
  out.push_back('"');
  return out;
}

namespace {

// A TAG value must re-lex to itself: either a complete quoted string or a
// bare run without blanks, quotes or '#'.
bool printable_tag_value(std::string_view value) {
  if (value.empty() || value.find_first_of("\t\n\r") != std::string_view::npos) return false;
  if (value.front() == '"') {
    std::string decoded;
    std::size_t end = 0;
    ParseError error;
    return detail::scan_string(value, 0, 1, decoded, end, error) && end == value.size();
  }
  return value.find_first_of(" \"#") == std::string_view::npos;
}

std::vector<std::string> expressibility_issues(const MarkupDocument& doc) {
  std::vector<std::string> issues;
  if (doc.header.format_name != kFormatName || doc.header.version != kFormatVersion) {
    issues.push_back("unsupported header " + doc.header.format_name + " v" +
                     std::to_string(doc.header.version));
  }
  std::set<std::string> sessions;
  for (const auto& d : doc.dialogues) {
    const auto& fsm = d.fsm;
    if (!is_valid_identifier(fsm.session_id)) {
      issues.push_back("session id '" + fsm.session_id + "' is not a valid identifier");
    }
    if (!sessions.insert(fsm.session_id).second) {
      issues.push_back("dialogue '" + fsm.session_id + "' appears twice");
    }
    for (const auto& state : fsm.states) {
      if (!is_valid_identifier(state.state_id)) {
        issues.push_back("state id '" + state.state_id + "' is not a valid identifier");
      }
      for (const auto& tag : state.tags) {
        if (tag.key.empty() || tag.key.find_first_of(" \t=#\"") != std::string::npos ||
            !printable_tag_value(tag.value)) {
          issues.push_back("state '" + state.state_id + "' has an unprintable TAG");
        }
      }
    }
    for (const auto& defect : validate_fsm(fsm).defects) {
      issues.push_back(fsm.session_id + ": " + std::string(to_string(defect.kind)) + " at " +
                       defect.where() + ": " + defect.message);
    }
  }
  return issues;
}

}  // namespace

std::string serialize(const MarkupDocument& doc) {
  if (auto issues = expressibility_issues(doc); !issues.empty()) {
    throw Error(ErrorCode::invalid_fsm, "document cannot be serialized", std::move(issues));
  }
  std::string out;
  out += kFormatName;
  out += " v" + std::to_string(doc.header.version) + "\n";
  for (const auto& d : doc.dialogues) {
    out += "\nDIALOGUE " + d.fsm.session_id + " " + quote(d.title) + "\n";
    for (const auto& state : d.fsm.states) {
      out += "  STATE " + state.state_id;
      if (state.is_entry) out += " ENTRY";
      out += "\n    AGENT " + quote(state.utterance) + "\n";
      for (const auto& tag : state.tags) out += "    TAG " + tag.key + "=" + tag.value + "\n";
      for (const auto& option : state.options) {
        out += "    OPTION " + quote(option.label) + " -> " + option.target.str() + "\n";
      }
    }
  }
  return out;
}

}  // namespace hdfsm::markup
