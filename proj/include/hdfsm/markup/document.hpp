#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "hdfsm/core/model.hpp"

namespace hdfsm::markup {

inline constexpr std::string_view kFormatName = "HEALTHDIAL-FSM";
inline constexpr int kFormatVersion = 1;
inline constexpr std::string_view kFileExtension = ".hdfsm";

struct Header {
  std::string format_name{kFormatName};
  int version = kFormatVersion;

  friend bool operator==(const Header&, const Header&) = default;
};

struct Dialogue {
  std::string title;
  DialogueFsm fsm;

  friend bool operator==(const Dialogue&, const Dialogue&) = default;
};

struct MarkupDocument {
  Header header;
  std::vector<Dialogue> dialogues;

  const Dialogue* find(std::string_view session_id) const;

  friend bool operator==(const MarkupDocument&, const MarkupDocument&) = default;
};

// Equality with option ids ignored.
bool structurally_equal(const MarkupDocument& a, const MarkupDocument& b);

enum class ParseErrorKind {
  syntax,
  duplicate_state,
  dangling_target,
  missing_entry,
  bad_escape,
  unsupported_version,
  // Dialogue-level defects surfaced by the strict parse.
  multiple_entry,
  unreachable_state,
  duplicate_option_label,
  empty_utterance,
  empty_label,
  duplicate_dialogue,
  // Session-plan JSON.
  malformed_container,
  missing_field,
  duplicate_topic,
  empty_key_points,
  invalid_identifier,
  duplicate_id,
};

std::string_view to_string(ParseErrorKind kind);

struct ParseError {
  std::size_t line = 1;    // 1-based
  std::size_t column = 1;  // 1-based, in bytes
  ParseErrorKind kind = ParseErrorKind::syntax;
  std::string message;

  // "3:14: dangling-target: ..."
  std::string str() const;
};

template <typename T>
struct ParseResult {
  std::optional<T> value;
  std::vector<ParseError> errors;

  bool ok() const noexcept { return value.has_value() && errors.empty(); }
};

std::string format_errors(const std::vector<ParseError>& errors);

}  // namespace hdfsm::markup
