#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "hdfsm/markup/document.hpp"

namespace hdfsm::markup::detail {

enum class TokenType { word, string, arrow };

struct Token {
  TokenType type;
  std::string text;     // decoded for strings
  std::string_view raw; // exact source slice, quotes included
  std::size_t column;   // 1-based
};

struct Line {
  std::size_t number;          // 1-based
  std::string_view content;    // without terminator and trailing CR
  std::vector<Token> tokens;
};

// Splits on LF, drops a trailing CR per line, tokenizes each line. Comments
// run from an unquoted '#' to end of line. Lexical errors are appended to
// `errors`; the offending line keeps whatever tokens preceded the error.
std::vector<Line> lex(std::string_view input, std::vector<ParseError>& errors);

// Decodes the body of a quoted string starting at `pos` (pointing at the
// opening quote). Returns false and fills `error` on failure; on success
// `end` is one past the closing quote.
bool scan_string(std::string_view line, std::size_t pos, std::size_t line_number,
                 std::string& decoded, std::size_t& end, ParseError& error);

// Offset of the first unquoted '#', or npos.
std::size_t comment_start(std::string_view line);

}  // namespace hdfsm::markup::detail
