#include "lexer.hpp"

#include "hdfsm/core/text.hpp"

namespace hdfsm::markup::detail {

namespace {

bool is_blank_char(char c) { return c == ' ' || c == '\t' || c == '\f' || c == '\v' || c == '\r'; }

}  // namespace

bool scan_string(std::string_view line, std::size_t pos, std::size_t line_number,
                 std::string& decoded, std::size_t& end, ParseError& error) {
  decoded.clear();
  std::size_t i = pos + 1;
  while (i < line.size()) {
    const char c = line[i];
    if (c == '"') {
      end = i + 1;
      return true;
    }
    if (c == '\\') {
      if (i + 1 >= line.size()) break;
      switch (line[i + 1]) {
        case '"': decoded.push_back('"'); break;
        case '\\': decoded.push_back('\\'); break;
        case 'n': decoded.push_back('\n'); break;
        case 't': decoded.push_back('\t'); break;
        case 'r': decoded.push_back('\r'); break;
        default:
          error = ParseError{line_number, i + 1, ParseErrorKind::bad_escape,
                             std::string("unknown escape sequence \\") + line[i + 1]};
          return false;
      }
      i += 2;
      continue;
    }
    decoded.push_back(c);
    ++i;
  }
  error = ParseError{line_number, pos + 1, ParseErrorKind::syntax, "unterminated string"};
  return false;
}

std::size_t comment_start(std::string_view line) {
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '\\') {
        ++i;
      } else if (c == '"') {
        quoted = false;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == '#') {
      return i;
    }
  }
  return std::string_view::npos;
}

std::vector<Line> lex(std::string_view input, std::vector<ParseError>& errors) {
  std::vector<Line> lines;
  std::size_t number = 0;
  std::size_t start = 0;
  while (start <= input.size()) {
    std::size_t stop = input.find('\n', start);
    const bool last = stop == std::string_view::npos;
    if (last) stop = input.size();
    if (last && start == input.size() && number > 0) break;  // trailing newline
    ++number;
    std::string_view content = input.substr(start, stop - start);
    if (!content.empty() && content.back() == '\r') content.remove_suffix(1);

    Line line{number, content, {}};
    if (!text::is_valid_utf8(content)) {
      errors.push_back(ParseError{number, 1, ParseErrorKind::syntax, "line is not valid UTF-8"});
      lines.push_back(std::move(line));
      if (last) break;
      start = stop + 1;
      continue;
    }
    std::size_t i = 0;
    while (i < content.size()) {
      const char c = content[i];
      if (is_blank_char(c)) {
        ++i;
      } else if (c == '#') {
        break;
      } else if (c == '"') {
        std::string decoded;
        std::size_t end = 0;
        ParseError error;
        if (!scan_string(content, i, number, decoded, end, error)) {
          errors.push_back(std::move(error));
          break;
        }
        line.tokens.push_back(
            Token{TokenType::string, std::move(decoded), content.substr(i, end - i), i + 1});
        i = end;
      } else if (content.compare(i, 2, "->") == 0) {
        line.tokens.push_back(Token{TokenType::arrow, "->", content.substr(i, 2), i + 1});
        i += 2;
      } else {
        const std::size_t word_start = i;
        while (i < content.size() && !is_blank_char(content[i]) && content[i] != '"' &&
               content[i] != '#' && content.compare(i, 2, "->") != 0) {
          ++i;
        }
        const auto raw = content.substr(word_start, i - word_start);
        line.tokens.push_back(Token{TokenType::word, std::string(raw), raw, word_start + 1});
      }
    }
    lines.push_back(std::move(line));
    if (last) break;
    start = stop + 1;
  }
  return lines;
}

}  // namespace hdfsm::markup::detail
