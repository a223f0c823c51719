#include "hdfsm/markup/parser.hpp"

#include <algorithm>
#include <map>
#include <unordered_map>

#include "hdfsm/core/validate.hpp"
#include "lexer.hpp"

namespace hdfsm::markup {

namespace {

using detail::Line;
using detail::Token;
using detail::TokenType;

struct Pos {
  std::size_t line = 1;
  std::size_t column = 1;
};

struct OptionPos {
  Pos label;
  Pos target;
};

struct StatePos {
  Pos header;
  std::optional<Pos> agent;
  std::vector<OptionPos> options;
};

struct DialoguePos {
  Pos header;
  std::map<std::string, StatePos> states;
};

bool is_keyword(const Token& t, std::string_view kw) {
  return t.type == TokenType::word && t.text == kw;
}

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  ParseResult<MarkupDocument> run() {
    lines_ = detail::lex(text_, errors_);
    bool header_seen = false;
    for (const auto& line : lines_) {
      if (line.tokens.empty()) continue;
      if (!header_seen) {
        header_seen = true;
        if (is_keyword(line.tokens[0], kFormatName)) {
          parse_header(line);
          continue;
        }
        error(line, line.tokens[0], ParseErrorKind::syntax,
              "expected header '" + std::string(kFormatName) + " v1'");
      }
      dispatch(line);
    }
    if (!header_seen) {
      errors_.push_back(ParseError{1, 1, ParseErrorKind::syntax, "document is empty"});
    }
    finish_state();
    check_dialogues();
    std::stable_sort(errors_.begin(), errors_.end(), [](const ParseError& a, const ParseError& b) {
      return a.line != b.line ? a.line < b.line : a.column < b.column;
    });
    // A bad quoted TAG value is seen by both the lexer and the TAG scanner.
    errors_.erase(std::unique(errors_.begin(), errors_.end(),
                              [](const ParseError& a, const ParseError& b) {
                                return a.line == b.line && a.column == b.column &&
                                       a.kind == b.kind;
                              }),
                  errors_.end());
    ParseResult<MarkupDocument> result;
    result.value = std::move(doc_);
    result.errors = std::move(errors_);
    return result;
  }

 private:
  void error(const Line& line, const Token& at, ParseErrorKind kind, std::string message) {
    errors_.push_back(ParseError{line.number, at.column, kind, std::move(message)});
  }

  // Points at the last character of the line, which is inside the input.
  void error_after(const Line& line, std::string message) {
    const std::size_t column = std::max<std::size_t>(1, line.content.size());
    errors_.push_back(ParseError{line.number, column, ParseErrorKind::syntax, std::move(message)});
  }

  bool expect_count(const Line& line, std::size_t min, std::size_t max, std::string_view usage) {
    if (line.tokens.size() < min) {
      error_after(line, "incomplete line, expected " + std::string(usage));
      return false;
    }
    if (line.tokens.size() > max) {
      error(line, line.tokens[max], ParseErrorKind::syntax,
            "unexpected token, expected " + std::string(usage));
      return false;
    }
    return true;
  }

  void parse_header(const Line& line) {
    if (!expect_count(line, 2, 2, "HEALTHDIAL-FSM v<version>")) return;
    const Token& version = line.tokens[1];
    if (version.type != TokenType::word || version.text.size() < 2 || version.text[0] != 'v' ||
        !std::all_of(version.text.begin() + 1, version.text.end(),
                     [](char c) { return c >= '0' && c <= '9'; })) {
      error(line, version, ParseErrorKind::syntax, "malformed version '" + version.text + "'");
      return;
    }
    if (version.text != "v" + std::to_string(kFormatVersion)) {
      error(line, version, ParseErrorKind::unsupported_version,
            "unsupported format version '" + version.text + "'");
    }
  }

  void dispatch(const Line& line) {
    const Token& kw = line.tokens[0];
    if (is_keyword(kw, "DIALOGUE")) {
      parse_dialogue(line);
    } else if (is_keyword(kw, "STATE")) {
      parse_state(line);
    } else if (is_keyword(kw, "AGENT")) {
      parse_agent(line);
    } else if (is_keyword(kw, "OPTION")) {
      parse_option(line);
    } else if (is_keyword(kw, "TAG")) {
      parse_tag(line);
    } else if (is_keyword(kw, "CALL")) {
      error(line, kw, ParseErrorKind::syntax, "CALL is reserved and not supported in v1");
    } else if (is_keyword(kw, kFormatName)) {
      error(line, kw, ParseErrorKind::syntax, "header may appear only once");
    } else {
      error(line, kw, ParseErrorKind::syntax, "unknown keyword '" + kw.text + "'");
    }
  }

  void parse_dialogue(const Line& line) {
    finish_state();
    current_dialogue_ = nullptr;
    in_discarded_dialogue_ = true;
    if (!expect_count(line, 3, 3, "DIALOGUE <session-id> \"<title>\"")) return;
    const Token& id = line.tokens[1];
    const Token& title = line.tokens[2];
    if (id.type != TokenType::word || !is_valid_identifier(id.text)) {
      error(line, id, ParseErrorKind::syntax, "invalid session id '" + id.text + "'");
      return;
    }
    if (title.type != TokenType::string) {
      error(line, title, ParseErrorKind::syntax, "dialogue title must be a quoted string");
      return;
    }
    if (doc_.find(id.text) != nullptr) {
      error(line, id, ParseErrorKind::duplicate_dialogue,
            "dialogue '" + id.text + "' is declared more than once");
      return;
    }
    Dialogue d;
    d.title = title.text;
    d.fsm.session_id = id.text;
    doc_.dialogues.push_back(std::move(d));
    positions_.push_back(DialoguePos{{line.number, 1}, {}});
    current_dialogue_ = &doc_.dialogues.back();
    in_discarded_dialogue_ = false;
  }

  void parse_state(const Line& line) {
    finish_state();
    in_discarded_state_ = true;  // cleared implicitly once pending_ is set
    if (current_dialogue_ == nullptr) {
      if (!in_discarded_dialogue_) {
        error(line, line.tokens[0], ParseErrorKind::syntax, "STATE outside of a DIALOGUE");
      }
      in_discarded_state_ = true;
      return;
    }
    if (!expect_count(line, 2, 3, "STATE <state-id> [ENTRY]")) return;
    const Token& id = line.tokens[1];
    if (id.type != TokenType::word || !is_valid_identifier(id.text)) {
      error(line, id, ParseErrorKind::syntax, "invalid state id '" + id.text + "'");
      return;
    }
    bool entry = false;
    if (line.tokens.size() == 3) {
      if (!is_keyword(line.tokens[2], "ENTRY")) {
        error(line, line.tokens[2], ParseErrorKind::syntax, "expected ENTRY or end of line");
        return;
      }
      entry = true;
    }
    auto& pos = positions_.back();
    if (pos.states.count(id.text) != 0) {
      error(line, id, ParseErrorKind::duplicate_state,
            "state '" + id.text + "' is declared more than once in this dialogue");
      in_discarded_state_ = true;
      return;
    }
    pending_ = DialogueState{};
    pending_->state_id = id.text;
    pending_->is_entry = entry;
    pos.states[id.text] = StatePos{{line.number, id.column}, std::nullopt, {}};
  }

  // Lines that belong inside a STATE block.
  bool in_state(const Line& line) {
    if (pending_) return true;
    if (!in_discarded_state_) {
      error(line, line.tokens[0], ParseErrorKind::syntax,
            line.tokens[0].text + " outside of a STATE");
    }
    return false;
  }

  StatePos& state_pos() { return positions_.back().states[pending_->state_id]; }

  void parse_agent(const Line& line) {
    if (!in_state(line)) return;
    if (!expect_count(line, 2, 2, "AGENT \"<utterance>\"")) return;
    const Token& text = line.tokens[1];
    if (text.type != TokenType::string) {
      error(line, text, ParseErrorKind::syntax, "agent utterance must be a quoted string");
      return;
    }
    if (state_pos().agent) {
      error(line, line.tokens[0], ParseErrorKind::syntax, "state already has an AGENT line");
      return;
    }
    pending_->utterance = text.text;
    state_pos().agent = Pos{line.number, text.column};
  }

  void parse_option(const Line& line) {
    if (!in_state(line)) return;
    if (!expect_count(line, 4, 4, "OPTION \"<label>\" -> <state-id | END>")) return;
    const Token& label = line.tokens[1];
    const Token& arrow = line.tokens[2];
    const Token& target = line.tokens[3];
    if (label.type != TokenType::string) {
      error(line, label, ParseErrorKind::syntax, "option label must be a quoted string");
      return;
    }
    if (arrow.type != TokenType::arrow) {
      error(line, arrow, ParseErrorKind::syntax, "expected '->'");
      return;
    }
    if (target.type != TokenType::word ||
        (target.text != kEndName && !is_valid_identifier(target.text))) {
      error(line, target, ParseErrorKind::syntax, "invalid option target '" + target.text + "'");
      return;
    }
    ResponseOption option;
    option.option_id = option_id_for(pending_->options.size());
    option.label = label.text;
    option.target = Target::parse(target.text);
    pending_->options.push_back(std::move(option));
    state_pos().options.push_back(
        OptionPos{{line.number, label.column}, {line.number, target.column}});
  }

  void parse_tag(const Line& line) {
    if (!in_state(line)) return;
    // TAG takes the raw remainder so quoted values survive verbatim.
    std::string_view rest = line.content.substr(line.tokens[0].column - 1 + 3);
    const std::size_t hash = detail::comment_start(rest);
    if (hash != std::string_view::npos) rest = rest.substr(0, hash);
    while (!rest.empty() && (rest.front() == ' ' || rest.front() == '\t')) rest.remove_prefix(1);
    while (!rest.empty() && (rest.back() == ' ' || rest.back() == '\t')) rest.remove_suffix(1);
    const Token& at = line.tokens.size() > 1 ? line.tokens[1] : line.tokens[0];
    const std::size_t eq = rest.find('=');
    if (rest.empty() || eq == std::string_view::npos || eq == 0) {
      error(line, at, ParseErrorKind::syntax, "expected TAG <key>=<value>");
      return;
    }
    const std::string_view key = rest.substr(0, eq);
    const std::string_view value = rest.substr(eq + 1);
    auto key_char = [](char c) {
      return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
             c == '_' || c == '-' || c == '.' || c == ':';
    };
    if (!std::all_of(key.begin(), key.end(), key_char)) {
      error(line, at, ParseErrorKind::syntax, "invalid TAG key '" + std::string(key) + "'");
      return;
    }
    if (value.empty()) {
      error(line, at, ParseErrorKind::syntax, "TAG value is empty");
      return;
    }
    if (value.find('\t') != std::string_view::npos) {
      error(line, at, ParseErrorKind::syntax, "TAG value may not contain a raw tab");
      return;
    }
    if (value.front() == '"') {
      std::string decoded;
      std::size_t end = 0;
      ParseError err;
      const std::size_t base = static_cast<std::size_t>(value.data() - line.content.data());
      if (!detail::scan_string(line.content, base, line.number, decoded, end, err)) {
        errors_.push_back(std::move(err));
        return;
      }
      if (end != base + value.size()) {
        errors_.push_back(ParseError{line.number, end + 1, ParseErrorKind::syntax,
                                     "unexpected text after quoted TAG value"});
        return;
      }
    } else if (std::any_of(value.begin(), value.end(),
                           [](char c) { return c == ' ' || c == '\t' || c == '"'; })) {
      error(line, at, ParseErrorKind::syntax, "unquoted TAG value may not contain spaces or quotes");
      return;
    }
    pending_->tags.push_back(StateTag{std::string(key), std::string(value)});
  }

  void finish_state() {
    in_discarded_state_ = false;
    if (!pending_) return;
    auto& fsm = current_dialogue_->fsm;
    if (pending_->is_entry && fsm.entry.empty()) fsm.entry = pending_->state_id;
    fsm.states.push_back(std::move(*pending_));
    pending_.reset();
  }

  // Structural checks per dialogue, reported at source positions.
  void check_dialogues() {
    for (std::size_t d = 0; d < doc_.dialogues.size(); ++d) {
      const auto& fsm = doc_.dialogues[d].fsm;
      const auto& pos = positions_[d];
      for (const auto& defect : validate_fsm(fsm).defects) {
        const StatePos* sp = nullptr;
        if (!defect.location.state_id.empty()) {
          auto it = pos.states.find(defect.location.state_id);
          if (it != pos.states.end()) sp = &it->second;
        }
        Pos at = sp ? sp->header : pos.header;
        ParseErrorKind kind = ParseErrorKind::syntax;
        std::string message = defect.message;
        switch (defect.kind) {
          case DefectKind::no_entry:
            kind = ParseErrorKind::missing_entry;
            at = pos.header;
            message = fsm.states.empty()
                          ? "dialogue '" + fsm.session_id + "' has no states"
                          : "dialogue '" + fsm.session_id + "' has no ENTRY state";
            break;
          case DefectKind::multiple_entry: kind = ParseErrorKind::multiple_entry; break;
          case DefectKind::unreachable_state: kind = ParseErrorKind::unreachable_state; break;
          case DefectKind::duplicate_state: kind = ParseErrorKind::duplicate_state; break;
          case DefectKind::empty_utterance:
            kind = ParseErrorKind::empty_utterance;
            if (sp && sp->agent) at = *sp->agent;
            if (sp && !sp->agent) message = "state '" + defect.location.state_id + "' has no AGENT line";
            break;
          case DefectKind::dangling_target:
          case DefectKind::duplicate_option_label:
          case DefectKind::empty_label: {
            if (sp && defect.location.option && *defect.location.option < sp->options.size()) {
              const auto& op = sp->options[*defect.location.option];
              at = defect.kind == DefectKind::dangling_target ? op.target : op.label;
            }
            kind = defect.kind == DefectKind::dangling_target ? ParseErrorKind::dangling_target
                   : defect.kind == DefectKind::empty_label   ? ParseErrorKind::empty_label
                                                              : ParseErrorKind::duplicate_option_label;
            break;
          }
        }
        errors_.push_back(ParseError{at.line, at.column, kind, std::move(message)});
      }
    }
  }

  std::string_view text_;
  std::vector<Line> lines_;
  std::vector<ParseError> errors_;
  MarkupDocument doc_;
  std::vector<DialoguePos> positions_;
  Dialogue* current_dialogue_ = nullptr;
  std::optional<DialogueState> pending_;
  bool in_discarded_state_ = false;
  bool in_discarded_dialogue_ = false;
};

}  // namespace

ParseResult<MarkupDocument> parse(std::string_view text) { return Parser(text).run(); }

}  // namespace hdfsm::markup
