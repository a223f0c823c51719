#include "hdfsm/orchestration/coverage.hpp"

#include <algorithm>
#include <unordered_set>

namespace hdfsm {

const std::set<std::string>& stop_words() {
  static const std::set<std::string> words = {
      "a",     "about", "after", "again", "all",   "also",  "am",    "an",    "and",
      "any",   "are",   "as",    "at",    "be",    "been",  "before", "being", "but",
      "by",    "can",   "could", "did",   "do",    "does",  "doing", "for",   "from",
      "had",   "has",   "have",  "having", "he",   "her",   "here",  "him",   "his",
      "how",   "i",     "if",    "in",    "into",  "is",    "it",    "its",   "just",
      "me",    "more",  "most",  "my",    "no",    "nor",   "not",   "of",    "off",
      "on",    "once",  "only",  "or",    "other", "our",   "out",   "over",  "own",
      "s",     "same",  "she",   "should", "so",   "some",  "such",  "t",     "than",
      "that",  "the",   "their", "them",  "then",  "there", "these", "they",  "this",
      "those", "to",    "too",   "up",    "very",  "was",   "we",    "were",  "what",
      "when",  "where", "which", "while", "who",   "why",   "will",  "with",  "would",
      "you",   "your"};
  return words;
}

namespace {

bool token_byte(unsigned char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
         c >= 0x80;
}

}  // namespace

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> out;
  std::unordered_set<std::string> seen;
  std::string cur;
  auto flush = [&] {
    if (!cur.empty() && seen.insert(cur).second) out.push_back(cur);
    cur.clear();
  };
  for (char ch : text) {
    const auto c = static_cast<unsigned char>(ch);
    if (token_byte(c)) {
      cur.push_back((c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : ch);
    } else {
      flush();
    }
  }
  flush();
  return out;
}

std::vector<std::string> content_words(std::string_view text) {
  auto all = tokenize(text);
  std::vector<std::string> kept;
  for (const auto& t : all) {
    if (!stop_words().count(t)) kept.push_back(t);
  }
  return kept.empty() ? all : kept;
}

std::vector<KeyPointCoverage> key_point_coverage(const DialogueFsm& fsm,
                                                 const SessionTopic& session,
                                                 double threshold) {
  std::vector<std::unordered_set<std::string>> utterance_tokens;
  utterance_tokens.reserve(fsm.states.size());
  for (const auto& s : fsm.states) {
    const auto toks = tokenize(s.utterance);
    utterance_tokens.emplace_back(toks.begin(), toks.end());
  }

  std::vector<KeyPointCoverage> out;
  for (const auto& kp : session.key_points) {
    KeyPointCoverage cov{kp, false, {}};
    const auto words = content_words(kp);
    if (!words.empty()) {
      const double needed = threshold * static_cast<double>(words.size()) - 1e-9;
      for (std::size_t i = 0; i < fsm.states.size(); ++i) {
        const auto hits = std::count_if(words.begin(), words.end(), [&](const auto& w) {
          return utterance_tokens[i].count(w) > 0;
        });
        if (static_cast<double>(hits) >= needed) cov.witnesses.push_back(fsm.states[i].state_id);
      }
    }
    cov.covered = !cov.witnesses.empty();
    out.push_back(std::move(cov));
  }
  return out;
}

}  // namespace hdfsm
