#pragma once

#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "hdfsm/core/model.hpp"

namespace hdfsm {

inline constexpr double kDefaultCoverageThreshold = 0.6;

const std::set<std::string>& stop_words();

// Distinct lowercase tokens in first-seen order. A token is a maximal run of
// ASCII letters, digits or non-ASCII bytes.
std::vector<std::string> tokenize(std::string_view text);

// Tokens minus stop words; all tokens if nothing else is left.
std::vector<std::string> content_words(std::string_view text);

struct KeyPointCoverage {
  std::string key_point;
  bool covered = false;
  std::vector<std::string> witnesses;  // state ids, FSM order
};

// A state witnesses a key point when its utterance contains at least
// `threshold` of the key point's content words.
std::vector<KeyPointCoverage> key_point_coverage(const DialogueFsm& fsm,
                                                 const SessionTopic& session,
                                                 double threshold = kDefaultCoverageThreshold);

}  // namespace hdfsm
