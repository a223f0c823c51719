#pragma once

// Independent reference implementations used only by tests. None of these
// call into the engine code paths they check.

#include <cstddef>
#include <map>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "hdfsm/core/model.hpp"

namespace hdfsm::testing {

// Breadth-first search from the entry, by scanning the state list.
std::set<std::string> bfs_reachable(const DialogueFsm& fsm);

// Boolean transitive closure by repeated matrix squaring.
std::set<std::string> closure_reachable(const DialogueFsm& fsm);

// (kind name, state id, option index or -1)
using DefectKey = std::tuple<std::string, std::string, long>;
std::set<DefectKey> oracle_defects(const DialogueFsm& fsm);

struct OracleStats {
  std::size_t state_count, option_count, terminal_count, max_depth;
};
// Recursive enumeration of every simple path from the entry.
OracleStats oracle_stats(const DialogueFsm& fsm);

struct OraclePath {
  std::vector<std::size_t> choices;
  std::vector<std::string> visited;  // state ids whose utterances were spoken
  bool truncated = false;
  friend auto operator<=>(const OraclePath&, const OraclePath&) = default;
};
// Every maximal choice sequence of at most `max_steps` choices.
std::vector<OraclePath> oracle_paths(const DialogueFsm& fsm, std::size_t max_steps);

// Key-point coverage by plain substring search on space-padded text.
// Returns key point -> witness state ids (empty set = uncovered).
std::map<std::string, std::set<std::string>> oracle_coverage(
    const DialogueFsm& fsm, const std::vector<std::string>& key_points, double threshold,
    const std::set<std::string>& stop_words);

// Revision count by scanning every pair of equal hashes.
std::size_t oracle_revision_count(const std::vector<std::string>& kinds,
                                  const std::string& base_hash,
                                  const std::vector<std::string>& hash_trail);

}  // namespace hdfsm::testing
