#pragma once

#include <cstddef>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "hdfsm/core/model.hpp"

namespace hdfsm {

enum class DefectKind {
  no_entry,
  multiple_entry,
  dangling_target,
  unreachable_state,
  duplicate_option_label,
  empty_utterance,
  empty_label,
  duplicate_state,
};

std::string_view to_string(DefectKind kind);

struct DefectLocation {
  std::string state_id;                // empty for FSM-level defects
  std::optional<std::size_t> option;   // 0-based option index

  friend auto operator<=>(const DefectLocation&, const DefectLocation&) = default;
};

struct Defect {
  DefectKind kind;
  DefectLocation location;
  std::string message;

  // "s1/option2" style, 1-based option number.
  std::string where() const;
};

struct ValidationReport {
  std::vector<Defect> defects;

  bool ok() const noexcept { return defects.empty(); }
  std::size_t count(DefectKind kind) const;
};

// Every core-model invariant violation in `fsm`, in a stable order:
// entry defects, then per state (document order) utterance, duplicate
// id, option defects, and finally unreachable states.
ValidationReport validate_fsm(const DialogueFsm& fsm);

// Fixed point of option-following from the entry state. Dangling targets
// are skipped. Empty when the entry does not resolve.
std::set<std::string> reachable_states(const DialogueFsm& fsm);

struct FsmStats {
  std::size_t state_count = 0;
  std::size_t option_count = 0;
  std::size_t terminal_count = 0;
  std::size_t max_depth = 0;

  friend bool operator==(const FsmStats&, const FsmStats&) = default;
};

// Counts over the reachable subgraph. max_depth is the longest simple path
// (in transitions between states) starting at the entry.
FsmStats fsm_stats(const DialogueFsm& fsm);

// Returns a list of human-readable violations; empty when the material is
// acceptable.
std::vector<std::string> check_material(const Material& material,
                                        std::size_t cap = kDefaultMaterialCap);

enum class PlanViolation {
  no_sessions,
  bad_ordinals,
  empty_title,
  empty_key_points,
  duplicate_topic,
  invalid_identifier,
  duplicate_id,
};

std::string_view to_string(PlanViolation v);

struct PlanIssue {
  PlanViolation violation;
  std::size_t session_index;
  std::string message;
};

std::vector<PlanIssue> check_plan(const SessionPlan& plan);

// fsms keys must name plan sessions, and each FSM must carry its key.
std::vector<std::string> check_content(const ProjectContent& content);

}  // namespace hdfsm
