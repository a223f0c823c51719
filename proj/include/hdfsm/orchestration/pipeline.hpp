#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "hdfsm/core/model.hpp"
#include "hdfsm/orchestration/exchange.hpp"
#include "hdfsm/orchestration/provider.hpp"

namespace hdfsm {

struct PipelineOptions {
  int max_attempts = 3;
  double planner_temperature = 0.2;
  double designer_temperature = 0.4;
  double suggester_temperature = 0.8;
  int max_output = 4096;
};

struct PlanResult {
  SessionPlan plan;
  std::vector<LlmExchange> exchanges;
};

// With `cue` set, `prior` is required and the prompt carries both.
PlanResult plan_sessions(const Material& material, const std::optional<std::string>& cue,
                         const SessionPlan* prior, LlmProvider& provider,
                         const PipelineOptions& options = {});

struct FsmResult {
  DialogueFsm fsm;
  std::vector<LlmExchange> exchanges;
};

// The returned FSM is keyed to `session.session_id` and validates cleanly.
FsmResult generate_fsm(const Material& material, const SessionPlan& plan,
                       const SessionTopic& session, LlmProvider& provider,
                       const PipelineOptions& options = {});

struct SuggestResult {
  std::vector<std::string> labels;  // drafts; the author picks targets
  std::vector<LlmExchange> exchanges;
};

SuggestResult suggest_options(const DialogueFsm& fsm, const std::string& state_id,
                              const SessionTopic& session, const Material& material,
                              std::size_t count, LlmProvider& provider,
                              const PipelineOptions& options = {});

}  // namespace hdfsm
