#pragma once

#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "hdfsm/core/error.hpp"
#include "hdfsm/orchestration/provider.hpp"

namespace hdfsm {

enum class ExchangeOutcome { parsed, repaired, failed };

std::string_view to_string(ExchangeOutcome outcome);

// One provider round trip, kept for audit.
struct LlmExchange {
  LlmRole role = LlmRole::planner;
  int attempt = 1;
  CompletionRequest request;
  std::string response;
  ExchangeOutcome outcome = ExchangeOutcome::failed;
  std::vector<std::string> problems;  // why the response was rejected
  std::string timestamp;              // UTC, ISO-8601
};

void to_json(nlohmann::json& j, const LlmExchange& e);
void from_json(const nlohmann::json& j, LlmExchange& e);

// Structured output still unusable after the last repair attempt, or a
// non-retryable rejection. Carries every exchange made.
class StructuredOutputError : public Error {
 public:
  StructuredOutputError(ErrorCode code, const std::string& message,
                        std::vector<LlmExchange> exchanges);

  const std::vector<LlmExchange>& exchanges() const noexcept { return exchanges_; }

 private:
  std::vector<LlmExchange> exchanges_;
};

}  // namespace hdfsm
