#include "hdfsm/orchestration/exchange.hpp"

namespace hdfsm {

std::string_view to_string(ExchangeOutcome outcome) {
  switch (outcome) {
    case ExchangeOutcome::parsed: return "parsed";
    case ExchangeOutcome::repaired: return "repaired";
    case ExchangeOutcome::failed: return "failed";
  }
  return "failed";
}

namespace {

LlmRole role_from(const std::string& s) {
  if (s == "designer") return LlmRole::designer;
  if (s == "suggester") return LlmRole::suggester;
  return LlmRole::planner;
}

ExchangeOutcome outcome_from(const std::string& s) {
  if (s == "parsed") return ExchangeOutcome::parsed;
  if (s == "repaired") return ExchangeOutcome::repaired;
  return ExchangeOutcome::failed;
}

}  // namespace

void to_json(nlohmann::json& j, const LlmExchange& e) {
  const auto& r = e.request;
  j = {{"role", to_string(e.role)},
       {"attempt", e.attempt},
       {"request",
        {{"system", r.system_prompt},
         {"user", r.user_prompt},
         {"temperature", r.temperature},
         {"max_output", r.max_output}}},
       {"response", e.response},
       {"outcome", to_string(e.outcome)},
       {"problems", e.problems},
       {"timestamp", e.timestamp}};
}

void from_json(const nlohmann::json& j, LlmExchange& e) {
  e.role = role_from(j.at("role").get<std::string>());
  e.attempt = j.at("attempt").get<int>();
  const auto& r = j.at("request");
  e.request.role = e.role;
  e.request.system_prompt = r.at("system").get<std::string>();
  e.request.user_prompt = r.at("user").get<std::string>();
  e.request.temperature = r.at("temperature").get<double>();
  e.request.max_output = r.at("max_output").get<int>();
  e.response = j.at("response").get<std::string>();
  e.outcome = outcome_from(j.at("outcome").get<std::string>());
  e.problems = j.value("problems", std::vector<std::string>{});
  e.timestamp = j.value("timestamp", std::string{});
}

StructuredOutputError::StructuredOutputError(ErrorCode code, const std::string& message,
                                             std::vector<LlmExchange> exchanges)
    : Error(code, message, exchanges.empty() ? std::vector<std::string>{}
                                             : exchanges.back().problems),
      exchanges_(std::move(exchanges)) {}

}  // namespace hdfsm
