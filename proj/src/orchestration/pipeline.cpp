#include "hdfsm/orchestration/pipeline.hpp"

#include <ctime>
#include <functional>
#include <regex>

#include "hdfsm/core/text.hpp"
#include "hdfsm/core/validate.hpp"
#include "hdfsm/markup/parser.hpp"
#include "hdfsm/markup/plan_json.hpp"
#include "hdfsm/orchestration/prompts.hpp"

namespace hdfsm {

using namespace text;

namespace {

std::string utc_now() {
  const std::time_t t = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

template <typename T>
struct Attempt {
  std::optional<T> value;
  std::vector<std::string> problems;
  // Code reported if this is the last attempt, and whether retrying is pointless.
  ErrorCode code = ErrorCode::invalid_structured_output;
  bool final = false;
};

std::string bullet_list(const std::vector<std::string>& items) {
  std::string out;
  for (const auto& item : items) out += "- " + item + "\n";
  return out;
}

template <typename T>
std::pair<T, std::vector<LlmExchange>> run_with_repair(
    LlmProvider& provider, LlmRole role, const std::string& system, const std::string& user,
    double temperature, const PipelineOptions& options,
    const std::function<Attempt<T>(const std::string&)>& parse) {
  const int max_attempts = std::max(1, options.max_attempts);
  std::vector<LlmExchange> exchanges;
  ErrorCode code = ErrorCode::invalid_structured_output;
  for (int attempt = 1; attempt <= max_attempts; ++attempt) {
    CompletionRequest request{role, system, user, temperature, options.max_output};
    if (attempt > 1) {
      const auto& last = exchanges.back();
      request.user_prompt = prompts::render(prompts::asset("repair.user"),
                                            {{"original", user},
                                             {"previous", last.response},
                                             {"errors", bullet_list(last.problems)}});
    }
    LlmExchange ex;
    ex.role = role;
    ex.attempt = attempt;
    ex.request = request;
    ex.timestamp = utc_now();
    ex.response = provider.complete(request).text;

    auto result = parse(ex.response);
    if (result.value) {
      ex.outcome = attempt == 1 ? ExchangeOutcome::parsed : ExchangeOutcome::repaired;
      exchanges.push_back(std::move(ex));
      return {std::move(*result.value), std::move(exchanges)};
    }
    ex.outcome = ExchangeOutcome::failed;
    ex.problems = std::move(result.problems);
    exchanges.push_back(std::move(ex));
    code = result.code;
    if (result.final) break;
  }
  const std::string what = code == ErrorCode::invalid_structured_output
                               ? std::string(to_string(role)) + " output unusable after " +
                                     std::to_string(exchanges.size()) + " attempt(s)"
                               : exchanges.back().problems.front();
  throw StructuredOutputError(code, what, std::move(exchanges));
}

std::vector<std::string> error_lines(const std::vector<markup::ParseError>& errors) {
  std::vector<std::string> out;
  for (const auto& e : errors) out.push_back(e.str());
  return out;
}

void require_material(const Material& material) {
  const auto problems = check_material(material, kDefaultMaterialCap);
  if (!problems.empty()) throw Error(ErrorCode::invalid_argument, problems.front(), problems);
}

}  // namespace

PlanResult plan_sessions(const Material& material, const std::optional<std::string>& cue,
                         const SessionPlan* prior, LlmProvider& provider,
                         const PipelineOptions& options) {
  require_material(material);
  std::string user;
  if (cue) {
    if (is_blank(*cue)) throw Error(ErrorCode::invalid_argument, "revision cue is empty");
    if (prior == nullptr || prior->sessions.empty()) {
      throw Error(ErrorCode::conflict, "a revision cue needs an existing plan");
    }
    std::string plan_text = markup::serialize_session_plan_json(*prior);
    if (!plan_text.empty() && plan_text.back() == '\n') plan_text.pop_back();
    user = prompts::render(prompts::asset("planner_revision.user"),
                           {{"title", material.title},
                            {"material", material.body},
                            {"plan", plan_text},
                            {"cue", std::string(trim(*cue))}});
  } else {
    user = prompts::render(prompts::asset("planner.user"),
                           {{"title", material.title}, {"material", material.body}});
  }

  auto [plan, exchanges] = run_with_repair<SessionPlan>(
      provider, LlmRole::planner, std::string(prompts::asset("planner.system")), user,
      options.planner_temperature, options, [](const std::string& text) {
        Attempt<SessionPlan> a;
        auto parsed = markup::parse_session_plan_json(prompts::extract_fenced(text, {"json"}));
        if (parsed.ok()) {
          a.value = std::move(parsed.value);
        } else {
          a.problems = error_lines(parsed.errors);
        }
        return a;
      });
  if (cue) plan.revision_note = std::string(trim(*cue));
  return {std::move(plan), std::move(exchanges)};
}

FsmResult generate_fsm(const Material& material, const SessionPlan& plan,
                       const SessionTopic& session, LlmProvider& provider,
                       const PipelineOptions& options) {
  require_material(material);
  if (plan.find(session.session_id) == nullptr) {
    throw Error(ErrorCode::not_found, "session " + session.session_id + " is not in the plan");
  }
  std::string key_points;
  for (const auto& kp : session.key_points) key_points += "- " + kp + "\n";
  std::string outline;
  for (const auto& s : plan.sessions) {
    outline += std::to_string(s.ordinal) + ". " + s.session_id + ": " + s.title + "\n";
  }
  const std::string user = prompts::render(prompts::asset("designer.user"),
                                           {{"session_id", session.session_id},
                                            {"topic", session.title},
                                            {"key_points", key_points},
                                            {"plan_outline", outline},
                                            {"material", material.body}});

  const std::string sid = session.session_id;
  auto [fsm, exchanges] = run_with_repair<DialogueFsm>(
      provider, LlmRole::designer, std::string(prompts::asset("designer.system")), user,
      options.designer_temperature, options, [&sid](const std::string& text) {
        Attempt<DialogueFsm> a;
        auto parsed = markup::parse(prompts::extract_fenced(text, {"hdfsm"}));
        const markup::Dialogue* pick = nullptr;
        if (parsed.value) {
          const auto& ds = parsed.value->dialogues;
          if (ds.size() == 1) {
            pick = &ds.front();
          } else {
            pick = parsed.value->find(sid);
          }
          if (ds.empty()) {
            a.problems.push_back("the answer contains no DIALOGUE");
          } else if (pick == nullptr) {
            a.problems.push_back("expected a single DIALOGUE for session " + sid);
          } else if (pick->fsm.states.empty()) {
            a.problems.push_back("DIALOGUE " + pick->fsm.session_id + " has no states");
            a.code = ErrorCode::empty_dialogue;
          }
        }
        if (!parsed.ok()) {
          auto lines = error_lines(parsed.errors);
          a.problems.insert(a.problems.end(), lines.begin(), lines.end());
        }
        if (a.problems.empty()) {
          DialogueFsm fsm = pick->fsm;
          fsm.session_id = sid;
          a.value = std::move(fsm);
        }
        return a;
      });
  return {std::move(fsm), std::move(exchanges)};
}

SuggestResult suggest_options(const DialogueFsm& fsm, const std::string& state_id,
                              const SessionTopic& session, const Material& material,
                              std::size_t count, LlmProvider& provider,
                              const PipelineOptions& options) {
  const DialogueState* state = fsm.find(state_id);
  if (state == nullptr) throw Error(ErrorCode::not_found, "no state " + state_id);
  if (count == 0) throw Error(ErrorCode::invalid_argument, "count must be at least 1");

  std::string existing;
  for (const auto& o : state->options) existing += "- " + o.label + "\n";
  if (existing.empty()) existing = "(none)\n";
  const std::string user = prompts::render(prompts::asset("suggester.user"),
                                           {{"topic", session.title},
                                            {"utterance", state->utterance},
                                            {"existing", existing},
                                            {"count", std::to_string(count)},
                                            {"material", material.body}});

  std::set<std::string> taken;
  for (const auto& o : state->options) taken.insert(comparison_key(o.label));

  auto [labels, exchanges] = run_with_repair<std::vector<std::string>>(
      provider, LlmRole::suggester, std::string(prompts::asset("suggester.system")), user,
      options.suggester_temperature, options, [&](const std::string& text) {
        static const std::regex item(R"(^\s*\d+\s*[.)]\s*(.*?)\s*$)");
        Attempt<std::vector<std::string>> a;
        const std::string body = prompts::extract_fenced(text, {"text", "markdown"});
        std::vector<std::string> items;
        std::size_t pos = 0;
        while (pos < body.size()) {
          auto eol = body.find('\n', pos);
          if (eol == std::string::npos) eol = body.size();
          std::string line = body.substr(pos, eol - pos);
          pos = eol + 1;
          if (!line.empty() && line.back() == '\r') line.pop_back();
          std::smatch m;
          if (!std::regex_match(line, m, item)) continue;
          std::string label = m[1];
          if (label.size() >= 2 && label.front() == '"' && label.back() == '"') {
            label = label.substr(1, label.size() - 2);
          }
          label = normalize_whitespace(label);
          if (!label.empty() && is_valid_utf8(label)) items.push_back(label);
        }
        if (items.empty()) {
          a.problems.push_back("expected a numbered list with at least one reply");
          return a;
        }
        std::set<std::string> seen = taken;
        std::vector<std::string> fresh;
        for (auto& label : items) {
          if (seen.insert(comparison_key(label)).second) fresh.push_back(std::move(label));
        }
        if (fresh.empty()) {
          a.problems.push_back("every suggested reply duplicates an existing option");
          a.code = ErrorCode::no_novel_options;
          a.final = true;
          return a;
        }
        if (fresh.size() > count) fresh.resize(count);
        a.value = std::move(fresh);
        return a;
      });
  return {std::move(labels), std::move(exchanges)};
}

}  // namespace hdfsm
