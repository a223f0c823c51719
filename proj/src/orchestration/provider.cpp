#include "hdfsm/orchestration/provider.hpp"

#include <algorithm>
#include <fstream>
#include <regex>
#include <sstream>

#include <httplib.h>

namespace hdfsm {

std::string_view to_string(LlmRole role) {
  switch (role) {
    case LlmRole::planner: return "planner";
    case LlmRole::designer: return "designer";
    case LlmRole::suggester: return "suggester";
  }
  return "unknown";
}

ScriptedProvider::ScriptedProvider(std::vector<std::string> responses, std::size_t offset)
    : responses_(std::move(responses)), next_(offset) {}

std::vector<std::string> ScriptedProvider::read_directory(const std::filesystem::path& dir) {
  std::error_code ec;
  if (!std::filesystem::is_directory(dir, ec)) {
    throw ProviderError("fixture directory not found: " + dir.string());
  }
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.is_regular_file()) files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end(),
            [](const auto& a, const auto& b) { return a.filename() < b.filename(); });
  std::vector<std::string> responses;
  for (const auto& f : files) {
    std::ifstream in(f, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    responses.push_back(ss.str());
  }
  return responses;
}

CompletionResponse ScriptedProvider::complete(const CompletionRequest& request) {
  std::lock_guard lock(mu_);
  requests_.push_back(request);
  if (next_ >= responses_.size()) {
    throw ProviderError("scripted provider exhausted after " +
                        std::to_string(responses_.size()) + " responses");
  }
  CompletionResponse out;
  out.text = responses_[next_++];
  out.usage = {{"scripted_index", next_ - 1}};
  return out;
}

std::vector<CompletionRequest> ScriptedProvider::requests() const {
  std::lock_guard lock(mu_);
  return requests_;
}

std::size_t ScriptedProvider::position() const {
  std::lock_guard lock(mu_);
  return next_;
}

std::size_t ScriptedProvider::remaining() const {
  std::lock_guard lock(mu_);
  return next_ >= responses_.size() ? 0 : responses_.size() - next_;
}

HttpProvider::HttpProvider(HttpProviderConfig config) : config_(std::move(config)) {
  static const std::regex url(R"(^(https?://[^/]+)(/.*)?$)");
  std::smatch m;
  if (!std::regex_match(config_.endpoint, m, url)) {
    throw Error(ErrorCode::invalid_argument, "provider endpoint is not an http(s) URL: " +
                                                 config_.endpoint);
  }
  origin_ = m[1];
  path_ = m[2].matched ? std::string(m[2]) : "/v1/chat/completions";
}

CompletionResponse HttpProvider::complete(const CompletionRequest& request) {
  nlohmann::json body = {
      {"model", config_.model},
      {"temperature", request.temperature},
      {"max_tokens", request.max_output},
      {"messages",
       {{{"role", "system"}, {"content", request.system_prompt}},
        {{"role", "user"}, {"content", request.user_prompt}}}}};

  httplib::Client client(origin_);
  const auto secs = static_cast<time_t>(config_.timeout.count());
  client.set_connection_timeout(secs, 0);
  client.set_read_timeout(secs, 0);
  client.set_write_timeout(secs, 0);
  httplib::Headers headers;
  if (!config_.api_key.empty()) {
    headers.emplace("Authorization", "Bearer " + config_.api_key);
  }

  auto res = client.Post(path_, headers, body.dump(), "application/json");
  if (!res) {
    throw ProviderError("provider request failed: " + httplib::to_string(res.error()));
  }
  if (res->status != 200) {
    throw ProviderError("provider answered HTTP " + std::to_string(res->status));
  }
  const auto reply = nlohmann::json::parse(res->body, nullptr, false);
  if (reply.is_discarded()) throw ProviderError("provider reply is not JSON");
  try {
    CompletionResponse out;
    out.text = reply.at("choices").at(0).at("message").at("content").get<std::string>();
    if (reply.contains("usage") && reply["usage"].is_object()) out.usage = reply["usage"];
    return out;
  } catch (const nlohmann::json::exception&) {
    throw ProviderError("provider reply lacks choices[0].message.content");
  }
}

}  // namespace hdfsm
