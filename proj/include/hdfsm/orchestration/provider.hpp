#pragma once

#include <chrono>
#include <cstddef>
#include <filesystem>
#include <mutex>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "hdfsm/core/error.hpp"

namespace hdfsm {

enum class LlmRole { planner, designer, suggester };

std::string_view to_string(LlmRole role);

struct CompletionRequest {
  LlmRole role = LlmRole::planner;
  std::string system_prompt;
  std::string user_prompt;
  double temperature = 0.0;
  int max_output = 4096;
};

struct CompletionResponse {
  std::string text;
  nlohmann::json usage = nlohmann::json::object();
};

// Raised by providers when no response could be obtained at all.
class ProviderError : public Error {
 public:
  explicit ProviderError(const std::string& message)
      : Error(ErrorCode::provider_unreachable, message) {}
};

class LlmProvider {
 public:
  virtual ~LlmProvider() = default;
  virtual CompletionResponse complete(const CompletionRequest& request) = 0;
};

// Replays canned responses in order. `offset` skips responses already
// consumed by earlier runs against the same fixture set.
class ScriptedProvider : public LlmProvider {
 public:
  explicit ScriptedProvider(std::vector<std::string> responses, std::size_t offset = 0);

  // One response per regular file, ordered by file name.
  static std::vector<std::string> read_directory(const std::filesystem::path& dir);
  static ScriptedProvider from_directory(const std::filesystem::path& dir,
                                         std::size_t offset = 0) {
    return ScriptedProvider(read_directory(dir), offset);
  }

  CompletionResponse complete(const CompletionRequest& request) override;

  std::vector<CompletionRequest> requests() const;
  std::size_t position() const;
  std::size_t remaining() const;

 private:
  mutable std::mutex mu_;
  std::vector<std::string> responses_;
  std::size_t next_;
  std::vector<CompletionRequest> requests_;
};

struct HttpProviderConfig {
  // e.g. "https://api.example.com/v1/chat/completions"
  std::string endpoint;
  std::string api_key;
  std::string model;
  std::chrono::seconds timeout{120};
};

// OpenAI-style chat completions over HTTP(S).
class HttpProvider : public LlmProvider {
 public:
  explicit HttpProvider(HttpProviderConfig config);
  CompletionResponse complete(const CompletionRequest& request) override;

 private:
  HttpProviderConfig config_;
  std::string origin_;
  std::string path_;
};

}  // namespace hdfsm
