#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>

namespace hdfsm {

enum class ProviderKind { none, scripted, http };

struct ServiceConfig {
  std::filesystem::path store_root = "hdfsm-store";
  std::string listen_host = "127.0.0.1";
  int listen_port = 8080;
  ProviderKind provider = ProviderKind::none;
  std::filesystem::path fixtures;  // scripted provider responses
  std::string provider_endpoint;
  std::string provider_key;
  std::string provider_model;
  int max_repair_attempts = 3;
  bool free_order = false;
  std::string token;  // empty: no auth
  bool durable_writes = true;
};

// Defaults, then the JSON config file (if any), then HDFSM_* environment
// variables. `env` stands in for the process environment in tests.
ServiceConfig load_config(const std::optional<std::filesystem::path>& file,
                          const std::map<std::string, std::string>& env);

std::map<std::string, std::string> process_environment();

}  // namespace hdfsm
