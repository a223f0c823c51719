#include "hdfsm/service/config.hpp"

#include <cctype>
#include <fstream>

#include <nlohmann/json.hpp>

#include "hdfsm/core/error.hpp"

extern char** environ;

namespace hdfsm {

namespace {

ProviderKind provider_kind(const std::string& s) {
  if (s == "scripted") return ProviderKind::scripted;
  if (s == "http") return ProviderKind::http;
  if (s == "none" || s.empty()) return ProviderKind::none;
  throw Error(ErrorCode::invalid_argument, "unknown provider kind \"" + s + "\"");
}

bool truthy(const std::string& s) { return s == "1" || s == "true" || s == "yes" || s == "on"; }

int number(const std::string& key, const std::string& s) {
  try {
    std::size_t used = 0;
    const int v = std::stoi(s, &used);
    if (used == s.size()) return v;
  } catch (const std::exception&) {
  }
  throw Error(ErrorCode::invalid_argument, key + " must be an integer, got \"" + s + "\"");
}

// "host:port" or ":port" or "port".
void set_listen(ServiceConfig& c, const std::string& s) {
  const auto colon = s.rfind(':');
  if (colon == std::string::npos) {
    c.listen_port = number("listen", s);
    return;
  }
  if (colon > 0) c.listen_host = s.substr(0, colon);
  c.listen_port = number("listen", s.substr(colon + 1));
}

void set(ServiceConfig& c, const std::string& key, const std::string& value) {
  if (key == "store") c.store_root = value;
  else if (key == "listen") set_listen(c, value);
  else if (key == "provider") c.provider = provider_kind(value);
  else if (key == "fixtures") c.fixtures = value;
  else if (key == "provider_endpoint") c.provider_endpoint = value;
  else if (key == "provider_key") c.provider_key = value;
  else if (key == "provider_model") c.provider_model = value;
  else if (key == "max_repairs") c.max_repair_attempts = number(key, value);
  else if (key == "free_order") c.free_order = truthy(value);
  else if (key == "token") c.token = value;
  else if (key == "durable") c.durable_writes = truthy(value);
}

const char* const kKeys[] = {"store",          "listen",        "provider",    "fixtures",
                             "provider_endpoint", "provider_key", "provider_model",
                             "max_repairs",    "free_order",    "token",       "durable"};

}  // namespace

ServiceConfig load_config(const std::optional<std::filesystem::path>& file,
                          const std::map<std::string, std::string>& env) {
  ServiceConfig c;
  if (file) {
    std::ifstream in(*file);
    if (!in) throw Error(ErrorCode::invalid_argument, "cannot read config " + file->string());
    const auto j = nlohmann::json::parse(in, nullptr, false);
    if (!j.is_object()) throw Error(ErrorCode::invalid_argument, "config must be a JSON object");
    for (const auto& [key, v] : j.items()) {
      if (v.is_string()) set(c, key, v.get<std::string>());
      else if (v.is_boolean()) set(c, key, v.get<bool>() ? "true" : "false");
      else if (v.is_number_integer()) set(c, key, std::to_string(v.get<long>()));
      else throw Error(ErrorCode::invalid_argument, "config value for " + key + " has the wrong type");
    }
  }
  for (const char* key : kKeys) {
    std::string name = "HDFSM_";
    for (const char* p = key; *p; ++p) name += static_cast<char>(std::toupper(*p));
    if (auto it = env.find(name); it != env.end()) set(c, key, it->second);
  }
  if (c.max_repair_attempts < 1) {
    throw Error(ErrorCode::invalid_argument, "max_repairs must be at least 1");
  }
  return c;
}

std::map<std::string, std::string> process_environment() {
  std::map<std::string, std::string> out;
  for (char** e = environ; e && *e; ++e) {
    std::string kv = *e;
    const auto eq = kv.find('=');
    if (eq != std::string::npos && kv.rfind("HDFSM_", 0) == 0) out[kv.substr(0, eq)] = kv.substr(eq + 1);
  }
  return out;
}

}  // namespace hdfsm
