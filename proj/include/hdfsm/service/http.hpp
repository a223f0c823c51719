#pragma once

#include <cstddef>
#include <memory>
#include <string>

#include "hdfsm/core/error.hpp"
#include "hdfsm/service/engine.hpp"

namespace hdfsm {

struct HttpOptions {
  std::string token;  // empty: no auth
  std::size_t max_request_bytes = 8 * 1024 * 1024;
  std::size_t idempotency_capacity = 4096;
};

int http_status(ErrorCode code);

// REST front end over an Engine.
class HttpService {
 public:
  HttpService(Engine& engine, HttpOptions options = {});
  ~HttpService();
  HttpService(const HttpService&) = delete;
  HttpService& operator=(const HttpService&) = delete;

  // Returns the bound port; port 0 picks a free one. Throws storage on failure.
  int bind(const std::string& host, int port);
  // Blocks until stop().
  void serve();
  void stop();
  void wait_until_ready();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace hdfsm
