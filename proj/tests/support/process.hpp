#pragma once

#include <map>
#include <string>
#include <vector>

namespace hdfsm::testing {

struct ProcessResult {
  int exit_code = -1;
  std::string out, err;
};

// Runs `argv` with `input` on stdin. `env` entries are added to (or
// override) the inherited environment.
ProcessResult run_process(const std::vector<std::string>& argv, const std::string& input = {},
                          const std::map<std::string, std::string>& env = {});

}  // namespace hdfsm::testing
