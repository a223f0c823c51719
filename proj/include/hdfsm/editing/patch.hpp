#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "hdfsm/core/model.hpp"

namespace hdfsm {

// Content-level changes a command compiles to. Each records both sides, so
// the inverse of a patch swaps `before` and `after`. A missing `before`
// inserts at `index`; a missing `after` erases at `index`.
namespace patch {

struct State {
  std::string session;
  std::size_t index = 0;
  std::optional<DialogueState> before, after;
};
struct Entry {
  std::string session;
  std::string before, after;
};
struct Topic {
  std::size_t index = 0;
  std::optional<SessionTopic> before, after;
};
struct TopicOrder {
  std::vector<std::string> before, after;
};
struct Fsm {
  std::string session;
  std::optional<DialogueFsm> before, after;
};
struct Plan {
  SessionPlan before, after;
};

}  // namespace patch

using Patch = std::variant<patch::State, patch::Entry, patch::Topic, patch::TopicOrder,
                           patch::Fsm, patch::Plan>;

// Applies in order. Throws hdfsm::Error(conflict) if the content does not
// match a patch's `before` side.
void apply_patches(ProjectContent& content, const std::vector<Patch>& patches);

// Reverse order, each side swapped.
std::vector<Patch> invert(const std::vector<Patch>& patches);

nlohmann::json patches_to_json(const std::vector<Patch>& patches);
std::vector<Patch> patches_from_json(const nlohmann::json& j);

}  // namespace hdfsm
