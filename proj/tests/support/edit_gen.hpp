#pragma once

#include "generators.hpp"
#include "hdfsm/editing/command.hpp"

namespace hdfsm::testing {

// A project with `sessions` topics, each with a valid FSM.
ProjectContent random_project(Rng& rng, std::size_t sessions, std::size_t max_states = 6);

// A command aimed mostly at existing entities so that many apply cleanly.
// Texts come from a tiny pool so that edits often revisit earlier content.
// Some commands are deliberately unusable (unknown ids, duplicate labels,
// orphaning deletes). Topics without a dialogue get one installed.
EditCommand random_command(Rng& rng, const ProjectContent& content);

}  // namespace hdfsm::testing
