#include "hdfsm/core/validate.hpp"

#include <algorithm>
#include <map>
#include <unordered_map>
#include <unordered_set>

#include "hdfsm/core/text.hpp"

namespace hdfsm {

std::string_view to_string(DefectKind kind) {
  switch (kind) {
    case DefectKind::no_entry: return "no-entry";
    case DefectKind::multiple_entry: return "multiple-entry";
    case DefectKind::dangling_target: return "dangling-target";
    case DefectKind::unreachable_state: return "unreachable-state";
    case DefectKind::duplicate_option_label: return "duplicate-option-label";
    case DefectKind::empty_utterance: return "empty-utterance";
    case DefectKind::empty_label: return "empty-label";
    case DefectKind::duplicate_state: return "duplicate-state";
  }
  return "unknown";
}

std::string Defect::where() const {
  if (location.state_id.empty()) return "<fsm>";
  std::string out = location.state_id;
  if (location.option) out += "/option" + std::to_string(*location.option + 1);
  return out;
}

std::size_t ValidationReport::count(DefectKind kind) const {
  return static_cast<std::size_t>(std::count_if(
      defects.begin(), defects.end(), [&](const Defect& d) { return d.kind == kind; }));
}

namespace {

// Adjacency by state index; dangling and END targets dropped, duplicates
// collapsed.
std::vector<std::vector<std::size_t>> adjacency(const DialogueFsm& fsm) {
  std::unordered_map<std::string_view, std::size_t> index;
  for (std::size_t i = 0; i < fsm.states.size(); ++i) {
    index.emplace(fsm.states[i].state_id, i);  // first occurrence wins
  }
  std::vector<std::vector<std::size_t>> adj(fsm.states.size());
  for (std::size_t i = 0; i < fsm.states.size(); ++i) {
    for (const auto& option : fsm.states[i].options) {
      if (option.target.is_end()) continue;
      auto it = index.find(option.target.state_id());
      if (it == index.end()) continue;
      if (std::find(adj[i].begin(), adj[i].end(), it->second) == adj[i].end()) {
        adj[i].push_back(it->second);
      }
    }
  }
  return adj;
}

std::vector<bool> reachable_mask(const DialogueFsm& fsm,
                                 const std::vector<std::vector<std::size_t>>& adj) {
  std::vector<bool> seen(fsm.states.size(), false);
  auto root = fsm.index_of(fsm.entry);
  if (!root) return seen;
  std::vector<std::size_t> stack{*root};
  seen[*root] = true;
  while (!stack.empty()) {
    const std::size_t cur = stack.back();
    stack.pop_back();
    for (std::size_t next : adj[cur]) {
      if (!seen[next]) {
        seen[next] = true;
        stack.push_back(next);
      }
    }
  }
  return seen;
}

}  // namespace

ValidationReport validate_fsm(const DialogueFsm& fsm) {
  ValidationReport report;
  auto add = [&](DefectKind kind, std::string state, std::optional<std::size_t> option,
                 std::string message) {
    report.defects.push_back(
        Defect{kind, DefectLocation{std::move(state), option}, std::move(message)});
  };

  std::vector<const DialogueState*> flagged;
  for (const auto& state : fsm.states) {
    if (state.is_entry) flagged.push_back(&state);
  }
  if (flagged.empty()) {
    add(DefectKind::no_entry, "", std::nullopt, "no state is marked as the entry");
  } else if (flagged.size() > 1) {
    for (const auto* state : flagged) {
      add(DefectKind::multiple_entry, state->state_id, std::nullopt,
          "state '" + state->state_id + "' is one of " + std::to_string(flagged.size()) +
              " entry states");
    }
  } else if (flagged.front()->state_id != fsm.entry) {
    add(DefectKind::no_entry, flagged.front()->state_id, std::nullopt,
        "entry is declared as '" + fsm.entry + "' but state '" + flagged.front()->state_id +
            "' carries the entry flag");
  }

  std::unordered_set<std::string_view> seen_ids;
  for (const auto& state : fsm.states) {
    if (text::is_blank(state.utterance)) {
      add(DefectKind::empty_utterance, state.state_id, std::nullopt,
          "state '" + state.state_id + "' has an empty agent utterance");
    }
    if (!seen_ids.insert(state.state_id).second) {
      add(DefectKind::duplicate_state, state.state_id, std::nullopt,
          "state id '" + state.state_id + "' is declared more than once");
    }
    std::unordered_set<std::string> labels;
    for (std::size_t i = 0; i < state.options.size(); ++i) {
      const auto& option = state.options[i];
      if (text::is_blank(option.label)) {
        add(DefectKind::empty_label, state.state_id, i, "option label is empty");
      } else if (!labels.insert(text::comparison_key(option.label)).second) {
        add(DefectKind::duplicate_option_label, state.state_id, i,
            "option label \"" + option.label + "\" repeats within the state");
      }
      if (!option.target.is_end() && fsm.find(option.target.state_id()) == nullptr) {
        add(DefectKind::dangling_target, state.state_id, i,
            "option targets undeclared state '" + option.target.state_id() + "'");
      }
    }
  }

  if (fsm.index_of(fsm.entry)) {
    const auto mask = reachable_mask(fsm, adjacency(fsm));
    for (std::size_t i = 0; i < fsm.states.size(); ++i) {
      if (!mask[i]) {
        add(DefectKind::unreachable_state, fsm.states[i].state_id, std::nullopt,
            "state '" + fsm.states[i].state_id + "' cannot be reached from the entry");
      }
    }
  }
  return report;
}

std::set<std::string> reachable_states(const DialogueFsm& fsm) {
  const auto mask = reachable_mask(fsm, adjacency(fsm));
  std::set<std::string> out;
  for (std::size_t i = 0; i < fsm.states.size(); ++i) {
    if (mask[i]) out.insert(fsm.states[i].state_id);
  }
  return out;
}

FsmStats fsm_stats(const DialogueFsm& fsm) {
  FsmStats stats;
  const auto adj = adjacency(fsm);
  const auto mask = reachable_mask(fsm, adj);
  for (std::size_t i = 0; i < fsm.states.size(); ++i) {
    if (!mask[i]) continue;
    ++stats.state_count;
    stats.option_count += fsm.states[i].options.size();
    if (fsm.states[i].options.empty()) ++stats.terminal_count;
  }
  auto root = fsm.index_of(fsm.entry);
  if (!root) return stats;

  // Iterative DFS over simple paths; each frame remembers the next child.
  struct Frame {
    std::size_t node;
    std::size_t next_child;
  };
  std::vector<bool> on_path(fsm.states.size(), false);
  std::vector<Frame> path{{*root, 0}};
  on_path[*root] = true;
  while (!path.empty()) {
    stats.max_depth = std::max(stats.max_depth, path.size() - 1);
    Frame& top = path.back();
    if (top.next_child == adj[top.node].size()) {
      on_path[top.node] = false;
      path.pop_back();
      continue;
    }
    const std::size_t child = adj[top.node][top.next_child++];
    if (on_path[child]) continue;
    on_path[child] = true;
    path.push_back({child, 0});
  }
  return stats;
}

std::vector<std::string> check_material(const Material& material, std::size_t cap) {
  std::vector<std::string> issues;
  if (text::is_blank(material.body)) issues.emplace_back("material body is empty");
  if (material.body.size() > cap) {
    issues.push_back("material body has " + std::to_string(material.body.size()) +
                     " characters, above the cap of " + std::to_string(cap));
  }
  if (!text::is_valid_utf8(material.body)) issues.emplace_back("material body is not UTF-8");
  return issues;
}

std::string_view to_string(PlanViolation v) {
  switch (v) {
    case PlanViolation::no_sessions: return "no-sessions";
    case PlanViolation::bad_ordinals: return "bad-ordinals";
    case PlanViolation::empty_title: return "empty-title";
    case PlanViolation::empty_key_points: return "empty-key-points";
    case PlanViolation::duplicate_topic: return "duplicate-topic";
    case PlanViolation::invalid_identifier: return "invalid-identifier";
    case PlanViolation::duplicate_id: return "duplicate-id";
  }
  return "unknown";
}

std::vector<PlanIssue> check_plan(const SessionPlan& plan) {
  std::vector<PlanIssue> issues;
  if (plan.sessions.empty()) {
    issues.push_back({PlanViolation::no_sessions, 0, "plan has no sessions"});
    return issues;
  }
  std::map<std::string, std::size_t> titles;
  std::map<std::string, std::size_t> ids;
  for (std::size_t i = 0; i < plan.sessions.size(); ++i) {
    const auto& topic = plan.sessions[i];
    if (topic.ordinal != static_cast<int>(i + 1)) {
      issues.push_back({PlanViolation::bad_ordinals, i,
                        "session " + std::to_string(i + 1) + " has ordinal " +
                            std::to_string(topic.ordinal)});
    }
    if (!is_valid_identifier(topic.session_id)) {
      issues.push_back({PlanViolation::invalid_identifier, i,
                        "session id '" + topic.session_id + "' is not a valid identifier"});
    } else if (!ids.emplace(topic.session_id, i).second) {
      issues.push_back({PlanViolation::duplicate_id, i,
                        "session id '" + topic.session_id + "' is used twice"});
    }
    if (text::is_blank(topic.title)) {
      issues.push_back({PlanViolation::empty_title, i, "session topic is empty"});
    } else {
      auto [it, inserted] = titles.emplace(text::comparison_key(topic.title), i);
      if (!inserted) {
        issues.push_back({PlanViolation::duplicate_topic, i,
                          "topic \"" + topic.title + "\" duplicates session " +
                              std::to_string(it->second + 1)});
      }
    }
    const bool any_point = std::any_of(topic.key_points.begin(), topic.key_points.end(),
                                       [](const std::string& p) { return !text::is_blank(p); });
    if (!any_point ||
        std::any_of(topic.key_points.begin(), topic.key_points.end(),
                    [](const std::string& p) { return text::is_blank(p); })) {
      issues.push_back({PlanViolation::empty_key_points, i,
                        "session \"" + topic.title + "\" needs non-empty key points"});
    }
  }
  return issues;
}

std::vector<std::string> check_content(const ProjectContent& content) {
  std::vector<std::string> issues;
  for (const auto& [sid, fsm] : content.fsms) {
    if (content.plan.find(sid) == nullptr) {
      issues.push_back("dialogue '" + sid + "' has no session in the plan");
    }
    if (fsm.session_id != sid) {
      issues.push_back("dialogue stored under '" + sid + "' names session '" + fsm.session_id +
                       "'");
    }
  }
  return issues;
}

}  // namespace hdfsm
