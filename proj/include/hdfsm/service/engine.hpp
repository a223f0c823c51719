#pragma once

#include <cstddef>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <vector>

#include "hdfsm/core/model.hpp"
#include "hdfsm/core/validate.hpp"
#include "hdfsm/editing/history.hpp"
#include "hdfsm/orchestration/coverage.hpp"
#include "hdfsm/orchestration/pipeline.hpp"
#include "hdfsm/runtime/play.hpp"
#include "hdfsm/service/config.hpp"
#include "hdfsm/service/store.hpp"

namespace hdfsm {

// Builds the provider for one operation. `consumed` is the number of
// exchanges the project has already recorded.
using ProviderFactory = std::function<std::unique_ptr<LlmProvider>(std::size_t consumed)>;

// The factory described by the configuration (scripted fixtures, HTTP, or
// a provider that always fails as unreachable).
ProviderFactory make_provider_factory(const ServiceConfig& config);

struct EngineOptions {
  StoreOptions store;
  PipelineOptions pipeline;
  bool free_order = false;
};

struct ProjectView {
  ProjectMeta meta;
  Material material;
  ProjectContent content;
  bool plan_approved = false;
  std::string content_hash;
  std::size_t revision_count = 0;
  bool can_undo = false;
  bool can_redo = false;
};

struct EditOutcome {
  std::string content_hash;
  std::size_t revision_count = 0;
  bool can_undo = false;
  bool can_redo = false;
};

struct SessionStats {
  std::string session_id;
  std::optional<FsmStats> fsm;  // absent until generated
  std::vector<KeyPointCoverage> coverage;
};

struct ProjectStats {
  std::vector<SessionStats> sessions;
  std::size_t revision_count = 0;
};

struct PlayView {
  std::string play_id;
  std::string project_id;
  std::string session_id;
  PlaySession play;
  Progress progress = Progress::not_started;
};

// Everything the CLI and the HTTP layer do to projects goes through here.
// Writes to one project are serialized; distinct projects proceed in
// parallel.
class Engine {
 public:
  Engine(std::filesystem::path store_root, ProviderFactory provider, EngineOptions options = {});
  ~Engine();

  std::string create_project(const std::string& title, const std::string& body,
                             MaterialSource source = MaterialSource::pasted,
                             std::optional<std::string> imported_name = std::nullopt);
  std::vector<ProjectMeta> list_projects();
  ProjectView project(const std::string& id);

  // Runs the planner; a cue revises the current plan. Withdraws approval.
  SessionPlan plan(const std::string& id, const std::optional<std::string>& cue = std::nullopt);
  void approve_plan(const std::string& id);
  DialogueFsm generate(const std::string& id, const std::string& session_id);
  // Every planned session, in plan order.
  std::vector<DialogueFsm> generate_all(const std::string& id);
  std::vector<std::string> suggest(const std::string& id, const std::string& session_id,
                                   const std::string& state_id, std::size_t count);

  EditOutcome edit(const std::string& id, const EditCommand& command);
  EditOutcome undo(const std::string& id);
  EditOutcome redo(const std::string& id);

  // Canonical multi-dialogue document in plan order.
  std::string export_markup(const std::string& id);
  // Installs every dialogue of a valid document; sessions missing from the
  // plan are appended to it, titled after the dialogue.
  EditOutcome import_markup(const std::string& id, const std::string& text);
  ProjectStats stats(const std::string& id);

  PlayView start_play(const std::string& id, const std::string& session_id);
  PlayView choose(const std::string& play_id, std::size_t option_index);
  PlayView play(const std::string& play_id);

  ProjectStore& store() noexcept { return store_; }

 private:
  struct Project;
  struct Play;

  std::shared_ptr<Project> open(const std::string& id);
  EditOutcome commit(Project& p, const LogEvent& event);
  EditOutcome outcome(const Project& p) const;
  void record(Project& p, const std::vector<LlmExchange>& exchanges);
  bool approved(const Project& p) const;
  PlayView view(const Play& play);

  ProjectStore store_;
  ProviderFactory provider_;
  EngineOptions options_;

  std::mutex projects_mu_;
  std::map<std::string, std::shared_ptr<Project>> projects_;

  std::mutex plays_mu_;
  std::map<std::string, std::shared_ptr<Play>> plays_;
  std::size_t next_play_ = 1;
};

std::string plan_hash(const SessionPlan& plan);

}  // namespace hdfsm
