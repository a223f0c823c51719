#include "hdfsm/service/engine.hpp"

#include <ctime>

#include <nlohmann/json.hpp>

#include "hdfsm/core/digest.hpp"
#include "hdfsm/core/json_io.hpp"
#include "hdfsm/core/text.hpp"
#include "hdfsm/markup/parser.hpp"
#include "hdfsm/markup/serializer.hpp"

namespace hdfsm {

namespace {

std::string utc_now() {
  const std::time_t t = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

class UnconfiguredProvider : public LlmProvider {
 public:
  CompletionResponse complete(const CompletionRequest&) override {
    throw ProviderError("no language model provider is configured");
  }
};

std::vector<std::string> session_order(const SessionPlan& plan) {
  std::vector<std::string> out;
  for (const auto& s : plan.sessions) out.push_back(s.session_id);
  return out;
}

}  // namespace

std::string plan_hash(const SessionPlan& plan) {
  return sha256_hex(nlohmann::json(plan).dump(-1, ' ', false,
                                              nlohmann::json::error_handler_t::replace));
}

ProviderFactory make_provider_factory(const ServiceConfig& config) {
  switch (config.provider) {
    case ProviderKind::scripted: {
      const auto dir = config.fixtures;
      return [dir](std::size_t consumed) -> std::unique_ptr<LlmProvider> {
        return std::make_unique<ScriptedProvider>(ScriptedProvider::read_directory(dir), consumed);
      };
    }
    case ProviderKind::http: {
      HttpProviderConfig http{config.provider_endpoint, config.provider_key,
                              config.provider_model};
      HttpProvider probe(http);  // rejects bad endpoints at startup
      return [http](std::size_t) -> std::unique_ptr<LlmProvider> {
        return std::make_unique<HttpProvider>(http);
      };
    }
    case ProviderKind::none:
      break;
  }
  return [](std::size_t) -> std::unique_ptr<LlmProvider> {
    return std::make_unique<UnconfiguredProvider>();
  };
}

struct Engine::Project {
  std::shared_mutex mu;
  ProjectMeta meta;
  Material material;
  Editor editor;
  std::size_t exchange_count = 0;
  std::unique_ptr<ProgressLedger> ledger;
};

struct Engine::Play {
  std::mutex mu;
  std::string id, project_id, session_id;
  PlaySession session;
};

Engine::Engine(std::filesystem::path store_root, ProviderFactory provider, EngineOptions options)
    : store_(std::move(store_root), options.store),
      provider_(std::move(provider)),
      options_(std::move(options)) {}

Engine::~Engine() = default;

std::shared_ptr<Engine::Project> Engine::open(const std::string& id) {
  std::lock_guard lock(projects_mu_);
  if (auto it = projects_.find(id); it != projects_.end()) return it->second;
  auto stored = store_.load(id);
  auto p = std::make_shared<Project>();
  p->meta = std::move(stored.meta);
  p->material = std::move(stored.material);
  p->exchange_count = stored.exchange_count;
  for (const auto& event : stored.log) p->editor.replay(event);
  // Derived files may lag the log after an interrupted write.
  store_.sync_content(id, p->editor.content());
  projects_[id] = p;
  return p;
}

EditOutcome Engine::outcome(const Project& p) const {
  return {p.editor.hash(), p.editor.revision_count(), p.editor.can_undo(), p.editor.can_redo()};
}

EditOutcome Engine::commit(Project& p, const LogEvent& event) {
  try {
    store_.append_log(p.meta.id, event);
  } catch (...) {
    // Memory ran ahead of disk; reload from the log next time.
    std::lock_guard lock(projects_mu_);
    projects_.erase(p.meta.id);
    throw;
  }
  store_.sync_content(p.meta.id, p.editor.content());
  return outcome(p);
}

void Engine::record(Project& p, const std::vector<LlmExchange>& exchanges) {
  store_.append_exchanges(p.meta.id, exchanges);
  p.exchange_count += exchanges.size();
}

bool Engine::approved(const Project& p) const {
  const auto& plan = p.editor.content().plan;
  return !plan.sessions.empty() && p.meta.approved_plan_hash == plan_hash(plan);
}

std::string Engine::create_project(const std::string& title, const std::string& body,
                                   MaterialSource source, std::optional<std::string> imported_name) {
  Material m{"", title, body, source, std::move(imported_name)};
  if (text::is_blank(title)) throw Error(ErrorCode::invalid_argument, "title must not be empty");
  const auto problems = check_material(m, kDefaultMaterialCap);
  if (!problems.empty()) throw Error(ErrorCode::invalid_argument, problems.front(), problems);
  if (!text::is_valid_utf8(title)) throw Error(ErrorCode::invalid_argument, "title is not valid UTF-8");
  return store_.create(title, m, utc_now());
}

std::vector<ProjectMeta> Engine::list_projects() {
  std::vector<ProjectMeta> out;
  for (const auto& id : store_.list()) {
    auto p = open(id);
    std::shared_lock lock(p->mu);
    out.push_back(p->meta);
  }
  return out;
}

ProjectView Engine::project(const std::string& id) {
  auto p = open(id);
  std::shared_lock lock(p->mu);
  ProjectView v{p->meta, p->material, p->editor.content(), approved(*p), {}, {}, {}, {}};
  const auto o = outcome(*p);
  v.content_hash = o.content_hash;
  v.revision_count = o.revision_count;
  v.can_undo = o.can_undo;
  v.can_redo = o.can_redo;
  return v;
}

SessionPlan Engine::plan(const std::string& id, const std::optional<std::string>& cue) {
  auto p = open(id);
  std::unique_lock lock(p->mu);
  const SessionPlan prior = p->editor.content().plan;
  if (cue && prior.sessions.empty()) {
    throw Error(ErrorCode::conflict, "there is no plan to revise yet");
  }
  auto provider = provider_(p->exchange_count);
  PlanResult result;
  try {
    result = plan_sessions(p->material, cue, &prior, *provider, options_.pipeline);
  } catch (const StructuredOutputError& e) {
    record(*p, e.exchanges());
    throw;
  }
  record(*p, result.exchanges);
  const auto event = p->editor.apply(cmd::InstallPlan{result.plan});
  p->meta.approved_plan_hash.reset();
  store_.write_meta(p->meta);
  commit(*p, event);
  return p->editor.content().plan;
}

void Engine::approve_plan(const std::string& id) {
  auto p = open(id);
  std::unique_lock lock(p->mu);
  const auto& plan = p->editor.content().plan;
  if (plan.sessions.empty()) throw Error(ErrorCode::conflict, "there is no plan to approve");
  p->meta.approved_plan_hash = plan_hash(plan);
  store_.write_meta(p->meta);
}

DialogueFsm Engine::generate(const std::string& id, const std::string& session_id) {
  auto p = open(id);
  std::unique_lock lock(p->mu);
  if (!approved(*p)) throw Error(ErrorCode::conflict, "the session plan is not approved");
  const SessionPlan plan = p->editor.content().plan;
  const SessionTopic* topic = plan.find(session_id);
  if (topic == nullptr) throw Error(ErrorCode::not_found, "no session " + session_id);
  auto provider = provider_(p->exchange_count);
  FsmResult result;
  try {
    result = generate_fsm(p->material, plan, *topic, *provider, options_.pipeline);
  } catch (const StructuredOutputError& e) {
    record(*p, e.exchanges());
    throw;
  }
  record(*p, result.exchanges);
  commit(*p, p->editor.apply(cmd::InstallFsm{result.fsm}));
  return p->editor.content().fsms.at(session_id);
}

std::vector<DialogueFsm> Engine::generate_all(const std::string& id) {
  std::vector<std::string> order;
  {
    auto p = open(id);
    std::shared_lock lock(p->mu);
    if (!approved(*p)) throw Error(ErrorCode::conflict, "the session plan is not approved");
    order = session_order(p->editor.content().plan);
  }
  std::vector<DialogueFsm> out;
  for (const auto& sid : order) out.push_back(generate(id, sid));
  return out;
}

std::vector<std::string> Engine::suggest(const std::string& id, const std::string& session_id,
                                         const std::string& state_id, std::size_t count) {
  auto p = open(id);
  std::unique_lock lock(p->mu);
  const auto& content = p->editor.content();
  auto it = content.fsms.find(session_id);
  const SessionTopic* topic = content.plan.find(session_id);
  if (it == content.fsms.end() || topic == nullptr) {
    throw Error(ErrorCode::not_found, "no dialogue for session " + session_id);
  }
  auto provider = provider_(p->exchange_count);
  SuggestResult result;
  try {
    result = suggest_options(it->second, state_id, *topic, p->material, count, *provider,
                             options_.pipeline);
  } catch (const StructuredOutputError& e) {
    record(*p, e.exchanges());
    throw;
  }
  record(*p, result.exchanges);
  return result.labels;
}

EditOutcome Engine::edit(const std::string& id, const EditCommand& command) {
  auto p = open(id);
  std::unique_lock lock(p->mu);
  return commit(*p, p->editor.apply(command));
}

EditOutcome Engine::undo(const std::string& id) {
  auto p = open(id);
  std::unique_lock lock(p->mu);
  return commit(*p, p->editor.undo());
}

EditOutcome Engine::redo(const std::string& id) {
  auto p = open(id);
  std::unique_lock lock(p->mu);
  return commit(*p, p->editor.redo());
}

std::string Engine::export_markup(const std::string& id) {
  auto p = open(id);
  std::shared_lock lock(p->mu);
  const auto& content = p->editor.content();
  markup::MarkupDocument doc;
  for (const auto& topic : content.plan.sessions) {
    if (auto it = content.fsms.find(topic.session_id); it != content.fsms.end()) {
      doc.dialogues.push_back({topic.title, it->second});
    }
  }
  return markup::serialize(doc);
}

EditOutcome Engine::import_markup(const std::string& id, const std::string& text) {
  auto parsed = markup::parse(text);
  if (!parsed.ok()) {
    std::vector<std::string> details;
    for (const auto& e : parsed.errors) details.push_back(e.str());
    throw Error(ErrorCode::invalid_fsm, "the document does not parse cleanly", details);
  }
  auto p = open(id);
  std::unique_lock lock(p->mu);
  std::vector<EditCommand> commands;
  SessionPlan plan = p->editor.content().plan;
  const auto before = plan.sessions.size();
  for (const auto& d : parsed.value->dialogues) {
    if (plan.find(d.fsm.session_id) != nullptr) continue;
    const std::string title = text::is_blank(d.title) ? d.fsm.session_id : d.title;
    plan.sessions.push_back({d.fsm.session_id, 0, title, {title}});
  }
  plan.renumber();
  if (plan.sessions.size() != before) commands.push_back(cmd::InstallPlan{plan});
  for (const auto& d : parsed.value->dialogues) commands.push_back(cmd::InstallFsm{d.fsm});

  // All or nothing: rehearse on a copy first.
  Editor rehearsal = p->editor;
  for (const auto& c : commands) rehearsal.apply(c);
  EditOutcome last = outcome(*p);
  for (const auto& c : commands) last = commit(*p, p->editor.apply(c));
  return last;
}

ProjectStats Engine::stats(const std::string& id) {
  auto p = open(id);
  std::shared_lock lock(p->mu);
  const auto& content = p->editor.content();
  ProjectStats out;
  for (const auto& topic : content.plan.sessions) {
    SessionStats s{topic.session_id, std::nullopt, {}};
    if (auto it = content.fsms.find(topic.session_id); it != content.fsms.end()) {
      s.fsm = fsm_stats(it->second);
      s.coverage = key_point_coverage(it->second, topic);
    } else {
      s.coverage = key_point_coverage(DialogueFsm{}, topic);
    }
    out.sessions.push_back(std::move(s));
  }
  out.revision_count = p->editor.revision_count();
  return out;
}

PlayView Engine::view(const Play& play) {
  PlayView v{play.id, play.project_id, play.session_id, play.session, Progress::not_started};
  auto p = open(play.project_id);
  std::shared_lock lock(p->mu);
  if (p->ledger) {
    try {
      v.progress = p->ledger->status(play.session_id);
    } catch (const Error&) {
    }
  }
  return v;
}

PlayView Engine::start_play(const std::string& id, const std::string& session_id) {
  auto play = std::make_shared<Play>();
  {
    auto p = open(id);
    std::unique_lock lock(p->mu);
    const auto& content = p->editor.content();
    auto it = content.fsms.find(session_id);
    if (it == content.fsms.end()) {
      throw Error(ErrorCode::not_found, "no dialogue for session " + session_id);
    }
    const auto order = session_order(content.plan);
    if (!p->ledger) {
      p->ledger = std::make_unique<ProgressLedger>(order, options_.free_order);
    } else if (p->ledger->order() != order) {
      p->ledger->reorder(order);
    }
    play->session = start(std::make_shared<const DialogueFsm>(it->second));
    p->ledger->mark_started(session_id);
    if (play->session.finished) p->ledger->mark_completed(session_id, play->session);
  }
  play->project_id = id;
  play->session_id = session_id;
  {
    std::lock_guard lock(plays_mu_);
    play->id = "play-" + std::to_string(next_play_++);
    plays_[play->id] = play;
  }
  std::lock_guard lock(play->mu);
  return view(*play);
}

PlayView Engine::choose(const std::string& play_id, std::size_t option_index) {
  std::shared_ptr<Play> play;
  {
    std::lock_guard lock(plays_mu_);
    auto it = plays_.find(play_id);
    if (it == plays_.end()) throw Error(ErrorCode::not_found, "no play " + play_id);
    play = it->second;
  }
  std::lock_guard lock(play->mu);
  hdfsm::choose(play->session, option_index);
  if (play->session.finished) {
    auto p = open(play->project_id);
    std::unique_lock plock(p->mu);
    if (p->ledger) {
      try {
        p->ledger->mark_completed(play->session_id, play->session);
      } catch (const Error&) {
        // The session left the plan while this play was running.
      }
    }
  }
  return view(*play);
}

PlayView Engine::play(const std::string& play_id) {
  std::shared_ptr<Play> play;
  {
    std::lock_guard lock(plays_mu_);
    auto it = plays_.find(play_id);
    if (it == plays_.end()) throw Error(ErrorCode::not_found, "no play " + play_id);
    play = it->second;
  }
  std::lock_guard lock(play->mu);
  return view(*play);
}

}  // namespace hdfsm
