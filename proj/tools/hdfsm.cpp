#include <signal.h>

#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "hdfsm/core/json_io.hpp"
#include "hdfsm/core/text.hpp"
#include "hdfsm/core/validate.hpp"
#include "hdfsm/markup/parser.hpp"
#include "hdfsm/service/config.hpp"
#include "hdfsm/service/engine.hpp"
#include "hdfsm/service/http.hpp"

namespace {

using namespace hdfsm;
using nlohmann::json;

enum Exit { kOk = 0, kDefects = 1, kUsage = 2, kProvider = 3 };

int exit_code(ErrorCode code) {
  switch (code) {
    case ErrorCode::provider_unreachable:
    case ErrorCode::invalid_structured_output:
    case ErrorCode::empty_dialogue:
    case ErrorCode::no_novel_options:
      return kProvider;
    case ErrorCode::invalid_argument:
    case ErrorCode::not_found:
    case ErrorCode::out_of_range:
    case ErrorCode::unsupported_media:
    case ErrorCode::payload_too_large:
    case ErrorCode::unauthorized:
      return kUsage;
    default:
      return kDefects;
  }
}

std::string read_input(const std::string& path) {
  std::ostringstream ss;
  if (path == "-") {
    ss << std::cin.rdbuf();
  } else {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::invalid_argument, "cannot read " + path);
    ss << in.rdbuf();
  }
  return ss.str();
}

void write_output(const std::string& path, const std::string& data) {
  if (path == "-") {
    std::cout << data;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out || !(out << data)) throw Error(ErrorCode::invalid_argument, "cannot write " + path);
}

struct Globals {
  std::string config_file;
  std::string store;
  std::string fixtures;
};

ServiceConfig config_from(const Globals& g) {
  std::optional<std::filesystem::path> file;
  if (!g.config_file.empty()) file = g.config_file;
  auto c = load_config(file, process_environment());
  if (!g.store.empty()) c.store_root = g.store;
  if (!g.fixtures.empty()) {
    c.provider = ProviderKind::scripted;
    c.fixtures = g.fixtures;
  }
  return c;
}

std::unique_ptr<Engine> engine_from(const ServiceConfig& c) {
  EngineOptions o;
  o.store.durable = c.durable_writes;
  o.pipeline.max_attempts = c.max_repair_attempts;
  o.free_order = c.free_order;
  return std::make_unique<Engine>(c.store_root, make_provider_factory(c), o);
}

void print_plan(const SessionPlan& plan) {
  for (const auto& s : plan.sessions) {
    std::cout << s.ordinal << ". " << s.session_id << "  " << s.title << "\n";
    for (const auto& k : s.key_points) std::cout << "     - " << k << "\n";
  }
}

int validate_file(const std::string& path) {
  const auto parsed = markup::parse(read_input(path));
  const std::string name = path == "-" ? "<stdin>" : path;
  if (parsed.ok()) {
    std::cout << name << ": ok (" << parsed.value->dialogues.size() << " dialogue"
              << (parsed.value->dialogues.size() == 1 ? "" : "s") << ")\n";
    return kOk;
  }
  for (const auto& e : parsed.errors) std::cout << name << ":" << e.str() << "\n";
  return kDefects;
}

int validate_project(Engine& engine, const std::string& id) {
  const auto v = engine.project(id);
  int defects = 0;
  for (const auto& topic : v.content.plan.sessions) {
    auto it = v.content.fsms.find(topic.session_id);
    if (it == v.content.fsms.end()) {
      std::cout << topic.session_id << ": not generated\n";
      continue;
    }
    const auto report = validate_fsm(it->second);
    for (const auto& d : report.defects) {
      std::cout << topic.session_id << ": " << d.where() << ": " << to_string(d.kind) << ": "
                << d.message << "\n";
      ++defects;
    }
    if (report.ok()) std::cout << topic.session_id << ": ok\n";
  }
  return defects == 0 ? kOk : kDefects;
}

std::vector<std::size_t> parse_choices(const std::string& s) {
  std::vector<std::size_t> out;
  std::stringstream ss(s);
  for (std::string item; std::getline(ss, item, ',');) {
    item = text::trim(item);
    if (item.empty() || item.find_first_not_of("0123456789") != std::string::npos) {
      throw Error(ErrorCode::invalid_argument, "choices must be comma-separated indices");
    }
    out.push_back(std::stoul(item));
  }
  return out;
}

void show_turn(const PlaySession& play) {
  const auto& t = play.transcript.back();
  std::cout << "[" << t.state_id << "] " << t.utterance << "\n";
  const auto options = play.options();
  for (std::size_t i = 0; i < options.size(); ++i) std::cout << "  " << i << ") " << options[i] << "\n";
}

int play(Engine& engine, const std::string& id, const std::string& session,
         const std::optional<std::string>& choices, bool jsonl) {
  const auto v = engine.project(id);
  auto it = v.content.fsms.find(session);
  if (it == v.content.fsms.end()) throw Error(ErrorCode::not_found, "no dialogue for session " + session);
  auto p = start(std::make_shared<const DialogueFsm>(it->second));
  std::vector<std::size_t> script;
  if (choices) script = parse_choices(*choices);
  std::size_t next = 0;
  if (!jsonl) show_turn(p);
  while (!p.finished) {
    std::size_t pick = 0;
    if (choices) {
      if (next == script.size()) break;
      pick = script[next++];
    } else {
      if (!jsonl) std::cout << "> " << std::flush;
      std::string line;
      if (!std::getline(std::cin, line)) break;
      line = text::trim(line);
      if (line.empty() || line.find_first_not_of("0123456789") != std::string::npos ||
          std::stoul(line) >= p.options().size()) {
        if (!jsonl) {
          std::cout << "pick a number from 0 to " << p.options().size() - 1 << "\n";
          continue;
        }
        throw Error(ErrorCode::out_of_range, "bad choice \"" + line + "\"");
      }
      pick = std::stoul(line);
    }
    const std::size_t turn = p.transcript.size() - 1;
    choose(p, pick);
    if (!jsonl) {
      std::cout << "  -> " << *p.transcript[turn].chosen << "\n";
      if (p.transcript.size() > turn + 1) show_turn(p);
    }
  }
  if (jsonl) std::cout << transcript_jsonl(p.transcript);
  else std::cout << (p.finished ? "(end of conversation)\n" : "(stopped)\n");
  return kOk;
}

void print_stats(const ProjectStats& s, bool as_json) {
  if (as_json) {
    json sessions = json::array();
    for (const auto& ss : s.sessions) {
      json cov = json::array();
      for (const auto& c : ss.coverage) {
        cov.push_back({{"key_point", c.key_point}, {"covered", c.covered}, {"witnesses", c.witnesses}});
      }
      sessions.push_back({{"session_id", ss.session_id},
                          {"fsm", ss.fsm ? json(*ss.fsm) : json(nullptr)},
                          {"coverage", cov}});
    }
    std::cout << json{{"sessions", sessions}, {"revision_count", s.revision_count}}.dump(2) << "\n";
    return;
  }
  for (const auto& ss : s.sessions) {
    std::cout << ss.session_id;
    if (ss.fsm) {
      std::cout << ": " << ss.fsm->state_count << " states, " << ss.fsm->option_count
                << " options, " << ss.fsm->terminal_count << " terminal, depth "
                << ss.fsm->max_depth << "\n";
    } else {
      std::cout << ": not generated\n";
    }
    for (const auto& c : ss.coverage) {
      std::cout << "  [" << (c.covered ? "x" : " ") << "] " << c.key_point;
      if (!c.witnesses.empty()) {
        std::cout << "  (";
        for (std::size_t i = 0; i < c.witnesses.size(); ++i) std::cout << (i ? ", " : "") << c.witnesses[i];
        std::cout << ")";
      }
      std::cout << "\n";
    }
  }
  std::cout << "revisions: " << s.revision_count << "\n";
}

void print_outcome(const EditOutcome& o) {
  std::cout << "hash " << o.content_hash << "  revisions " << o.revision_count << "\n";
}

int serve(const ServiceConfig& c, const std::string& listen) {
  auto config = c;
  if (!listen.empty()) {
    config = load_config(std::nullopt, {{"HDFSM_LISTEN", listen}});
    config.store_root = c.store_root;
    config.provider = c.provider;
    config.fixtures = c.fixtures;
    config.provider_endpoint = c.provider_endpoint;
    config.provider_key = c.provider_key;
    config.provider_model = c.provider_model;
    config.max_repair_attempts = c.max_repair_attempts;
    config.free_order = c.free_order;
    config.token = c.token;
    config.durable_writes = c.durable_writes;
  }
  sigset_t signals;
  sigemptyset(&signals);
  sigaddset(&signals, SIGINT);
  sigaddset(&signals, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &signals, nullptr);

  auto engine = engine_from(config);
  HttpService service(*engine, HttpOptions{config.token});
  const int port = service.bind(config.listen_host, config.listen_port);
  std::cerr << "listening on " << config.listen_host << ":" << port << "\n";
  std::thread waiter([&] {
    int sig = 0;
    sigwait(&signals, &sig);
    service.stop();
  });
  service.serve();
  pthread_kill(waiter.native_handle(), SIGTERM);
  waiter.join();
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Author branching patient-education dialogues."};
  app.require_subcommand(1);
  Globals g;
  app.add_option("--config", g.config_file, "JSON config file");
  app.add_option("--store", g.store, "project store directory (overrides config)");
  app.add_option("--fixtures", g.fixtures, "replay scripted model responses from this directory");

  std::string file, title, id, cue, session, out = "-", choices, listen, command_json;
  bool approve = false, all = false, jsonl = false, as_json = false;

  auto* ingest = app.add_subcommand("ingest", "create a project from material text");
  ingest->add_option("file", file, "material file, or - for stdin")->required();
  ingest->add_option("--title", title, "project title")->required();

  auto* list = app.add_subcommand("list", "list projects");

  auto* plan = app.add_subcommand("plan", "run the planner (a cue revises the current plan)");
  plan->add_option("id", id)->required();
  plan->add_option("--cue", cue, "revision direction");
  plan->add_flag("--approve", approve, "approve the resulting plan");

  auto* approve_cmd = app.add_subcommand("approve", "approve the current plan");
  approve_cmd->add_option("id", id)->required();

  auto* generate = app.add_subcommand("generate", "generate dialogues");
  generate->add_option("id", id)->required();
  auto* session_opt = generate->add_option("--session", session, "one session");
  auto* all_opt = generate->add_flag("--all", all, "every planned session");
  session_opt->excludes(all_opt);

  auto* validate = app.add_subcommand("validate", "validate a project or a .hdfsm file");
  validate->add_option("target", file, "project id, .hdfsm file, or -")->required();

  auto* play_cmd = app.add_subcommand("play", "play a session");
  play_cmd->add_option("id", id)->required();
  play_cmd->add_option("--session", session)->required();
  auto* choices_opt = play_cmd->add_option("--choices", choices, "comma-separated option indices");
  play_cmd->add_flag("--jsonl", jsonl, "print only the transcript as JSON lines");

  auto* export_cmd = app.add_subcommand("export", "write the multi-dialogue document");
  export_cmd->add_option("id", id)->required();
  export_cmd->add_option("-o,--output", out, "output file, or - for stdout");

  auto* import_cmd = app.add_subcommand("import", "install the dialogues of a document");
  import_cmd->add_option("id", id)->required();
  import_cmd->add_option("file", file, "document, or - for stdin")->required();

  auto* stats = app.add_subcommand("stats", "sizes, key-point coverage and revisions");
  stats->add_option("id", id)->required();
  stats->add_flag("--json", as_json);

  auto* edit = app.add_subcommand("edit", "apply one edit command given as JSON");
  edit->add_option("id", id)->required();
  edit->add_option("command", command_json, "JSON command, or - for stdin")->required();

  auto* undo = app.add_subcommand("undo", "undo the last edit");
  undo->add_option("id", id)->required();
  auto* redo = app.add_subcommand("redo", "redo the last undone edit");
  redo->add_option("id", id)->required();

  auto* serve_cmd = app.add_subcommand("serve", "run the HTTP service");
  serve_cmd->add_option("--listen", listen, "host:port");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }

  try {
    const auto config = config_from(g);
    if (validate->parsed()) {
      std::error_code ec;
      if (file == "-" || std::filesystem::is_regular_file(file, ec)) return validate_file(file);
      auto engine = engine_from(config);
      return validate_project(*engine, file);
    }
    if (serve_cmd->parsed()) return serve(config, listen);

    auto engine = engine_from(config);
    if (ingest->parsed()) {
      const auto body = read_input(file);
      std::optional<std::string> imported;
      auto source = MaterialSource::pasted;
      if (file != "-") {
        imported = std::filesystem::path(file).filename().string();
        source = MaterialSource::imported_file;
      }
      std::cout << engine->create_project(title, body, source, imported) << "\n";
    } else if (list->parsed()) {
      for (const auto& m : engine->list_projects()) std::cout << m.id << "\t" << m.title << "\n";
    } else if (plan->parsed()) {
      std::optional<std::string> c;
      if (plan->count("--cue")) c = cue;
      print_plan(engine->plan(id, c));
      if (approve) {
        engine->approve_plan(id);
        std::cout << "approved\n";
      }
    } else if (approve_cmd->parsed()) {
      engine->approve_plan(id);
      std::cout << "approved\n";
    } else if (generate->parsed()) {
      if (!all && session.empty()) {
        std::cerr << "generate: pass --session SID or --all\n";
        return kUsage;
      }
      std::vector<DialogueFsm> fsms;
      if (all) fsms = engine->generate_all(id);
      else fsms.push_back(engine->generate(id, session));
      for (const auto& f : fsms) {
        const auto s = fsm_stats(f);
        std::cout << f.session_id << ": " << s.state_count << " states, " << s.option_count
                  << " options\n";
      }
    } else if (play_cmd->parsed()) {
      std::optional<std::string> c;
      if (choices_opt->count()) c = choices;
      return play(*engine, id, session, c, jsonl);
    } else if (export_cmd->parsed()) {
      write_output(out, engine->export_markup(id));
    } else if (import_cmd->parsed()) {
      print_outcome(engine->import_markup(id, read_input(file)));
    } else if (stats->parsed()) {
      print_stats(engine->stats(id), as_json);
    } else if (edit->parsed()) {
      const auto raw = command_json == "-" ? read_input("-") : command_json;
      const auto j = json::parse(raw, nullptr, false);
      if (j.is_discarded()) throw Error(ErrorCode::invalid_argument, "edit command is not valid JSON");
      EditCommand c;
      try {
        c = command_from_json(j);
      } catch (const Error&) {
        throw;
      } catch (const std::exception& e) {
        throw Error(ErrorCode::invalid_argument, std::string("malformed edit command: ") + e.what());
      }
      print_outcome(engine->edit(id, c));
    } else if (undo->parsed()) {
      print_outcome(engine->undo(id));
    } else if (redo->parsed()) {
      print_outcome(engine->redo(id));
    }
    return kOk;
  } catch (const StructuredOutputError& e) {
    std::cerr << "error: " << to_string(e.code()) << ": " << e.what() << "\n";
    for (const auto& d : e.details()) std::cerr << "  " << d << "\n";
    std::cerr << "  (" << e.exchanges().size() << " model exchanges recorded)\n";
    return exit_code(e.code());
  } catch (const Error& e) {
    std::cerr << "error: " << to_string(e.code()) << ": " << e.what() << "\n";
    for (const auto& d : e.details()) std::cerr << "  " << d << "\n";
    return exit_code(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kDefects;
  }
}
