#include "hdfsm/service/http.hpp"

#include <condition_variable>
#include <list>
#include <map>
#include <mutex>
#include <unordered_map>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "hdfsm/core/digest.hpp"
#include "hdfsm/core/json_io.hpp"
#include "hdfsm/core/text.hpp"
#include "hdfsm/markup/serializer.hpp"
#include "hdfsm/orchestration/exchange.hpp"

namespace hdfsm {

using nlohmann::json;

int http_status(ErrorCode code) {
  switch (code) {
    case ErrorCode::invalid_argument:
    case ErrorCode::out_of_range:
      return 400;
    case ErrorCode::unauthorized:
      return 401;
    case ErrorCode::not_found:
      return 404;
    case ErrorCode::conflict:
    case ErrorCode::would_orphan_entry:
    case ErrorCode::would_orphan_state:
    case ErrorCode::duplicate_label:
    case ErrorCode::duplicate_topic:
    case ErrorCode::nothing_to_undo:
    case ErrorCode::nothing_to_redo:
    case ErrorCode::already_finished:
    case ErrorCode::session_locked:
      return 409;
    case ErrorCode::payload_too_large:
      return 413;
    case ErrorCode::unsupported_media:
      return 415;
    case ErrorCode::unknown_target:
    case ErrorCode::invalid_fsm:
    case ErrorCode::invalid_structured_output:
    case ErrorCode::empty_dialogue:
    case ErrorCode::no_novel_options:
      return 422;
    case ErrorCode::provider_unreachable:
      return 502;
    case ErrorCode::storage:
      return 500;
  }
  return 500;
}

namespace {

constexpr const char* kJson = "application/json";

json error_body(ErrorCode code, const std::string& message,
                const std::vector<std::string>& details = {}) {
  return {{"code", std::string(to_string(code))}, {"message", message}, {"details", details}};
}

void send(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(-1, ' ', false, json::error_handler_t::replace), kJson);
}

json parse_body(const httplib::Request& req, bool allow_empty) {
  if (req.body.empty()) {
    if (allow_empty) return json::object();
    throw Error(ErrorCode::invalid_argument, "request body is empty");
  }
  const auto ct = req.get_header_value("Content-Type");
  if (!ct.empty() && ct.find("json") == std::string::npos) {
    throw Error(ErrorCode::unsupported_media, "expected application/json, got " + ct);
  }
  auto j = json::parse(req.body, nullptr, false);
  if (j.is_discarded() || !j.is_object()) {
    throw Error(ErrorCode::invalid_argument, "request body must be a JSON object");
  }
  return j;
}

// Accepts both `material_text` and `material-text` spellings.
const json* field(const json& j, const std::string& name) {
  if (auto it = j.find(name); it != j.end()) return &*it;
  std::string dashed = name;
  for (auto& c : dashed) if (c == '_') c = '-';
  if (auto it = j.find(dashed); it != j.end()) return &*it;
  return nullptr;
}

std::string string_field(const json& j, const std::string& name, bool required = true) {
  const json* v = field(j, name);
  if (v == nullptr || v->is_null()) {
    if (required) throw Error(ErrorCode::invalid_argument, "missing field \"" + name + "\"");
    return {};
  }
  if (!v->is_string()) throw Error(ErrorCode::invalid_argument, "field \"" + name + "\" must be a string");
  return v->get<std::string>();
}

json outcome_json(const EditOutcome& o) {
  return {{"content_hash", o.content_hash},
          {"revision_count", o.revision_count},
          {"can_undo", o.can_undo},
          {"can_redo", o.can_redo}};
}

json meta_json(const ProjectMeta& m) {
  json j{{"project_id", m.id},
         {"title", m.title},
         {"source", std::string(to_string(m.source))},
         {"created_at", m.created_at}};
  if (m.imported_name) j["imported_name"] = *m.imported_name;
  return j;
}

json coverage_json(const std::vector<KeyPointCoverage>& coverage) {
  json out = json::array();
  for (const auto& c : coverage) {
    out.push_back({{"key_point", c.key_point}, {"covered", c.covered}, {"witnesses", c.witnesses}});
  }
  return out;
}

json play_json(const PlayView& v) {
  json transcript = json::array();
  for (const auto& t : v.play.transcript) {
    json e{{"state_id", t.state_id}, {"utterance", t.utterance}};
    if (t.chosen) e["chosen"] = *t.chosen;
    transcript.push_back(std::move(e));
  }
  json j{{"play_id", v.play_id},
         {"project_id", v.project_id},
         {"session_id", v.session_id},
         {"current", v.play.current.str()},
         {"finished", v.play.finished},
         {"options", v.play.options()},
         {"transcript", std::move(transcript)},
         {"progress", std::string(to_string(v.progress))}};
  if (!v.play.transcript.empty()) j["utterance"] = v.play.transcript.back().utterance;
  return j;
}

std::size_t index_field(const json& j, const std::string& name) {
  const json* v = field(j, name);
  if (v == nullptr) throw Error(ErrorCode::invalid_argument, "missing field \"" + name + "\"");
  if (!v->is_number_integer()) throw Error(ErrorCode::invalid_argument, "field \"" + name + "\" must be an integer");
  const auto n = v->get<long long>();
  if (n < 0) throw Error(ErrorCode::out_of_range, "field \"" + name + "\" must not be negative");
  return static_cast<std::size_t>(n);
}

struct CachedResponse {
  int status = 0;
  std::string body;
  std::string content_type;
  std::string request_digest;
};

// Responses to mutating requests, keyed by the client's Idempotency-Key.
// A retry that arrives while the first attempt still runs waits for it.
class IdempotencyCache {
 public:
  explicit IdempotencyCache(std::size_t capacity) : capacity_(capacity) {}

  struct Slot {
    bool done = false;
    CachedResponse response;
  };

  // Returns the finished response, or nothing when the caller now owns the slot.
  std::optional<CachedResponse> claim(const std::string& key, const std::string& digest) {
    std::unique_lock lock(mu_);
    for (;;) {
      auto it = slots_.find(key);
      if (it == slots_.end()) {
        slots_.emplace(key, Slot{});
        return std::nullopt;
      }
      if (it->second.done) {
        if (it->second.response.request_digest != digest) {
          CachedResponse clash{409,
                               error_body(ErrorCode::conflict,
                                          "idempotency key was already used for a different request")
                                   .dump(),
                               kJson, digest};
          return clash;
        }
        return it->second.response;
      }
      cv_.wait(lock);
    }
  }

  void finish(const std::string& key, CachedResponse response, bool keep) {
    std::lock_guard lock(mu_);
    if (!keep) {
      slots_.erase(key);
    } else {
      auto& slot = slots_[key];
      slot.done = true;
      slot.response = std::move(response);
      order_.push_back(key);
      while (order_.size() > capacity_) {
        slots_.erase(order_.front());
        order_.pop_front();
      }
    }
    cv_.notify_all();
  }

 private:
  std::size_t capacity_;
  std::mutex mu_;
  std::condition_variable cv_;
  std::unordered_map<std::string, Slot> slots_;
  std::list<std::string> order_;
};

}  // namespace

struct HttpService::Impl {
  Engine& engine;
  HttpOptions options;
  httplib::Server server;
  IdempotencyCache cache;

  Impl(Engine& e, HttpOptions o) : engine(e), options(std::move(o)), cache(options.idempotency_capacity) {}

  using Handler = std::function<void(const httplib::Request&, httplib::Response&)>;

  bool authorized(const httplib::Request& req) const {
    if (options.token.empty()) return true;
    return req.get_header_value("Authorization") == "Bearer " + options.token;
  }

  // Auth, error mapping, and replay of idempotent retries.
  Handler wrap(Handler inner, bool mutating) {
    return [this, inner = std::move(inner), mutating](const httplib::Request& req,
                                                      httplib::Response& res) {
      if (!authorized(req)) {
        send(res, 401, error_body(ErrorCode::unauthorized, "missing or wrong bearer token"));
        return;
      }
      const auto key = mutating ? req.get_header_value("Idempotency-Key") : std::string();
      std::string slot, digest;
      if (!key.empty()) {
        slot = req.method + " " + req.path + "\n" + key;
        digest = sha256_hex(req.get_header_value("Content-Type") + "\n" + req.body);
        if (auto hit = cache.claim(slot, digest)) {
          res.status = hit->status;
          res.set_content(hit->body, hit->content_type);
          res.set_header("Idempotent-Replay", "true");
          return;
        }
      }
      run(inner, req, res);
      if (!key.empty()) {
        // Server-side failures are worth retrying for real.
        const bool keep = res.status < 500;
        cache.finish(slot, {res.status, res.body, res.get_header_value("Content-Type"), digest}, keep);
      }
    };
  }

  static void run(const Handler& inner, const httplib::Request& req, httplib::Response& res) {
    try {
      res.status = 200;
      inner(req, res);
    } catch (const StructuredOutputError& e) {
      auto body = error_body(e.code(), e.what(), e.details());
      body["exchanges"] = e.exchanges();
      send(res, http_status(e.code()), body);
    } catch (const Error& e) {
      send(res, http_status(e.code()), error_body(e.code(), e.what(), e.details()));
    } catch (const json::exception& e) {
      send(res, 400, error_body(ErrorCode::invalid_argument, e.what()));
    } catch (const std::exception& e) {
      send(res, 500, error_body(ErrorCode::storage, e.what()));
    }
  }

  void get(const std::string& pattern, Handler h) { server.Get(pattern, wrap(std::move(h), false)); }
  void post(const std::string& pattern, Handler h) { server.Post(pattern, wrap(std::move(h), true)); }
  void put(const std::string& pattern, Handler h) { server.Put(pattern, wrap(std::move(h), true)); }

  void create_project(const httplib::Request& req, httplib::Response& res) {
    std::string title, body;
    MaterialSource source = MaterialSource::pasted;
    std::optional<std::string> imported_name;
    if (req.is_multipart_form_data()) {
      if (req.has_file("title")) title = req.get_file_value("title").content;
      const char* names[] = {"material_file", "material-file", "material_text", "material-text"};
      const httplib::MultipartFormData* part = nullptr;
      for (const char* n : names) {
        if (req.has_file(n)) {
          part = &req.files.find(n)->second;
          break;
        }
      }
      if (part == nullptr) throw Error(ErrorCode::invalid_argument, "missing material_file part");
      if (!part->filename.empty()) {
        const auto& ct = part->content_type;
        const bool texty = ct.empty() || ct.rfind("text/", 0) == 0;
        if (!texty || !text::is_valid_utf8(part->content) ||
            part->content.find('\0') != std::string::npos) {
          throw Error(ErrorCode::unsupported_media, "uploaded material must be a UTF-8 text file");
        }
        source = MaterialSource::imported_file;
        imported_name = part->filename;
      }
      body = part->content;
    } else {
      const auto j = parse_body(req, false);
      title = string_field(j, "title");
      body = string_field(j, "material_text");
    }
    if (title.empty() && imported_name) title = *imported_name;
    const auto id = engine.create_project(title, body, source, imported_name);
    res.status = 201;
    res.set_header("Location", "/projects/" + id);
    res.set_content(json{{"project_id", id}}.dump(), kJson);
  }

  void routes() {
    server.set_payload_max_length(options.max_request_bytes);

    get("/health", [](const auto&, auto& res) { send(res, 200, {{"status", "ok"}}); });

    post("/projects", [this](const auto& req, auto& res) { create_project(req, res); });

    get("/projects", [this](const auto&, auto& res) {
      json out = json::array();
      for (const auto& m : engine.list_projects()) out.push_back(meta_json(m));
      send(res, 200, out);
    });

    get(R"(/projects/([^/]+))", [this](const auto& req, auto& res) {
      const auto v = engine.project(req.matches[1]);
      json j = meta_json(v.meta);
      j["material_text"] = v.material.body;
      j["plan"] = v.content.plan;
      j["plan_approved"] = v.plan_approved;
      json sessions = json::array();
      for (const auto& [sid, fsm] : v.content.fsms) sessions.push_back(sid);
      j["generated_sessions"] = sessions;
      j["content_hash"] = v.content_hash;
      j["revision_count"] = v.revision_count;
      j["can_undo"] = v.can_undo;
      j["can_redo"] = v.can_redo;
      send(res, 200, j);
    });

    post(R"(/projects/([^/]+)/plan)", [this](const auto& req, auto& res) {
      const auto j = parse_body(req, true);
      std::optional<std::string> cue;
      if (const json* c = field(j, "cue"); c != nullptr && !c->is_null()) cue = string_field(j, "cue");
      send(res, 200, engine.plan(req.matches[1], cue));
    });

    get(R"(/projects/([^/]+)/plan)", [this](const auto& req, auto& res) {
      const auto v = engine.project(req.matches[1]);
      send(res, 200, {{"plan", v.content.plan}, {"approved", v.plan_approved}});
    });

    put(R"(/projects/([^/]+)/plan/approve)", [this](const auto& req, auto& res) {
      engine.approve_plan(req.matches[1]);
      const auto v = engine.project(req.matches[1]);
      send(res, 200, {{"approved", true}, {"plan_hash", plan_hash(v.content.plan)}});
    });

    post(R"(/projects/([^/]+)/sessions/([^/]+)/generate)", [this](const auto& req, auto& res) {
      send(res, 200, engine.generate(req.matches[1], req.matches[2]));
    });

    post(R"(/projects/([^/]+)/generate)", [this](const auto& req, auto& res) {
      send(res, 200, engine.generate_all(req.matches[1]));
    });

    get(R"(/projects/([^/]+)/sessions/([^/]+)/fsm)", [this](const auto& req, auto& res) {
      const auto v = engine.project(req.matches[1]);
      const std::string sid = req.matches[2];
      auto it = v.content.fsms.find(sid);
      if (it == v.content.fsms.end()) throw Error(ErrorCode::not_found, "no dialogue for session " + sid);
      if (req.get_param_value("format") == "hdfsm") {
        res.set_content(ProjectStore::session_file_text(v.content.plan.find(sid), it->second),
                        "text/plain; charset=utf-8");
        return;
      }
      send(res, 200, it->second);
    });

    post(R"(/projects/([^/]+)/sessions/([^/]+)/states/([^/]+)/suggest)",
         [this](const auto& req, auto& res) {
           const auto j = parse_body(req, true);
           const std::size_t count = field(j, "count") ? index_field(j, "count") : 3;
           if (count == 0 || count > 20) throw Error(ErrorCode::out_of_range, "count must be 1..20");
           const auto labels = engine.suggest(req.matches[1], req.matches[2], req.matches[3], count);
           json drafts = json::array();
           for (const auto& l : labels) drafts.push_back({{"label", l}, {"target", nullptr}});
           send(res, 200, {{"options", drafts}});
         });

    post(R"(/projects/([^/]+)/edits)", [this](const auto& req, auto& res) {
      const auto j = parse_body(req, false);
      EditCommand command;
      try {
        command = command_from_json(j);
      } catch (const Error&) {
        throw;
      } catch (const std::exception& e) {
        throw Error(ErrorCode::invalid_argument, std::string("malformed edit command: ") + e.what());
      }
      send(res, 200, outcome_json(engine.edit(req.matches[1], command)));
    });

    post(R"(/projects/([^/]+)/undo)", [this](const auto& req, auto& res) {
      send(res, 200, outcome_json(engine.undo(req.matches[1])));
    });
    post(R"(/projects/([^/]+)/redo)", [this](const auto& req, auto& res) {
      send(res, 200, outcome_json(engine.redo(req.matches[1])));
    });

    get(R"(/projects/([^/]+)/export)", [this](const auto& req, auto& res) {
      const std::string id = req.matches[1];
      res.set_content(engine.export_markup(id), "text/plain; charset=utf-8");
      res.set_header("Content-Disposition", "attachment; filename=\"" + id + ".hdfsm\"");
    });

    post(R"(/projects/([^/]+)/import)", [this](const auto& req, auto& res) {
      std::string text;
      const auto ct = req.get_header_value("Content-Type");
      if (ct.rfind("text/", 0) == 0) {
        text = req.body;
      } else {
        text = string_field(parse_body(req, false), "markup");
      }
      send(res, 200, outcome_json(engine.import_markup(req.matches[1], text)));
    });

    get(R"(/projects/([^/]+)/stats)", [this](const auto& req, auto& res) {
      const auto s = engine.stats(req.matches[1]);
      json sessions = json::array();
      for (const auto& ss : s.sessions) {
        json e{{"session_id", ss.session_id}, {"coverage", coverage_json(ss.coverage)}};
        e["fsm"] = ss.fsm ? json(*ss.fsm) : json(nullptr);
        sessions.push_back(std::move(e));
      }
      send(res, 200, {{"sessions", sessions}, {"revision_count", s.revision_count}});
    });

    post(R"(/projects/([^/]+)/play/([^/]+))", [this](const auto& req, auto& res) {
      send(res, 201, play_json(engine.start_play(req.matches[1], req.matches[2])));
    });
    post(R"(/play/([^/]+)/choose)", [this](const auto& req, auto& res) {
      const auto j = parse_body(req, false);
      send(res, 200, play_json(engine.choose(req.matches[1], index_field(j, "index"))));
    });
    get(R"(/play/([^/]+))", [this](const auto& req, auto& res) {
      send(res, 200, play_json(engine.play(req.matches[1])));
    });

    server.set_error_handler([](const httplib::Request&, httplib::Response& res) {
      if (!res.body.empty()) return;
      if (res.status == 404) send(res, 404, error_body(ErrorCode::not_found, "no such route"));
      else if (res.status == 413) send(res, 413, error_body(ErrorCode::payload_too_large, "request body too large"));
      else if (res.status == 415) send(res, 415, error_body(ErrorCode::unsupported_media, "unsupported media type"));
    });
  }
};

HttpService::HttpService(Engine& engine, HttpOptions options)
    : impl_(std::make_unique<Impl>(engine, std::move(options))) {
  impl_->routes();
}

HttpService::~HttpService() { stop(); }

int HttpService::bind(const std::string& host, int port) {
  const int bound = port == 0 ? impl_->server.bind_to_any_port(host)
                              : (impl_->server.bind_to_port(host, port) ? port : -1);
  if (bound < 0) throw Error(ErrorCode::storage, "cannot listen on " + host + ":" + std::to_string(port));
  return bound;
}

void HttpService::serve() { impl_->server.listen_after_bind(); }

void HttpService::stop() { impl_->server.stop(); }

void HttpService::wait_until_ready() { impl_->server.wait_until_ready(); }

}  // namespace hdfsm
