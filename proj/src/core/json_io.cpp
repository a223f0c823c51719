#include "hdfsm/core/json_io.hpp"

namespace hdfsm {

using nlohmann::json;

void to_json(json& j, const Target& t) { j = t.str(); }
void from_json(const json& j, Target& t) { t = Target::parse(j.get<std::string>()); }

void to_json(json& j, const ResponseOption& o) {
  j = json{{"id", o.option_id}, {"label", o.label}, {"target", o.target}};
}
void from_json(const json& j, ResponseOption& o) {
  o.option_id = j.value("id", std::string{});
  j.at("label").get_to(o.label);
  j.at("target").get_to(o.target);
}

void to_json(json& j, const StateTag& t) { j = json{{"key", t.key}, {"value", t.value}}; }
void from_json(const json& j, StateTag& t) {
  j.at("key").get_to(t.key);
  j.at("value").get_to(t.value);
}

void to_json(json& j, const DialogueState& s) {
  j = json{{"id", s.state_id},
           {"utterance", s.utterance},
           {"options", s.options},
           {"entry", s.is_entry}};
  if (!s.tags.empty()) j["tags"] = s.tags;
}
void from_json(const json& j, DialogueState& s) {
  j.at("id").get_to(s.state_id);
  j.at("utterance").get_to(s.utterance);
  s.options = j.value("options", std::vector<ResponseOption>{});
  s.is_entry = j.value("entry", false);
  s.tags = j.value("tags", std::vector<StateTag>{});
}

void to_json(json& j, const DialogueFsm& f) {
  j = json{{"session_id", f.session_id}, {"entry", f.entry}, {"states", f.states}};
}
void from_json(const json& j, DialogueFsm& f) {
  j.at("session_id").get_to(f.session_id);
  j.at("entry").get_to(f.entry);
  j.at("states").get_to(f.states);
}

void to_json(json& j, const SessionTopic& t) {
  j = json{{"id", t.session_id}, {"topic", t.title}, {"key_points", t.key_points}};
}
void from_json(const json& j, SessionTopic& t) {
  j.at("id").get_to(t.session_id);
  j.at("topic").get_to(t.title);
  j.at("key_points").get_to(t.key_points);
  t.ordinal = j.value("ordinal", 0);
}

void to_json(json& j, const SessionPlan& p) {
  j = json{{"sessions", p.sessions}};
  if (p.revision_note) j["revision_note"] = *p.revision_note;
}
void from_json(const json& j, SessionPlan& p) {
  j.at("sessions").get_to(p.sessions);
  p.renumber();
  if (j.contains("revision_note") && !j["revision_note"].is_null()) {
    p.revision_note = j["revision_note"].get<std::string>();
  } else {
    p.revision_note.reset();
  }
}

void to_json(json& j, const Material& m) {
  j = json{{"id", m.id},
           {"title", m.title},
           {"body", m.body},
           {"source", std::string(to_string(m.source))}};
  if (m.imported_name) j["imported_name"] = *m.imported_name;
}
void from_json(const json& j, Material& m) {
  j.at("id").get_to(m.id);
  j.at("title").get_to(m.title);
  j.at("body").get_to(m.body);
  m.source = material_source_from_string(j.value("source", std::string("pasted")))
                 .value_or(MaterialSource::pasted);
  if (j.contains("imported_name") && !j["imported_name"].is_null()) {
    m.imported_name = j["imported_name"].get<std::string>();
  } else {
    m.imported_name.reset();
  }
}

void to_json(json& j, const ProjectContent& c) {
  json fsms = json::object();
  for (const auto& [sid, fsm] : c.fsms) fsms[sid] = fsm;
  j = json{{"plan", c.plan}, {"fsms", std::move(fsms)}};
}
void from_json(const json& j, ProjectContent& c) {
  j.at("plan").get_to(c.plan);
  c.fsms.clear();
  for (const auto& [sid, fsm] : j.at("fsms").items()) c.fsms.emplace(sid, fsm.get<DialogueFsm>());
}

void to_json(json& j, const Defect& d) {
  j = json{{"kind", std::string(to_string(d.kind))},
           {"state", d.location.state_id},
           {"message", d.message}};
  if (d.location.option) j["option"] = *d.location.option;
}

void to_json(json& j, const FsmStats& s) {
  j = json{{"state_count", s.state_count},
           {"option_count", s.option_count},
           {"terminal_count", s.terminal_count},
           {"max_depth", s.max_depth}};
}

}  // namespace hdfsm
