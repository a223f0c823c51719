#pragma once

#include <nlohmann/json.hpp>

#include "hdfsm/core/model.hpp"
#include "hdfsm/core/validate.hpp"

// JSON shapes used by the store, the edit log and the HTTP API. Key names are
// snake_case. A Target is a string: a state id or "END".
namespace hdfsm {

void to_json(nlohmann::json& j, const Target& t);
void from_json(const nlohmann::json& j, Target& t);

void to_json(nlohmann::json& j, const ResponseOption& o);
void from_json(const nlohmann::json& j, ResponseOption& o);

void to_json(nlohmann::json& j, const StateTag& t);
void from_json(const nlohmann::json& j, StateTag& t);

void to_json(nlohmann::json& j, const DialogueState& s);
void from_json(const nlohmann::json& j, DialogueState& s);

void to_json(nlohmann::json& j, const DialogueFsm& f);
void from_json(const nlohmann::json& j, DialogueFsm& f);

void to_json(nlohmann::json& j, const SessionTopic& t);
void from_json(const nlohmann::json& j, SessionTopic& t);

// Same field names as the planner contract: sessions[].{id, topic, key_points}.
void to_json(nlohmann::json& j, const SessionPlan& p);
void from_json(const nlohmann::json& j, SessionPlan& p);

void to_json(nlohmann::json& j, const Material& m);
void from_json(const nlohmann::json& j, Material& m);

void to_json(nlohmann::json& j, const ProjectContent& c);
void from_json(const nlohmann::json& j, ProjectContent& c);

void to_json(nlohmann::json& j, const Defect& d);
void to_json(nlohmann::json& j, const FsmStats& s);

}  // namespace hdfsm
