#include "hdfsm/editing/command.hpp"

#include <array>

#include "hdfsm/core/error.hpp"
#include "hdfsm/core/json_io.hpp"

namespace hdfsm {

namespace {

constexpr std::array<std::pair<CommandKind, std::string_view>, 15> kKindNames{{
    {CommandKind::edit_utterance, "edit-utterance"},
    {CommandKind::add_state, "add-state"},
    {CommandKind::delete_state, "delete-state"},
    {CommandKind::add_option, "add-option"},
    {CommandKind::edit_option_label, "edit-option-label"},
    {CommandKind::delete_option, "delete-option"},
    {CommandKind::connect_option, "connect-option"},
    {CommandKind::set_entry, "set-entry"},
    {CommandKind::reorder_topics, "reorder-topics"},
    {CommandKind::add_topic, "add-topic"},
    {CommandKind::delete_topic, "delete-topic"},
    {CommandKind::rename_topic, "rename-topic"},
    {CommandKind::accept_suggestion, "accept-suggestion"},
    {CommandKind::install_plan, "install-plan"},
    {CommandKind::install_fsm, "install-fsm"},
}};

using nlohmann::json;

const json& field(const json& j, const char* key) {
  if (!j.contains(key)) {
    throw Error(ErrorCode::invalid_argument, std::string("missing field \"") + key + "\"");
  }
  return j.at(key);
}

std::string str(const json& j, const char* key) {
  const auto& v = field(j, key);
  if (!v.is_string()) {
    throw Error(ErrorCode::invalid_argument, std::string("field \"") + key + "\" must be a string");
  }
  return v.get<std::string>();
}

std::optional<std::string> opt_str(const json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return str(j, key);
}

std::vector<std::string> str_list(const json& j, const char* key) {
  const auto& v = field(j, key);
  if (!v.is_array()) {
    throw Error(ErrorCode::invalid_argument, std::string("field \"") + key + "\" must be a list");
  }
  std::vector<std::string> out;
  for (const auto& item : v) {
    if (!item.is_string()) {
      throw Error(ErrorCode::invalid_argument, std::string("field \"") + key + "\" must hold strings");
    }
    out.push_back(item.get<std::string>());
  }
  return out;
}

void put_opt(json& j, const char* key, const std::optional<std::string>& v) {
  if (v) j[key] = *v;
}

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

}  // namespace

std::string_view to_string(CommandKind kind) {
  for (const auto& [k, name] : kKindNames) {
    if (k == kind) return name;
  }
  return "unknown";
}

std::optional<CommandKind> command_kind_from_string(std::string_view s) {
  for (const auto& [k, name] : kKindNames) {
    if (name == s) return k;
  }
  return std::nullopt;
}

bool counts_as_revision(CommandKind kind) {
  switch (kind) {
    case CommandKind::connect_option:
    case CommandKind::reorder_topics:
    case CommandKind::set_entry:
    case CommandKind::install_plan:
    case CommandKind::install_fsm:
      return false;
    default:
      return true;
  }
}

CommandKind kind_of(const EditCommand& command) {
  return std::visit(
      overloaded{
          [](const cmd::EditUtterance&) { return CommandKind::edit_utterance; },
          [](const cmd::AddState&) { return CommandKind::add_state; },
          [](const cmd::DeleteState&) { return CommandKind::delete_state; },
          [](const cmd::AddOption&) { return CommandKind::add_option; },
          [](const cmd::EditOptionLabel&) { return CommandKind::edit_option_label; },
          [](const cmd::DeleteOption&) { return CommandKind::delete_option; },
          [](const cmd::ConnectOption&) { return CommandKind::connect_option; },
          [](const cmd::SetEntry&) { return CommandKind::set_entry; },
          [](const cmd::ReorderTopics&) { return CommandKind::reorder_topics; },
          [](const cmd::AddTopic&) { return CommandKind::add_topic; },
          [](const cmd::DeleteTopic&) { return CommandKind::delete_topic; },
          [](const cmd::RenameTopic&) { return CommandKind::rename_topic; },
          [](const cmd::AcceptSuggestion&) { return CommandKind::accept_suggestion; },
          [](const cmd::InstallPlan&) { return CommandKind::install_plan; },
          [](const cmd::InstallFsm&) { return CommandKind::install_fsm; },
      },
      command);
}

json command_to_json(const EditCommand& command) {
  json j = {{"kind", to_string(kind_of(command))}};
  std::visit(overloaded{
                 [&](const cmd::EditUtterance& c) {
                   j["session"] = c.session;
                   j["state"] = c.state;
                   j["text"] = c.text;
                 },
                 [&](const cmd::AddState& c) {
                   j["session"] = c.session;
                   put_opt(j, "state", c.state);
                   j["utterance"] = c.utterance;
                   j["from_state"] = c.from_state;
                   j["label"] = c.label;
                 },
                 [&](const cmd::DeleteState& c) {
                   j["session"] = c.session;
                   j["state"] = c.state;
                 },
                 [&](const cmd::AddOption& c) {
                   j["session"] = c.session;
                   j["state"] = c.state;
                   j["label"] = c.label;
                   j["target"] = c.target.str();
                 },
                 [&](const cmd::EditOptionLabel& c) {
                   j["session"] = c.session;
                   j["state"] = c.state;
                   j["option"] = c.option;
                   j["label"] = c.label;
                 },
                 [&](const cmd::DeleteOption& c) {
                   j["session"] = c.session;
                   j["state"] = c.state;
                   j["option"] = c.option;
                 },
                 [&](const cmd::ConnectOption& c) {
                   j["session"] = c.session;
                   j["state"] = c.state;
                   j["option"] = c.option;
                   j["target"] = c.target.str();
                 },
                 [&](const cmd::SetEntry& c) {
                   j["session"] = c.session;
                   j["state"] = c.state;
                 },
                 [&](const cmd::ReorderTopics& c) { j["order"] = c.order; },
                 [&](const cmd::AddTopic& c) {
                   put_opt(j, "session", c.session);
                   j["title"] = c.title;
                   j["key_points"] = c.key_points;
                   if (c.index) j["index"] = *c.index;
                 },
                 [&](const cmd::DeleteTopic& c) { j["session"] = c.session; },
                 [&](const cmd::RenameTopic& c) {
                   j["session"] = c.session;
                   j["title"] = c.title;
                 },
                 [&](const cmd::AcceptSuggestion& c) {
                   j["session"] = c.session;
                   j["state"] = c.state;
                   j["label"] = c.label;
                   if (c.target) j["target"] = c.target->str();
                   put_opt(j, "stub_state", c.stub_state);
                   put_opt(j, "stub_utterance", c.stub_utterance);
                 },
                 [&](const cmd::InstallPlan& c) { j["plan"] = c.plan; },
                 [&](const cmd::InstallFsm& c) { j["fsm"] = c.fsm; },
             },
             command);
  return j;
}

EditCommand command_from_json(const json& j) {
  if (!j.is_object()) throw Error(ErrorCode::invalid_argument, "edit command must be an object");
  const auto kind = command_kind_from_string(str(j, "kind"));
  if (!kind) throw Error(ErrorCode::invalid_argument, "unknown edit kind " + str(j, "kind"));
  switch (*kind) {
    case CommandKind::edit_utterance:
      return cmd::EditUtterance{str(j, "session"), str(j, "state"), str(j, "text")};
    case CommandKind::add_state:
      return cmd::AddState{str(j, "session"), opt_str(j, "state"), str(j, "utterance"),
                           str(j, "from_state"), str(j, "label")};
    case CommandKind::delete_state:
      return cmd::DeleteState{str(j, "session"), str(j, "state")};
    case CommandKind::add_option:
      return cmd::AddOption{str(j, "session"), str(j, "state"), str(j, "label"),
                            Target::parse(str(j, "target"))};
    case CommandKind::edit_option_label:
      return cmd::EditOptionLabel{str(j, "session"), str(j, "state"), str(j, "option"),
                                  str(j, "label")};
    case CommandKind::delete_option:
      return cmd::DeleteOption{str(j, "session"), str(j, "state"), str(j, "option")};
    case CommandKind::connect_option:
      return cmd::ConnectOption{str(j, "session"), str(j, "state"), str(j, "option"),
                                Target::parse(str(j, "target"))};
    case CommandKind::set_entry:
      return cmd::SetEntry{str(j, "session"), str(j, "state")};
    case CommandKind::reorder_topics:
      return cmd::ReorderTopics{str_list(j, "order")};
    case CommandKind::add_topic: {
      cmd::AddTopic c{opt_str(j, "session"), str(j, "title"), str_list(j, "key_points"), {}};
      if (j.contains("index") && !j["index"].is_null()) {
        if (!j["index"].is_number_unsigned()) {
          throw Error(ErrorCode::invalid_argument, "field \"index\" must be a non-negative integer");
        }
        c.index = j["index"].get<std::size_t>();
      }
      return c;
    }
    case CommandKind::delete_topic:
      return cmd::DeleteTopic{str(j, "session")};
    case CommandKind::rename_topic:
      return cmd::RenameTopic{str(j, "session"), str(j, "title")};
    case CommandKind::accept_suggestion: {
      cmd::AcceptSuggestion c{str(j, "session"), str(j, "state"), str(j, "label"), {}, {}, {}};
      if (auto t = opt_str(j, "target")) c.target = Target::parse(*t);
      c.stub_state = opt_str(j, "stub_state");
      c.stub_utterance = opt_str(j, "stub_utterance");
      return c;
    }
    case CommandKind::install_plan:
    case CommandKind::install_fsm:
      try {
        if (*kind == CommandKind::install_plan) {
          return cmd::InstallPlan{field(j, "plan").get<SessionPlan>()};
        }
        return cmd::InstallFsm{field(j, "fsm").get<DialogueFsm>()};
      } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::invalid_argument, std::string("malformed payload: ") + e.what());
      }
  }
  throw Error(ErrorCode::invalid_argument, "unknown edit kind");
}

}  // namespace hdfsm
