#include "hdfsm/editing/patch.hpp"

#include <algorithm>

#include "hdfsm/core/error.hpp"
#include "hdfsm/core/json_io.hpp"

namespace hdfsm {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

[[noreturn]] void mismatch(const std::string& what) {
  throw Error(ErrorCode::conflict, "content does not match the edit being replayed: " + what);
}

DialogueFsm& fsm_of(ProjectContent& c, const std::string& session) {
  auto it = c.fsms.find(session);
  if (it == c.fsms.end()) mismatch("no dialogue " + session);
  return it->second;
}

template <typename T>
void put_at(std::vector<T>& items, std::size_t index, const std::optional<T>& before,
            const std::optional<T>& after, const char* what, auto same) {
  if (before) {
    if (index >= items.size() || !same(items[index], *before)) mismatch(what);
    if (after) {
      items[index] = *after;
    } else {
      items.erase(items.begin() + static_cast<std::ptrdiff_t>(index));
    }
  } else if (after) {
    if (index > items.size()) mismatch(what);
    items.insert(items.begin() + static_cast<std::ptrdiff_t>(index), *after);
  }
}

std::vector<std::string> topic_ids(const SessionPlan& plan) {
  std::vector<std::string> out;
  for (const auto& s : plan.sessions) out.push_back(s.session_id);
  return out;
}

bool same_topic(const SessionTopic& a, const SessionTopic& b) {
  return a.session_id == b.session_id && a.title == b.title && a.key_points == b.key_points;
}

template <typename T>
nlohmann::json opt_json(const std::optional<T>& v) {
  return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

template <typename T>
std::optional<T> opt_from(const nlohmann::json& j) {
  if (j.is_null()) return std::nullopt;
  return j.get<T>();
}

}  // namespace

void apply_patches(ProjectContent& content, const std::vector<Patch>& patches) {
  for (const auto& p : patches) {
    std::visit(overloaded{
                   [&](const patch::State& s) {
                     put_at(fsm_of(content, s.session).states, s.index, s.before, s.after,
                            "state", [](const auto& a, const auto& b) { return a == b; });
                   },
                   [&](const patch::Entry& e) {
                     auto& fsm = fsm_of(content, e.session);
                     if (fsm.entry != e.before) mismatch("entry");
                     fsm.entry = e.after;
                   },
                   [&](const patch::Topic& t) {
                     put_at(content.plan.sessions, t.index, t.before, t.after, "topic",
                            same_topic);
                     content.plan.renumber();
                   },
                   [&](const patch::TopicOrder& o) {
                     auto& sessions = content.plan.sessions;
                     if (topic_ids(content.plan) != o.before) mismatch("topic order");
                     std::vector<SessionTopic> next;
                     for (const auto& id : o.after) {
                       auto it = std::find_if(sessions.begin(), sessions.end(),
                                              [&](const auto& s) { return s.session_id == id; });
                       if (it == sessions.end()) mismatch("topic order");
                       next.push_back(*it);
                     }
                     sessions = std::move(next);
                     content.plan.renumber();
                   },
                   [&](const patch::Fsm& f) {
                     auto it = content.fsms.find(f.session);
                     if (f.before.has_value() != (it != content.fsms.end()) ||
                         (f.before && it->second != *f.before)) {
                       mismatch("dialogue " + f.session);
                     }
                     if (f.after) {
                       content.fsms[f.session] = *f.after;
                     } else if (it != content.fsms.end()) {
                       content.fsms.erase(it);
                     }
                   },
                   [&](const patch::Plan& p) {
                     if (content.plan != p.before) mismatch("plan");
                     content.plan = p.after;
                   },
               },
               p);
  }
}

std::vector<Patch> invert(const std::vector<Patch>& patches) {
  std::vector<Patch> out;
  out.reserve(patches.size());
  for (auto it = patches.rbegin(); it != patches.rend(); ++it) {
    Patch p = *it;
    std::visit([](auto& x) { std::swap(x.before, x.after); }, p);
    out.push_back(std::move(p));
  }
  return out;
}

nlohmann::json patches_to_json(const std::vector<Patch>& patches) {
  auto out = nlohmann::json::array();
  for (const auto& p : patches) {
    std::visit(overloaded{
                   [&](const patch::State& s) {
                     out.push_back({{"type", "state"},
                                    {"session", s.session},
                                    {"index", s.index},
                                    {"before", opt_json(s.before)},
                                    {"after", opt_json(s.after)}});
                   },
                   [&](const patch::Entry& e) {
                     out.push_back({{"type", "entry"},
                                    {"session", e.session},
                                    {"before", e.before},
                                    {"after", e.after}});
                   },
                   [&](const patch::Topic& t) {
                     out.push_back({{"type", "topic"},
                                    {"index", t.index},
                                    {"before", opt_json(t.before)},
                                    {"after", opt_json(t.after)}});
                   },
                   [&](const patch::TopicOrder& o) {
                     out.push_back({{"type", "topic-order"}, {"before", o.before}, {"after", o.after}});
                   },
                   [&](const patch::Fsm& f) {
                     out.push_back({{"type", "fsm"},
                                    {"session", f.session},
                                    {"before", opt_json(f.before)},
                                    {"after", opt_json(f.after)}});
                   },
                   [&](const patch::Plan& p) {
                     out.push_back({{"type", "plan"}, {"before", p.before}, {"after", p.after}});
                   },
               },
               p);
  }
  return out;
}

std::vector<Patch> patches_from_json(const nlohmann::json& j) {
  std::vector<Patch> out;
  for (const auto& p : j) {
    const auto type = p.at("type").get<std::string>();
    if (type == "state") {
      out.push_back(patch::State{p.at("session").get<std::string>(), p.at("index").get<std::size_t>(),
                                 opt_from<DialogueState>(p.at("before")),
                                 opt_from<DialogueState>(p.at("after"))});
    } else if (type == "entry") {
      out.push_back(patch::Entry{p.at("session").get<std::string>(),
                                 p.at("before").get<std::string>(), p.at("after").get<std::string>()});
    } else if (type == "topic") {
      out.push_back(patch::Topic{p.at("index").get<std::size_t>(),
                                 opt_from<SessionTopic>(p.at("before")),
                                 opt_from<SessionTopic>(p.at("after"))});
    } else if (type == "topic-order") {
      out.push_back(patch::TopicOrder{p.at("before").get<std::vector<std::string>>(),
                                      p.at("after").get<std::vector<std::string>>()});
    } else if (type == "fsm") {
      out.push_back(patch::Fsm{p.at("session").get<std::string>(),
                               opt_from<DialogueFsm>(p.at("before")),
                               opt_from<DialogueFsm>(p.at("after"))});
    } else if (type == "plan") {
      out.push_back(patch::Plan{p.at("before").get<SessionPlan>(), p.at("after").get<SessionPlan>()});
    } else {
      throw Error(ErrorCode::invalid_argument, "unknown patch type " + type);
    }
  }
  return out;
}

}  // namespace hdfsm
