#include "generators.hpp"

#include <algorithm>
#include <set>
#include <vector>

#include "hdfsm/core/text.hpp"

namespace hdfsm::testing {

namespace {

std::size_t pick(Rng& rng, std::size_t n) {
  return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
}

bool chance(Rng& rng, double p) { return std::bernoulli_distribution(p)(rng); }

const std::vector<std::string>& words() {
  static const std::vector<std::string> w = {
      "screening", "saves",      "lives",  "cancer",  "genes",   "family",   "history",
      "risk",      "test",       "doctor", "results", "early",   "detection", "colon",
      "\"quoted\"", "back\\slash", "tab\there", "line\nbreak", "#hash", "->arrow",
      "END",       "STATE",      "ENTRY",  "caf\xc3\xa9", "na\xc3\xafve", "\xe2\x9c\x93",
      "what?",     "yes",        "no",     "maybe",   "okay",    "why",      "how"};
  return w;
}

}  // namespace

std::string random_text(Rng& rng, std::size_t min_words, std::size_t max_words) {
  const std::size_t n = min_words + pick(rng, max_words - min_words + 1);
  std::string out;
  for (std::size_t i = 0; i < n; ++i) {
    if (i) out += ' ';
    out += words()[pick(rng, words().size())];
  }
  return out;
}

DialogueFsm random_valid_fsm(Rng& rng, const std::string& session_id, const FsmShape& shape) {
  DialogueFsm fsm;
  fsm.session_id = session_id;
  const std::size_t n = std::max<std::size_t>(1, shape.states);
  std::vector<std::string> ids;
  for (std::size_t i = 0; i < n; ++i) ids.push_back("s" + std::to_string(i + 1));

  for (const auto& id : ids) {
    DialogueState st;
    st.state_id = id;
    st.utterance = random_text(rng);
    if (chance(rng, shape.tag_probability)) {
      st.tags.push_back(StateTag{"gesture", chance(rng, 0.5) ? "nod" : "\"big wave\""});
    }
    fsm.states.push_back(std::move(st));
  }
  fsm.states[0].is_entry = true;
  fsm.entry = ids[0];

  // Spanning tree: every state i > 0 gets a parent among earlier states.
  std::vector<std::set<std::string>> labels(n);
  auto add_option = [&](std::size_t from, Target target) {
    auto& st = fsm.states[from];
    for (int attempt = 0; attempt < 20; ++attempt) {
      std::string label = random_text(rng, 1, 4);
      if (labels[from].insert(text::comparison_key(label)).second) {
        st.options.push_back(ResponseOption{option_id_for(st.options.size()), label, target});
        return true;
      }
    }
    // Fallback keeps spanning-tree edges from being dropped.
    std::string label = "choice " + std::to_string(st.options.size() + 1) + " of " + st.state_id;
    labels[from].insert(text::comparison_key(label));
    st.options.push_back(ResponseOption{option_id_for(st.options.size()), label, target});
    return true;
  };
  for (std::size_t i = 1; i < n; ++i) {
    std::size_t parent = pick(rng, i);
    add_option(parent, Target::state(ids[i]));
  }
  for (std::size_t i = 0; i < n; ++i) {
    while (fsm.states[i].options.size() < shape.max_options && chance(rng, 0.35)) {
      if (chance(rng, shape.end_probability)) {
        add_option(i, Target::end());
      } else if (chance(rng, shape.back_edge_probability)) {
        add_option(i, Target::state(ids[pick(rng, i + 1)]));
      } else {
        add_option(i, Target::state(ids[pick(rng, n)]));
      }
    }
  }
  if (shape.shuffle_states) std::shuffle(fsm.states.begin(), fsm.states.end(), rng);
  return fsm;
}

DialogueFsm random_digraph_fsm(Rng& rng, std::size_t states, std::size_t max_options) {
  DialogueFsm fsm;
  fsm.session_id = "g";
  for (std::size_t i = 0; i < states; ++i) {
    DialogueState st;
    st.state_id = "n" + std::to_string(i);
    st.utterance = "utterance " + std::to_string(i);
    const std::size_t k = pick(rng, max_options + 1);
    for (std::size_t j = 0; j < k; ++j) {
      st.options.push_back(ResponseOption{option_id_for(j), "option " + std::to_string(j),
                                          Target::state("n" + std::to_string(pick(rng, states)))});
    }
    fsm.states.push_back(std::move(st));
  }
  fsm.states[0].is_entry = true;
  fsm.entry = "n0";
  return fsm;
}

markup::MarkupDocument random_document(Rng& rng, std::size_t max_dialogues,
                                       std::size_t max_states) {
  markup::MarkupDocument doc;
  const std::size_t dialogues = pick(rng, max_dialogues + 1);
  for (std::size_t d = 0; d < dialogues; ++d) {
    FsmShape shape;
    shape.states = 1 + pick(rng, max_states);
    markup::Dialogue dialogue;
    dialogue.title = random_text(rng, 1, 4);
    dialogue.fsm = random_valid_fsm(rng, "t" + std::to_string(d + 1), shape);
    doc.dialogues.push_back(std::move(dialogue));
  }
  return doc;
}

SessionPlan random_plan(Rng& rng, std::size_t sessions) {
  SessionPlan plan;
  for (std::size_t i = 0; i < sessions; ++i) {
    SessionTopic topic;
    topic.session_id = "s" + std::to_string(i + 1);
    topic.ordinal = static_cast<int>(i + 1);
    topic.title = "Topic " + std::to_string(i + 1) + " " + random_text(rng, 1, 3);
    const std::size_t points = 1 + pick(rng, 3);
    for (std::size_t p = 0; p < points; ++p) topic.key_points.push_back(random_text(rng, 2, 5));
    plan.sessions.push_back(std::move(topic));
  }
  return plan;
}

}  // namespace hdfsm::testing
