#include <gtest/gtest.h>

#include <sstream>

#include "edit_gen.hpp"
#include "hdfsm/core/digest.hpp"
#include "hdfsm/core/validate.hpp"
#include "hdfsm/editing/history.hpp"
#include "oracles.hpp"

namespace hdfsm {
namespace {

using testing::Rng;

// s1: greet (entry) -> ask -> END ; s2: single state.
ProjectContent small_project() {
  ProjectContent c;
  c.plan.sessions = {{"s1", 1, "Screening", {"screening saves lives"}},
                     {"s2", 2, "Booking", {"call the clinic"}}};
  DialogueFsm a;
  a.session_id = "s1";
  a.entry = "greet";
  a.states.push_back({"greet", "Hi", {{"o1", "Hello", Target::state("ask")}}, true, {}});
  a.states.push_back({"ask", "Ready?", {{"o1", "Yes", Target::end()}}, false, {}});
  DialogueFsm b;
  b.session_id = "s2";
  b.entry = "only";
  b.states.push_back({"only", "Call us.", {}, true, {}});
  c.fsms = {{"s1", a}, {"s2", b}};
  return c;
}

ErrorCode code_of(Editor& ed, const EditCommand& c) {
  try {
    ed.apply(c);
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected refusal of " << command_to_json(c).dump();
  return ErrorCode::invalid_argument;
}

TEST(Apply, EditUtteranceAndInverse) {
  Editor ed(small_project());
  const auto before = ed.hash();
  auto ev = ed.apply(cmd::EditUtterance{"s1", "greet", "Hello"});
  EXPECT_EQ(ed.content().fsms.at("s1").find("greet")->utterance, "Hello");
  ProjectContent back = ed.content();
  apply_patches(back, ev.entry->inverse);
  EXPECT_EQ(content_hash(back), before);
  EXPECT_EQ(back.fsms.at("s1").find("greet")->utterance, "Hi");
}

TEST(Apply, DeleteTopicCascadesOnlyItsDialogue) {
  Editor ed(small_project());
  const auto other = content_hash({{}, {{"s1", ed.content().fsms.at("s1")}}});
  ed.apply(cmd::DeleteTopic{"s2"});
  EXPECT_EQ(ed.content().plan.find("s2"), nullptr);
  EXPECT_EQ(ed.content().fsms.count("s2"), 0u);
  EXPECT_EQ(content_hash({{}, {{"s1", ed.content().fsms.at("s1")}}}), other);
  EXPECT_EQ(ed.content().plan.sessions[0].ordinal, 1);
}

TEST(Apply, LastTopicStays) {
  Editor ed(small_project());
  ed.apply(cmd::DeleteTopic{"s2"});
  EXPECT_EQ(code_of(ed, cmd::DeleteTopic{"s1"}), ErrorCode::conflict);
}

TEST(Apply, EntryIsProtected) {
  Editor ed(small_project());
  EXPECT_EQ(code_of(ed, cmd::DeleteState{"s1", "greet"}), ErrorCode::would_orphan_entry);
  ed.apply(cmd::AddOption{"s1", "ask", "Again", Target::state("greet")});
  ed.apply(cmd::SetEntry{"s1", "ask"});
  ed.apply(cmd::DeleteState{"s1", "greet"});
  const auto& fsm = ed.content().fsms.at("s1");
  EXPECT_EQ(fsm.entry, "ask");
  ASSERT_EQ(fsm.states.size(), 1u);
  // The option that pointed at the deleted state went with it.
  EXPECT_EQ(fsm.states[0].options.size(), 1u);
  EXPECT_TRUE(validate_fsm(fsm).ok());
}

TEST(Apply, OrphaningIsRefused) {
  Editor ed(small_project());
  const auto h = ed.hash();
  EXPECT_EQ(code_of(ed, cmd::DeleteOption{"s1", "greet", "o1"}), ErrorCode::would_orphan_state);
  EXPECT_EQ(code_of(ed, cmd::ConnectOption{"s1", "greet", "o1", Target::end()}),
            ErrorCode::would_orphan_state);
  EXPECT_EQ(ed.hash(), h);
  EXPECT_FALSE(ed.can_undo());
}

TEST(Apply, DeleteStateCascadesInboundOptions) {
  Editor ed(small_project());
  ed.apply(cmd::AddOption{"s1", "greet", "Skip", Target::end()});
  ed.apply(cmd::DeleteState{"s1", "ask"});
  const auto& greet = *ed.content().fsms.at("s1").find("greet");
  ASSERT_EQ(greet.options.size(), 1u);
  EXPECT_EQ(greet.options[0].label, "Skip");
  EXPECT_EQ(greet.options[0].option_id, "o1");
}

TEST(Apply, AddStateArrivesConnected) {
  Editor ed(small_project());
  ed.apply(cmd::AddState{"s1", std::nullopt, "Why not?", "ask", "No"});
  const auto& fsm = ed.content().fsms.at("s1");
  ASSERT_NE(fsm.find("s1"), nullptr);
  EXPECT_EQ(fsm.find("ask")->options.back().target, Target::state("s1"));
  EXPECT_TRUE(validate_fsm(fsm).ok());
  EXPECT_EQ(code_of(ed, cmd::AddState{"s1", std::string("ask"), "x", "ask", "Other"}),
            ErrorCode::conflict);
  EXPECT_EQ(code_of(ed, cmd::AddState{"s1", std::nullopt, "x", "ask", " no "}),
            ErrorCode::duplicate_label);
}

TEST(Apply, LabelsAndTargets) {
  Editor ed(small_project());
  EXPECT_EQ(code_of(ed, cmd::AddOption{"s1", "ask", "YES", Target::end()}), ErrorCode::duplicate_label);
  EXPECT_EQ(code_of(ed, cmd::AddOption{"s1", "ask", "Hm", Target::state("zz")}),
            ErrorCode::unknown_target);
  EXPECT_EQ(code_of(ed, cmd::EditUtterance{"s9", "ask", "x"}), ErrorCode::unknown_target);
  EXPECT_EQ(code_of(ed, cmd::EditUtterance{"s1", "ask", "  "}), ErrorCode::invalid_argument);
  EXPECT_EQ(code_of(ed, cmd::EditOptionLabel{"s1", "ask", "o7", "x"}), ErrorCode::unknown_target);
  ed.apply(cmd::EditOptionLabel{"s1", "ask", "o1", "yes"});  // own label, new case
  EXPECT_EQ(ed.content().fsms.at("s1").find("ask")->options[0].label, "yes");
}

TEST(Apply, TopicRules) {
  Editor ed(small_project());
  EXPECT_EQ(code_of(ed, cmd::RenameTopic{"s2", "screening"}), ErrorCode::duplicate_topic);
  EXPECT_EQ(code_of(ed, cmd::AddTopic{std::nullopt, "Diet", {}, std::nullopt}),
            ErrorCode::invalid_argument);
  ed.apply(cmd::AddTopic{std::nullopt, "Diet", {"eat fibre"}, 0});
  const auto& plan = ed.content().plan;
  ASSERT_EQ(plan.sessions.size(), 3u);
  EXPECT_EQ(plan.sessions[0].session_id, "s3");
  EXPECT_EQ(plan.sessions[2].ordinal, 3);
  ed.apply(cmd::ReorderTopics{{"s2", "s1", "s3"}});
  EXPECT_EQ(ed.content().plan.sessions[0].session_id, "s2");
  EXPECT_EQ(code_of(ed, cmd::ReorderTopics{{"s2", "s1"}}), ErrorCode::invalid_argument);
}

TEST(Apply, AcceptSuggestionStubOrExisting) {
  Editor ed(small_project());
  ed.apply(cmd::AcceptSuggestion{"s1", "ask", "What does it cost?", std::nullopt, std::nullopt,
                                 std::nullopt});
  const auto& fsm = ed.content().fsms.at("s1");
  const auto& opt = fsm.find("ask")->options.back();
  ASSERT_FALSE(opt.target.is_end());
  EXPECT_EQ(fsm.find(opt.target.state_id())->utterance, kStubUtterance);
  ed.apply(cmd::AcceptSuggestion{"s1", "greet", "Bye", Target::end(), std::nullopt, std::nullopt});
  EXPECT_EQ(ed.revision_count(), 2u);
}

TEST(Apply, InstallPlanDropsVanishedDialogues) {
  Editor ed(small_project());
  SessionPlan next;
  next.sessions = {{"s1", 1, "Screening again", {"x"}}, {"s9", 2, "New", {"y"}}};
  ed.apply(cmd::InstallPlan{next});
  EXPECT_EQ(ed.content().fsms.count("s2"), 0u);
  EXPECT_EQ(ed.content().fsms.count("s1"), 1u);
  ed.undo();
  EXPECT_EQ(ed.content(), small_project());
}

TEST(Apply, InstallFsmMustValidate) {
  Editor ed(small_project());
  DialogueFsm bad = small_project().fsms.at("s2");
  bad.states[0].utterance = "";
  EXPECT_EQ(code_of(ed, cmd::InstallFsm{bad}), ErrorCode::invalid_fsm);
  bad.session_id = "s7";
  EXPECT_EQ(code_of(ed, cmd::InstallFsm{bad}), ErrorCode::unknown_target);
}

TEST(History, UndoRedoRestoreHashes) {
  Editor ed(small_project());
  const auto h0 = ed.hash();
  ed.apply(cmd::EditUtterance{"s1", "greet", "Hello"});
  const auto h1 = ed.hash();
  ed.undo();
  EXPECT_EQ(ed.hash(), h0);
  ed.redo();
  EXPECT_EQ(ed.hash(), h1);
  ed.undo();
  EXPECT_THROW(ed.undo(), Error);
  ed.apply(cmd::EditUtterance{"s1", "greet", "Hey"});
  EXPECT_FALSE(ed.can_redo());
  try {
    ed.redo();
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::nothing_to_redo);
  }
}

TEST(RevisionCount, Examples) {
  {
    Editor ed(small_project());
    ed.apply(cmd::EditUtterance{"s1", "greet", "Hello"});
    EXPECT_EQ(ed.revision_count(), 1u);
  }
  {
    Editor ed(small_project());
    ed.apply(cmd::AddOption{"s1", "greet", "Skip", Target::end()});
    const auto base = ed.revision_count();
    ed.apply(cmd::ConnectOption{"s1", "greet", "o2", Target::state("ask")});
    ed.apply(cmd::ConnectOption{"s1", "greet", "o2", Target::state("greet")});
    EXPECT_EQ(ed.revision_count(), base);
  }
  {
    Editor ed(small_project());
    ed.apply(cmd::EditUtterance{"s1", "greet", "B"});
    ed.apply(cmd::EditUtterance{"s1", "greet", "Hi"});
    EXPECT_EQ(ed.revision_count(), 0u);
  }
  {
    // A reverted span inside later work still vanishes; surrounding edits stay.
    Editor ed(small_project());
    ed.apply(cmd::EditUtterance{"s1", "ask", "Ready now?"});
    ed.apply(cmd::EditUtterance{"s1", "greet", "B"});
    ed.apply(cmd::RenameTopic{"s2", "Calls"});
    ed.apply(cmd::RenameTopic{"s2", "Booking"});
    ed.apply(cmd::EditUtterance{"s1", "greet", "Hi"});
    ed.apply(cmd::EditUtterance{"s1", "ask", "Sure?"});
    EXPECT_EQ(ed.revision_count(), 2u);
  }
  {
    // Undone commands are not in effect.
    Editor ed(small_project());
    ed.apply(cmd::EditUtterance{"s1", "greet", "B"});
    ed.undo();
    EXPECT_EQ(ed.revision_count(), 0u);
  }
}

std::vector<std::string> kinds_before_cursor(const EditHistory& h) {
  std::vector<std::string> out;
  for (std::size_t k = 0; k < h.cursor; ++k) out.emplace_back(to_string(kind_of(h.applied[k].command)));
  return out;
}

TEST(RevisionCount, MatchesQuadraticScan) {
  Rng rng(11);
  for (int log = 0; log < 150; ++log) {
    Editor ed(testing::random_project(rng, 1 + rng() % 3, 4));
    const std::size_t target = 1 + rng() % 150;
    for (std::size_t step = 0; step < target * 3 && ed.history().cursor < target; ++step) {
      try {
        ed.apply(testing::random_command(rng, ed.content()));
      } catch (const Error&) {
      }
    }
    auto trail = ed.history().hash_trail();
    trail.resize(ed.history().cursor);
    EXPECT_EQ(ed.revision_count(),
              testing::oracle_revision_count(kinds_before_cursor(ed.history()),
                                             ed.history().base_hash, trail));
  }
}

TEST(History, RandomWalkMatchesSnapshotStack) {
  Rng rng(5);
  for (int walk = 0; walk < 4; ++walk) {
    Editor ed(testing::random_project(rng, 3));
    std::vector<std::string> stack{ed.hash()};  // hash after each applied command
    std::size_t cursor = 0;
    for (int step = 0; step < 800; ++step) {
      const auto roll = rng() % 10;
      if (roll < 6) {
        const auto before = ed.content();
        try {
          auto ev = ed.apply(testing::random_command(rng, ed.content()));
          stack.resize(cursor + 1);
          stack.push_back(ed.hash());
          ++cursor;
          // apply then inverse restores the prior content exactly.
          ProjectContent back = ed.content();
          apply_patches(back, ev.entry->inverse);
          ASSERT_EQ(back, before);
        } catch (const Error&) {
          ASSERT_EQ(ed.content(), before);
        }
      } else if (roll < 8) {
        if (cursor == 0) {
          EXPECT_THROW(ed.undo(), Error);
        } else {
          ed.undo();
          --cursor;
        }
      } else {
        if (cursor + 1 == stack.size()) {
          EXPECT_THROW(ed.redo(), Error);
        } else {
          ed.redo();
          ++cursor;
        }
      }
      ASSERT_EQ(ed.hash(), stack[cursor]) << "step " << step;
      ASSERT_EQ(ed.history().cursor, cursor);
      for (const auto& [sid, fsm] : ed.content().fsms) {
        ASSERT_TRUE(validate_fsm(fsm).ok()) << sid;
        ASSERT_NE(fsm.entry_state(), nullptr);
      }
      ASSERT_TRUE(check_plan(ed.content().plan).empty());
    }
  }
}

TEST(Log, ReplayReproducesFinalHash) {
  Rng rng(23);
  for (int trial = 0; trial < 20; ++trial) {
    const auto initial = testing::random_project(rng, 3);
    Editor ed(initial);
    std::ostringstream log;
    std::size_t applied = 0;
    while (applied < 50) {
      try {
        const auto cmd = testing::random_command(rng, ed.content());
        const auto before = ed.content();
        auto ev = ed.apply(cmd);
        // Recompiling the logged command yields the logged patches.
        const auto again = command_from_json(command_to_json(cmd));
        EXPECT_EQ(patches_to_json(compile(again, before)), patches_to_json(ev.entry->forward));
        log << log_event_to_json(ev).dump() << "\n";
        ++applied;
        if (rng() % 5 == 0) log << log_event_to_json(ed.undo()).dump() << "\n";
        if (rng() % 7 == 0 && ed.can_redo()) log << log_event_to_json(ed.redo()).dump() << "\n";
      } catch (const Error&) {
      }
    }
    Editor replayed(initial);
    std::istringstream in(log.str());
    std::string line;
    while (std::getline(in, line)) replayed.replay(log_event_from_json(nlohmann::json::parse(line)));
    EXPECT_EQ(replayed.hash(), ed.hash());
    EXPECT_EQ(replayed.revision_count(), ed.revision_count());
    EXPECT_EQ(replayed.history().cursor, ed.history().cursor);
  }
}

TEST(Log, TamperedHashIsDetected) {
  Editor ed(small_project());
  auto ev = ed.apply(cmd::EditUtterance{"s1", "greet", "Hello"});
  ev.hash = std::string(64, '0');
  Editor other(small_project());
  EXPECT_THROW(other.replay(ev), Error);
}

TEST(Commands, JsonRoundTripForEveryKind) {
  const std::vector<EditCommand> all = {
      cmd::EditUtterance{"s1", "a", "t"},
      cmd::AddState{"s1", std::string("b"), "u", "a", "l"},
      cmd::AddState{"s1", std::nullopt, "u", "a", "l"},
      cmd::DeleteState{"s1", "a"},
      cmd::AddOption{"s1", "a", "l", Target::end()},
      cmd::EditOptionLabel{"s1", "a", "o1", "l"},
      cmd::DeleteOption{"s1", "a", "o1"},
      cmd::ConnectOption{"s1", "a", "o1", Target::state("b")},
      cmd::SetEntry{"s1", "b"},
      cmd::ReorderTopics{{"s2", "s1"}},
      cmd::AddTopic{std::string("s4"), "T", {"k"}, 1},
      cmd::DeleteTopic{"s2"},
      cmd::RenameTopic{"s1", "T"},
      cmd::AcceptSuggestion{"s1", "a", "l", Target::end(), std::nullopt, std::string("x")},
      cmd::InstallPlan{small_project().plan},
      cmd::InstallFsm{small_project().fsms.at("s1")},
  };
  for (const auto& c : all) {
    const auto j = command_to_json(c);
    EXPECT_EQ(command_to_json(command_from_json(j)), j) << j.dump();
    EXPECT_EQ(command_kind_from_string(j["kind"].get<std::string>()), kind_of(c));
  }
  EXPECT_THROW(command_from_json({{"kind", "teleport"}}), Error);
  EXPECT_THROW(command_from_json({{"kind", "edit-utterance"}, {"session", "s1"}}), Error);
}

TEST(Commands, CountedKinds) {
  for (auto k : {CommandKind::connect_option, CommandKind::reorder_topics, CommandKind::set_entry,
                 CommandKind::install_plan, CommandKind::install_fsm}) {
    EXPECT_FALSE(counts_as_revision(k));
  }
  for (auto k : {CommandKind::edit_utterance, CommandKind::add_state, CommandKind::delete_state,
                 CommandKind::add_option, CommandKind::edit_option_label, CommandKind::delete_option,
                 CommandKind::add_topic, CommandKind::delete_topic, CommandKind::rename_topic,
                 CommandKind::accept_suggestion}) {
    EXPECT_TRUE(counts_as_revision(k));
  }
}

}  // namespace
}  // namespace hdfsm
