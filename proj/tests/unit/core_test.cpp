#include <gtest/gtest.h>

#include "generators.hpp"
#include "hdfsm/core/digest.hpp"
#include "hdfsm/core/validate.hpp"
#include "oracles.hpp"

namespace hdfsm {
namespace {

using testing::DefectKey;
using testing::Rng;

DialogueState make_state(std::string id, std::string utterance,
                         std::vector<std::pair<std::string, Target>> options = {},
                         bool entry = false) {
  DialogueState s;
  s.state_id = std::move(id);
  s.utterance = std::move(utterance);
  s.is_entry = entry;
  for (auto& [label, target] : options) {
    s.options.push_back(ResponseOption{option_id_for(s.options.size()), label, target});
  }
  return s;
}

DialogueFsm chain(std::size_t n) {
  DialogueFsm fsm;
  fsm.session_id = "t1";
  fsm.entry = "s1";
  for (std::size_t i = 1; i <= n; ++i) {
    std::vector<std::pair<std::string, Target>> opts;
    if (i < n) opts.push_back({"next", Target::state("s" + std::to_string(i + 1))});
    fsm.states.push_back(make_state("s" + std::to_string(i), "line " + std::to_string(i), opts, i == 1));
  }
  return fsm;
}

std::set<DefectKey> keys(const ValidationReport& report) {
  std::set<DefectKey> out;
  for (const auto& d : report.defects) {
    out.insert({std::string(to_string(d.kind)), d.location.state_id,
                d.location.option ? static_cast<long>(*d.location.option) : -1});
  }
  return out;
}

TEST(Identifier, Format) {
  EXPECT_TRUE(is_valid_identifier("s1"));
  EXPECT_TRUE(is_valid_identifier("intro-2"));
  EXPECT_FALSE(is_valid_identifier(""));
  EXPECT_FALSE(is_valid_identifier("-s"));
  EXPECT_FALSE(is_valid_identifier("S1"));
  EXPECT_FALSE(is_valid_identifier("END"));
  EXPECT_FALSE(is_valid_identifier("a_b"));
}

TEST(ValidateFsm, MinimalFsmIsValid) {
  DialogueFsm fsm;
  fsm.session_id = "t1";
  fsm.entry = "s1";
  fsm.states.push_back(make_state("s1", "Hi", {}, true));
  EXPECT_TRUE(validate_fsm(fsm).ok());
}

TEST(ValidateFsm, DanglingTargetAtOption) {
  DialogueFsm fsm;
  fsm.session_id = "t1";
  fsm.entry = "s1";
  fsm.states.push_back(make_state("s1", "Hi", {{"Go", Target::state("s2")}}, true));
  const auto report = validate_fsm(fsm);
  ASSERT_EQ(report.defects.size(), 1u);
  EXPECT_EQ(report.defects[0].kind, DefectKind::dangling_target);
  EXPECT_EQ(report.defects[0].where(), "s1/option1");
}

TEST(ValidateFsm, EveryDefectKind) {
  DialogueFsm fsm;
  fsm.session_id = "t1";
  fsm.entry = "s1";
  fsm.states.push_back(make_state("s1", "Hi",
                                  {{"Yes", Target::state("s2")},
                                   {"yes ", Target::end()},
                                   {"  ", Target::end()},
                                   {"Other", Target::state("nowhere")}},
                                  true));
  fsm.states.push_back(make_state("s2", "   ", {}, true));
  fsm.states.push_back(make_state("s3", "Alone"));
  fsm.states.push_back(make_state("s3", "Twin"));
  const auto report = validate_fsm(fsm);
  EXPECT_EQ(report.count(DefectKind::multiple_entry), 2u);
  EXPECT_EQ(report.count(DefectKind::duplicate_option_label), 1u);
  EXPECT_EQ(report.count(DefectKind::empty_label), 1u);
  EXPECT_EQ(report.count(DefectKind::dangling_target), 1u);
  EXPECT_EQ(report.count(DefectKind::empty_utterance), 1u);
  EXPECT_EQ(report.count(DefectKind::duplicate_state), 1u);
  EXPECT_EQ(report.count(DefectKind::unreachable_state), 2u);
  EXPECT_EQ(keys(report), testing::oracle_defects(fsm));
}

TEST(ValidateFsm, NoEntrySkipsReachability) {
  auto fsm = chain(3);
  fsm.states[0].is_entry = false;
  fsm.entry.clear();
  const auto report = validate_fsm(fsm);
  ASSERT_EQ(report.defects.size(), 1u);
  EXPECT_EQ(report.defects[0].kind, DefectKind::no_entry);
}

TEST(ValidateFsm, EntryFieldMismatchIsNoEntry) {
  auto fsm = chain(2);
  fsm.entry = "s2";
  const auto report = validate_fsm(fsm);
  EXPECT_EQ(report.count(DefectKind::no_entry), 1u);
}

TEST(ValidateFsm, CyclesAreLegal) {
  auto fsm = chain(3);
  fsm.states[2].options.push_back(ResponseOption{"o1", "again", Target::state("s1")});
  EXPECT_TRUE(validate_fsm(fsm).ok());
}

TEST(ValidateFsm, TwelveStatesWithThreeDisconnectedMatchesBfsOracle) {
  Rng rng(12);
  for (int trial = 0; trial < 200; ++trial) {
    testing::FsmShape shape;
    shape.states = 9;
    auto fsm = testing::random_valid_fsm(rng, "t1", shape);
    // Three islands: they point into the main graph, nothing points at them.
    for (int k = 0; k < 3; ++k) {
      fsm.states.push_back(make_state("x" + std::to_string(k), "island",
                                      {{"back", Target::state("s1")}}));
    }
    const auto report = validate_fsm(fsm);
    ASSERT_EQ(report.count(DefectKind::unreachable_state), 3u);
    const auto reach = testing::bfs_reachable(fsm);
    for (const auto& d : report.defects) {
      ASSERT_EQ(d.kind, DefectKind::unreachable_state);
      EXPECT_EQ(reach.count(d.location.state_id), 0u);
    }
    EXPECT_EQ(keys(report), testing::oracle_defects(fsm));
  }
}

TEST(ValidateFsm, MatchesOracleOnArbitraryDigraphs) {
  Rng rng(7);
  for (int trial = 0; trial < 500; ++trial) {
    auto fsm = testing::random_digraph_fsm(rng, 1 + trial % 15, 3);
    EXPECT_EQ(keys(validate_fsm(fsm)), testing::oracle_defects(fsm)) << "trial " << trial;
  }
}

TEST(ValidateFsm, IsPure) {
  Rng rng(3);
  auto fsm = testing::random_digraph_fsm(rng, 10, 3);
  const auto a = validate_fsm(fsm);
  const auto b = validate_fsm(fsm);
  ASSERT_EQ(a.defects.size(), b.defects.size());
  for (std::size_t i = 0; i < a.defects.size(); ++i) {
    EXPECT_EQ(a.defects[i].kind, b.defects[i].kind);
    EXPECT_EQ(a.defects[i].location, b.defects[i].location);
    EXPECT_EQ(a.defects[i].message, b.defects[i].message);
  }
}

TEST(ValidateFsm, AddingOrphanStateAddsExactlyOneDefect) {
  Rng rng(99);
  for (int trial = 0; trial < 100; ++trial) {
    auto fsm = testing::random_digraph_fsm(rng, 2 + trial % 10, 2);
    auto before = keys(validate_fsm(fsm));
    fsm.states.push_back(make_state("orphan", "nobody calls me", {{"x", Target::state("n0")}}));
    auto after = keys(validate_fsm(fsm));
    before.insert({"unreachable-state", "orphan", -1});
    EXPECT_EQ(after, before);
  }
}

TEST(ValidFsmGenerator, ProducesValidFsms) {
  Rng rng(1);
  for (int trial = 0; trial < 300; ++trial) {
    testing::FsmShape shape;
    shape.states = 1 + trial % 20;
    auto fsm = testing::random_valid_fsm(rng, "t1", shape);
    const auto report = validate_fsm(fsm);
    ASSERT_TRUE(report.ok()) << report.defects.front().message;
    // Valid => reachable set is every state and always contains the entry.
    EXPECT_EQ(reachable_states(fsm).size(), fsm.states.size());
    EXPECT_TRUE(reachable_states(fsm).count(fsm.entry));
  }
}

TEST(ReachableStates, LinearChain) {
  EXPECT_EQ(reachable_states(chain(3)), (std::set<std::string>{"s1", "s2", "s3"}));
}

TEST(ReachableStates, EntryWithoutOptions) {
  EXPECT_EQ(reachable_states(chain(1)), (std::set<std::string>{"s1"}));
}

TEST(ReachableStates, TwentyStateDigraphsMatchClosureOracle) {
  Rng rng(20);
  for (int trial = 0; trial < 300; ++trial) {
    auto fsm = testing::random_digraph_fsm(rng, 20, 2);
    const auto got = reachable_states(fsm);
    EXPECT_EQ(got, testing::closure_reachable(fsm));
    EXPECT_TRUE(got.count(fsm.entry));
  }
}

TEST(FsmStats, SingleTerminalState) {
  EXPECT_EQ(fsm_stats(chain(1)), (FsmStats{1, 0, 1, 0}));
}

TEST(FsmStats, ChainOfFour) { EXPECT_EQ(fsm_stats(chain(4)), (FsmStats{4, 3, 1, 3})); }

TEST(FsmStats, CycleCountsFirstTraversalOnly) {
  auto fsm = chain(3);
  fsm.states[2].options.push_back(ResponseOption{"o1", "again", Target::state("s1")});
  EXPECT_EQ(fsm_stats(fsm), (FsmStats{3, 3, 0, 2}));
}

TEST(FsmStats, MatchesExhaustiveDfsOracle) {
  Rng rng(5);
  for (int trial = 0; trial < 300; ++trial) {
    testing::FsmShape shape;
    shape.states = 1 + trial % 14;
    auto fsm = testing::random_valid_fsm(rng, "t1", shape);
    const auto got = fsm_stats(fsm);
    const auto want = testing::oracle_stats(fsm);
    EXPECT_EQ(got.state_count, want.state_count);
    EXPECT_EQ(got.option_count, want.option_count);
    EXPECT_EQ(got.terminal_count, want.terminal_count);
    EXPECT_EQ(got.max_depth, want.max_depth) << "trial " << trial;
  }
}

TEST(Material, BodyRules) {
  Material m{"m1", "Pamphlet", "  \n\t ", MaterialSource::pasted, std::nullopt};
  EXPECT_FALSE(check_material(m).empty());
  m.body = "Screening saves lives.";
  EXPECT_TRUE(check_material(m).empty());
  m.body = std::string(kDefaultMaterialCap + 1, 'a');
  EXPECT_FALSE(check_material(m).empty());
  EXPECT_TRUE(check_material(m, kDefaultMaterialCap + 1).empty());
}

TEST(Plan, TitleUniquenessIsCaseAndWhitespaceInsensitive) {
  SessionPlan plan;
  plan.sessions.push_back({"s1", 1, "What is  Cancer", {"definition"}});
  plan.sessions.push_back({"s2", 2, " what is cancer ", {"causes"}});
  const auto issues = check_plan(plan);
  ASSERT_EQ(issues.size(), 1u);
  EXPECT_EQ(issues[0].violation, PlanViolation::duplicate_topic);
}

TEST(Plan, OrdinalsAndKeyPoints) {
  SessionPlan plan;
  plan.sessions.push_back({"s1", 1, "A", {}});
  plan.sessions.push_back({"s2", 3, "B", {"x"}});
  const auto issues = check_plan(plan);
  ASSERT_EQ(issues.size(), 2u);
  EXPECT_EQ(issues[0].violation, PlanViolation::empty_key_points);
  EXPECT_EQ(issues[1].violation, PlanViolation::bad_ordinals);
  EXPECT_EQ(check_plan(SessionPlan{}).front().violation, PlanViolation::no_sessions);
}

TEST(ContentHash, EqualValuesHashEqual) {
  Rng rng(11);
  ProjectContent a;
  a.plan = testing::random_plan(rng, 3);
  a.fsms["s1"] = testing::random_valid_fsm(rng, "s1", {});
  ProjectContent b = a;
  EXPECT_EQ(content_hash(a), content_hash(b));
  b.fsms["s1"].states[0].utterance += "!";
  EXPECT_NE(content_hash(a), content_hash(b));
  EXPECT_EQ(content_hash(a).size(), 64u);
}

TEST(Sha256, KnownVector) {
  EXPECT_EQ(sha256_hex("abc"),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

}  // namespace
}  // namespace hdfsm
