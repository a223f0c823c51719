#include <gtest/gtest.h>

#include <sstream>

#include <nlohmann/json.hpp>

#include "generators.hpp"
#include "hdfsm/runtime/play.hpp"
#include "oracles.hpp"

namespace hdfsm {
namespace {

using testing::Rng;

std::shared_ptr<const DialogueFsm> share(DialogueFsm fsm) {
  return std::make_shared<const DialogueFsm>(std::move(fsm));
}

DialogueFsm single() {
  DialogueFsm fsm;
  fsm.session_id = "t1";
  fsm.entry = "s1";
  fsm.states.push_back({"s1", "Hi", {}, true, {}});
  return fsm;
}

DialogueFsm chain() {
  DialogueFsm fsm = single();
  fsm.states[0].options.push_back({"o1", "Next", Target::state("s2")});
  fsm.states.push_back({"s2", "Bye", {{"o1", "Ok", Target::end()}}, false, {}});
  return fsm;
}

DialogueFsm fan(std::size_t n) {
  DialogueFsm fsm = single();
  for (std::size_t i = 0; i < n; ++i) {
    const auto id = "t" + std::to_string(i);
    fsm.states[0].options.push_back({option_id_for(i), "pick " + id, Target::state(id)});
    fsm.states.push_back({id, "leaf " + id, {}, false, {}});
  }
  return fsm;
}

TEST(Play, SingleStateFinishesAtOnce) {
  auto play = start(share(single()));
  ASSERT_EQ(play.transcript.size(), 1u);
  EXPECT_EQ(play.transcript[0].utterance, "Hi");
  EXPECT_TRUE(play.finished);
  EXPECT_THROW(choose(play, 0), Error);
}

TEST(Play, EntryWithOptionsWaits) {
  auto play = start(share(fan(2)));
  EXPECT_FALSE(play.finished);
  EXPECT_EQ(play.options(), (std::vector<std::string>{"pick t0", "pick t1"}));
}

TEST(Play, ChainAdvancesThenEnds) {
  auto play = start(share(chain()));
  choose(play, 0);
  EXPECT_EQ(play.current, Target::state("s2"));
  EXPECT_EQ(play.transcript.size(), 2u);
  EXPECT_EQ(play.transcript[0].chosen, "Next");
  try {
    choose(play, 3);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::out_of_range);
  }
  choose(play, 0);
  EXPECT_TRUE(play.finished);
  EXPECT_TRUE(play.current.is_end());
  try {
    choose(play, 0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::already_finished);
  }
}

TEST(Play, InvalidFsmRefused) {
  DialogueFsm fsm = chain();
  fsm.states[0].options[0].target = Target::state("zz");
  try {
    start(share(fsm));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::invalid_fsm);
  }
}

TEST(Play, StartNeverFailsOnValidFsms) {
  Rng rng(3);
  for (int i = 0; i < 300; ++i) {
    testing::FsmShape shape;
    shape.states = 1 + rng() % 12;
    auto fsm = testing::random_valid_fsm(rng, "t1", shape);
    auto play = start(share(fsm));
    EXPECT_EQ(play.transcript[0].state_id, fsm.entry);
  }
}

TEST(Paths, LinearChainHasOnePath) {
  auto paths = enumerate_paths(chain());
  ASSERT_EQ(paths.size(), 1u);
  EXPECT_EQ(paths[0].choices, (std::vector<std::size_t>{0, 0}));
  EXPECT_FALSE(paths[0].truncated);
}

TEST(Paths, FanOfThree) { EXPECT_EQ(enumerate_paths(fan(3)).size(), 3u); }

TEST(Paths, CyclesAreCutAndMarked) {
  DialogueFsm fsm = single();
  fsm.states[0].options.push_back({"o1", "Again", Target::state("s1")});
  fsm.states[0].options.push_back({"o2", "Stop", Target::end()});
  auto paths = enumerate_paths(fsm, 3);
  // Stop after 0..2 repeats, plus one path cut at 3 repeats.
  ASSERT_EQ(paths.size(), 4u);
  EXPECT_EQ(std::count_if(paths.begin(), paths.end(), [](const auto& p) { return p.truncated; }), 1);
}

std::vector<testing::OraclePath> as_oracle(const std::vector<PlayPath>& paths) {
  std::vector<testing::OraclePath> out;
  for (const auto& p : paths) {
    testing::OraclePath o;
    o.choices = p.choices;
    for (const auto& t : p.transcript) o.visited.push_back(t.state_id);
    o.truncated = p.truncated;
    out.push_back(o);
  }
  std::sort(out.begin(), out.end());
  return out;
}

TEST(Paths, MatchRecursiveOracleAndReplay) {
  Rng rng(19);
  for (int i = 0; i < 120; ++i) {
    testing::FsmShape shape;
    shape.states = 1 + rng() % 7;
    shape.back_edge_probability = 0.3;
    auto fsm = testing::random_valid_fsm(rng, "t1", shape);
    const std::size_t steps = 1 + rng() % 8;
    auto paths = enumerate_paths(fsm, steps);
    auto expected = testing::oracle_paths(fsm, steps);
    std::sort(expected.begin(), expected.end());
    ASSERT_EQ(as_oracle(paths), expected);

    const auto snapshot = share(fsm);
    for (const auto& p : paths) {
      auto play = start(snapshot);
      for (auto c : p.choices) choose(play, c);
      EXPECT_EQ(play.transcript, p.transcript);
      EXPECT_EQ(play.finished, !p.truncated);
    }
  }
}

TEST(Paths, SameChoicesSameTranscript) {
  Rng rng(2);
  auto fsm = share(testing::random_valid_fsm(rng, "t1", {}));
  for (const auto& p : enumerate_paths(*fsm, 6)) {
    auto a = start(fsm), b = start(fsm);
    for (auto c : p.choices) {
      choose(a, c);
      choose(b, c);
    }
    EXPECT_EQ(transcript_jsonl(a.transcript), transcript_jsonl(b.transcript));
  }
}

TEST(Transcript, JsonLinesAlternateSpeakers) {
  auto play = start(share(chain()));
  choose(play, 0);
  std::istringstream in(transcript_jsonl(play.transcript));
  std::vector<nlohmann::json> lines;
  for (std::string line; std::getline(in, line);) lines.push_back(nlohmann::json::parse(line));
  ASSERT_EQ(lines.size(), 3u);
  EXPECT_EQ(lines[0]["speaker"], "agent");
  EXPECT_EQ(lines[1]["speaker"], "patient");
  EXPECT_EQ(lines[1]["text"], "Next");
  EXPECT_EQ(lines[1]["state_id"], "s1");
  EXPECT_EQ(lines[2]["state_id"], "s2");
}

TEST(Ledger, OrderedUnlockAndMonotonicity) {
  ProgressLedger ledger({"s1", "s2"});
  EXPECT_TRUE(ledger.unlocked("s1"));
  EXPECT_FALSE(ledger.unlocked("s2"));
  EXPECT_THROW(ledger.mark_started("s2"), Error);
  EXPECT_THROW(ledger.status("zz"), Error);

  DialogueFsm fsm = single();
  fsm.session_id = "s1";
  auto play = start(share(fsm));
  ledger.mark_started("s1");
  EXPECT_EQ(ledger.status("s1"), Progress::in_progress);
  ledger.mark_completed("s1", play);
  EXPECT_EQ(ledger.status("s1"), Progress::completed);
  ledger.mark_started("s1");  // replaying a finished session
  EXPECT_EQ(ledger.status("s1"), Progress::completed);
  EXPECT_TRUE(ledger.unlocked("s2"));
}

TEST(Ledger, CompletionNeedsFinishedPlay) {
  ProgressLedger ledger({"t1"}, true);
  auto play = start(share(chain()));
  EXPECT_THROW(ledger.mark_completed("t1", play), Error);
  choose(play, 0);
  choose(play, 0);
  ledger.mark_completed("t1", play);
  EXPECT_EQ(ledger.status("t1"), Progress::completed);
}

TEST(Ledger, FreeOrder) {
  ProgressLedger ledger({"a", "b"}, true);
  EXPECT_TRUE(ledger.unlocked("b"));
  ledger.mark_started("b");
  EXPECT_EQ(ledger.status("b"), Progress::in_progress);
}

}  // namespace
}  // namespace hdfsm
