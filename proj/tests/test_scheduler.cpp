#include <gtest/gtest.h>

#include "dyncon/errors.hpp"
#include "dyncon/linearizability.hpp"
#include "dyncon/scheduler.hpp"
#include "support.hpp"

using namespace dyncon;
using namespace dyncon::testing;

namespace {

Scenario two_process_counter() {
  Scenario s;
  s.spec = "counter";
  s.n_processes = 2;
  s.workload = {mk(0, 0, "inc"), mk(1, 0, "read"), mk(0, 1, "inc")};
  return s;
}

std::vector<EventKind> kinds(const Trace& t) {
  std::vector<EventKind> out;
  for (const auto& e : t.events) out.push_back(e.kind());
  return out;
}

TEST(Scheduler, SameSeedSameTrace) {
  auto s = two_process_counter();
  s.seed = 77;
  EXPECT_EQ(trace_to_string(run(s)), trace_to_string(run(s)));
}

TEST(Scheduler, DifferentSeedsExploreDifferentInterleavings) {
  auto s = two_process_counter();
  std::set<std::string> distinct;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    s.seed = seed;
    distinct.insert(trace_to_string(run(s)));
  }
  EXPECT_GT(distinct.size(), 1u);
}

TEST(Scheduler, SoloRunStructure) {
  Scenario s;
  s.spec = "list";
  s.workload = {mk(0, 0, "append", {"a"}), mk(0, 1, "readAll")};
  auto t = run(s);
  using K = EventKind;
  std::vector<K> one{K::kInv, K::kBaseStep, K::kBaseStep, K::kBaseStep, K::kBaseStep, K::kBaseStep, K::kCommit, K::kRes};
  auto expected = one;
  expected.insert(expected.end(), one.begin(), one.end());
  EXPECT_EQ(kinds(t), expected);
  for (std::size_t i = 0; i < t.events.size(); ++i) EXPECT_EQ(t.events[i].step, static_cast<std::int64_t>(i));
  EXPECT_EQ(t.history().response({0, 1}), Value::array({"a"}));
}

TEST(Scheduler, ExplicitScheduleReproducesListExampleHistory) {
  auto t = run(scenario_from_json(load_json(scenario_path("list_example.json"))));
  ListExample ex;
  auto expected = ex.history();
  const auto h = t.history();
  const auto& got = h.events();
  ASSERT_EQ(got.size(), expected.events().size());
  for (std::size_t i = 0; i < got.size(); ++i) {
    EXPECT_EQ(got[i].kind, expected.events()[i].kind) << i;
    EXPECT_EQ(got[i].op.id, expected.events()[i].op.id) << i;
    EXPECT_EQ(got[i].response, expected.events()[i].response) << i;
  }
  // Same precedence relation.
  for (const auto& x : expected.ops())
    for (const auto& y : expected.ops()) EXPECT_EQ(t.history().precedes(x.id, y.id), expected.precedes(x.id, y.id));
}

TEST(Scheduler, ExplicitScheduleTicksAreOneActionEach) {
  auto s = scenario_from_json(load_json(scenario_path("list_example.json")));
  s.round_robin_tail = false;
  auto t = run(s);
  std::int64_t last_tick = -1;
  for (const auto& e : t.events) last_tick = std::max(last_tick, e.tick);
  EXPECT_EQ(last_tick + 1, static_cast<std::int64_t>(s.schedule->size()));
  EXPECT_TRUE(t.header.skipped.empty());
}

TEST(Scheduler, DisabledProcessSlotsAreSkippedAndLogged) {
  auto s = two_process_counter();
  s.schedule = std::vector<ProcessId>{1, 1, 1, 1, 1, 1, 1, 1, 1};  // p1 finishes after 7 actions
  auto t = run(s);
  ASSERT_EQ(t.header.skipped.size(), 2u);
  EXPECT_EQ(t.header.skipped[0].process, 1);
  EXPECT_EQ(t.header.skipped[0].tick, 7);
  // The round-robin tail finished p0's work.
  EXPECT_TRUE(t.history().is_complete({0, 1}));
}

TEST(Scheduler, CrashedProcessTakesNoFurtherSteps) {
  auto s = two_process_counter();
  s.seed = 3;
  s.crashes = {{0, 4}};
  auto t = run(s);
  bool crashed = false;
  for (const auto& e : t.events) {
    if (e.kind() == EventKind::kCrash && e.process == 0) crashed = true;
    else if (crashed) EXPECT_NE(e.process, 0);
  }
  EXPECT_TRUE(crashed);
  EXPECT_FALSE(t.history().contains({0, 1}));
  EXPECT_TRUE(t.history().is_complete({1, 0}));
}

TEST(Scheduler, CrashDuringSwapLeavesItPending) {
  auto t = run(scenario_from_json(load_json(scenario_path("list_example.json"))));
  EXPECT_TRUE(t.history().contains({3, 1}));
  EXPECT_FALSE(t.history().is_complete({3, 1}));
}

TEST(Scheduler, ExhaustiveVisitsDistinctLinearizableRuns) {
  Scenario s;
  s.spec = "counter";
  s.n_processes = 2;
  s.workload = {mk(0, 0, "inc"), mk(1, 0, "inc")};
  std::set<std::vector<ProcessId>> schedules;
  auto spec = counter_spec();
  explore_exhaustively(s, 100000, [&](const std::vector<ProcessId>& sched, const Trace& t) {
    schedules.insert(sched);
    EXPECT_TRUE(check_linearizable(spec, t.history()).has_value());
  });
  // Commuting publishes always take 7 actions each: C(14, 7) interleavings.
  EXPECT_EQ(schedules.size(), 3432u);
}

TEST(Scheduler, ExhaustiveRespectsRunCap) {
  auto s = two_process_counter();
  EXPECT_THROW(explore_exhaustively(s, 10, [](const auto&, const auto&) {}), CapacityError);
}

TEST(Scenario, ValidationRejectsBadWorkloads) {
  auto s = two_process_counter();
  s.workload.push_back(mk(5, 0, "inc"));
  EXPECT_THROW(validate(s), MalformedInput);
  auto gap = two_process_counter();
  gap.workload[2] = mk(0, 3, "inc");
  EXPECT_THROW(validate(gap), MalformedInput);
  auto unknown = two_process_counter();
  unknown.spec = "stack";
  EXPECT_THROW(validate(unknown), MalformedInput);
}

TEST(Scenario, JsonRoundTrip) {
  auto s = scenario_from_json(load_json(scenario_path("list_example.json")));
  auto again = scenario_from_json(to_json(s));
  EXPECT_EQ(to_json(again), to_json(s));
  EXPECT_EQ(trace_to_string(run(s)), trace_to_string(run(again)));
}

TEST(Scenario, MalformedJson) {
  EXPECT_THROW(scenario_from_json(Value::array()), MalformedInput);
  EXPECT_THROW(scenario_from_json(Value{{"spec", "list"}}), MalformedInput);
  auto v = load_json(scenario_path("solo.json"));
  v["format_version"] = 99;
  EXPECT_THROW(scenario_from_json(v), MalformedInput);
}

}  // namespace
