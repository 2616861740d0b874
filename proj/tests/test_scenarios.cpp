#include <gtest/gtest.h>

#include <cmath>

#include "bench/acceptance.hpp"

using namespace rudder;
using namespace rudder::bench;

TEST(Trapezoid, Oracle) {
  // Reaches v_max: ramp distance v^2/2a, then cruise.
  EXPECT_DOUBLE_EQ(trapezoid_time(39.5, 2.0, 1.5), 2.0 / 1.5 + (39.5 - 2.0 * 2.0 / 3.0) / 2.0);
  // Too short to reach v_max: pure ramp.
  EXPECT_DOUBLE_EQ(trapezoid_time(0.5, 2.0, 1.0), 1.0);
  EXPECT_EQ(trapezoid_time(0.0, 1.0, 1.0), 0.0);
}

TEST(Corridor, Day2WithinFivePercentOfOracle) {
  const CorridorRun run = run_corridor("day2");
  ASSERT_TRUE(run.completion_time);
  EXPECT_NEAR(run.oracle_time, 20.4167, 1e-3);
  EXPECT_LT(std::abs(*run.completion_time - run.oracle_time) / run.oracle_time, 0.05);
  const SessionMetrics m = compute_metrics(run.drive.log);
  EXPECT_EQ(m.reversals, (std::array<int, 3>{0, 0, 0}));
  EXPECT_GE(m.path_length, 39.5 - 1e-9);
}

TEST(Corridor, Day1IsSlower) {
  const CorridorRun d1 = run_corridor("day1");
  const CorridorRun d2 = run_corridor("day2");
  ASSERT_TRUE(d1.completion_time && d2.completion_time);
  EXPECT_GT(*d1.completion_time, *d2.completion_time);
}

TEST(ObstacleField, RecordedScriptReachesGoalAndIsTight) {
  const SessionResult rec = record_obstacle_field_run();
  ASSERT_EQ(rec.outcome.kind, Outcome::Kind::GoalReached);
  EXPECT_EQ(replay_obstacle_field(rec.commands, 0.0).outcome.kind, Outcome::Kind::GoalReached);
  EXPECT_EQ(replay_obstacle_field(rec.commands, 0.3).outcome.kind, Outcome::Kind::Collided);
}

TEST(SyntheticApproach, ReversalCountsAreExact) {
  const SessionLog clean = synthetic_approach_log(std::vector<double>(40, 0.5));
  EXPECT_EQ(compute_metrics(clean).reversals[0], 0);
  std::vector<double> v(40, 0.5);
  v[10] = v[20] = -0.3;
  EXPECT_EQ(compute_metrics(synthetic_approach_log(v)).reversals[0], 4);
}

TEST(Criteria, AllElevenRegistered) {
  const auto& all = criteria();
  ASSERT_EQ(all.size(), 11u);
  for (std::size_t i = 0; i < all.size(); ++i) EXPECT_EQ(all[i].id, static_cast<int>(i + 1));
}

TEST(Criteria, FormatResult) {
  CriterionResult r{7, "task5-corridor", true, "ok", 0.5};
  const std::string line = format_result(r);
  EXPECT_EQ(line.rfind("PASS", 0), 0u);
  EXPECT_NE(line.find("task5-corridor"), std::string::npos);
  r.pass = false;
  EXPECT_EQ(format_result(r).rfind("FAIL", 0), 0u);
}

TEST(Criteria, FastOnesPass) {
  for (int id : {5, 6, 9, 10}) {
    const CriterionResult r = criteria()[static_cast<std::size_t>(id - 1)].run(kDefaultSeed);
    EXPECT_TRUE(r.pass) << format_result(r);
  }
}
