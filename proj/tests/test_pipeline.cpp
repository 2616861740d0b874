#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include "rudder/error.hpp"
#include "rudder/pipeline.hpp"

using namespace rudder;

namespace {

// A session driven by a held attitude, recorded through the pipeline itself.
SessionLog constant_attitude_log(const Settings& s, const RudderAttitude& a, int ticks) {
  const Arena arena = preset_arena("corridor_40m");
  SessionRecorder rec(s, arena, 0.0);
  Pipeline p(s, arena, 0.0);
  for (int i = 1; i <= ticks; ++i) {
    std::vector<std::string> ev;
    if (i == 1) ev.emplace_back(kEventCalibrated);
    rec.record(p.step(0.02 * i, {a.roll, a.pitch, a.yaw, 0.02 * i}, std::move(ev)));
  }
  return rec.finalize();
}

std::string temp_file(const std::string& name, const std::string& text) {
  const std::string path = ::testing::TempDir() + name;
  std::ofstream(path, std::ios::binary) << text;
  return path;
}

}  // namespace

TEST(EventToken, SanitizesFreeText) {
  EXPECT_EQ(event_token("bad field"), "bad_field");
  EXPECT_EQ(event_token("a,b"), "a_b");
  EXPECT_EQ(event_token("ok:1.5-x_y"), "ok:1.5-x_y");
  EXPECT_EQ(event_token(""), "_");
}

TEST(Pipeline, RequiresIncreasingTime) {
  Pipeline p(default_settings(), preset_arena("corridor_40m"), 1.0);
  EXPECT_THROW(p.step(1.0, {}, {}), Error);
  EXPECT_NO_THROW(p.step(1.02, {}, {}));
  EXPECT_THROW(p.step(1.01, {}, {}), Error);
}

TEST(Pipeline, WatchdogForcesZeroAndResetsLimiter) {
  Pipeline p(default_settings(), preset_arena("corridor_40m"), 0.0);
  const RudderAttitude fwd{0, 0.25, 0, 0};
  TickRecord r;
  for (int i = 1; i <= 50; ++i) r = p.step(0.02 * i, fwd, {});
  EXPECT_GT(r.cmd.vx, 0.5);
  r = p.step(1.02, fwd, {kEventWatchdog});
  EXPECT_EQ(r.cmd, Twist{});
  EXPECT_GT(r.raw.vx, 0.0);  // raw mapping is still recorded
  r = p.step(1.04, fwd, {});
  EXPECT_NEAR(r.cmd.vx, 0.016, 1e-12);  // ramps again from rest: a_max * dt
}

TEST(Pipeline, ProfileEventSwapsLimits) {
  Pipeline p(default_settings(), preset_arena("corridor_40m"), 0.0);
  p.step(0.02, {}, {"profile:day2"});
  EXPECT_EQ(p.mapping().v_max_x, 2.0);
  EXPECT_THROW(p.step(0.04, {}, {"profile:day9"}), UnknownName);
  EXPECT_EQ(p.mapping().v_max_x, 2.0);
}

TEST(Pipeline, FreezesAfterOutcome) {
  Arena a = preset_arena("corridor_40m");
  a.start = {39.0, 0.0, 0.0};
  Pipeline p(default_settings(), a, 0.0);
  TickRecord r;
  int i = 0;
  while (!p.outcome()) r = p.step(0.02 * ++i, {0, 0.25, 0, 0}, {});
  EXPECT_TRUE(r.has_event(kEventGoal));
  const double x = r.x;
  r = p.step(0.02 * ++i, {0, 0.25, 0, 0}, {});
  EXPECT_EQ(r.cmd, Twist{});
  EXPECT_EQ(r.x, x);
  EXPECT_FALSE(r.has_event(kEventGoal));
}

TEST(Replay, IdentityWithStoredSettings) {
  Settings s = default_settings("day2");
  const SessionLog log = constant_attitude_log(s, {0.1, 0.2, -0.3, 0}, 600);
  EXPECT_EQ(replay(log), log);
  std::ostringstream a, b;
  write_session_log(a, log);
  write_session_log(b, replay(log));
  EXPECT_EQ(a.str(), b.str());
}

TEST(Replay, DoubledSpeedLimitDoublesForwardCommand) {
  Settings s = default_settings();
  s.mapping.smoothing_alpha = 1.0;
  const SessionLog log = constant_attitude_log(s, {0, 0.15, 0, 0}, 300);
  Settings fast = s;
  fast.mapping.v_max_x *= 2.0;
  fast.mapping.a_max_lin *= 2.0;
  const SessionLog out = replay(log, {fast, std::nullopt});
  ASSERT_EQ(out.records().size(), log.records().size());
  for (std::size_t i = 0; i < out.records().size(); ++i) {
    ASSERT_DOUBLE_EQ(out.records()[i].cmd.vx, 2.0 * log.records()[i].cmd.vx) << i;
  }
  EXPECT_TRUE(out.records().front().has_event(kWarningConfigMismatch));
  EXPECT_FALSE(log.records().front().has_event(kWarningConfigMismatch));
}

TEST(Replay, MismatchOnEmptyLogGoesToHeader) {
  const SessionLog log = SessionRecorder(default_settings(), preset_arena("corridor_40m"), 0.0).finalize();
  const SessionLog out = replay(log, {default_settings("day2"), std::nullopt});
  ASSERT_EQ(out.header().warnings.size(), 1u);
  EXPECT_EQ(out.header().warnings[0], kWarningConfigMismatch);
}

TEST(ReplayPoses, CalibratesOnFirstSample) {
  std::vector<TrackerSample> samples;
  const UnitQuat base = UnitQuat::from_axis_angle(0, 0, 1, 0.7);
  for (int i = 0; i <= 100; ++i) {
    const double t = 5.0 + 0.02 * i;
    samples.push_back({t, {}, i < 50 ? base : quat_compose(base, rot_y(0.2))});
  }
  const SessionLog log = replay_poses(samples, default_settings(), preset_arena("corridor_40m"));
  ASSERT_EQ(log.records().size(), 100u);
  EXPECT_TRUE(log.records().front().has_event(kEventCalibrated));
  EXPECT_EQ(log.header().start_time, 5.0);
  EXPECT_NEAR(log.records()[10].pitch, 0.0, 1e-12);
  EXPECT_NEAR(log.records().back().pitch, 0.2, 1e-9);
  EXPECT_GT(log.records().back().cmd.vx, 0.0);
  EXPECT_TRUE(replay_poses({}, default_settings(), preset_arena("corridor_40m")).records().empty());
}

TEST(ReplayFile, DetectsFormat) {
  const SessionLog log = constant_attitude_log(default_settings(), {0, 0.1, 0, 0}, 20);
  std::ostringstream text;
  write_session_log(text, log);
  EXPECT_EQ(replay_file(temp_file("rudder_session.log", text.str())), log);

  const std::string pose = "# t x y z w qx qy qz\n0 0 0 0 1 0 0 0\n0.02 0 0 0 1 0 0 0\n0.04 0 0 0 1 0 0 0\n";
  const SessionLog p = replay_file(temp_file("rudder_pose.log", pose));
  EXPECT_EQ(p.records().size(), 2u);
  EXPECT_EQ(p.header().arena_name, "corridor_40m");
  EXPECT_THROW(replay_file(::testing::TempDir() + "missing.log"), ParseError);
}
