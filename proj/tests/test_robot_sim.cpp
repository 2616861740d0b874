#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "rudder/error.hpp"
#include "rudder/robot_sim.hpp"

using namespace rudder;

namespace {

constexpr double kPi = std::numbers::pi;

// Oracle: fine forward-Euler integration of the world-frame velocity.
RobotState euler_oracle(RobotState s, const Twist& u, double dt, int n = 200000) {
  const double h = dt / n;
  for (int i = 0; i < n; ++i) {
    const double c = std::cos(s.heading), sn = std::sin(s.heading);
    s.x += h * (u.vx * c - u.vy * sn);
    s.y += h * (u.vx * sn + u.vy * c);
    s.heading += h * u.wz;
  }
  return s;
}

Arena open_arena() {
  Arena a;
  a.name = "open";
  a.bounds = {-10, -10, 10, 10};
  a.goal = {9, 9, 0.5};
  a.robot_radius = 0.5;
  return a;
}

}  // namespace

TEST(Integrate, StraightLine) {
  const RobotState s = integrate(RobotState{}, Twist{1.0, 0.0, 0.0}, 1.0);
  EXPECT_DOUBLE_EQ(s.x, 1.0);
  EXPECT_DOUBLE_EQ(s.y, 0.0);
  EXPECT_DOUBLE_EQ(s.heading, 0.0);
  EXPECT_DOUBLE_EQ(s.t, 1.0);
}

TEST(Integrate, RestStaysPut) {
  RobotState s;
  s.x = 2.0;
  s.heading = 1.0;
  const RobotState n = integrate(s, Twist{}, 0.5);
  EXPECT_EQ(n.x, 2.0);
  EXPECT_EQ(n.y, 0.0);
  EXPECT_EQ(n.heading, 1.0);
}

TEST(Integrate, HalfCircle) {
  const RobotState s = integrate(RobotState{}, Twist{1.0, 0.0, 1.0}, kPi);
  EXPECT_NEAR(s.x, 0.0, 1e-9);
  EXPECT_NEAR(s.y, 2.0, 1e-9);
  EXPECT_NEAR(std::abs(s.heading), kPi, 1e-9);
}

TEST(Integrate, BodyFrameLateral) {
  RobotState s;
  s.heading = kPi / 2;
  const RobotState n = integrate(s, Twist{0.0, 1.0, 0.0}, 1.0);
  EXPECT_NEAR(n.x, -1.0, 1e-12);
  EXPECT_NEAR(n.y, 0.0, 1e-12);
}

TEST(Integrate, MatchesFineEulerOracle) {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> v(-2, 2), w(-3, 3), h(-kPi, kPi);
  for (int i = 0; i < 10; ++i) {
    RobotState s;
    s.heading = h(rng);
    const Twist u{v(rng), v(rng), w(rng)};
    const RobotState a = integrate(s, u, 0.7);
    const RobotState b = euler_oracle(s, u, 0.7);
    EXPECT_NEAR(a.x, b.x, 1e-4);
    EXPECT_NEAR(a.y, b.y, 1e-4);
    EXPECT_NEAR(std::remainder(a.heading - b.heading, 2 * kPi), 0.0, 1e-9);
  }
}

TEST(Integrate, SubstepsCompose) {
  std::mt19937_64 rng(37);
  std::uniform_real_distribution<double> v(-2, 2), w(-3, 3);
  for (int i = 0; i < 1000; ++i) {
    const Twist u{v(rng), v(rng), w(rng)};
    const RobotState whole = integrate(RobotState{}, u, 0.04);
    const RobotState split = integrate(integrate(RobotState{}, u, 0.02), u, 0.02);
    ASSERT_NEAR(whole.x, split.x, 1e-12);
    ASSERT_NEAR(whole.y, split.y, 1e-12);
    ASSERT_NEAR(whole.heading, split.heading, 1e-12);
  }
}

TEST(Integrate, RejectsBadInput) {
  EXPECT_THROW(integrate(RobotState{}, Twist{}, 0.0), SimulationError);
  EXPECT_THROW(integrate(RobotState{}, Twist{NAN, 0, 0}, 0.1), SimulationError);
}

TEST(WrapAngle, HalfOpenInterval) {
  EXPECT_DOUBLE_EQ(wrap_angle(-kPi), kPi);
  EXPECT_DOUBLE_EQ(wrap_angle(kPi), kPi);
  EXPECT_NEAR(wrap_angle(3 * kPi / 2), -kPi / 2, 1e-15);
}

TEST(Collision, TouchingCounts) {
  Arena a = open_arena();
  a.obstacles = {Circle{2.0, 0.0, 0.5}, Rect{-3.0, -1.0, -2.0, 1.0}};
  RobotState s;
  s.x = 1.0 - 1e-6;
  EXPECT_FALSE(check_collision(s, a));
  s.x = 1.0 + 1e-6;
  EXPECT_EQ(check_collision(s, a), (Collision{Collision::Kind::Obstacle, 0}));
  s.x = -1.5 + 1e-6;
  EXPECT_FALSE(check_collision(s, a));
  s.x = -1.5 - 1e-6;
  EXPECT_EQ(check_collision(s, a).obstacle_id, 1u);
  s.x = 9.5 + 1e-6;
  EXPECT_EQ(check_collision(s, a).token(), "collision:bounds");
}

TEST(Presets, CorridorGeometry) {
  const Arena a = preset_arena("corridor_40m");
  EXPECT_DOUBLE_EQ(std::hypot(a.goal.cx - a.start.x, a.goal.cy - a.start.y), 40.0);
  EXPECT_NO_THROW(a.validate());
  EXPECT_FALSE(check_collision(a.start_state(), a));
}

TEST(Presets, ObstacleFieldStartsFree) {
  const Arena a = preset_arena("obstacle_field");
  EXPECT_FALSE(check_collision(a.start_state(), a));
  EXPECT_GE(a.obstacles.size(), 3u);
}

TEST(Presets, UnknownNameListsPresets) {
  try {
    preset_arena("maze");
    FAIL();
  } catch (const UnknownName& e) {
    EXPECT_NE(std::string(e.what()).find("corridor_40m"), std::string::npos);
  }
  EXPECT_THROW(load_arena("maze"), UnknownName);
}

TEST(ArenaFile, RoundTrip) {
  for (const auto& name : preset_names()) {
    const Arena a = preset_arena(name);
    std::stringstream buf;
    write_arena(buf, a);
    EXPECT_EQ(read_arena(buf, name), a);
  }
}

TEST(ArenaFile, ErrorsCarryLineNumbers) {
  auto line_of = [](const std::string& text) {
    std::istringstream in(text);
    try {
      read_arena(in, "t");
    } catch (const ParseError& e) {
      return e.line();
    }
    return std::size_t{999};
  };
  EXPECT_EQ(line_of("bounds 0 0 1 1\n# c\nhexagon 1\n"), 3u);
  EXPECT_EQ(line_of("bounds 0 0 1\n"), 1u);
  EXPECT_EQ(line_of("bounds 0 0 1 1\nstart 0.5 0.5 x\n"), 2u);
  EXPECT_EQ(line_of("bounds 0 0 10 10\n"), 0u);
}

TEST(ArenaFile, StartInCollisionIsRejected) {
  std::istringstream in("bounds 0 0 10 10\ncircle 1 1 1\nstart 1 1 0\ngoal 8 8 1\n");
  EXPECT_THROW(read_arena(in, "bad"), ConfigError);
}

TEST(RunSession, TimeoutAtRest) {
  const SessionResult r = run_session(preset_arena("corridor_40m"), scripted_source({}), 0.02, 1.0);
  EXPECT_EQ(r.outcome.kind, Outcome::Kind::Timeout);
  EXPECT_EQ(r.commands.size(), 50u);
  EXPECT_EQ(r.trajectory.size(), 51u);
  EXPECT_EQ(r.trajectory.back().x, 0.0);
}

TEST(RunSession, StraightIntoFirstWall) {
  const Arena a = preset_arena("obstacle_field");
  const SessionResult r = run_session(a, [](double, const RobotState&) { return Twist{1.0, 0, 0}; }, 0.02, 20.0);
  ASSERT_EQ(r.outcome.kind, Outcome::Kind::Collided);
  EXPECT_EQ(r.outcome.collision.token(), "collision:0");
  // Wall face at x = 3.0, radius 0.4: contact once x >= 2.6.
  EXPECT_GE(r.trajectory.back().x, 2.6);
  EXPECT_LT(r.trajectory.back().x, 2.6 + 0.02 + 1e-9);
}

TEST(RunSession, CollisionBeatsGoalOnTheSameTick) {
  Arena a = open_arena();
  a.goal = {2.0, 0.0, 1.0};
  a.obstacles = {Circle{2.6, 0.0, 0.2}};  // contact from x = 1.9
  const SessionResult r = run_session(a, scripted_source({Twist{100.0, 0, 0}}), 0.02, 1.0);
  EXPECT_EQ(r.outcome.kind, Outcome::Kind::Collided);
}

TEST(RunSession, GoalReached) {
  const Arena a = preset_arena("corridor_40m");
  const SessionResult r = run_session(a, [](double, const RobotState&) { return Twist{2.0, 0, 0}; }, 0.02, 60.0);
  ASSERT_EQ(r.outcome.kind, Outcome::Kind::GoalReached);
  EXPECT_NEAR(r.outcome.t, 19.76, 1e-9);
}

TEST(WaypointFollower, HoldsHeadingAndStopsAtLastPoint) {
  auto src = waypoint_follower({{1.0, 0.0, 0.0}}, 0.8);
  RobotState s;
  s.heading = kPi / 2;
  const Twist far = src(0.0, s);
  EXPECT_NEAR(far.vx, 0.0, 1e-12);   // world +x is body -y at heading pi/2
  EXPECT_NEAR(far.vy, -0.8, 1e-12);
  EXPECT_EQ(far.wz, 0.0);
  s.x = 0.9;
  EXPECT_NEAR(std::hypot(src(0.0, s).vx, src(0.0, s).vy), 0.2, 1e-12);
}

TEST(RunSession, RejectsBadStep) {
  EXPECT_THROW(run_session(preset_arena("corridor_40m"), scripted_source({}), 0.1, 1.0), SimulationError);
}
