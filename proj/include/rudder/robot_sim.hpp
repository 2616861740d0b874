#pragma once

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "rudder/mapping.hpp"

namespace rudder {

/// Planar state of the holonomic avatar base. Pose is in the world frame,
/// velocities are body-frame.
struct RobotState {
  double x = 0.0;
  double y = 0.0;
  double heading = 0.0;  // (-pi, pi]
  double vx = 0.0;
  double vy = 0.0;
  double wz = 0.0;
  double t = 0.0;

  friend bool operator==(const RobotState&, const RobotState&) = default;
};

double wrap_angle(double angle) noexcept;

struct Circle {
  double cx = 0.0;
  double cy = 0.0;
  double r = 0.0;
  friend bool operator==(const Circle&, const Circle&) = default;
};

/// Axis-aligned rectangle, x0 < x1 and y0 < y1.
struct Rect {
  double x0 = 0.0;
  double y0 = 0.0;
  double x1 = 0.0;
  double y1 = 0.0;
  friend bool operator==(const Rect&, const Rect&) = default;
};

using Obstacle = std::variant<Circle, Rect>;

struct Pose2 {
  double x = 0.0;
  double y = 0.0;
  double heading = 0.0;
  friend bool operator==(const Pose2&, const Pose2&) = default;
};

struct Arena {
  std::string name;
  Rect bounds;
  std::vector<Obstacle> obstacles;  // id = index
  Pose2 start;
  Circle goal;
  double robot_radius = 0.4;

  /// Throws ConfigError when the start pose collides or the goal leaves the bounds.
  void validate() const;
  RobotState start_state(double t0 = 0.0) const;
  bool in_goal(const RobotState& s) const noexcept;

  friend bool operator==(const Arena&, const Arena&) = default;
};

struct Collision {
  enum class Kind { None, Obstacle, OutOfBounds };
  Kind kind = Kind::None;
  std::size_t obstacle_id = 0;

  explicit operator bool() const noexcept { return kind != Kind::None; }
  /// Event token: `collision:<id>` or `collision:bounds`; empty for none.
  std::string token() const;

  friend bool operator==(const Collision&, const Collision&) = default;
};

/// Exact integration of a constant body twist over dt.
/// Throws SimulationError on dt <= 0 or non-finite input.
RobotState integrate(const RobotState& state, const Twist& cmd, double dt);
RobotState integrate(const RobotState& state, const TwistCommand& cmd, double dt);

/// Robot disc against every obstacle and the bounds; touching counts.
Collision check_collision(const RobotState& state, const Arena& arena) noexcept;

/// `corridor_40m` or `obstacle_field`; throws UnknownName listing presets.
Arena preset_arena(std::string_view name);
std::vector<std::string> preset_names();

/// Preset name, or else a path to an arena file.
Arena load_arena(const std::string& name_or_path);

/// Line format: `bounds x0 y0 x1 y1`, `circle cx cy r`, `rect x0 y0 x1 y1`,
/// `start x y heading`, `goal cx cy r`, `robot_radius r`; '#' comments.
Arena read_arena(std::istream& in, std::string name);
Arena read_arena_file(const std::string& path);
void write_arena(std::ostream& out, const Arena& arena);
std::vector<std::string> arena_lines(const Arena& arena);

struct Outcome {
  enum class Kind { GoalReached, Collided, Timeout };
  Kind kind = Kind::Timeout;
  double t = 0.0;
  Collision collision;

  friend bool operator==(const Outcome&, const Outcome&) = default;
};

/// Called once per tick with the tick start time and current state.
using TwistSource = std::function<Twist(double t, const RobotState& state)>;

struct SessionResult {
  std::vector<RobotState> trajectory;  // includes the start state
  std::vector<Twist> commands;         // one per tick
  Outcome outcome;
};

/// Tick loop: integrate, then collision check, then goal check.
/// Requires dt in (0, 0.05]; throws SimulationError otherwise.
SessionResult run_session(const Arena& arena, const TwistSource& source, double dt, double max_t);

/// Open-loop replay of a fixed command list; zero twist once exhausted.
TwistSource scripted_source(std::vector<Twist> commands);

/// Holonomic waypoint tracker: heads for each waypoint in turn at `speed`,
/// slowing proportionally inside `gain`^-1 * speed of the last one, and
/// advancing when within `tolerance`. Heading is held (wz = 0).
TwistSource waypoint_follower(std::vector<Pose2> waypoints, double speed, double gain = 2.0,
                              double tolerance = 0.1);

}  // namespace rudder
