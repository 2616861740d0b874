#include "rudder/robot_sim.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <numbers>
#include <ostream>
#include <sstream>

#include "rudder/error.hpp"
#include "rudder/numfmt.hpp"

namespace rudder {

double wrap_angle(double angle) noexcept {
  double a = std::remainder(angle, 2.0 * std::numbers::pi);
  if (a <= -std::numbers::pi) a += 2.0 * std::numbers::pi;
  return a;
}

namespace {

constexpr double kStraightLineOmega = 1e-9;

bool finite(const Twist& t) { return std::isfinite(t.vx) && std::isfinite(t.vy) && std::isfinite(t.wz); }

double rect_distance(const Rect& r, double x, double y) {
  const double dx = std::max({r.x0 - x, 0.0, x - r.x1});
  const double dy = std::max({r.y0 - y, 0.0, y - r.y1});
  return std::hypot(dx, dy);
}

bool rect_well_formed(const Rect& r) {
  return std::isfinite(r.x0) && std::isfinite(r.y0) && std::isfinite(r.x1) && std::isfinite(r.y1) && r.x0 < r.x1 &&
         r.y0 < r.y1;
}

}  // namespace

RobotState integrate(const RobotState& state, const Twist& cmd, double dt) {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw SimulationError("integrate requires finite dt > 0");
  if (!finite(cmd)) throw SimulationError("non-finite twist command");

  // Closed form of the rotating body velocity: the chord of the arc has
  // length dt*sinc(w*dt/2)*|v| and points along the mid-interval heading.
  const double half = 0.5 * cmd.wz * dt;
  const double chord = std::abs(cmd.wz) < kStraightLineOmega ? dt : dt * std::sin(half) / half;
  const double mid = state.heading + half;
  const double c = std::cos(mid);
  const double s = std::sin(mid);

  RobotState next = state;
  next.x = state.x + chord * (cmd.vx * c - cmd.vy * s);
  next.y = state.y + chord * (cmd.vx * s + cmd.vy * c);
  next.heading = wrap_angle(state.heading + cmd.wz * dt);
  next.vx = cmd.vx;
  next.vy = cmd.vy;
  next.wz = cmd.wz;
  next.t = state.t + dt;
  return next;
}

RobotState integrate(const RobotState& state, const TwistCommand& cmd, double dt) {
  return integrate(state, cmd.twist(), dt);
}

Collision check_collision(const RobotState& state, const Arena& arena) noexcept {
  const double r = arena.robot_radius;
  for (std::size_t i = 0; i < arena.obstacles.size(); ++i) {
    const bool hit = std::visit(
        [&](const auto& o) {
          using T = std::decay_t<decltype(o)>;
          if constexpr (std::is_same_v<T, Circle>) {
            return std::hypot(state.x - o.cx, state.y - o.cy) <= o.r + r;
          } else {
            return rect_distance(o, state.x, state.y) <= r;
          }
        },
        arena.obstacles[i]);
    if (hit) return {Collision::Kind::Obstacle, i};
  }
  const Rect& b = arena.bounds;
  if (state.x - r <= b.x0 || state.x + r >= b.x1 || state.y - r <= b.y0 || state.y + r >= b.y1) {
    return {Collision::Kind::OutOfBounds, 0};
  }
  return {};
}

std::string Collision::token() const {
  switch (kind) {
    case Kind::None: return {};
    case Kind::Obstacle: return "collision:" + std::to_string(obstacle_id);
    case Kind::OutOfBounds: return "collision:bounds";
  }
  return {};
}

void Arena::validate() const {
  if (!rect_well_formed(bounds)) throw ConfigError("arena '" + name + "': bounds must satisfy x0 < x1, y0 < y1");
  if (!(robot_radius > 0.0) || !std::isfinite(robot_radius)) {
    throw ConfigError("arena '" + name + "': robot_radius must be > 0");
  }
  for (const auto& o : obstacles) {
    const bool ok = std::visit(
        [](const auto& v) {
          using T = std::decay_t<decltype(v)>;
          if constexpr (std::is_same_v<T, Circle>) {
            return std::isfinite(v.cx) && std::isfinite(v.cy) && v.r > 0.0 && std::isfinite(v.r);
          } else {
            return rect_well_formed(v);
          }
        },
        o);
    if (!ok) throw ConfigError("arena '" + name + "': malformed obstacle");
  }
  if (!(goal.r > 0.0) || goal.cx - goal.r < bounds.x0 || goal.cx + goal.r > bounds.x1 ||
      goal.cy - goal.r < bounds.y0 || goal.cy + goal.r > bounds.y1) {
    throw ConfigError("arena '" + name + "': goal region must lie inside the bounds");
  }
  if (const Collision c = check_collision(start_state(), *this)) {
    throw ConfigError("arena '" + name + "': start pose is in collision (" + c.token() + ")");
  }
}

RobotState Arena::start_state(double t0) const {
  RobotState s;
  s.x = start.x;
  s.y = start.y;
  s.heading = wrap_angle(start.heading);
  s.t = t0;
  return s;
}

bool Arena::in_goal(const RobotState& s) const noexcept { return std::hypot(s.x - goal.cx, s.y - goal.cy) <= goal.r; }

Arena preset_arena(std::string_view name) {
  Arena a;
  if (name == "corridor_40m") {
    // 3 m wide, start and goal centers 40 m apart, 1 m of run-off at each end.
    a.name = "corridor_40m";
    a.bounds = {-1.0, -1.5, 41.0, 1.5};
    a.start = {0.0, 0.0, 0.0};
    a.goal = {40.0, 0.0, 0.5};
    a.robot_radius = 0.4;
    return a;
  }
  if (name == "obstacle_field") {
    // Three walls with 1.2 m gates (centers y = 1.6, -1.6, 1.0) plus loose
    // circular clutter away from the gate line.
    a.name = "obstacle_field";
    a.bounds = {0.0, -4.0, 12.0, 4.0};
    a.obstacles = {
        Rect{3.0, -4.0, 3.4, 1.0}, Rect{3.0, 2.2, 3.4, 4.0},   //
        Rect{6.0, -1.0, 6.4, 4.0}, Rect{6.0, -4.0, 6.4, -2.2},  //
        Rect{9.0, -4.0, 9.4, 0.4}, Rect{9.0, 1.6, 9.4, 4.0},    //
        Circle{1.5, 2.8, 0.5},     Circle{4.7, -3.0, 0.5},      //
        Circle{7.7, 2.8, 0.5},     Circle{10.6, -2.8, 0.4},
    };
    a.start = {1.0, 0.0, 0.0};
    a.goal = {11.0, 0.0, 0.5};
    a.robot_radius = 0.4;
    return a;
  }
  throw UnknownName("unknown arena '" + std::string(name) + "' (presets: corridor_40m, obstacle_field)");
}

std::vector<std::string> preset_names() { return {"corridor_40m", "obstacle_field"}; }

Arena load_arena(const std::string& name_or_path) {
  for (const auto& n : preset_names()) {
    if (n == name_or_path) return preset_arena(n);
  }
  std::ifstream probe(name_or_path);
  if (!probe) {
    throw UnknownName("unknown arena '" + name_or_path + "' (presets: corridor_40m, obstacle_field, or a file path)");
  }
  return read_arena_file(name_or_path);
}

Arena read_arena(std::istream& in, std::string name) {
  Arena a;
  a.name = std::move(name);
  bool have_bounds = false, have_start = false, have_goal = false;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string_view body = trim(line);
    if (body.empty() || body.front() == '#') continue;
    const auto f = split_ws(body);
    const std::string_view kind = f[0];
    std::vector<double> v;
    for (std::size_t i = 1; i < f.size(); ++i) {
      const auto d = parse_double(f[i]);
      if (!d || !std::isfinite(*d)) throw ParseError("bad number '" + std::string(f[i]) + "'", lineno);
      v.push_back(*d);
    }
    auto need = [&](std::size_t n) {
      if (v.size() != n) {
        throw ParseError("'" + std::string(kind) + "' takes " + std::to_string(n) + " values", lineno);
      }
    };
    if (kind == "bounds") {
      need(4);
      a.bounds = {v[0], v[1], v[2], v[3]};
      have_bounds = true;
    } else if (kind == "circle") {
      need(3);
      a.obstacles.emplace_back(Circle{v[0], v[1], v[2]});
    } else if (kind == "rect") {
      need(4);
      a.obstacles.emplace_back(Rect{v[0], v[1], v[2], v[3]});
    } else if (kind == "start") {
      need(3);
      a.start = {v[0], v[1], v[2]};
      have_start = true;
    } else if (kind == "goal") {
      need(3);
      a.goal = {v[0], v[1], v[2]};
      have_goal = true;
    } else if (kind == "robot_radius") {
      need(1);
      a.robot_radius = v[0];
    } else {
      throw ParseError("unknown arena primitive '" + std::string(kind) + "'", lineno);
    }
  }
  if (!have_bounds || !have_start || !have_goal) throw ParseError("arena needs bounds, start and goal lines", 0);
  a.validate();
  return a;
}

Arena read_arena_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open arena file '" + path + "'", 0);
  return read_arena(in, path);
}

std::vector<std::string> arena_lines(const Arena& a) {
  auto join = [](std::string head, std::initializer_list<double> vals) {
    for (double d : vals) head += ' ' + format_double(d);
    return head;
  };
  std::vector<std::string> out;
  out.push_back(join("bounds", {a.bounds.x0, a.bounds.y0, a.bounds.x1, a.bounds.y1}));
  for (const auto& o : a.obstacles) {
    out.push_back(std::visit(
        [&](const auto& v) {
          using T = std::decay_t<decltype(v)>;
          if constexpr (std::is_same_v<T, Circle>) {
            return join("circle", {v.cx, v.cy, v.r});
          } else {
            return join("rect", {v.x0, v.y0, v.x1, v.y1});
          }
        },
        o));
  }
  out.push_back(join("start", {a.start.x, a.start.y, a.start.heading}));
  out.push_back(join("goal", {a.goal.cx, a.goal.cy, a.goal.r}));
  out.push_back(join("robot_radius", {a.robot_radius}));
  return out;
}

void write_arena(std::ostream& out, const Arena& arena) {
  for (const auto& l : arena_lines(arena)) out << l << '\n';
}

SessionResult run_session(const Arena& arena, const TwistSource& source, double dt, double max_t) {
  if (!(dt > 0.0) || dt > 0.05) throw SimulationError("run_session requires dt in (0, 0.05]");
  if (!(max_t > 0.0) || !std::isfinite(max_t)) throw SimulationError("run_session requires finite max_t > 0");

  SessionResult result;
  RobotState state = arena.start_state(0.0);
  result.trajectory.push_back(state);
  const auto max_ticks = static_cast<long>(std::ceil(max_t / dt - 1e-9));
  for (long k = 1; k <= max_ticks; ++k) {
    const Twist cmd = source(state.t, state);
    result.commands.push_back(cmd);
    state = integrate(state, cmd, dt);
    state.t = static_cast<double>(k) * dt;
    result.trajectory.push_back(state);
    if (const Collision c = check_collision(state, arena)) {
      result.outcome = {Outcome::Kind::Collided, state.t, c};
      return result;
    }
    if (arena.in_goal(state)) {
      result.outcome = {Outcome::Kind::GoalReached, state.t, {}};
      return result;
    }
  }
  result.outcome = {Outcome::Kind::Timeout, max_t, {}};
  return result;
}

TwistSource scripted_source(std::vector<Twist> commands) {
  return [commands = std::move(commands), i = std::size_t{0}](double, const RobotState&) mutable {
    return i < commands.size() ? commands[i++] : Twist{};
  };
}

TwistSource waypoint_follower(std::vector<Pose2> waypoints, double speed, double gain, double tolerance) {
  return [wps = std::move(waypoints), speed, gain, tolerance, i = std::size_t{0}](double,
                                                                                   const RobotState& s) mutable {
    while (i + 1 < wps.size() && std::hypot(wps[i].x - s.x, wps[i].y - s.y) < tolerance) ++i;
    if (i >= wps.size()) return Twist{};
    const double ex = wps[i].x - s.x;
    const double ey = wps[i].y - s.y;
    const double dist = std::hypot(ex, ey);
    if (dist < 1e-12) return Twist{};
    const bool last = i + 1 == wps.size();
    const double v = last ? std::min(speed, gain * dist) : speed;
    // World-frame direction rotated into the body frame.
    const double c = std::cos(s.heading), sn = std::sin(s.heading);
    const double wx = v * ex / dist, wy = v * ey / dist;
    return Twist{c * wx + sn * wy, -sn * wx + c * wy, 0.0};
  };
}

}  // namespace rudder
