#include "bench/acceptance.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "rudder/mapping.hpp"
#include "rudder/numfmt.hpp"
#include "rudder/pipeline.hpp"
#include "rudder/pose.hpp"
#include "rudder/spring_rig.hpp"
#include "rudder/wire.hpp"

namespace rudder::bench {

namespace {

using Clock = std::chrono::steady_clock;

class Timer {
 public:
  double seconds() const { return std::chrono::duration<double>(Clock::now() - start_).count(); }

 private:
  Clock::time_point start_ = Clock::now();
};

std::string fmt(double v, int digits = 3) {
  std::ostringstream os;
  os.setf(std::ios::fixed);
  os.precision(digits);
  os << v;
  return os.str();
}

std::string sci(double v) {
  std::ostringstream os;
  os.setf(std::ios::scientific);
  os.precision(2);
  os << v;
  return os.str();
}

double uniform(std::mt19937_64& rng, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }

int uniform_int(std::mt19937_64& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }

CriterionResult finish(int id, const char* name, bool pass, std::string detail, const Timer& timer) {
  return {id, name, pass, std::move(detail), timer.seconds()};
}

// A valid mapping config with randomized bands and limits.
MappingConfig random_mapping(std::mt19937_64& rng) {
  MappingConfig c = day_profile(uniform_int(rng, 0, 1) == 0 ? "day1" : "day2");
  c.stop_rp = uniform(rng, 0.1, 0.5);
  c.stop_yaw = uniform(rng, 0.2, 1.0);
  c.dead_roll = uniform(rng, 0.0, 0.5) * c.stop_rp;
  c.dead_pitch = uniform(rng, 0.0, 0.5) * c.stop_rp;
  c.dead_yaw = uniform(rng, 0.0, 0.5) * c.stop_yaw;
  c.smoothing_alpha = uniform(rng, 0.0, 1.0);
  c.invert_roll = uniform_int(rng, 0, 1) == 1;
  c.invert_pitch = uniform_int(rng, 0, 1) == 1;
  c.invert_yaw = uniform_int(rng, 0, 1) == 1;
  c.validate();
  return c;
}

}  // namespace

std::string format_result(const CriterionResult& r) {
  std::ostringstream os;
  os << (r.pass ? "PASS" : "FAIL") << ' ' << (r.id < 10 ? " " : "") << r.id << ' ' << r.name << ": " << r.detail
     << " (" << fmt(r.seconds, 2) << " s)";
  return os.str();
}

// ---------------------------------------------------------------------------
// 1

CriterionResult deadzone_zero_at_rest(std::uint64_t seed) {
  Timer timer;
  std::mt19937_64 rng(seed);
  constexpr int kCases = 100000;
  int failures = 0;
  for (int i = 0; i < kCases; ++i) {
    const MappingConfig cfg = i % 2 == 0 ? day_profile("day1") : random_mapping(rng);
    RudderAttitude att;
    // Every tenth case sits exactly on the band edge.
    auto inside = [&](double dead) { return i % 10 == 0 ? (uniform_int(rng, 0, 1) ? dead : -dead) : uniform(rng, -dead, dead); };
    att.roll = inside(cfg.dead_roll);
    att.pitch = inside(cfg.dead_pitch);
    att.yaw = inside(cfg.dead_yaw);
    const Twist raw = map_to_twist(att, cfg);
    if (!(raw.vx == 0.0 && raw.vy == 0.0 && raw.wz == 0.0)) ++failures;
  }
  const double s = timer.seconds();
  return finish(1, "deadzone-zero-at-rest", failures == 0 && s < 5.0,
                std::to_string(kCases) + " cases, " + std::to_string(failures) + " non-zero", timer);
}

// ---------------------------------------------------------------------------
// 2

CriterionResult normalize_continuity(std::uint64_t) {
  Timer timer;
  constexpr int kPoints = 1000000;
  const MappingConfig cfg = day_profile("day1");
  double max_jump = 0.0;
  long violations = 0;
  struct Band {
    double dead, stop;
  };
  for (const Band b : {Band{cfg.dead_pitch, cfg.stop_rp}, Band{cfg.dead_yaw, cfg.stop_yaw}}) {
    const double lo = -1.2 * b.stop;
    const double step = 2.4 * b.stop / (kPoints - 1);
    double prev = normalize_axis(lo, b.dead, b.stop);
    for (int i = 1; i < kPoints; ++i) {
      const double a = lo + step * i;
      const double v = normalize_axis(a, b.dead, b.stop);
      max_jump = std::max(max_jump, std::abs(v - prev));
      if (v < prev) ++violations;
      // Strictly increasing inside the active band.
      if (std::abs(a) > b.dead + step && std::abs(a) < b.stop - step && std::abs(a - step) > b.dead && !(v > prev)) {
        ++violations;
      }
      prev = v;
    }
  }
  const double s = timer.seconds();
  return finish(2, "normalize-continuity", max_jump < 1e-4 && violations == 0 && s < 5.0,
                "2 x " + std::to_string(kPoints) + " points, max jump " + sci(max_jump) + ", " +
                    std::to_string(violations) + " monotonicity violations",
                timer);
}

// ---------------------------------------------------------------------------
// 3

CriterionResult slew_bound(std::uint64_t seed) {
  Timer timer;
  std::mt19937_64 rng(seed);
  constexpr int kSequences = 10000;
  long failures = 0, steps = 0;
  for (int s = 0; s < kSequences; ++s) {
    const MappingConfig cfg = random_mapping(rng);
    MapperState state = MapperState::at_rest(0.0);
    double t = 0.0;
    const int n = uniform_int(rng, 10, 100);
    for (int i = 0; i < n; ++i) {
      // Mostly tick-sized steps, some long gaps, some stale clocks.
      const int kind = uniform_int(rng, 0, 9);
      const double dt = kind == 0 ? -uniform(rng, 0.0, 0.05) : kind == 1 ? uniform(rng, 0.1, 2.0) : uniform(rng, 1e-4, 0.05);
      const Twist raw{uniform(rng, -3.0, 3.0) * cfg.v_max_x, uniform(rng, -3.0, 3.0) * cfg.v_max_y,
                      uniform(rng, -3.0, 3.0) * cfg.w_max};
      const TwistCommand prev = state.previous;
      const TwistCommand next = rate_limit(raw, state, t + dt, cfg);
      ++steps;
      if (dt <= 0.0) {
        if (!(next == prev)) ++failures;
        continue;
      }
      t += dt;
      const double lin = cfg.a_max_lin * dt + 1e-12;
      const double ang = cfg.a_max_ang * dt + 1e-12;
      if (std::abs(next.vx - prev.vx) > lin || std::abs(next.vy - prev.vy) > lin || std::abs(next.wz - prev.wz) > ang ||
          std::abs(next.vx) > cfg.v_max_x || std::abs(next.vy) > cfg.v_max_y || std::abs(next.wz) > cfg.w_max) {
        ++failures;
      }
    }
  }
  return finish(3, "slew-bound", failures == 0,
                std::to_string(kSequences) + " sequences, " + std::to_string(steps) + " steps, " +
                    std::to_string(failures) + " violations",
                timer);
}

// ---------------------------------------------------------------------------
// 4

CriterionResult self_centering(std::uint64_t seed) {
  Timer timer;
  std::mt19937_64 rng(seed);
  const Settings settings = default_settings();
  const SpringRigConfig& rig = settings.rig;
  const double dt = 1.0 / settings.service.tick_hz;
  constexpr int kStates = 100;
  constexpr double kEps = 1e-3;
  double worst = 0.0;
  int slow = 0, nonzero = 0;

  const CalibrationState cal = calibrate(TrackerSample{0.0, {}, UnitQuat{}}, settings.pose);
  for (int i = 0; i < kStates; ++i) {
    RigState s;
    for (Axis a : kAllAxes) {
      const double stop = rig.axis(a).stop;
      AxisState& st = a == Axis::Roll ? s.roll : a == Axis::Pitch ? s.pitch : s.yaw;
      st.angle = uniform(rng, -stop, stop);
      st.velocity = uniform(rng, -1.0, 1.0);
    }
    const double settle = settle_time(s, rig, kEps);
    worst = std::max(worst, settle);
    if (settle > 2.0) ++slow;

    // Run the released rudder through pose -> mapping at the tick rate and
    // take the first command issued at or after the settle time.
    MapperState mapper = MapperState::at_rest(0.0);
    TwistCommand cmd;
    for (long k = 1;; ++k) {
      const double t = static_cast<double>(k) * dt;
      s = advance(s, FootEffort::released(), t - s.t, rig);
      TrackerSample sample{t, {}, quat_from_euler_zyx(s.yaw.angle, s.pitch.angle, s.roll.angle)};
      const RudderAttitude att = relative_attitude(sample, cal, settings.mapping.limits(), settings.pose);
      cmd = rate_limit(map_to_twist(att, settings.mapping), mapper, t, settings.mapping);
      if (t >= settle) break;
    }
    if (!(cmd.vx == 0.0 && cmd.vy == 0.0 && cmd.wz == 0.0)) ++nonzero;
  }
  return finish(4, "self-centering", slow == 0 && nonzero == 0,
                std::to_string(kStates) + " states, worst settle " + fmt(worst) + " s (limit 2.0), " +
                    std::to_string(slow) + " slow, " + std::to_string(nonzero) + " non-zero post-settle commands",
                timer);
}

// ---------------------------------------------------------------------------
// 5

CriterionResult spring_equilibrium(std::uint64_t seed) {
  Timer timer;
  std::mt19937_64 rng(seed);
  constexpr int kPairs = 20;
  double worst = 0.0;
  int failures = 0;
  for (Axis axis : kAllAxes) {
    for (int i = 0; i < kPairs; ++i) {
      SpringRigConfig cfg;
      AxisParams& p = axis == Axis::Roll ? cfg.roll : axis == Axis::Pitch ? cfg.pitch : cfg.yaw;
      p.n_springs = uniform_int(rng, 2, 8);
      p.k_spring = uniform(rng, 0.2, 1.0);
      p.inertia = uniform(rng, 0.02, 0.1);
      const double stiffness = p.n_springs * p.k_spring;
      p.damping = uniform(rng, 0.5, 1.5) * 2.0 * std::sqrt(stiffness * p.inertia);
      cfg.validate();
      const double tau = uniform(rng, -0.9, 0.9) * p.stop * stiffness;
      FootEffort effort;
      effort.engaged = true;
      (axis == Axis::Roll ? effort.torque_roll : axis == Axis::Pitch ? effort.torque_pitch : effort.torque_yaw) = tau;
      const RigState end = advance(RigState{}, effort, 30.0, cfg);
      const double err = std::abs(end.axis(axis).angle - tau / stiffness);
      worst = std::max(worst, err);
      if (!(err < 1e-4)) ++failures;
    }
  }
  return finish(5, "spring-equilibrium", failures == 0,
                std::to_string(3 * kPairs) + " (torque, config) pairs, max error " + sci(worst) + " rad", timer);
}

// ---------------------------------------------------------------------------
// 6

CriterionResult arc_kinematics(std::uint64_t seed) {
  Timer timer;
  std::mt19937_64 rng(seed);
  constexpr int kCases = 50;
  double worst_end = 0.0, worst_split = 0.0;
  for (int i = 0; i < kCases; ++i) {
    const double v = uniform(rng, 0.1, 3.0);
    const double w = uniform(rng, 0.1, 3.0);
    const double T = std::numbers::pi / w;
    const Twist cmd{v, 0.0, w};
    const RobotState end = integrate(RobotState{}, cmd, T);
    worst_end = std::max({worst_end, std::abs(end.x), std::abs(end.y - 2.0 * v / w),
                          std::abs(wrap_angle(end.heading - std::numbers::pi))});
    const int n = uniform_int(rng, 2, 200);
    RobotState split;
    for (int k = 0; k < n; ++k) split = integrate(split, cmd, T / n);
    worst_split = std::max({worst_split, std::abs(split.x - end.x), std::abs(split.y - end.y),
                            std::abs(wrap_angle(split.heading - end.heading))});
  }
  return finish(6, "arc-kinematics", worst_end <= 1e-9 && worst_split <= 1e-9,
                std::to_string(kCases) + " arcs, endpoint error " + sci(worst_end) + ", sub-step error " +
                    sci(worst_split),
                timer);
}

// ---------------------------------------------------------------------------
// 7

double trapezoid_time(double distance, double v_max, double a_max) {
  const double ramp = v_max * v_max / (2.0 * a_max);
  if (distance <= ramp) return std::sqrt(2.0 * distance / a_max);
  return v_max / a_max + (distance - ramp) / v_max;
}

std::vector<ScriptEntry> full_forward_script() {
  ScriptEntry e;
  e.t = 0.0;
  e.kind = ScriptEntry::Kind::Effort;
  e.effort = FootEffort{0.0, kFullForwardTorque, 0.0, true};
  return {e};
}

CorridorRun run_corridor(const std::string& profile) {
  DriveOptions opts;
  opts.settings = default_settings(profile);
  opts.arena = preset_arena("corridor_40m");
  opts.duration = 120.0;
  opts.script = full_forward_script();
  CorridorRun run;
  run.drive = drive_scripted(opts);
  run.completion_time = compute_metrics(run.drive.log).completion_time;
  const Arena& a = opts.arena;
  const double distance = std::hypot(a.goal.cx - a.start.x, a.goal.cy - a.start.y) - a.goal.r;
  run.oracle_time = trapezoid_time(distance, opts.settings.mapping.v_max_x, opts.settings.mapping.a_max_lin);
  return run;
}

CriterionResult task5_corridor(std::uint64_t) {
  Timer timer;
  const CorridorRun day2 = run_corridor("day2");
  const CorridorRun day1 = run_corridor("day1");
  const double s = timer.seconds();
  if (!day2.completion_time || !day1.completion_time) {
    return finish(7, "task5-corridor", false,
                  std::string("goal not reached under ") + (day2.completion_time ? "day1" : "day2"), timer);
  }
  const double rel = std::abs(*day2.completion_time - day2.oracle_time) / day2.oracle_time;
  const bool pass = rel <= 0.05 && *day1.completion_time > *day2.completion_time && s < 10.0;
  return finish(7, "task5-corridor", pass,
                "day2 " + fmt(*day2.completion_time, 2) + " s vs oracle " + fmt(day2.oracle_time, 2) + " s (" +
                    fmt(100.0 * rel, 2) + "% off, limit 5%), day1 " + fmt(*day1.completion_time, 2) + " s",
                timer);
}

// ---------------------------------------------------------------------------
// 8

std::vector<Pose2> obstacle_field_waypoints() {
  return {{2.2, 1.6, 0.0}, {4.2, 1.6, 0.0}, {5.2, -1.6, 0.0}, {7.2, -1.6, 0.0},
          {8.2, 1.0, 0.0}, {10.2, 1.0, 0.0}, {11.0, 0.0, 0.0}};
}

SessionResult record_obstacle_field_run() {
  const Arena arena = preset_arena("obstacle_field");
  return run_session(arena, waypoint_follower(obstacle_field_waypoints(), kObstacleFieldSpeed), kSessionDt, 60.0);
}

SessionResult replay_obstacle_field(const std::vector<Twist>& script, double inflation) {
  Arena arena = preset_arena("obstacle_field");
  arena.robot_radius += inflation;
  return run_session(arena, scripted_source(script), kSessionDt, script.size() * kSessionDt + 1.0);
}

CriterionResult task8_obstacles(std::uint64_t) {
  Timer timer;
  const SessionResult recorded = record_obstacle_field_run();
  const SessionResult nominal = replay_obstacle_field(recorded.commands, 0.0);
  const SessionResult inflated = replay_obstacle_field(recorded.commands, 0.3);
  const bool goal = nominal.outcome.kind == Outcome::Kind::GoalReached;
  const bool tight = inflated.outcome.kind == Outcome::Kind::Collided;
  std::string detail = std::to_string(recorded.commands.size()) + "-step script: nominal " +
                       (goal ? "goal at " + fmt(nominal.outcome.t, 2) + " s"
                             : nominal.outcome.collision ? nominal.outcome.collision.token() : std::string("timeout")) +
                       ", +0.3 m " + (tight ? inflated.outcome.collision.token() : std::string("no collision"));
  return finish(8, "task8-obstacles", goal && tight, std::move(detail), timer);
}

// ---------------------------------------------------------------------------
// 9

SessionLog synthetic_approach_log(const std::vector<double>& vx) {
  const Settings settings = default_settings();
  const Arena arena = preset_arena("corridor_40m");
  SessionRecorder rec(settings, arena, 0.0);
  double x = arena.goal.cx - 1.5;
  for (std::size_t i = 0; i < vx.size(); ++i) {
    TickRecord r;
    r.t = static_cast<double>(i + 1) * kSessionDt;
    r.raw = Twist{vx[i], 0.0, 0.0};
    r.cmd = r.raw;
    x += vx[i] * kSessionDt;
    r.x = x;
    rec.record(std::move(r));
  }
  return rec.finalize();
}

namespace {

// Approach with sign flips every `run` ticks; k flips total.
std::vector<double> flipping(int k, int run, double speed) {
  std::vector<double> out;
  for (int seg = 0; seg <= k; ++seg) {
    for (int i = 0; i < run; ++i) out.push_back(seg % 2 == 0 ? speed : -speed);
  }
  out.push_back(0.0);
  return out;
}

std::vector<double> one_sided_approach() {
  std::vector<double> out;
  for (double v = 0.8; v > 0.0; v -= 0.01) out.push_back(v);
  for (int i = 0; i < 25; ++i) out.push_back(0.0);
  return out;
}

}  // namespace

CriterionResult overshoot_metric(std::uint64_t) {
  Timer timer;
  auto total = [](const SessionLog& log) {
    const auto m = compute_metrics(log);
    return m.reversals[0] + m.reversals[1] + m.reversals[2];
  };
  std::string detail;
  bool pass = true;
  const int golden_synthetic = total(synthetic_approach_log(one_sided_approach()));
  const int golden_drive = total(run_corridor("day2").drive.log);
  pass = golden_synthetic == 0 && golden_drive == 0;
  detail = "golden " + std::to_string(golden_synthetic) + "/" + std::to_string(golden_drive) + ", adversarial";
  for (int k : {1, 2, 5}) {
    const int got = total(synthetic_approach_log(flipping(k, 6, 0.3)));
    pass = pass && got == k;
    detail += " k=" + std::to_string(k) + "->" + std::to_string(got);
  }
  return finish(9, "overshoot-metric", pass, std::move(detail), timer);
}

// ---------------------------------------------------------------------------
// 10

std::vector<ScriptEntry> determinism_script() {
  auto effort = [](double t, double r, double p, double y) {
    ScriptEntry e;
    e.t = t;
    e.kind = ScriptEntry::Kind::Effort;
    e.effort = FootEffort{r, p, y, true};
    return e;
  };
  auto marker = [](double t, ScriptEntry::Kind kind, std::string profile = {}) {
    ScriptEntry e;
    e.t = t;
    e.kind = kind;
    e.profile = std::move(profile);
    return e;
  };
  return {effort(0.0, 0.0, 0.4, 0.0),
          effort(1.0, -0.3, 0.6, 0.2),
          marker(2.0, ScriptEntry::Kind::Profile, "day2"),
          effort(3.0, 0.2, 0.5, -0.4),
          marker(4.0, ScriptEntry::Kind::Silent),
          marker(5.5, ScriptEntry::Kind::Cal),
          effort(5.5, 0.0, 0.0, 0.0),
          effort(6.0, 0.1, 0.7, 0.1)};
}

namespace {

std::pair<std::string, std::string> determinism_run() {
  DriveOptions opts;
  opts.settings = default_settings();
  opts.arena = preset_arena("corridor_40m");
  opts.duration = 8.0;
  opts.script = determinism_script();
  const DriveResult r = drive_scripted(opts);
  std::ostringstream log, csv;
  write_session_log(log, r.log);
  export_channels(csv, r.log);
  return {log.str(), csv.str()};
}

}  // namespace

CriterionResult drive_determinism(std::uint64_t) {
  Timer timer;
  const auto a = determinism_run();
  const auto b = determinism_run();
  const bool channels = a.second.rfind("t,vx,vy,wz", 0) == 0;
  const bool pass = a == b && channels && !a.first.empty();
  return finish(10, "drive-determinism", pass,
                "log " + std::to_string(a.first.size()) + " bytes " + (a.first == b.first ? "identical" : "DIFFER") +
                    ", csv " + std::to_string(a.second.size()) + " bytes " +
                    (a.second == b.second ? "identical" : "DIFFER") + (channels ? "" : ", channel header missing"),
                timer);
}

// ---------------------------------------------------------------------------
// 11

namespace {

double random_real(std::mt19937_64& rng) {
  switch (uniform_int(rng, 0, 5)) {
    case 0: return 0.0;
    case 1: return -0.0;
    case 2: return uniform(rng, -1.0, 1.0);
    case 3: return uniform(rng, -1e6, 1e6);
    case 4: return std::ldexp(uniform(rng, -1.0, 1.0), uniform_int(rng, -1000, 1000));
    default: return std::numeric_limits<double>::denorm_min() * uniform_int(rng, 1, 1000);
  }
}

std::string random_event(std::mt19937_64& rng) {
  static const char* tokens[] = {"-", "calibrated", "watchdog", "goal", "collision:3", "collision:bounds",
                                 "profile:day2", "error:x", "warning:config-mismatch"};
  std::string e = tokens[uniform_int(rng, 0, 8)];
  if (e != "-" && uniform_int(rng, 0, 2) == 0) e += std::string(",") + tokens[uniform_int(rng, 1, 8)];
  return e;
}

WireMessage random_message(std::mt19937_64& rng) {
  const std::uint64_t seq = std::uniform_int_distribution<std::uint64_t>()(rng);
  const double t = random_real(rng);
  switch (uniform_int(rng, 0, 6)) {
    case 0: return CmdMsg{seq, t, random_real(rng), random_real(rng), random_real(rng)};
    case 1: return EffortMsg{seq, t, random_real(rng), random_real(rng), random_real(rng), uniform_int(rng, 0, 1) == 1};
    case 2: {
      StateMsg s{seq, t};
      s.roll = random_real(rng);
      s.pitch = random_real(rng);
      s.yaw = random_real(rng);
      s.vx = random_real(rng);
      s.vy = random_real(rng);
      s.wz = random_real(rng);
      s.x = random_real(rng);
      s.y = random_real(rng);
      s.heading = random_real(rng);
      s.event = random_event(rng);
      return s;
    }
    case 3: return CalMsg{seq, t};
    case 4: return CfgMsg{seq, t, uniform_int(rng, 0, 1) ? "day1" : "day2"};
    case 5: return PingMsg{seq, t};
    default: return PongMsg{seq, t};
  }
}

bool same_bits(const WireMessage& a, const WireMessage& b) {
  // Exact round trip, including the sign of zero.
  return a == b && format_message(a) == format_message(b);
}

std::string mutate(std::string line, std::mt19937_64& rng) {
  static const std::string alphabet = " =\r\n\t-+.eE0123456789abcdefinNaIy,:_\x7f\x80\xff";
  const int edits = uniform_int(rng, 1, 4);
  for (int i = 0; i < edits; ++i) {
    const std::size_t pos = line.empty() ? 0 : std::uniform_int_distribution<std::size_t>(0, line.size())(rng);
    const char c = uniform_int(rng, 0, 3) == 0 ? static_cast<char>(uniform_int(rng, 0, 255))
                                               : alphabet[uniform_int(rng, 0, static_cast<int>(alphabet.size()) - 1)];
    switch (uniform_int(rng, 0, 4)) {
      case 0: line.insert(line.begin() + static_cast<long>(pos), c); break;
      case 1:
        if (pos < line.size()) line.erase(pos, 1);
        break;
      case 2:
        if (pos < line.size()) line[pos] = c;
        break;
      case 3: line.resize(pos); break;
      default: {
        static const char* bad[] = {"nan", "inf", "-inf", "1e999", "NaN", "0x1p3", "", "1 2", "=", "18446744073709551616"};
        const auto eq = line.find('=', pos);
        if (eq != std::string::npos) {
          const auto end = line.find(' ', eq);
          line.replace(eq + 1, end == std::string::npos ? std::string::npos : end - eq - 1, bad[uniform_int(rng, 0, 9)]);
        }
      }
    }
  }
  return line;
}

std::string random_bytes(std::mt19937_64& rng) {
  const int n = uniform_int(rng, 0, 3) == 0 ? uniform_int(rng, 1000, 1100) : uniform_int(rng, 0, 80);
  std::string s(static_cast<std::size_t>(n), '\0');
  for (auto& c : s) c = static_cast<char>(uniform_int(rng, 0, 255));
  return s;
}

// Input loss: stream effort, go silent, find the first fail-safe tick.
std::pair<bool, double> watchdog_trip_delay(const Settings& settings) {
  ControlLoop loop(settings, preset_arena("corridor_40m"), 0.0);
  const double dt = 1.0 / settings.service.tick_hz;
  constexpr double kSilentFrom = 2.0;
  double last_input = 0.0;
  std::uint64_t seq = 0;
  for (long k = 1; k < 1000; ++k) {
    const double now = static_cast<double>(k) * dt;
    if (now < kSilentFrom) {
      loop.post(format_message(EffortMsg{++seq, now, 0.0, kFullForwardTorque, 0.0, true}));
      last_input = now;
    }
    const auto out = loop.tick(now);
    const auto* cmd = std::get_if<CmdMsg>(&out.at(out.size() - 2));
    const auto* state = std::get_if<StateMsg>(&out.back());
    if (now > kSilentFrom && loop.watchdog().tripped) {
      const bool safe = cmd && cmd->vx == 0.0 && cmd->vy == 0.0 && cmd->wz == 0.0 && state &&
                        state->event.find("watchdog") != std::string::npos;
      return {safe, now - last_input};
    }
  }
  return {false, 1e9};
}

}  // namespace

CriterionResult protocol_robustness(std::uint64_t seed) {
  Timer timer;
  std::mt19937_64 rng(seed);
  constexpr long kFuzz = 1000000;
  long accepted = 0, unstable = 0, exceptions = 0;
  for (long i = 0; i < kFuzz; ++i) {
    std::string line = i % 4 == 0 ? random_bytes(rng) : mutate(format_message(random_message(rng)), rng);
    try {
      const ParseResult r = parse_message(line);
      if (const auto* msg = std::get_if<WireMessage>(&r)) {
        ++accepted;
        const ParseResult again = parse_message(format_message(*msg));
        const auto* msg2 = std::get_if<WireMessage>(&again);
        if (!msg2 || !same_bits(*msg, *msg2)) ++unstable;
      }
    } catch (...) {
      ++exceptions;
    }
  }

  constexpr int kValid = 100000;
  int mismatches = 0;
  for (int i = 0; i < kValid; ++i) {
    const WireMessage m = random_message(rng);
    const std::string text = format_message(m);
    const ParseResult r = parse_message(uniform_int(rng, 0, 2) == 0 ? text + (uniform_int(rng, 0, 1) ? "\n" : "\r\n") : text);
    const auto* back = std::get_if<WireMessage>(&r);
    if (!back || !same_bits(*back, m)) ++mismatches;
  }

  const Settings settings = default_settings();
  const auto [safe, delay] = watchdog_trip_delay(settings);
  const double limit = settings.service.watchdog_timeout + 1.0 / settings.service.tick_hz;
  const bool pass = exceptions == 0 && unstable == 0 && mismatches == 0 && safe && delay <= limit + 1e-9;
  return finish(11, "protocol-robustness", pass,
                std::to_string(kFuzz) + " fuzzed lines (" + std::to_string(accepted) + " accepted, " +
                    std::to_string(exceptions) + " exceptions, " + std::to_string(unstable) +
                    " unstable), " + std::to_string(kValid) + " round trips (" + std::to_string(mismatches) +
                    " mismatches), watchdog tripped " + fmt(delay) + " s after last input (limit " + fmt(limit) +
                    ")" + (safe ? "" : ", fail-safe output missing"),
                timer);
}

const std::vector<Criterion>& criteria() {
  static const std::vector<Criterion> all{
      {1, "deadzone-zero-at-rest", deadzone_zero_at_rest},
      {2, "normalize-continuity", normalize_continuity},
      {3, "slew-bound", slew_bound},
      {4, "self-centering", self_centering},
      {5, "spring-equilibrium", spring_equilibrium},
      {6, "arc-kinematics", arc_kinematics},
      {7, "task5-corridor", task5_corridor},
      {8, "task8-obstacles", task8_obstacles},
      {9, "overshoot-metric", overshoot_metric},
      {10, "drive-determinism", drive_determinism},
      {11, "protocol-robustness", protocol_robustness},
  };
  return all;
}

}  // namespace rudder::bench
