#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "rudder/config.hpp"
#include "rudder/robot_sim.hpp"
#include "rudder/service.hpp"
#include "rudder/telemetry.hpp"

namespace rudder::bench {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  std::string detail;
  double seconds = 0.0;  // wall clock
};

/// `PASS  7 task5-corridor  ...` style single line.
std::string format_result(const CriterionResult& r);

inline constexpr std::uint64_t kDefaultSeed = 0x5eed2024;

CriterionResult deadzone_zero_at_rest(std::uint64_t seed = kDefaultSeed);
CriterionResult normalize_continuity(std::uint64_t seed = kDefaultSeed);
CriterionResult slew_bound(std::uint64_t seed = kDefaultSeed);
CriterionResult self_centering(std::uint64_t seed = kDefaultSeed);
CriterionResult spring_equilibrium(std::uint64_t seed = kDefaultSeed);
CriterionResult arc_kinematics(std::uint64_t seed = kDefaultSeed);
CriterionResult task5_corridor(std::uint64_t seed = kDefaultSeed);
CriterionResult task8_obstacles(std::uint64_t seed = kDefaultSeed);
CriterionResult overshoot_metric(std::uint64_t seed = kDefaultSeed);
CriterionResult drive_determinism(std::uint64_t seed = kDefaultSeed);
CriterionResult protocol_robustness(std::uint64_t seed = kDefaultSeed);

struct Criterion {
  int id;
  const char* name;
  std::function<CriterionResult(std::uint64_t)> run;
};

/// All criteria in order.
const std::vector<Criterion>& criteria();

// ---------------------------------------------------------------------------
// Scenario building blocks, also used by the unit tests and the CLI.

/// Minimum time to cover `distance` from rest with a symmetric trapezoidal
/// velocity profile capped at `v_max` and `a_max` (no deceleration phase).
double trapezoid_time(double distance, double v_max, double a_max);

/// Pitch torque that holds the rudder against its forward stop.
inline constexpr double kFullForwardTorque = 5.0;

/// Constant full-forward effort from t = 0.
std::vector<ScriptEntry> full_forward_script();

struct CorridorRun {
  DriveResult drive;
  std::optional<double> completion_time;
  double oracle_time = 0.0;
};

/// Full-forward drive down corridor_40m under `profile`.
CorridorRun run_corridor(const std::string& profile);

/// Waypoints threading the obstacle_field gates.
std::vector<Pose2> obstacle_field_waypoints();

inline constexpr double kObstacleFieldSpeed = 0.8;
inline constexpr double kSessionDt = 0.02;

/// Closed-loop waypoint run on obstacle_field; its commands are the stored
/// open-loop script.
SessionResult record_obstacle_field_run();

/// Replays `script` open-loop on obstacle_field with the robot radius grown
/// by `inflation`.
SessionResult replay_obstacle_field(const std::vector<Twist>& script, double inflation);

/// A session approaching the corridor goal whose vx follows `vx` (one
/// record per kSessionDt, positions integrated from the commands).
SessionLog synthetic_approach_log(const std::vector<double>& vx);

/// Mixed effort script exercising streaming, silence, recalibration and a
/// profile switch; drives the determinism check.
std::vector<ScriptEntry> determinism_script();

}  // namespace rudder::bench
