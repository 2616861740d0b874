#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "rudder/pose.hpp"

namespace rudder {

/// Tunables of the attitude -> velocity transfer. Defaults are the day1
/// profile. Frame: +x forward, +y left, +z up.
struct MappingConfig {
  // Inactive zones, radians.
  double dead_roll = 0.05;
  double dead_pitch = 0.05;
  double dead_yaw = 0.08;
  // Mechanical stops, radians (ball joint for roll/pitch, rotary stop for yaw).
  double stop_rp = 0.25;
  double stop_yaw = 0.50;
  // Velocity scales.
  double v_max_x = 1.0;  // m/s
  double v_max_y = 0.7;  // m/s
  double w_max = 1.0;    // rad/s
  // Slew limits.
  double a_max_lin = 0.8;  // m/s^2
  double a_max_ang = 1.5;  // rad/s^2
  bool invert_roll = false;
  bool invert_pitch = false;
  bool invert_yaw = false;
  // Weight of the newest raw sample in the exponential pre-filter; 1 disables it.
  double smoothing_alpha = 0.2;

  /// Throws ConfigError naming the first violated constraint.
  void validate() const;
  AttitudeLimits limits() const noexcept { return {stop_rp, stop_yaw}; }

  friend bool operator==(const MappingConfig&, const MappingConfig&) = default;
};

/// Body-frame velocity triple without timing.
struct Twist {
  double vx = 0.0;  // m/s, forward +
  double vy = 0.0;  // m/s, left +
  double wz = 0.0;  // rad/s, counter-clockwise +

  friend bool operator==(const Twist&, const Twist&) = default;
};

struct TwistCommand {
  double vx = 0.0;
  double vy = 0.0;
  double wz = 0.0;
  double t = 0.0;
  std::uint64_t seq = 0;

  Twist twist() const noexcept { return {vx, vy, wz}; }
  friend bool operator==(const TwistCommand&, const TwistCommand&) = default;
};

/// Rate-limiter memory. Owned by one control loop.
struct MapperState {
  TwistCommand previous;  // seq 0 = nothing emitted yet
  double previous_time = 0.0;
  Twist filtered;

  static MapperState at_rest(double t0) noexcept {
    MapperState s;
    s.previous.t = t0;
    s.previous_time = t0;
    return s;
  }
};

/// Deadzone-rescaled, saturated, odd transfer of one axis into [-1, 1].
double normalize_axis(double angle, double dead, double stop) noexcept;

/// Forward tilt (+pitch) drives +vx, left tilt (-roll) drives +vy, CCW
/// rotation (+yaw) drives +wz; invert flags flip each input axis.
Twist map_to_twist(const RudderAttitude& att, const MappingConfig& cfg) noexcept;

/// Below this magnitude a filtered axis whose raw input is exactly zero
/// snaps to zero, so a released rudder yields an exact zero command.
inline constexpr double kSmoothingSnap = 1e-3;

/// Exponential pre-filter, then per-axis slew limit, then saturation.
/// Updates `state` and assigns the next sequence number. A non-positive
/// time step returns the previous command and leaves `state` untouched.
TwistCommand rate_limit(const Twist& raw, MapperState& state, double t_now, const MappingConfig& cfg) noexcept;

/// Built-in speed profiles. day2 dominates day1 in every speed and
/// acceleration limit. Throws UnknownName listing the valid names.
MappingConfig day_profile(std::string_view name);
std::vector<std::string> profile_names();

/// Copies only the speed and acceleration limits of `profile` into `cfg`.
void apply_speed_limits(MappingConfig& cfg, const MappingConfig& profile) noexcept;

}  // namespace rudder
