#pragma once

#include <array>
#include <string_view>

namespace rudder {

enum class Axis { Roll = 0, Pitch = 1, Yaw = 2 };

inline constexpr std::array<Axis, 3> kAllAxes = {Axis::Roll, Axis::Pitch, Axis::Yaw};
std::string_view axis_name(Axis axis) noexcept;

/// One rotational DoF of the rudder: parallel tension springs modeled as a
/// single linear rotational spring, viscous damping and a hard stop.
struct AxisParams {
  int n_springs = 4;
  double k_spring = 0.5;  // N*m/rad contributed per spring
  double damping = 0.5;   // N*m*s/rad
  double inertia = 0.05;  // kg*m^2
  double stop = 0.25;     // rad
  double rest = 0.0;      // rad

  friend bool operator==(const AxisParams&, const AxisParams&) = default;
};

/// Default rig: 6 springs across roll (three per side), 4 across pitch
/// (two front, two back), 4 on the rotary axis. Constants are placeholders
/// tuned for a well damped (zeta ~ 0.9) release.
struct SpringRigConfig {
  AxisParams roll{6, 0.5, 0.70, 0.05, 0.25, 0.0};
  AxisParams pitch{4, 0.5, 0.57, 0.05, 0.25, 0.0};
  AxisParams yaw{4, 0.4, 0.64, 0.08, 0.50, 0.0};
  double substep = 0.002;  // internal integrator step, seconds

  const AxisParams& axis(Axis a) const noexcept;
  AxisParams& axis(Axis a) noexcept;

  /// Throws ConfigError. Zero damping is accepted (it is a meaningful, if
  /// never-settling, configuration).
  void validate() const;

  friend bool operator==(const SpringRigConfig&, const SpringRigConfig&) = default;
};

struct AxisState {
  double angle = 0.0;     // rad
  double velocity = 0.0;  // rad/s

  friend bool operator==(const AxisState&, const AxisState&) = default;
};

struct RigState {
  AxisState roll;
  AxisState pitch;
  AxisState yaw;
  double t = 0.0;

  const AxisState& axis(Axis a) const noexcept;
  AxisState& axis(Axis a) noexcept;

  friend bool operator==(const RigState&, const RigState&) = default;
};

/// Operator input. Feet off the surface means no torque at all.
struct FootEffort {
  double torque_roll = 0.0;   // N*m, + tilts right
  double torque_pitch = 0.0;  // N*m, + tilts forward
  double torque_yaw = 0.0;    // N*m, + rotates counter-clockwise
  bool engaged = false;

  double torque(Axis a) const noexcept;
  static FootEffort released() noexcept { return {}; }

  friend bool operator==(const FootEffort&, const FootEffort&) = default;
};

/// n_springs * k_spring.
double axis_stiffness(Axis axis, const SpringRigConfig& cfg) noexcept;

/// 0.5 * I * w^2 + 0.5 * K * (theta - rest)^2 summed over axes.
double rig_energy(const RigState& state, const SpringRigConfig& cfg) noexcept;

inline constexpr double kMaxRigStep = 0.02;

/// Integrates I*theta'' = tau - K*(theta - rest) - c*theta' with semi-implicit
/// Euler at cfg.substep, clamping inelastically at the stops.
/// Requires 0 < dt <= kMaxRigStep; throws SimulationError otherwise or when
/// the state is not finite.
RigState step(const RigState& state, const FootEffort& effort, double dt, const SpringRigConfig& cfg);

/// Any dt > 0: splits into chunks accepted by step().
RigState advance(const RigState& state, const FootEffort& effort, double dt, const SpringRigConfig& cfg);

/// Simulated time until every axis has |angle - rest| < eps and
/// |velocity| < eps with zero effort. Throws SimulationError naming the
/// unsettled axis after 10 s.
double settle_time(const RigState& from, const SpringRigConfig& cfg, double eps);

inline constexpr double kSettleLimit = 10.0;

}  // namespace rudder
