#include "rudder/spring_rig.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "rudder/error.hpp"

namespace rudder {

std::string_view axis_name(Axis axis) noexcept {
  switch (axis) {
    case Axis::Roll: return "roll";
    case Axis::Pitch: return "pitch";
    case Axis::Yaw: return "yaw";
  }
  return "?";
}

const AxisParams& SpringRigConfig::axis(Axis a) const noexcept {
  return a == Axis::Roll ? roll : (a == Axis::Pitch ? pitch : yaw);
}

AxisParams& SpringRigConfig::axis(Axis a) noexcept {
  return a == Axis::Roll ? roll : (a == Axis::Pitch ? pitch : yaw);
}

void SpringRigConfig::validate() const {
  if (!(substep > 0.0) || !(substep <= kMaxRigStep)) {
    throw ConfigError("invalid rig config: substep must lie in (0, 0.02]");
  }
  for (Axis a : kAllAxes) {
    const AxisParams& p = axis(a);
    const std::string where = "invalid rig config: rig." + std::string(axis_name(a)) + ".";
    if (p.n_springs < 1) throw ConfigError(where + "n_springs must be >= 1");
    if (!(p.k_spring > 0.0) || !std::isfinite(p.k_spring)) throw ConfigError(where + "k_spring must be > 0");
    if (!(p.damping >= 0.0) || !std::isfinite(p.damping)) throw ConfigError(where + "damping must be >= 0");
    if (!(p.inertia > 0.0) || !std::isfinite(p.inertia)) throw ConfigError(where + "inertia must be > 0");
    if (!(p.stop > 0.0) || !std::isfinite(p.stop)) throw ConfigError(where + "stop must be > 0");
    if (!(std::abs(p.rest) < p.stop)) throw ConfigError(where + "rest must lie strictly inside the stops");
  }
}

const AxisState& RigState::axis(Axis a) const noexcept {
  return a == Axis::Roll ? roll : (a == Axis::Pitch ? pitch : yaw);
}

AxisState& RigState::axis(Axis a) noexcept { return a == Axis::Roll ? roll : (a == Axis::Pitch ? pitch : yaw); }

double FootEffort::torque(Axis a) const noexcept {
  if (!engaged) return 0.0;
  return a == Axis::Roll ? torque_roll : (a == Axis::Pitch ? torque_pitch : torque_yaw);
}

double axis_stiffness(Axis axis, const SpringRigConfig& cfg) noexcept {
  const AxisParams& p = cfg.axis(axis);
  return static_cast<double>(p.n_springs) * p.k_spring;
}

double rig_energy(const RigState& state, const SpringRigConfig& cfg) noexcept {
  double e = 0.0;
  for (Axis a : kAllAxes) {
    const AxisParams& p = cfg.axis(a);
    const AxisState& s = state.axis(a);
    const double d = s.angle - p.rest;
    e += 0.5 * p.inertia * s.velocity * s.velocity + 0.5 * axis_stiffness(a, cfg) * d * d;
  }
  return e;
}

namespace {

void substep_axis(AxisState& s, const AxisParams& p, double stiffness, double torque, double h) {
  const double accel = (torque - stiffness * (s.angle - p.rest) - p.damping * s.velocity) / p.inertia;
  s.velocity += accel * h;
  s.angle += s.velocity * h;
  if (s.angle >= p.stop) {
    s.angle = p.stop;
    if (s.velocity > 0.0) s.velocity = 0.0;
  } else if (s.angle <= -p.stop) {
    s.angle = -p.stop;
    if (s.velocity < 0.0) s.velocity = 0.0;
  }
}

bool finite_state(const RigState& s) {
  for (Axis a : kAllAxes) {
    if (!std::isfinite(s.axis(a).angle) || !std::isfinite(s.axis(a).velocity)) return false;
  }
  return std::isfinite(s.t);
}

}  // namespace

RigState step(const RigState& state, const FootEffort& effort, double dt, const SpringRigConfig& cfg) {
  if (!(dt > 0.0)) throw SimulationError("rig step requires dt > 0");
  if (dt > kMaxRigStep * (1.0 + 1e-12)) throw SimulationError("rig step dt exceeds 0.02 s; subdivide or use advance()");
  if (!finite_state(state)) throw SimulationError("rig state is not finite");

  const int n = std::max(1, static_cast<int>(std::ceil(dt / cfg.substep - 1e-9)));
  const double h = dt / n;
  RigState next = state;
  for (Axis a : kAllAxes) {
    const AxisParams& p = cfg.axis(a);
    const double k = axis_stiffness(a, cfg);
    const double tau = effort.torque(a);
    AxisState& s = next.axis(a);
    for (int i = 0; i < n; ++i) substep_axis(s, p, k, tau, h);
  }
  next.t = state.t + dt;
  if (!finite_state(next)) throw SimulationError("rig state diverged");
  return next;
}

RigState advance(const RigState& state, const FootEffort& effort, double dt, const SpringRigConfig& cfg) {
  if (!(dt > 0.0)) throw SimulationError("rig advance requires dt > 0");
  const int chunks = std::max(1, static_cast<int>(std::ceil(dt / kMaxRigStep)));
  const double h = dt / chunks;
  RigState s = state;
  for (int i = 0; i < chunks; ++i) s = step(s, effort, h, cfg);
  return s;
}

double settle_time(const RigState& from, const SpringRigConfig& cfg, double eps) {
  if (!(eps > 0.0)) throw SimulationError("settle_time requires eps > 0");
  auto settled_axis = [&](const RigState& s, Axis a) {
    return std::abs(s.axis(a).angle - cfg.axis(a).rest) < eps && std::abs(s.axis(a).velocity) < eps;
  };
  auto all_settled = [&](const RigState& s) {
    return settled_axis(s, Axis::Roll) && settled_axis(s, Axis::Pitch) && settled_axis(s, Axis::Yaw);
  };

  RigState s = from;
  const long max_steps = static_cast<long>(std::ceil(kSettleLimit / cfg.substep));
  for (long i = 0; i <= max_steps; ++i) {
    if (all_settled(s)) return static_cast<double>(i) * cfg.substep;
    if (i == max_steps) break;
    s = step(s, FootEffort::released(), cfg.substep, cfg);
  }
  for (Axis a : kAllAxes) {
    if (!settled_axis(s, a)) {
      throw SimulationError("rig did not settle within 10 s on axis " + std::string(axis_name(a)) +
                            " (angle " + std::to_string(s.axis(a).angle) + " rad)");
    }
  }
  throw SimulationError("rig did not settle within 10 s");
}

}  // namespace rudder
