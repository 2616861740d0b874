#include "rudder/mapping.hpp"

#include <algorithm>
#include <cmath>

#include "rudder/error.hpp"

namespace rudder {

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw ConfigError("invalid mapping config: " + what);
}

bool finite_all(std::initializer_list<double> values) {
  return std::all_of(values.begin(), values.end(), [](double v) { return std::isfinite(v); });
}

double slew(double target, double previous, double max_step) {
  return previous + std::clamp(target - previous, -max_step, max_step);
}

void smooth(double& filtered, double raw, double alpha) {
  filtered += alpha * (raw - filtered);
  if (raw == 0.0 && std::abs(filtered) < kSmoothingSnap) filtered = 0.0;
}

}  // namespace

void MappingConfig::validate() const {
  require(finite_all({dead_roll, dead_pitch, dead_yaw, stop_rp, stop_yaw, v_max_x, v_max_y, w_max, a_max_lin,
                      a_max_ang, smoothing_alpha}),
          "all values must be finite");
  require(dead_roll >= 0.0 && dead_roll < stop_rp, "need 0 <= dead_roll < stop_rp");
  require(dead_pitch >= 0.0 && dead_pitch < stop_rp, "need 0 <= dead_pitch < stop_rp");
  require(dead_yaw >= 0.0 && dead_yaw < stop_yaw, "need 0 <= dead_yaw < stop_yaw");
  require(v_max_x > 0.0 && v_max_y > 0.0 && w_max > 0.0, "velocity maxima must be > 0");
  require(a_max_lin > 0.0 && a_max_ang > 0.0, "acceleration maxima must be > 0");
  require(smoothing_alpha >= 0.0 && smoothing_alpha <= 1.0, "smoothing_alpha must lie in [0, 1]");
}

double normalize_axis(double angle, double dead, double stop) noexcept {
  const double mag = std::abs(angle);
  if (!(mag > dead)) return 0.0;
  const double scaled = std::min(1.0, (mag - dead) / (stop - dead));
  return angle < 0.0 ? -scaled : scaled;
}

Twist map_to_twist(const RudderAttitude& att, const MappingConfig& cfg) noexcept {
  const double pitch = cfg.invert_pitch ? -att.pitch : att.pitch;
  const double left = cfg.invert_roll ? att.roll : -att.roll;
  const double yaw = cfg.invert_yaw ? -att.yaw : att.yaw;
  Twist out;
  out.vx = cfg.v_max_x * normalize_axis(pitch, cfg.dead_pitch, cfg.stop_rp);
  out.vy = cfg.v_max_y * normalize_axis(left, cfg.dead_roll, cfg.stop_rp);
  out.wz = cfg.w_max * normalize_axis(yaw, cfg.dead_yaw, cfg.stop_yaw);
  return out;
}

TwistCommand rate_limit(const Twist& raw, MapperState& state, double t_now, const MappingConfig& cfg) noexcept {
  const double dt = t_now - state.previous_time;
  if (!(dt > 0.0)) return state.previous;

  const double a = cfg.smoothing_alpha;
  smooth(state.filtered.vx, raw.vx, a);
  smooth(state.filtered.vy, raw.vy, a);
  smooth(state.filtered.wz, raw.wz, a);

  const TwistCommand& prev = state.previous;
  TwistCommand next;
  next.vx = std::clamp(slew(state.filtered.vx, prev.vx, cfg.a_max_lin * dt), -cfg.v_max_x, cfg.v_max_x);
  next.vy = std::clamp(slew(state.filtered.vy, prev.vy, cfg.a_max_lin * dt), -cfg.v_max_y, cfg.v_max_y);
  next.wz = std::clamp(slew(state.filtered.wz, prev.wz, cfg.a_max_ang * dt), -cfg.w_max, cfg.w_max);
  next.t = t_now;
  next.seq = prev.seq + 1;

  state.previous = next;
  state.previous_time = t_now;
  return next;
}

MappingConfig day_profile(std::string_view name) {
  MappingConfig cfg;
  if (name == "day1") return cfg;
  if (name == "day2") {
    cfg.v_max_x = 2.0;
    cfg.v_max_y = 1.2;
    cfg.w_max = 1.5;
    cfg.a_max_lin = 1.5;
    cfg.a_max_ang = 2.5;
    return cfg;
  }
  throw UnknownName("unknown profile '" + std::string(name) + "' (valid: day1, day2)");
}

std::vector<std::string> profile_names() { return {"day1", "day2"}; }

void apply_speed_limits(MappingConfig& cfg, const MappingConfig& profile) noexcept {
  cfg.v_max_x = profile.v_max_x;
  cfg.v_max_y = profile.v_max_y;
  cfg.w_max = profile.w_max;
  cfg.a_max_lin = profile.a_max_lin;
  cfg.a_max_ang = profile.a_max_ang;
}

}  // namespace rudder
