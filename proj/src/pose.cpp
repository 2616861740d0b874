#include "rudder/pose.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <numbers>
#include <ostream>

#include "rudder/error.hpp"
#include "rudder/numfmt.hpp"

namespace rudder {

namespace {

constexpr double kGimbalMargin = 1e-6;

double norm4(double w, double x, double y, double z) { return std::sqrt(w * w + x * x + y * y + z * z); }

double wrap_pi(double a) {
  a = std::remainder(a, 2.0 * std::numbers::pi);
  return a <= -std::numbers::pi ? a + 2.0 * std::numbers::pi : a;
}

}  // namespace

UnitQuat UnitQuat::from_components(double w, double x, double y, double z) {
  if (!std::isfinite(w) || !std::isfinite(x) || !std::isfinite(y) || !std::isfinite(z)) {
    throw InvalidSample("quaternion has non-finite components");
  }
  const double n = norm4(w, x, y, z);
  if (!(n > 0.0) || !std::isfinite(n)) throw InvalidSample("quaternion has zero norm");
  return UnitQuat(w / n, x / n, y / n, z / n);
}

UnitQuat UnitQuat::from_tracker(double w, double x, double y, double z, double tolerance) {
  UnitQuat q = from_components(w, x, y, z);
  const double n = norm4(w, x, y, z);
  if (std::abs(n - 1.0) > tolerance) {
    throw InvalidSample("quaternion norm " + format_double(n) + " outside tolerance");
  }
  return q;
}

UnitQuat UnitQuat::from_axis_angle(double ax, double ay, double az, double angle) {
  const double n = std::sqrt(ax * ax + ay * ay + az * az);
  if (!(n > 0.0) || !std::isfinite(n) || !std::isfinite(angle)) {
    throw InvalidSample("invalid rotation axis or angle");
  }
  const double s = std::sin(0.5 * angle) / n;
  return from_components(std::cos(0.5 * angle), ax * s, ay * s, az * s);
}

UnitQuat UnitQuat::canonical() const noexcept { return w_ < 0.0 ? negated() : *this; }

UnitQuat UnitQuat::negated() const noexcept { return UnitQuat(-w_, -x_, -y_, -z_); }

UnitQuat quat_inverse(const UnitQuat& q) noexcept { return UnitQuat(q.w_, -q.x_, -q.y_, -q.z_); }

UnitQuat quat_compose(const UnitQuat& a, const UnitQuat& b) noexcept {
  const double w = a.w_ * b.w_ - a.x_ * b.x_ - a.y_ * b.y_ - a.z_ * b.z_;
  const double x = a.w_ * b.x_ + a.x_ * b.w_ + a.y_ * b.z_ - a.z_ * b.y_;
  const double y = a.w_ * b.y_ - a.x_ * b.z_ + a.y_ * b.w_ + a.z_ * b.x_;
  const double z = a.w_ * b.z_ + a.x_ * b.y_ - a.y_ * b.x_ + a.z_ * b.w_;
  // Re-project onto the unit sphere so rounding never accumulates.
  const double n = norm4(w, x, y, z);
  return UnitQuat(w / n, x / n, y / n, z / n);
}

UnitQuat rot_x(double angle) { return UnitQuat::from_axis_angle(1.0, 0.0, 0.0, angle); }
UnitQuat rot_y(double angle) { return UnitQuat::from_axis_angle(0.0, 1.0, 0.0, angle); }
UnitQuat rot_z(double angle) { return UnitQuat::from_axis_angle(0.0, 0.0, 1.0, angle); }

EulerZYX euler_zyx_from_quat(const UnitQuat& q) noexcept {
  const double w = q.w(), x = q.x(), y = q.y(), z = q.z();
  // Entries of the rotation matrix: r20 = -sin(p), r21 = cos(p) sin(r),
  // r22 = cos(p) cos(r), r10 = cos(p) sin(y), r00 = cos(p) cos(y).
  const double sinp = 2.0 * (w * y - z * x);
  const double cp_sr = 2.0 * (w * x + y * z);
  const double cp_cr = 1.0 - 2.0 * (x * x + y * y);
  const double cp_sy = 2.0 * (w * z + x * y);
  const double cp_cy = 1.0 - 2.0 * (y * y + z * z);
  EulerZYX e;
  e.roll = std::atan2(cp_sr, cp_cr);
  e.pitch = std::atan2(sinp, std::hypot(cp_sr, cp_cr));
  e.yaw = std::atan2(cp_sy, cp_cy);
  return e;
}

UnitQuat quat_from_euler_zyx(double yaw, double pitch, double roll) {
  return quat_compose(quat_compose(rot_z(yaw), rot_y(pitch)), rot_x(roll));
}

std::array<double, 9> rotation_matrix(const UnitQuat& q) noexcept {
  const double w = q.w(), x = q.x(), y = q.y(), z = q.z();
  return {1.0 - 2.0 * (y * y + z * z), 2.0 * (x * y - w * z),       2.0 * (x * z + w * y),
          2.0 * (x * y + w * z),       1.0 - 2.0 * (x * x + z * z), 2.0 * (y * z - w * x),
          2.0 * (x * z - w * y),       2.0 * (y * z + w * x),       1.0 - 2.0 * (x * x + y * y)};
}

CalibrationState calibrate(const TrackerSample& sample, const PoseConfig& pose) {
  if (!std::isfinite(sample.t)) throw InvalidSample("sample time is not finite");
  return CalibrationState{quat_compose(sample.orientation, pose.mount_offset).canonical(), sample.t};
}

RudderAttitude relative_attitude(const TrackerSample& sample, const CalibrationState& cal,
                                 const AttitudeLimits& limits, const PoseConfig& pose) {
  const UnitQuat rudder = quat_compose(sample.orientation, pose.mount_offset);
  const UnitQuat rel = quat_compose(quat_inverse(cal.q_ref), rudder);
  EulerZYX e = euler_zyx_from_quat(rel);

  RudderAttitude att;
  att.t = sample.t;
  if (std::abs(std::abs(e.pitch) - std::numbers::pi / 2.0) <= kGimbalMargin) {
    // Roll and yaw are not separable here; fold the pair into yaw.
    const double sign = e.pitch > 0.0 ? 1.0 : -1.0;
    att.pitch = sign * limits.stop_rp;
    att.roll = 0.0;
    att.yaw = std::clamp(wrap_pi(-sign * 2.0 * std::atan2(rel.x(), rel.w())), -limits.stop_yaw, limits.stop_yaw);
    return att;
  }
  att.roll = std::clamp(e.roll, -limits.stop_rp, limits.stop_rp);
  att.pitch = std::clamp(e.pitch, -limits.stop_rp, limits.stop_rp);
  att.yaw = std::clamp(e.yaw, -limits.stop_yaw, limits.stop_yaw);
  return att;
}

std::vector<TrackerSample> read_pose_log(std::istream& in) {
  std::vector<TrackerSample> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string_view body = trim(line);
    if (body.empty() || body.front() == '#') continue;
    const auto fields = split_ws(body);
    if (fields.size() != 8) {
      throw ParseError("expected 8 fields `t px py pz qw qx qy qz`, got " + std::to_string(fields.size()), lineno);
    }
    std::array<double, 8> v{};
    for (std::size_t i = 0; i < 8; ++i) {
      const auto parsed = parse_double(fields[i]);
      if (!parsed || !std::isfinite(*parsed)) {
        throw ParseError("bad number '" + std::string(fields[i]) + "'", lineno);
      }
      v[i] = *parsed;
    }
    TrackerSample s;
    s.t = v[0];
    s.position = {v[1], v[2], v[3]};
    try {
      s.orientation = UnitQuat::from_tracker(v[4], v[5], v[6], v[7]);
    } catch (const InvalidSample& e) {
      throw ParseError(e.what(), lineno);
    }
    if (!out.empty() && !(s.t > out.back().t)) throw ParseError("time does not increase", lineno);
    out.push_back(s);
  }
  return out;
}

std::vector<TrackerSample> read_pose_log_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open pose log '" + path + "'", 0);
  return read_pose_log(in);
}

void write_pose_log(std::ostream& out, std::span<const TrackerSample> samples) {
  out << "# t px py pz qw qx qy qz\n";
  for (const auto& s : samples) {
    out << format_double(s.t) << ' ' << format_double(s.position[0]) << ' ' << format_double(s.position[1]) << ' '
        << format_double(s.position[2]) << ' ' << format_double(s.orientation.w()) << ' '
        << format_double(s.orientation.x()) << ' ' << format_double(s.orientation.y()) << ' '
        << format_double(s.orientation.z()) << '\n';
  }
}

}  // namespace rudder
