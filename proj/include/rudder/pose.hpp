#pragma once

#include <array>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace rudder {

/// Rotation quaternion, Hamilton convention, scalar first. Always unit norm:
/// the only ways to build one normalize or reject the input.
class UnitQuat {
 public:
  /// Identity rotation.
  UnitQuat() = default;

  /// Normalizes (w, x, y, z). Throws InvalidSample on non-finite or zero norm.
  static UnitQuat from_components(double w, double x, double y, double z);

  /// Like from_components, but rejects inputs whose norm is more than
  /// `tolerance` away from 1 (ingestion of tracker data).
  static UnitQuat from_tracker(double w, double x, double y, double z, double tolerance = 1e-6);

  static UnitQuat from_axis_angle(double ax, double ay, double az, double angle);

  double w() const noexcept { return w_; }
  double x() const noexcept { return x_; }
  double y() const noexcept { return y_; }
  double z() const noexcept { return z_; }

  /// Same rotation with w >= 0.
  UnitQuat canonical() const noexcept;
  UnitQuat negated() const noexcept;

  friend bool operator==(const UnitQuat&, const UnitQuat&) = default;
  friend UnitQuat quat_inverse(const UnitQuat& q) noexcept;
  friend UnitQuat quat_compose(const UnitQuat& a, const UnitQuat& b) noexcept;

 private:
  UnitQuat(double w, double x, double y, double z) noexcept : w_(w), x_(x), y_(y), z_(z) {}

  double w_ = 1.0;
  double x_ = 0.0;
  double y_ = 0.0;
  double z_ = 0.0;
};

UnitQuat quat_inverse(const UnitQuat& q) noexcept;
/// Hamilton product a*b: rotate by b first (in a's frame), i.e. intrinsic chaining.
UnitQuat quat_compose(const UnitQuat& a, const UnitQuat& b) noexcept;

UnitQuat rot_x(double angle);
UnitQuat rot_y(double angle);
UnitQuat rot_z(double angle);

/// Intrinsic Z-Y-X angles: q = Rz(yaw) * Ry(pitch) * Rx(roll).
struct EulerZYX {
  double yaw = 0.0;
  double pitch = 0.0;
  double roll = 0.0;
};

EulerZYX euler_zyx_from_quat(const UnitQuat& q) noexcept;
UnitQuat quat_from_euler_zyx(double yaw, double pitch, double roll);

/// 3x3 row-major rotation matrix of q.
std::array<double, 9> rotation_matrix(const UnitQuat& q) noexcept;

struct TrackerSample {
  double t = 0.0;                           // seconds, monotonic
  std::array<double, 3> position{};         // meters; carried for diagnostics only
  UnitQuat orientation;
};

struct CalibrationState {
  UnitQuat q_ref;
  double t_cal = 0.0;
};

/// Fixed rotation from the tracker body to the rudder body. Calibration
/// absorbs constant offsets, so identity is the right default; a non-identity
/// mount re-labels which tracker axis reads as roll/pitch/yaw.
struct PoseConfig {
  UnitQuat mount_offset;
};

/// Mechanical stops applied when extracting attitudes.
struct AttitudeLimits {
  double stop_rp = 0.25;
  double stop_yaw = 0.50;
};

/// Rudder deflection relative to the calibrated rest pose, radians.
/// Positive roll tilts right, positive pitch tilts forward (nose down),
/// positive yaw rotates counter-clockwise seen from above.
struct RudderAttitude {
  double roll = 0.0;
  double pitch = 0.0;
  double yaw = 0.0;
  double t = 0.0;

  friend bool operator==(const RudderAttitude&, const RudderAttitude&) = default;
};

CalibrationState calibrate(const TrackerSample& sample, const PoseConfig& pose = {});

/// Attitude of `sample` relative to `cal`, clamped to the stops. Near the
/// pitch singularity the result saturates at the pitch stop instead of
/// producing an ill-conditioned roll/yaw split.
RudderAttitude relative_attitude(const TrackerSample& sample, const CalibrationState& cal,
                                 const AttitudeLimits& limits, const PoseConfig& pose = {});

/// Newline-delimited `t px py pz qw qx qy qz`, '#' comments and blank lines
/// ignored. Throws ParseError naming the 1-based line.
std::vector<TrackerSample> read_pose_log(std::istream& in);
std::vector<TrackerSample> read_pose_log_file(const std::string& path);
void write_pose_log(std::ostream& out, std::span<const TrackerSample> samples);

}  // namespace rudder
