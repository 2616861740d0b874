#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "rudder/error.hpp"
#include "rudder/pose.hpp"

using namespace rudder;

namespace {

using Mat = std::array<double, 9>;

Mat matmul(const Mat& a, const Mat& b) {
  Mat c{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k) c[3 * i + j] += a[3 * i + k] * b[3 * k + j];
  return c;
}

// Independent oracle: elementary rotation matrices.
Mat mx(double a) { return {1, 0, 0, 0, std::cos(a), -std::sin(a), 0, std::sin(a), std::cos(a)}; }
Mat my(double a) { return {std::cos(a), 0, std::sin(a), 0, 1, 0, -std::sin(a), 0, std::cos(a)}; }
Mat mz(double a) { return {std::cos(a), -std::sin(a), 0, std::sin(a), std::cos(a), 0, 0, 0, 1}; }

void expect_mat_near(const Mat& a, const Mat& b, double tol) {
  for (int i = 0; i < 9; ++i) EXPECT_NEAR(a[i], b[i], tol) << "element " << i;
}

void expect_same_rotation(const UnitQuat& a, const UnitQuat& b, double tol) {
  expect_mat_near(rotation_matrix(a), rotation_matrix(b), tol);
}

TrackerSample sample_at(double t, const UnitQuat& q) { return TrackerSample{t, {}, q}; }

const AttitudeLimits kWide{10.0, 10.0};

}  // namespace

TEST(UnitQuat, NormalizesAndRejectsDegenerateInput) {
  const UnitQuat q = UnitQuat::from_components(2.0, 0.0, 0.0, 0.0);
  EXPECT_EQ(q, UnitQuat{});
  EXPECT_THROW(UnitQuat::from_components(0, 0, 0, 0), InvalidSample);
  EXPECT_THROW(UnitQuat::from_components(NAN, 0, 0, 0), InvalidSample);
  EXPECT_THROW(UnitQuat::from_components(1, INFINITY, 0, 0), InvalidSample);
}

TEST(UnitQuat, TrackerIngestionTolerance) {
  EXPECT_NO_THROW(UnitQuat::from_tracker(1.0 + 5e-7, 0, 0, 0));
  EXPECT_THROW(UnitQuat::from_tracker(1.0 + 5e-6, 0, 0, 0), InvalidSample);
  EXPECT_THROW(UnitQuat::from_tracker(0, 0, 0, 0), InvalidSample);
}

TEST(UnitQuat, InverseOfIdentityIsIdentity) { EXPECT_EQ(quat_inverse(UnitQuat{}), UnitQuat{}); }

TEST(UnitQuat, ComposeAddsAnglesAboutOneAxis) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> ang(-3.0, 3.0);
  for (int i = 0; i < 100; ++i) {
    const double a = ang(rng), b = ang(rng);
    expect_same_rotation(quat_compose(rot_z(a), rot_z(b)), rot_z(a + b), 1e-9);
  }
}

TEST(UnitQuat, ComposeMatchesMatrixProduct) {
  const UnitQuat a = UnitQuat::from_axis_angle(1, 2, 3, 0.7);
  const UnitQuat b = UnitQuat::from_axis_angle(-1, 0.5, 2, -1.1);
  expect_mat_near(rotation_matrix(quat_compose(a, b)), matmul(rotation_matrix(a), rotation_matrix(b)), 1e-12);
  expect_same_rotation(quat_compose(a, quat_inverse(a)), UnitQuat{}, 1e-12);
}

TEST(UnitQuat, CanonicalHasNonNegativeScalar) {
  const UnitQuat q = rot_z(0.3).negated();
  EXPECT_LT(q.w(), 0.0);
  EXPECT_GE(q.canonical().w(), 0.0);
  expect_same_rotation(q, q.canonical(), 1e-15);
}

TEST(Euler, ElementaryRotationsMatchMatrices) {
  expect_mat_near(rotation_matrix(rot_x(0.4)), mx(0.4), 1e-15);
  expect_mat_near(rotation_matrix(rot_y(-0.7)), my(-0.7), 1e-15);
  expect_mat_near(rotation_matrix(rot_z(1.2)), mz(1.2), 1e-15);
}

TEST(Euler, IntrinsicZyxComposition) {
  const double y = 0.3, p = -0.2, r = 0.1;
  expect_mat_near(rotation_matrix(quat_from_euler_zyx(y, p, r)), matmul(mz(y), matmul(my(p), mx(r))), 1e-12);
}

TEST(Euler, ExtractsRollFromPureX) {
  const EulerZYX e = euler_zyx_from_quat(rot_x(0.3));
  EXPECT_NEAR(e.yaw, 0.0, 1e-12);
  EXPECT_NEAR(e.pitch, 0.0, 1e-12);
  EXPECT_NEAR(e.roll, 0.3, 1e-12);
}

TEST(Euler, RoundTripProperty) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> yaw(-3.1, 3.1), pitch(-1.4, 1.4), roll(-3.1, 3.1);
  for (int i = 0; i < 20000; ++i) {
    const double y = yaw(rng), p = pitch(rng), r = roll(rng);
    const EulerZYX e = euler_zyx_from_quat(quat_from_euler_zyx(y, p, r));
    ASSERT_NEAR(e.yaw, y, 1e-7);
    ASSERT_NEAR(e.pitch, p, 1e-7);
    ASSERT_NEAR(e.roll, r, 1e-7);
  }
}

TEST(Calibrate, IdentitySampleGivesIdentityReference) {
  const CalibrationState cal = calibrate(sample_at(3.0, UnitQuat{}), PoseConfig{});
  EXPECT_EQ(cal.q_ref, UnitQuat{});
  EXPECT_EQ(cal.t_cal, 3.0);
}

TEST(Calibrate, StoresCanonicalReference) {
  const UnitQuat q = rot_z(0.3);
  const CalibrationState cal = calibrate(sample_at(0.0, q.negated()), PoseConfig{});
  EXPECT_GE(cal.q_ref.w(), 0.0);
  EXPECT_NEAR(cal.q_ref.w(), std::cos(0.15), 1e-15);
  EXPECT_NEAR(cal.q_ref.z(), std::sin(0.15), 1e-15);
}

TEST(Calibrate, RejectsNonFiniteTime) {
  EXPECT_THROW(calibrate(sample_at(NAN, UnitQuat{}), PoseConfig{}), InvalidSample);
}

TEST(RelativeAttitude, ReferenceItselfIsZero) {
  const UnitQuat ref = UnitQuat::from_axis_angle(0.3, -1, 0.2, 0.8);
  const CalibrationState cal = calibrate(sample_at(0, ref), PoseConfig{});
  const RudderAttitude a = relative_attitude(sample_at(1, ref), cal, kWide, PoseConfig{});
  EXPECT_NEAR(a.roll, 0.0, 1e-12);
  EXPECT_NEAR(a.pitch, 0.0, 1e-12);
  EXPECT_NEAR(a.yaw, 0.0, 1e-12);
  EXPECT_EQ(a.t, 1.0);
}

TEST(RelativeAttitude, YawAboutReference) {
  const UnitQuat ref = UnitQuat::from_axis_angle(1, 1, 0, 0.4);
  const CalibrationState cal = calibrate(sample_at(0, ref), PoseConfig{});
  const RudderAttitude a = relative_attitude(sample_at(1, quat_compose(ref, rot_z(0.2))), cal, kWide, PoseConfig{});
  EXPECT_NEAR(a.yaw, 0.2, 1e-9);
  EXPECT_NEAR(a.roll, 0.0, 1e-9);
  EXPECT_NEAR(a.pitch, 0.0, 1e-9);
}

TEST(RelativeAttitude, PitchThenRollIntrinsic) {
  const UnitQuat ref = rot_z(-0.9);
  const CalibrationState cal = calibrate(sample_at(0, ref), PoseConfig{});
  const UnitQuat q = quat_compose(ref, quat_compose(rot_y(0.1), rot_x(0.05)));
  const RudderAttitude a = relative_attitude(sample_at(1, q), cal, kWide, PoseConfig{});
  EXPECT_NEAR(a.pitch, 0.1, 1e-9);
  EXPECT_NEAR(a.roll, 0.05, 1e-9);
  EXPECT_NEAR(a.yaw, 0.0, 1e-9);
}

TEST(RelativeAttitude, ReZeroingPropertyAndSignInvariance) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> c(-1.0, 1.0);
  for (int i = 0; i < 5000; ++i) {
    const UnitQuat q = UnitQuat::from_components(c(rng), c(rng), c(rng), c(rng));
    const UnitQuat s = UnitQuat::from_components(c(rng), c(rng), c(rng), c(rng));
    const RudderAttitude zero = relative_attitude(sample_at(1, q), calibrate(sample_at(0, q), {}), kWide, {});
    ASSERT_NEAR(zero.roll, 0.0, 1e-9);
    ASSERT_NEAR(zero.pitch, 0.0, 1e-9);
    ASSERT_NEAR(zero.yaw, 0.0, 1e-9);
    // calibrate(q) and calibrate(-q) yield identical downstream attitudes.
    const RudderAttitude a = relative_attitude(sample_at(1, s), calibrate(sample_at(0, q), {}), kWide, {});
    const RudderAttitude b = relative_attitude(sample_at(1, s), calibrate(sample_at(0, q.negated()), {}), kWide, {});
    ASSERT_EQ(a, b);
  }
}

TEST(RelativeAttitude, ClampsToStopsForAnyInput) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> c(-1.0, 1.0);
  const AttitudeLimits lim{0.25, 0.5};
  const CalibrationState cal = calibrate(sample_at(0, UnitQuat{}), {});
  for (int i = 0; i < 20000; ++i) {
    const UnitQuat q = UnitQuat::from_components(c(rng), c(rng), c(rng), c(rng));
    const RudderAttitude a = relative_attitude(sample_at(1, q), cal, lim, {});
    ASSERT_LE(std::abs(a.roll), lim.stop_rp);
    ASSERT_LE(std::abs(a.pitch), lim.stop_rp);
    ASSERT_LE(std::abs(a.yaw), lim.stop_yaw);
  }
}

TEST(RelativeAttitude, GimbalLockIsFiniteAndClamped) {
  const CalibrationState cal = calibrate(sample_at(0, UnitQuat{}), {});
  for (double sign : {1.0, -1.0}) {
    const UnitQuat q = quat_compose(rot_y(sign * std::numbers::pi / 2), rot_x(0.3));
    const RudderAttitude a = relative_attitude(sample_at(1, q), cal, {0.25, 0.5}, {});
    EXPECT_EQ(a.pitch, sign * 0.25);
    EXPECT_EQ(a.roll, 0.0);
    EXPECT_TRUE(std::isfinite(a.yaw));
    EXPECT_LE(std::abs(a.yaw), 0.5);
  }
}

TEST(RelativeAttitude, MountOffsetIsAbsorbed) {
  // Tracker mounted yawed 90 deg and tilted; rudder pitch still reads as pitch.
  PoseConfig pose;
  pose.mount_offset = UnitQuat::from_axis_angle(0.2, 0.1, 1.0, 1.3);
  const UnitQuat to_tracker = quat_inverse(pose.mount_offset);
  const UnitQuat rest = quat_compose(rot_z(0.4), to_tracker);
  const UnitQuat tilted = quat_compose(quat_compose(rot_z(0.4), rot_y(0.12)), to_tracker);
  const CalibrationState cal = calibrate(sample_at(0, rest), pose);
  const RudderAttitude a = relative_attitude(sample_at(1, tilted), cal, kWide, pose);
  EXPECT_NEAR(a.pitch, 0.12, 1e-9);
  EXPECT_NEAR(a.roll, 0.0, 1e-9);
  EXPECT_NEAR(a.yaw, 0.0, 1e-9);
}

TEST(PoseLog, RoundTripsExactly) {
  std::vector<TrackerSample> in;
  for (int i = 0; i < 50; ++i) {
    in.push_back(TrackerSample{0.1 * i + 1e-3, {0.1 * i, -0.2, 1.0 / 3.0},
                               UnitQuat::from_axis_angle(1, 2, 3, 0.01 * i + 0.001)});
  }
  std::stringstream buf;
  write_pose_log(buf, in);
  const auto out = read_pose_log(buf);
  ASSERT_EQ(out.size(), in.size());
  for (std::size_t i = 0; i < in.size(); ++i) {
    EXPECT_EQ(out[i].t, in[i].t);
    EXPECT_EQ(out[i].position, in[i].position);
    EXPECT_EQ(out[i].orientation, in[i].orientation);
  }
}

TEST(PoseLog, ParseErrorsNameTheLine) {
  auto line_of = [](const std::string& text) {
    std::istringstream in(text);
    try {
      read_pose_log(in);
    } catch (const ParseError& e) {
      return e.line();
    }
    return std::size_t{0};
  };
  EXPECT_EQ(line_of("# header\n0 0 0 0 1 0 0 0\n1 0 0 0 1 0 0\n"), 3u);
  EXPECT_EQ(line_of("0 0 0 0 1 0 0 0\n0 0 0 0 1 0 0 0\n"), 2u);     // time not increasing
  EXPECT_EQ(line_of("0 0 0 0 1 0 0 0\n1 0 0 0 2 0 0 0\n"), 2u);     // not unit norm
  EXPECT_EQ(line_of("\n\n0 0 0 0 1 0 x 0\n"), 3u);
  EXPECT_EQ(line_of("0 0 0 0 1 0 0 0\n"), 0u);
}
