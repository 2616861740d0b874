#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <variant>

namespace rudder {

// Line protocol: `TYPE key=value ...`, single spaces, newline-framed.
// Every message carries `seq` (monotone per direction) and `t` (sender
// seconds). Field order below is the canonical order used by
// format_message().

/// Twist command out: `CMD seq t vx vy wz`.
struct CmdMsg {
  std::uint64_t seq = 0;
  double t = 0.0;
  double vx = 0.0;
  double vy = 0.0;
  double wz = 0.0;
  friend bool operator==(const CmdMsg&, const CmdMsg&) = default;
};

/// Foot input in: `EFFORT seq t roll pitch yaw engaged` (torques in N*m).
struct EffortMsg {
  std::uint64_t seq = 0;
  double t = 0.0;
  double roll = 0.0;
  double pitch = 0.0;
  double yaw = 0.0;
  bool engaged = false;
  friend bool operator==(const EffortMsg&, const EffortMsg&) = default;
};

/// Telemetry out: `STATE seq t roll pitch yaw vx vy wz x y heading event`.
/// Angles are the rudder attitude, velocities the limited command, pose the
/// simulated robot; `event` is `-` or comma-joined tokens.
struct StateMsg {
  std::uint64_t seq = 0;
  double t = 0.0;
  double roll = 0.0;
  double pitch = 0.0;
  double yaw = 0.0;
  double vx = 0.0;
  double vy = 0.0;
  double wz = 0.0;
  double x = 0.0;
  double y = 0.0;
  double heading = 0.0;
  std::string event = "-";
  friend bool operator==(const StateMsg&, const StateMsg&) = default;
};

/// Calibrate trigger: `CAL seq t`.
struct CalMsg {
  std::uint64_t seq = 0;
  double t = 0.0;
  friend bool operator==(const CalMsg&, const CalMsg&) = default;
};

/// Profile switch: `CFG seq t profile`.
struct CfgMsg {
  std::uint64_t seq = 0;
  double t = 0.0;
  std::string profile;
  friend bool operator==(const CfgMsg&, const CfgMsg&) = default;
};

struct PingMsg {
  std::uint64_t seq = 0;
  double t = 0.0;
  friend bool operator==(const PingMsg&, const PingMsg&) = default;
};

struct PongMsg {
  std::uint64_t seq = 0;
  double t = 0.0;
  friend bool operator==(const PongMsg&, const PongMsg&) = default;
};

using WireMessage = std::variant<CmdMsg, EffortMsg, StateMsg, CalMsg, CfgMsg, PingMsg, PongMsg>;

enum class RejectReason { UnknownType, BadField, NonFinite, TooLong };

std::string_view reject_reason_name(RejectReason reason) noexcept;

struct Reject {
  RejectReason reason = RejectReason::BadField;
  std::string detail;
};

using ParseResult = std::variant<WireMessage, Reject>;

inline constexpr std::size_t kMaxLineBytes = 1024;

/// Total: never throws, any byte string yields a message or a Reject.
/// A single trailing "\n" or "\r\n" is tolerated.
ParseResult parse_message(std::string_view line) noexcept;

/// Canonical text without the trailing newline.
std::string format_message(const WireMessage& msg);

std::string_view message_type(const WireMessage& msg) noexcept;
std::uint64_t message_seq(const WireMessage& msg) noexcept;

}  // namespace rudder
