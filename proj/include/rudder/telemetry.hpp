#pragma once

#include <array>
#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "rudder/config.hpp"
#include "rudder/mapping.hpp"
#include "rudder/pose.hpp"
#include "rudder/robot_sim.hpp"

namespace rudder {

/// One control tick: attitude in, raw and limited twist out, robot pose after
/// integration, and event tokens (`goal`, `collision:<id>`, `calibrated`, ...).
struct TickRecord {
  double t = 0.0;
  double roll = 0.0;
  double pitch = 0.0;
  double yaw = 0.0;
  Twist raw;
  Twist cmd;
  double x = 0.0;
  double y = 0.0;
  double heading = 0.0;
  std::vector<std::string> events;

  bool has_event(std::string_view token) const noexcept;
  friend bool operator==(const TickRecord&, const TickRecord&) = default;
};

struct LogHeader {
  std::string config_hash;  // 16 hex digits
  std::string arena_name;
  double start_time = 0.0;
  std::vector<std::pair<std::string, std::string>> config;  // canonical entries
  std::vector<std::string> arena;                           // arena file lines
  std::vector<std::string> warnings;

  friend bool operator==(const LogHeader&, const LogHeader&) = default;
};

/// Sealed, immutable session log.
class SessionLog {
 public:
  SessionLog() = default;
  SessionLog(LogHeader header, std::vector<TickRecord> records);

  const LogHeader& header() const noexcept { return header_; }
  const std::vector<TickRecord>& records() const noexcept { return records_; }

  /// Settings reconstructed from the stored config entries.
  Settings settings() const;
  /// Arena reconstructed from the stored arena lines; nullopt if absent.
  std::optional<Arena> arena() const;

  friend bool operator==(const SessionLog&, const SessionLog&) = default;

 private:
  LogHeader header_;
  std::vector<TickRecord> records_;
};

/// Append-only builder owned by a single writer.
class SessionRecorder {
 public:
  SessionRecorder(const Settings& settings, const Arena& arena, double start_time);

  /// Throws Error when t does not strictly increase or after finalize().
  void record(TickRecord rec);
  std::size_t size() const noexcept { return records_.size(); }
  const std::vector<TickRecord>& records() const noexcept { return records_; }
  void add_warning(std::string warning);

  /// Seals the recorder and stamps the config hash.
  SessionLog finalize();

 private:
  LogHeader header_;
  std::vector<TickRecord> records_;
  std::uint64_t hash_ = 0;
  bool sealed_ = false;
};

inline constexpr const char* kSessionFormat = "rudder-session-v1";

/// Text format: `#key: value` header lines, then one row per record with
/// columns `t roll pitch yaw raw_vx raw_vy raw_wz vx vy wz x y heading event`.
void write_session_log(std::ostream& out, const SessionLog& log);
void write_session_log_file(const std::string& path, const SessionLog& log);
/// Throws ParseError naming the offending line (a final row without its
/// newline counts as truncated).
SessionLog read_session_log(std::istream& in);
SessionLog read_session_log_file(const std::string& path);

struct MetricsOptions {
  double goal_radius = 2.0;     // m, reversal analysis window around the goal
  double reversal_band = 0.02;  // |v| below this is ignored for sign changes
};

struct SessionMetrics {
  std::optional<double> completion_time;  // seconds after start_time
  double path_length = 0.0;
  std::array<int, 3> reversals{};  // vx, vy, wz
  double time_in_deadzone = 0.0;   // seconds with a zero raw twist
  double time_active = 0.0;
  double deadzone_fraction = 0.0;
  double duration = 0.0;
  double peak_linear = 0.0;   // max |(vx, vy)|
  double peak_angular = 0.0;  // max |wz|
  std::size_t command_count = 0;
};

/// Number of sign changes among samples with |value| >= band.
int count_reversals(const std::vector<double>& values, double band) noexcept;

SessionMetrics compute_metrics(const SessionLog& log, const MetricsOptions& options = {});

/// One row of the exported velocity/pose channels.
struct ChannelRow {
  double t = 0.0;
  double vx = 0.0;
  double vy = 0.0;
  double wz = 0.0;
  double x = 0.0;
  double y = 0.0;
  double heading = 0.0;
  friend bool operator==(const ChannelRow&, const ChannelRow&) = default;
};

inline constexpr const char* kChannelHeader = "t,vx,vy,wz,x,y,heading";

std::vector<ChannelRow> channels(const SessionLog& log);
void write_channels(std::ostream& out, const std::vector<ChannelRow>& rows);
void export_channels(std::ostream& out, const SessionLog& log);
void export_channels_file(const std::string& path, const SessionLog& log);
std::vector<ChannelRow> read_channels(std::istream& in);

}  // namespace rudder
