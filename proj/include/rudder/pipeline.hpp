#pragma once

#include <optional>
#include <string>
#include <vector>

#include "rudder/config.hpp"
#include "rudder/mapping.hpp"
#include "rudder/robot_sim.hpp"
#include "rudder/telemetry.hpp"

namespace rudder {

// Event tokens understood by the pipeline.
inline constexpr const char* kEventCalibrated = "calibrated";
inline constexpr const char* kEventWatchdog = "watchdog";
inline constexpr const char* kEventGoal = "goal";
inline constexpr const char* kEventProfilePrefix = "profile:";
inline constexpr const char* kEventErrorPrefix = "error:";

/// Token-safe version of free text: anything outside [A-Za-z0-9_.:-] becomes '_'.
std::string event_token(std::string_view text);

/// Attitude -> mapping -> rate limit -> robot sim -> record. The live loop
/// and offline replay both drive this class, which is what makes replayed
/// logs identical to recorded ones.
///
/// Input events steer it: `profile:<name>` swaps speed limits before
/// mapping, `watchdog` and `error:*` force a zero command and reset the rate
/// limiter. Once the robot reaches the goal or collides, the session is over:
/// the pose freezes and commands stay zero.
class Pipeline {
 public:
  Pipeline(const Settings& settings, Arena arena, double t0);

  /// `t` must exceed the previous step's time. Unknown profile names throw
  /// UnknownName before any state changes.
  TickRecord step(double t, const RudderAttitude& attitude, std::vector<std::string> events);

  const MappingConfig& mapping() const noexcept { return mapping_; }
  const RobotState& robot() const noexcept { return robot_; }
  const Arena& arena() const noexcept { return arena_; }
  const MapperState& mapper() const noexcept { return mapper_; }
  std::optional<Outcome> outcome() const noexcept { return outcome_; }
  double last_time() const noexcept { return last_t_; }

 private:
  MappingConfig mapping_;
  Arena arena_;
  MapperState mapper_;
  RobotState robot_;
  std::optional<Outcome> outcome_;
  double last_t_;
};

struct ReplayOptions {
  /// Pipeline settings; defaults to the ones stored in the log.
  std::optional<Settings> settings;
  /// Arena; defaults to the one stored in the log.
  std::optional<Arena> arena;
};

inline constexpr const char* kWarningConfigMismatch = "warning:config-mismatch";

/// Re-feeds recorded attitudes (and their input events) through a fresh
/// pipeline. With matching settings the result equals the original log.
/// A settings hash different from the stored one adds a
/// `warning:config-mismatch` event to the first record (header warning if
/// there are no records).
SessionLog replay(const SessionLog& log, const ReplayOptions& options = {});

/// Single-state calibration on the first sample, then every sample's
/// relative attitude through the pipeline.
SessionLog replay_poses(const std::vector<TrackerSample>& samples, const Settings& settings, const Arena& arena);

/// Detects a session log (by its `#format:` header) or a pose log.
/// Pose logs need `options.arena`, else the corridor preset is used.
SessionLog replay_file(const std::string& path, const ReplayOptions& options = {});

}  // namespace rudder
