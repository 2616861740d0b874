#pragma once

#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <deque>
#include <iosfwd>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "rudder/config.hpp"
#include "rudder/pipeline.hpp"
#include "rudder/pose.hpp"
#include "rudder/robot_sim.hpp"
#include "rudder/spring_rig.hpp"
#include "rudder/telemetry.hpp"
#include "rudder/wire.hpp"

namespace rudder {

/// Time source for the control loop, seconds.
class Clock {
 public:
  virtual ~Clock() = default;
  virtual double now() = 0;
};

/// Deterministic clock for tests, replay and scripted runs.
class VirtualClock final : public Clock {
 public:
  explicit VirtualClock(double t0 = 0.0) : now_(t0) {}
  double now() override { return now_; }
  void advance(double dt) { now_ += dt; }
  void set(double t) { now_ = t; }

 private:
  double now_;
};

/// Monotonic wall clock, zero at construction.
class SteadyClock final : public Clock {
 public:
  SteadyClock() : start_(std::chrono::steady_clock::now()) {}
  double now() override {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

/// Unbounded, ordered, thread-safe hand-off into the control loop. The loop
/// only ever drains it, so it never blocks on producers.
template <typename T>
class InboundQueue {
 public:
  void push(T item) {
    std::lock_guard lock(mu_);
    items_.push_back(std::move(item));
  }
  std::deque<T> drain() {
    std::lock_guard lock(mu_);
    std::deque<T> out;
    out.swap(items_);
    return out;
  }

 private:
  std::mutex mu_;
  std::deque<T> items_;
};

/// Bounded per-consumer outbound buffer. When full, STATE lines are dropped
/// (oldest queued STATE first, else the incoming one) and counted; CMD and
/// other lines are always kept.
class OutboundQueue {
 public:
  explicit OutboundQueue(std::size_t capacity = 256) : capacity_(capacity) {}

  void push(const WireMessage& msg);
  /// Waits up to `timeout` for a line; nullopt on timeout or close().
  std::optional<std::string> pop(std::chrono::milliseconds timeout);
  void close();
  bool closed() const;
  std::uint64_t dropped() const;
  std::size_t size() const;

 private:
  struct Entry {
    bool is_state;
    std::string line;
  };
  mutable std::mutex mu_;
  std::condition_variable cv_;
  std::deque<Entry> items_;
  std::size_t capacity_;
  std::uint64_t dropped_ = 0;
  bool closed_ = false;
};

struct WatchdogState {
  std::optional<double> last_input;  // loop time of the newest EFFORT/pose
  std::optional<double> last_output;
  double timeout = 0.5;
  bool tripped = true;
};

struct LoopStats {
  std::uint64_t ticks = 0;
  std::uint64_t malformed = 0;  // rejected by the parser
  std::uint64_t ignored = 0;    // well-formed but not accepted (CMD/STATE in, bad profile, ...)
  std::uint64_t errors = 0;     // ticks that failed safe
};

/// The live pipeline: foot effort (or tracker poses) -> spring rig -> pose ->
/// mapping -> robot sim -> telemetry. All mutable state is owned by the
/// thread calling tick(); other threads only use post()/post_pose().
class ControlLoop {
 public:
  ControlLoop(const Settings& settings, Arena arena, double t0);

  /// Thread-safe: queue one inbound protocol line.
  void post(std::string line);
  /// Thread-safe: queue a tracker sample (bypasses the spring rig).
  void post_pose(const TrackerSample& sample);

  /// Drains inputs, advances everything to `now` and returns the emitted
  /// messages: replies (PONG) first, then exactly one CMD and one STATE.
  /// Never throws: internal failures emit a zero CMD and an `error:` event.
  std::vector<WireMessage> tick(double now);

  const WatchdogState& watchdog() const noexcept { return watchdog_; }
  const LoopStats& stats() const noexcept { return stats_; }
  const RigState& rig() const noexcept { return rig_; }
  const RudderAttitude& attitude() const noexcept { return attitude_; }
  const Pipeline& pipeline() const noexcept { return pipeline_; }
  const FootEffort& effort() const noexcept { return effort_; }
  std::size_t recorded() const noexcept { return recorder_.size(); }

  /// Seals the session log. The loop must not tick afterwards.
  SessionLog finish();

 private:
  void handle(const WireMessage& msg, double now, std::vector<WireMessage>& replies);
  TrackerSample current_sample(double now) const;
  std::vector<WireMessage> emit(double now, const Twist& cmd, const std::string& event);

  Settings settings_;
  Pipeline pipeline_;
  SessionRecorder recorder_;
  InboundQueue<std::string> lines_;
  InboundQueue<TrackerSample> poses_;

  RigState rig_;
  FootEffort effort_;
  std::optional<TrackerSample> latest_pose_;
  std::optional<CalibrationState> calibration_;
  bool calibrate_pending_ = true;
  std::vector<std::string> pending_events_;
  RudderAttitude attitude_;
  WatchdogState watchdog_;
  LoopStats stats_;
  Twist last_cmd_;
  std::string last_event_ = "-";
  double last_now_;
  std::uint64_t out_seq_ = 0;
};

/// Scripted operator input for deterministic runs. Lines:
///   `t roll pitch yaw engaged`  stream this effort from t on
///   `t cal`                     send one CAL
///   `t profile NAME`            send one CFG
///   `t silent`                  stop streaming (simulated input loss)
/// '#' comments; t must be non-decreasing.
struct ScriptEntry {
  enum class Kind { Effort, Cal, Profile, Silent };
  double t = 0.0;
  Kind kind = Kind::Effort;
  FootEffort effort;
  std::string profile;
};

std::vector<ScriptEntry> read_effort_script(std::istream& in);
std::vector<ScriptEntry> read_effort_script_file(const std::string& path);

struct DriveOptions {
  Settings settings;
  Arena arena;
  double duration = 60.0;        // virtual seconds
  bool stop_on_outcome = true;   // end at goal/collision
  std::vector<ScriptEntry> script;
  std::vector<TrackerSample> poses;  // used instead of `script` when non-empty
};

struct DriveResult {
  SessionLog log;
  std::vector<std::string> emitted;  // every outbound line, in order
  LoopStats stats;
};

/// Runs the control loop on a virtual clock at settings.service.tick_hz,
/// feeding the script like a live client would (one EFFORT per tick while
/// streaming). Bit-for-bit reproducible.
DriveResult drive_scripted(const DriveOptions& options);

}  // namespace rudder
