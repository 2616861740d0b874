#include "rudder/service.hpp"

#include <cmath>
#include <fstream>
#include <istream>

#include "rudder/error.hpp"
#include "rudder/numfmt.hpp"

namespace rudder {

// ---------------------------------------------------------------------------
// OutboundQueue

void OutboundQueue::push(const WireMessage& msg) {
  const bool is_state = std::holds_alternative<StateMsg>(msg);
  std::string line = format_message(msg);
  {
    std::lock_guard lock(mu_);
    if (closed_) return;
    if (items_.size() >= capacity_) {
      if (is_state) {
        ++dropped_;
        return;
      }
      for (auto it = items_.begin(); it != items_.end(); ++it) {
        if (it->is_state) {
          items_.erase(it);
          ++dropped_;
          break;
        }
      }
    }
    items_.push_back({is_state, std::move(line)});
  }
  cv_.notify_one();
}

std::optional<std::string> OutboundQueue::pop(std::chrono::milliseconds timeout) {
  std::unique_lock lock(mu_);
  cv_.wait_for(lock, timeout, [&] { return closed_ || !items_.empty(); });
  if (items_.empty()) return std::nullopt;
  std::string line = std::move(items_.front().line);
  items_.pop_front();
  return line;
}

void OutboundQueue::close() {
  {
    std::lock_guard lock(mu_);
    closed_ = true;
  }
  cv_.notify_all();
}

bool OutboundQueue::closed() const {
  std::lock_guard lock(mu_);
  return closed_;
}

std::uint64_t OutboundQueue::dropped() const {
  std::lock_guard lock(mu_);
  return dropped_;
}

std::size_t OutboundQueue::size() const {
  std::lock_guard lock(mu_);
  return items_.size();
}

// ---------------------------------------------------------------------------
// ControlLoop

namespace {

std::string join_events(const std::vector<std::string>& events) {
  if (events.empty()) return "-";
  std::string out;
  for (const auto& e : events) {
    if (!out.empty()) out += ',';
    out += e;
  }
  return out;
}

}  // namespace

ControlLoop::ControlLoop(const Settings& settings, Arena arena, double t0)
    : settings_(settings),
      pipeline_((settings.validate(), settings), arena, t0),
      recorder_(settings, arena, t0),
      last_now_(t0) {
  rig_.t = t0;
  watchdog_.timeout = settings.service.watchdog_timeout;
}

void ControlLoop::post(std::string line) { lines_.push(std::move(line)); }

void ControlLoop::post_pose(const TrackerSample& sample) { poses_.push(sample); }

void ControlLoop::handle(const WireMessage& msg, double now, std::vector<WireMessage>& replies) {
  if (const auto* e = std::get_if<EffortMsg>(&msg)) {
    effort_ = FootEffort{e->roll, e->pitch, e->yaw, e->engaged};
    watchdog_.last_input = now;
  } else if (std::holds_alternative<CalMsg>(msg)) {
    calibrate_pending_ = true;
  } else if (const auto* c = std::get_if<CfgMsg>(&msg)) {
    try {
      day_profile(c->profile);
      pending_events_.push_back(kEventProfilePrefix + c->profile);
    } catch (const UnknownName&) {
      ++stats_.ignored;
    }
  } else if (std::holds_alternative<PingMsg>(msg)) {
    replies.emplace_back(PongMsg{++out_seq_, now});
  } else {
    ++stats_.ignored;
  }
}

TrackerSample ControlLoop::current_sample(double now) const {
  if (latest_pose_) return *latest_pose_;
  // The virtual device: rig angles seen through the tracker mount.
  TrackerSample s;
  s.t = now;
  s.orientation = quat_compose(quat_from_euler_zyx(rig_.yaw.angle, rig_.pitch.angle, rig_.roll.angle),
                               quat_inverse(settings_.pose.mount_offset));
  return s;
}

std::vector<WireMessage> ControlLoop::emit(double now, const Twist& cmd, const std::string& event) {
  std::vector<WireMessage> out;
  out.emplace_back(CmdMsg{++out_seq_, now, cmd.vx, cmd.vy, cmd.wz});
  const RobotState& r = pipeline_.robot();
  out.emplace_back(StateMsg{++out_seq_, now, attitude_.roll, attitude_.pitch, attitude_.yaw, cmd.vx, cmd.vy, cmd.wz,
                            r.x, r.y, r.heading, event});
  watchdog_.last_output = now;
  return out;
}

std::vector<WireMessage> ControlLoop::tick(double now) {
  std::vector<WireMessage> replies;
  try {
    for (auto& line : lines_.drain()) {
      auto parsed = parse_message(line);
      if (const auto* msg = std::get_if<WireMessage>(&parsed)) {
        handle(*msg, now, replies);
      } else {
        ++stats_.malformed;
      }
    }
    for (auto& pose : poses_.drain()) {
      latest_pose_ = pose;
      watchdog_.last_input = now;
    }

    std::vector<WireMessage> out;
    if (!(now > last_now_)) {
      // Stale clock: repeat the last output, record nothing.
      out = emit(now, last_cmd_, last_event_);
    } else {
      watchdog_.tripped = !watchdog_.last_input || now - *watchdog_.last_input > watchdog_.timeout;
      std::vector<std::string> events = std::move(pending_events_);
      pending_events_.clear();
      // Calibrate on the pose current when the request arrived.
      if (calibrate_pending_ || !calibration_) {
        calibration_ = calibrate(current_sample(last_now_), settings_.pose);
        calibrate_pending_ = false;
        events.emplace_back(kEventCalibrated);
      }
      const FootEffort applied = watchdog_.tripped ? FootEffort::released() : effort_;
      if (!latest_pose_) rig_ = advance(rig_, applied, now - last_now_, settings_.rig);

      const TrackerSample sample = current_sample(now);
      attitude_ = relative_attitude(sample, *calibration_, pipeline_.mapping().limits(), settings_.pose);
      attitude_.t = now;
      if (watchdog_.tripped) events.emplace_back(kEventWatchdog);

      TickRecord rec = pipeline_.step(now, attitude_, std::move(events));
      last_now_ = now;
      last_cmd_ = rec.cmd;
      last_event_ = join_events(rec.events);
      recorder_.record(std::move(rec));
      ++stats_.ticks;
      out = emit(now, last_cmd_, last_event_);
    }
    replies.insert(replies.end(), out.begin(), out.end());
    return replies;
  } catch (const std::exception& e) {
    ++stats_.errors;
    const std::string token = kEventErrorPrefix + event_token(e.what());
    if (now > pipeline_.last_time()) {
      try {
        TickRecord rec = pipeline_.step(now, attitude_, {token});
        recorder_.record(std::move(rec));
      } catch (const std::exception&) {
        // The fail-safe output below does not depend on the record.
      }
    }
    last_now_ = std::max(last_now_, now);
    last_cmd_ = Twist{};
    last_event_ = token;
    auto out = emit(now, last_cmd_, last_event_);
    replies.insert(replies.end(), out.begin(), out.end());
    return replies;
  }
}

SessionLog ControlLoop::finish() { return recorder_.finalize(); }

// ---------------------------------------------------------------------------
// Scripted driving

std::vector<ScriptEntry> read_effort_script(std::istream& in) {
  std::vector<ScriptEntry> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string_view body = line;
    if (const auto hash = body.find('#'); hash != std::string_view::npos) body = body.substr(0, hash);
    const auto f = split_ws(body);
    if (f.empty()) continue;
    auto number = [&](std::string_view s) {
      const auto d = parse_double(s);
      if (!d || !std::isfinite(*d)) throw ParseError("bad number '" + std::string(s) + "'", lineno);
      return *d;
    };
    ScriptEntry e;
    e.t = number(f[0]);
    if (!out.empty() && e.t < out.back().t) throw ParseError("script time goes backwards", lineno);
    if (f.size() == 2 && f[1] == "cal") {
      e.kind = ScriptEntry::Kind::Cal;
    } else if (f.size() == 2 && f[1] == "silent") {
      e.kind = ScriptEntry::Kind::Silent;
    } else if (f.size() == 3 && f[1] == "profile") {
      e.kind = ScriptEntry::Kind::Profile;
      e.profile = std::string(f[2]);
    } else if (f.size() == 5) {
      e.kind = ScriptEntry::Kind::Effort;
      e.effort.torque_roll = number(f[1]);
      e.effort.torque_pitch = number(f[2]);
      e.effort.torque_yaw = number(f[3]);
      if (f[4] != "0" && f[4] != "1") throw ParseError("engaged must be 0 or 1", lineno);
      e.effort.engaged = f[4] == "1";
    } else {
      throw ParseError("expected `t roll pitch yaw engaged`, `t cal`, `t silent` or `t profile NAME`", lineno);
    }
    out.push_back(std::move(e));
  }
  return out;
}

std::vector<ScriptEntry> read_effort_script_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open effort script '" + path + "'", 0);
  return read_effort_script(in);
}

DriveResult drive_scripted(const DriveOptions& options) {
  const double t0 = options.poses.empty() ? 0.0 : options.poses.front().t;
  const double dt = 1.0 / options.settings.service.tick_hz;
  ControlLoop loop(options.settings, options.arena, t0);

  DriveResult result;
  std::uint64_t client_seq = 0;
  bool streaming = false;
  FootEffort current;
  std::size_t si = 0, pi = 0;
  const auto ticks = static_cast<long>(std::ceil(options.duration / dt - 1e-9));
  for (long k = 1; k <= ticks; ++k) {
    const double now = t0 + static_cast<double>(k) * dt;
    for (; si < options.script.size() && options.script[si].t <= now; ++si) {
      const ScriptEntry& e = options.script[si];
      switch (e.kind) {
        case ScriptEntry::Kind::Effort:
          current = e.effort;
          streaming = true;
          break;
        case ScriptEntry::Kind::Silent: streaming = false; break;
        case ScriptEntry::Kind::Cal: loop.post(format_message(CalMsg{++client_seq, now})); break;
        case ScriptEntry::Kind::Profile: loop.post(format_message(CfgMsg{++client_seq, now, e.profile})); break;
      }
    }
    if (streaming) {
      loop.post(format_message(EffortMsg{++client_seq, now, current.torque_roll, current.torque_pitch,
                                         current.torque_yaw, current.engaged}));
    }
    for (; pi < options.poses.size() && options.poses[pi].t <= now; ++pi) loop.post_pose(options.poses[pi]);

    for (const auto& msg : loop.tick(now)) result.emitted.push_back(format_message(msg));
    if (options.stop_on_outcome && loop.pipeline().outcome()) break;
  }
  result.stats = loop.stats();
  result.log = loop.finish();
  return result;
}

}  // namespace rudder
