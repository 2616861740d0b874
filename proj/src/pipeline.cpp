#include "rudder/pipeline.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

#include "rudder/error.hpp"
#include "rudder/numfmt.hpp"

namespace rudder {

std::string event_token(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (char c : text) {
    const auto u = static_cast<unsigned char>(c);
    out += (std::isalnum(u) || c == '_' || c == '.' || c == ':' || c == '-') ? c : '_';
  }
  return out.empty() ? "_" : out;
}

namespace {

bool starts_with(std::string_view s, std::string_view prefix) { return s.substr(0, prefix.size()) == prefix; }

bool is_outcome_event(std::string_view e) { return e == kEventGoal || starts_with(e, "collision:"); }

}  // namespace

Pipeline::Pipeline(const Settings& settings, Arena arena, double t0)
    : mapping_(settings.mapping),
      arena_(std::move(arena)),
      mapper_(MapperState::at_rest(t0)),
      robot_(arena_.start_state(t0)),
      last_t_(t0) {}

TickRecord Pipeline::step(double t, const RudderAttitude& attitude, std::vector<std::string> events) {
  if (!(t > last_t_)) throw Error("pipeline time must increase (" + format_double(t) + ")");

  bool force_stop = outcome_.has_value();
  MappingConfig next_mapping = mapping_;
  for (const auto& e : events) {
    if (starts_with(e, kEventProfilePrefix)) {
      apply_speed_limits(next_mapping, day_profile(std::string_view(e).substr(8)));
    } else if (e == kEventWatchdog || starts_with(e, kEventErrorPrefix)) {
      force_stop = true;
    }
  }
  mapping_ = next_mapping;
  last_t_ = t;

  TickRecord rec;
  rec.t = t;
  rec.roll = attitude.roll;
  rec.pitch = attitude.pitch;
  rec.yaw = attitude.yaw;
  rec.raw = map_to_twist(attitude, mapping_);
  if (force_stop) {
    const auto seq = mapper_.previous.seq;
    mapper_ = MapperState::at_rest(t);
    mapper_.previous.seq = seq;
    rec.cmd = Twist{};
  } else {
    rec.cmd = rate_limit(rec.raw, mapper_, t, mapping_).twist();
  }

  if (!outcome_) {
    robot_ = integrate(robot_, rec.cmd, t - robot_.t);
    robot_.t = t;
    if (const Collision c = check_collision(robot_, arena_)) {
      outcome_ = Outcome{Outcome::Kind::Collided, t, c};
      events.push_back(c.token());
    } else if (arena_.in_goal(robot_)) {
      outcome_ = Outcome{Outcome::Kind::GoalReached, t, {}};
      events.emplace_back(kEventGoal);
    }
  }
  rec.x = robot_.x;
  rec.y = robot_.y;
  rec.heading = robot_.heading;
  rec.events = std::move(events);
  return rec;
}

SessionLog replay(const SessionLog& log, const ReplayOptions& options) {
  const Settings settings = options.settings ? *options.settings : log.settings();
  settings.validate();
  std::optional<Arena> arena = options.arena ? options.arena : log.arena();
  if (!arena) throw Error("log has no arena; pass one explicitly");

  const bool mismatch = hash_hex(config_hash(settings)) != log.header().config_hash;
  const double t0 = log.header().start_time;
  SessionRecorder recorder(settings, *arena, t0);
  Pipeline pipeline(settings, *arena, t0);
  bool warned = false;
  for (const auto& r : log.records()) {
    std::vector<std::string> inputs;
    for (const auto& e : r.events) {
      if (!is_outcome_event(e) && !starts_with(e, "warning:")) inputs.push_back(e);
    }
    TickRecord out = pipeline.step(r.t, RudderAttitude{r.roll, r.pitch, r.yaw, r.t}, std::move(inputs));
    if (mismatch && !warned) {
      out.events.emplace_back(kWarningConfigMismatch);
      warned = true;
    }
    recorder.record(std::move(out));
  }
  if (mismatch && !warned) recorder.add_warning(kWarningConfigMismatch);
  return recorder.finalize();
}

SessionLog replay_poses(const std::vector<TrackerSample>& samples, const Settings& settings, const Arena& arena) {
  settings.validate();
  const double t0 = samples.empty() ? 0.0 : samples.front().t;
  SessionRecorder recorder(settings, arena, t0);
  if (samples.empty()) return recorder.finalize();

  const CalibrationState cal = calibrate(samples.front(), settings.pose);
  Pipeline pipeline(settings, arena, t0);
  for (std::size_t i = 1; i < samples.size(); ++i) {
    const RudderAttitude att = relative_attitude(samples[i], cal, settings.mapping.limits(), settings.pose);
    std::vector<std::string> events;
    if (i == 1) events.emplace_back(kEventCalibrated);
    recorder.record(pipeline.step(samples[i].t, att, std::move(events)));
  }
  return recorder.finalize();
}

SessionLog replay_file(const std::string& path, const ReplayOptions& options) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open '" + path + "'", 0);
  std::stringstream buf;
  buf << in.rdbuf();
  const std::string text = buf.str();

  bool session = false;
  std::istringstream scan(text);
  std::string line;
  while (std::getline(scan, line)) {
    const auto body = trim(line);
    if (body.empty()) continue;
    session = starts_with(body, "#format:");
    if (session || body.front() != '#') break;
  }

  std::istringstream src(text);
  if (session) return replay(read_session_log(src), options);
  const auto samples = read_pose_log(src);
  const Settings settings = options.settings ? *options.settings : default_settings();
  const Arena arena = options.arena ? *options.arena : preset_arena("corridor_40m");
  return replay_poses(samples, settings, arena);
}

}  // namespace rudder
