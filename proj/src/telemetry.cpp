#include "rudder/telemetry.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <iterator>
#include <ostream>
#include <sstream>

#include "rudder/error.hpp"
#include "rudder/numfmt.hpp"

namespace rudder {

bool TickRecord::has_event(std::string_view token) const noexcept {
  return std::find(events.begin(), events.end(), token) != events.end();
}

SessionLog::SessionLog(LogHeader header, std::vector<TickRecord> records)
    : header_(std::move(header)), records_(std::move(records)) {}

Settings SessionLog::settings() const {
  Settings s;
  for (const auto& [k, v] : header_.config) set_config_value(s, k, v);
  return s;
}

std::optional<Arena> SessionLog::arena() const {
  if (header_.arena.empty()) return std::nullopt;
  std::string text;
  for (const auto& l : header_.arena) text += l + '\n';
  std::istringstream in(text);
  return read_arena(in, header_.arena_name);
}

SessionRecorder::SessionRecorder(const Settings& settings, const Arena& arena, double start_time) {
  header_.arena_name = arena.name;
  header_.start_time = start_time;
  header_.config = config_entries(settings);
  header_.arena = arena_lines(arena);
  hash_ = config_hash(settings);
}

void SessionRecorder::record(TickRecord rec) {
  if (sealed_) throw Error("session log is sealed");
  if (!std::isfinite(rec.t)) throw Error("record time is not finite");
  if (!records_.empty() && !(rec.t > records_.back().t)) {
    throw Error("record time " + format_double(rec.t) + " does not increase past " +
                format_double(records_.back().t));
  }
  records_.push_back(std::move(rec));
}

void SessionRecorder::add_warning(std::string warning) {
  if (sealed_) throw Error("session log is sealed");
  header_.warnings.push_back(std::move(warning));
}

SessionLog SessionRecorder::finalize() {
  if (sealed_) throw Error("session log already finalized");
  sealed_ = true;
  header_.config_hash = hash_hex(hash_);
  return SessionLog(std::move(header_), std::move(records_));
}

namespace {

constexpr std::size_t kColumns = 14;
constexpr const char* kColumnNames = "t roll pitch yaw raw_vx raw_vy raw_wz vx vy wz x y heading event";

std::string join_events(const std::vector<std::string>& events) {
  if (events.empty()) return "-";
  std::string out;
  for (const auto& e : events) {
    if (!out.empty()) out += ',';
    out += e;
  }
  return out;
}

std::vector<std::string> split_events(std::string_view field) {
  std::vector<std::string> out;
  if (field == "-") return out;
  std::size_t start = 0;
  while (start <= field.size()) {
    const auto comma = field.find(',', start);
    const auto end = comma == std::string_view::npos ? field.size() : comma;
    if (end > start) out.emplace_back(field.substr(start, end - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

}  // namespace

void write_session_log(std::ostream& out, const SessionLog& log) {
  const LogHeader& h = log.header();
  out << "#format: " << kSessionFormat << '\n';
  out << "#config_hash: " << h.config_hash << '\n';
  out << "#arena: " << h.arena_name << '\n';
  out << "#start_time: " << format_double(h.start_time) << '\n';
  for (const auto& [k, v] : h.config) out << "#config." << k << ": " << v << '\n';
  for (const auto& l : h.arena) out << "#arena.line: " << l << '\n';
  for (const auto& w : h.warnings) out << "#warning: " << w << '\n';
  out << "#columns: " << kColumnNames << '\n';
  for (const auto& r : log.records()) {
    out << format_double(r.t) << ' ' << format_double(r.roll) << ' ' << format_double(r.pitch) << ' '
        << format_double(r.yaw) << ' ' << format_double(r.raw.vx) << ' ' << format_double(r.raw.vy) << ' '
        << format_double(r.raw.wz) << ' ' << format_double(r.cmd.vx) << ' ' << format_double(r.cmd.vy) << ' '
        << format_double(r.cmd.wz) << ' ' << format_double(r.x) << ' ' << format_double(r.y) << ' '
        << format_double(r.heading) << ' ' << join_events(r.events) << '\n';
  }
}

void write_session_log_file(const std::string& path, const SessionLog& log) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write session log '" + path + "'");
  write_session_log(out, log);
  out.flush();
  if (!out) throw Error("failed writing session log '" + path + "'");
}

SessionLog read_session_log(std::istream& in) {
  const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  LogHeader h;
  std::vector<TickRecord> records;
  bool saw_format = false;

  std::size_t pos = 0;
  std::size_t lineno = 0;
  while (pos < text.size()) {
    ++lineno;
    const auto nl = text.find('\n', pos);
    const bool terminated = nl != std::string::npos;
    std::string_view line(text.data() + pos, (terminated ? nl : text.size()) - pos);
    pos = terminated ? nl + 1 : text.size();
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (trim(line).empty()) continue;

    if (line.front() == '#') {
      const auto colon = line.find(':');
      if (colon == std::string_view::npos) continue;  // free-form comment
      const std::string key(trim(line.substr(1, colon - 1)));
      const std::string value(trim(line.substr(colon + 1)));
      if (key == "format") {
        if (value != kSessionFormat) throw ParseError("unsupported log format '" + value + "'", lineno);
        saw_format = true;
      } else if (key == "config_hash") {
        h.config_hash = value;
      } else if (key == "arena") {
        h.arena_name = value;
      } else if (key == "start_time") {
        const auto d = parse_double(value);
        if (!d || !std::isfinite(*d)) throw ParseError("bad start_time", lineno);
        h.start_time = *d;
      } else if (key.rfind("config.", 0) == 0) {
        h.config.emplace_back(key.substr(7), value);
      } else if (key == "arena.line") {
        h.arena.push_back(value);
      } else if (key == "warning") {
        h.warnings.push_back(value);
      }
      continue;
    }

    const auto f = split_ws(line);
    if (f.size() != kColumns) {
      throw ParseError("expected " + std::to_string(kColumns) + " columns, got " + std::to_string(f.size()) +
                           (terminated ? "" : " (truncated line)"),
                       lineno);
    }
    if (!terminated) throw ParseError("truncated line (missing newline)", lineno);
    std::array<double, kColumns - 1> v{};
    for (std::size_t i = 0; i + 1 < kColumns; ++i) {
      const auto d = parse_double(f[i]);
      if (!d || !std::isfinite(*d)) throw ParseError("bad number '" + std::string(f[i]) + "'", lineno);
      v[i] = *d;
    }
    TickRecord r;
    r.t = v[0];
    r.roll = v[1];
    r.pitch = v[2];
    r.yaw = v[3];
    r.raw = {v[4], v[5], v[6]};
    r.cmd = {v[7], v[8], v[9]};
    r.x = v[10];
    r.y = v[11];
    r.heading = v[12];
    r.events = split_events(f[13]);
    if (!records.empty() && !(r.t > records.back().t)) throw ParseError("time does not increase", lineno);
    records.push_back(std::move(r));
  }
  if (!saw_format) throw ParseError("missing '#format: " + std::string(kSessionFormat) + "' header", 0);
  std::sort(h.config.begin(), h.config.end());
  return SessionLog(std::move(h), std::move(records));
}

SessionLog read_session_log_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open session log '" + path + "'", 0);
  return read_session_log(in);
}

int count_reversals(const std::vector<double>& values, double band) noexcept {
  int count = 0;
  int last_sign = 0;
  for (double v : values) {
    if (!(std::abs(v) >= band)) continue;
    const int sign = v > 0.0 ? 1 : -1;
    if (last_sign != 0 && sign != last_sign) ++count;
    last_sign = sign;
  }
  return count;
}

SessionMetrics compute_metrics(const SessionLog& log, const MetricsOptions& options) {
  SessionMetrics m;
  const auto& recs = log.records();
  const double t0 = log.header().start_time;
  const std::optional<Arena> arena = log.arena();
  m.command_count = recs.size();

  double px = 0.0, py = 0.0;
  if (arena) {
    px = arena->start.x;
    py = arena->start.y;
  } else if (!recs.empty()) {
    px = recs.front().x;
    py = recs.front().y;
  }

  std::array<std::vector<double>, 3> near_goal;
  double prev_t = t0;
  for (const auto& r : recs) {
    m.path_length += std::hypot(r.x - px, r.y - py);
    px = r.x;
    py = r.y;

    const double span = r.t - prev_t;
    prev_t = r.t;
    if (r.raw == Twist{}) {
      m.time_in_deadzone += span;
    } else {
      m.time_active += span;
    }

    m.peak_linear = std::max(m.peak_linear, std::hypot(r.cmd.vx, r.cmd.vy));
    m.peak_angular = std::max(m.peak_angular, std::abs(r.cmd.wz));

    const bool near = !arena || std::hypot(r.x - arena->goal.cx, r.y - arena->goal.cy) <= options.goal_radius;
    if (near) {
      near_goal[0].push_back(r.cmd.vx);
      near_goal[1].push_back(r.cmd.vy);
      near_goal[2].push_back(r.cmd.wz);
    }
    if (!m.completion_time && r.has_event("goal")) m.completion_time = r.t - t0;
  }
  for (std::size_t i = 0; i < 3; ++i) m.reversals[i] = count_reversals(near_goal[i], options.reversal_band);
  m.duration = recs.empty() ? 0.0 : recs.back().t - t0;
  m.deadzone_fraction = m.duration > 0.0 ? m.time_in_deadzone / m.duration : 0.0;
  return m;
}

std::vector<ChannelRow> channels(const SessionLog& log) {
  std::vector<ChannelRow> rows;
  rows.reserve(log.records().size());
  for (const auto& r : log.records()) rows.push_back({r.t, r.cmd.vx, r.cmd.vy, r.cmd.wz, r.x, r.y, r.heading});
  return rows;
}

void write_channels(std::ostream& out, const std::vector<ChannelRow>& rows) {
  out << kChannelHeader << '\n';
  for (const auto& r : rows) {
    out << format_double(r.t) << ',' << format_double(r.vx) << ',' << format_double(r.vy) << ','
        << format_double(r.wz) << ',' << format_double(r.x) << ',' << format_double(r.y) << ','
        << format_double(r.heading) << '\n';
  }
}

void export_channels(std::ostream& out, const SessionLog& log) { write_channels(out, channels(log)); }

void export_channels_file(const std::string& path, const SessionLog& log) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write channel file '" + path + "'");
  export_channels(out, log);
  out.flush();
  if (!out) throw Error("failed writing channel file '" + path + "'");
}

std::vector<ChannelRow> read_channels(std::istream& in) {
  std::vector<ChannelRow> rows;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (lineno == 1) {
      if (trim(line) != kChannelHeader) throw ParseError("expected CSV header '" + std::string(kChannelHeader) + "'", 1);
      continue;
    }
    if (trim(line).empty()) continue;
    std::array<double, 7> v{};
    std::size_t start = 0;
    for (std::size_t i = 0; i < 7; ++i) {
      const auto comma = line.find(',', start);
      const bool last = i == 6;
      if (last != (comma == std::string::npos)) throw ParseError("expected 7 comma-separated values", lineno);
      const auto cell = std::string_view(line).substr(start, last ? std::string::npos : comma - start);
      const auto d = parse_double(trim(cell));
      if (!d) throw ParseError("bad number '" + std::string(cell) + "'", lineno);
      v[i] = *d;
      start = comma + 1;
    }
    rows.push_back({v[0], v[1], v[2], v[3], v[4], v[5], v[6]});
  }
  if (lineno == 0) throw ParseError("empty channel file", 0);
  return rows;
}

}  // namespace rudder
