// rudderctl: drive, replay, analyze and bench the rudder pipeline.
//
// Exit status: 0 success, 1 failed criteria (bench), 2 bad input.

#include <CLI11.hpp>

#include <atomic>
#include <chrono>
#include <csignal>
#include <fstream>
#include <iostream>
#include <optional>
#include <thread>

#include "bench/acceptance.hpp"
#include "rudder/config.hpp"
#include "rudder/error.hpp"
#include "rudder/http_bridge.hpp"
#include "rudder/pipeline.hpp"
#include "rudder/service.hpp"
#include "rudder/telemetry.hpp"

namespace {

std::atomic<bool> g_interrupted{false};

void on_signal(int) { g_interrupted = true; }

std::optional<std::string> opt(const std::string& s) {
  return s.empty() ? std::nullopt : std::optional<std::string>(s);
}

// Writes via `fn` to `path`, or to stdout when path is empty or "-".
template <typename Fn>
void write_to(const std::string& path, Fn&& fn) {
  if (path.empty() || path == "-") {
    fn(std::cout);
    std::cout.flush();
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw rudder::Error("cannot write '" + path + "'");
  fn(out);
  if (!out) throw rudder::Error("write to '" + path + "' failed");
}

std::pair<std::string, int> split_listen(const std::string& addr) {
  const auto colon = addr.rfind(':');
  if (colon == std::string::npos) return {"127.0.0.1", std::stoi(addr)};
  const std::string host = colon == 0 ? "127.0.0.1" : addr.substr(0, colon);
  return {host, std::stoi(addr.substr(colon + 1))};
}

std::string outcome_text(const rudder::SessionLog& log) {
  if (log.records().empty()) return "no ticks";
  for (const auto& e : log.records().back().events) {
    if (e == rudder::kEventGoal || e.rfind("collision:", 0) == 0) return e;
  }
  return "running";
}

struct DriveArgs {
  std::string config, arena = "corridor_40m", profile = "day1", listen, log, script, pose_log, csv, emit, static_dir;
  double duration = 60.0;
  bool no_stop = false;
};

int run_drive(const DriveArgs& a) {
  using namespace rudder;
  const Settings settings = load_settings(opt(a.config), a.profile);
  const Arena arena = load_arena(a.arena);

  SessionLog log;
  if (!a.listen.empty()) {
    const auto [host, port] = split_listen(a.listen);
    BridgeOptions bo;
    bo.host = host;
    bo.port = port;
    bo.static_dir = a.static_dir;
    HttpBridge bridge(settings, arena, bo);
    std::signal(SIGINT, on_signal);
    std::signal(SIGTERM, on_signal);
    const int bound = bridge.start();
    std::cerr << "listening on http://" << host << ':' << bound << " (GET /stream, POST /send, GET /status)\n";
    const auto deadline = std::chrono::steady_clock::now() + std::chrono::duration<double>(a.duration);
    while (!g_interrupted && std::chrono::steady_clock::now() < deadline) {
      if (!a.no_stop && bridge.status().outcome) break;
      std::this_thread::sleep_for(std::chrono::milliseconds(50));
    }
    log = bridge.stop();
  } else {
    DriveOptions d;
    d.settings = settings;
    d.arena = arena;
    d.duration = a.duration;
    d.stop_on_outcome = !a.no_stop;
    if (!a.script.empty()) d.script = read_effort_script_file(a.script);
    if (!a.pose_log.empty()) d.poses = read_pose_log_file(a.pose_log);
    const DriveResult r = drive_scripted(d);
    log = r.log;
    if (!a.emit.empty()) {
      write_to(a.emit, [&](std::ostream& out) {
        for (const auto& line : r.emitted) out << line << '\n';
      });
    }
    if (r.stats.malformed || r.stats.errors) {
      std::cerr << "malformed " << r.stats.malformed << ", errors " << r.stats.errors << '\n';
    }
  }

  write_to(a.log, [&](std::ostream& out) { write_session_log(out, log); });
  if (!a.csv.empty()) export_channels_file(a.csv, log);
  std::cerr << log.records().size() << " ticks, " << outcome_text(log) << '\n';
  return 0;
}

int run_replay(const std::string& path, const std::string& config, const std::string& arena, const std::string& csv,
               const std::string& log_out) {
  using namespace rudder;
  ReplayOptions o;
  if (!config.empty()) o.settings = load_settings(config);
  if (!arena.empty()) o.arena = load_arena(arena);
  const SessionLog log = replay_file(path, o);
  for (const auto& w : log.header().warnings) std::cerr << "warning: " << w << '\n';
  if (!log.records().empty() && log.records().front().has_event(kWarningConfigMismatch)) {
    std::cerr << "warning: settings differ from the recorded config hash\n";
  }
  if (!log_out.empty()) write_session_log_file(log_out, log);
  write_to(csv, [&](std::ostream& out) { export_channels(out, log); });
  return 0;
}

int run_analyze(const std::string& path, double goal_radius) {
  using namespace rudder;
  const SessionLog log = read_session_log_file(path);
  MetricsOptions mo;
  mo.goal_radius = goal_radius;
  const SessionMetrics m = compute_metrics(log, mo);
  std::cout << "arena: " << log.header().arena_name << '\n'
            << "config_hash: " << log.header().config_hash << '\n'
            << "ticks: " << m.command_count << '\n'
            << "duration_s: " << m.duration << '\n'
            << "outcome: " << outcome_text(log) << '\n'
            << "completion_time_s: " << (m.completion_time ? std::to_string(*m.completion_time) : "-") << '\n'
            << "path_length_m: " << m.path_length << '\n'
            << "reversals_vx: " << m.reversals[0] << '\n'
            << "reversals_vy: " << m.reversals[1] << '\n'
            << "reversals_wz: " << m.reversals[2] << '\n'
            << "time_in_deadzone_s: " << m.time_in_deadzone << '\n'
            << "time_active_s: " << m.time_active << '\n'
            << "deadzone_fraction: " << m.deadzone_fraction << '\n'
            << "peak_linear_mps: " << m.peak_linear << '\n'
            << "peak_angular_radps: " << m.peak_angular << '\n';
  return 0;
}

int run_bench(std::uint64_t seed, int only) {
  int failed = 0;
  for (const auto& c : rudder::bench::criteria()) {
    if (only != 0 && c.id != only) continue;
    rudder::bench::CriterionResult r;
    try {
      r = c.run(seed);
    } catch (const std::exception& e) {
      r = {c.id, c.name, false, std::string("threw: ") + e.what(), 0.0};
    }
    std::cout << rudder::bench::format_result(r) << std::endl;
    if (!r.pass) ++failed;
  }
  return failed == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"rudder foot-controller pipeline"};
  app.require_subcommand(1);

  DriveArgs drive;
  auto* cmd_drive = app.add_subcommand("drive", "run the control loop (virtual clock, or live with --listen)");
  cmd_drive->add_option("--config", drive.config, "config file (default: $RUDDER_CONFIG)");
  cmd_drive->add_option("--arena", drive.arena, "preset name or arena file")->capture_default_str();
  cmd_drive->add_option("--profile", drive.profile, "speed profile")
      ->check(CLI::IsMember({"day1", "day2"}))
      ->capture_default_str();
  cmd_drive->add_option("--listen", drive.listen, "serve HTTP on [HOST:]PORT and run on the wall clock");
  cmd_drive->add_option("--log", drive.log, "session log output (default: stdout)");
  cmd_drive->add_option("--script", drive.script, "effort script for virtual-clock runs")->check(CLI::ExistingFile);
  cmd_drive->add_option("--pose-log", drive.pose_log, "tracker pose log to feed instead of the spring rig")
      ->check(CLI::ExistingFile);
  cmd_drive->add_option("--duration", drive.duration, "seconds to run")->check(CLI::PositiveNumber)->capture_default_str();
  cmd_drive->add_option("--csv", drive.csv, "also export t,vx,vy,wz,x,y,heading channels");
  cmd_drive->add_option("--emit", drive.emit, "write every outbound protocol line (virtual clock only)");
  cmd_drive->add_option("--static", drive.static_dir, "directory served under / with --listen");
  cmd_drive->add_flag("--no-stop", drive.no_stop, "keep running after goal or collision");

  std::string replay_log, replay_config, replay_arena, replay_csv, replay_out;
  auto* cmd_replay = app.add_subcommand("replay", "re-run a session or pose log through the pipeline");
  cmd_replay->add_option("LOG", replay_log, "session log or pose log")->required()->check(CLI::ExistingFile);
  cmd_replay->add_option("--config", replay_config, "override the recorded settings");
  cmd_replay->add_option("--arena", replay_arena, "override the recorded arena");
  cmd_replay->add_option("--out", replay_csv, "channel CSV output (default: stdout)");
  cmd_replay->add_option("--log-out", replay_out, "also write the replayed session log");

  std::string analyze_log;
  double goal_radius = rudder::MetricsOptions{}.goal_radius;
  auto* cmd_analyze = app.add_subcommand("analyze", "session metrics");
  cmd_analyze->add_option("LOG", analyze_log, "session log")->required()->check(CLI::ExistingFile);
  cmd_analyze->add_option("--goal-radius", goal_radius, "reversal window around the goal, m")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();

  std::uint64_t seed = rudder::bench::kDefaultSeed;
  int only = 0;
  auto* cmd_bench = app.add_subcommand("bench", "run the acceptance scenarios");
  cmd_bench->add_option("--seed", seed, "random seed");
  cmd_bench->add_option("--only", only, "run a single criterion by number")->check(CLI::Range(1, 11));

  CLI11_PARSE(app, argc, argv);

  try {
    if (*cmd_drive) return run_drive(drive);
    if (*cmd_replay) return run_replay(replay_log, replay_config, replay_arena, replay_csv, replay_out);
    if (*cmd_analyze) return run_analyze(analyze_log, goal_radius);
    if (*cmd_bench) return run_bench(seed, only);
  } catch (const std::exception& e) {
    std::cerr << "rudderctl: " << e.what() << '\n';
    return 2;
  }
  return 2;
}
