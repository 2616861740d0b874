#pragma once

#include <atomic>
#include <cstdint>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "rudder/service.hpp"

namespace rudder {

struct BridgeOptions {
  std::string host = "127.0.0.1";
  int port = 0;                 // 0 picks a free port
  std::string static_dir;       // served under / when non-empty
  std::size_t queue_capacity = 256;
};

/// Snapshot of the loop for GET /status, safe to read from any thread.
struct BridgeStatus {
  LoopStats stats;
  bool watchdog_tripped = true;
  std::optional<Outcome> outcome;
  std::uint64_t dropped = 0;
  std::size_t subscribers = 0;
  double t = 0.0;
};

/// Runs a ControlLoop on a wall clock and exposes it over HTTP:
///   GET  /stream  server-sent events, one `data:` frame per outbound line
///   POST /send    newline-framed inbound lines
///   POST /pose    tracker samples in pose-log format (bypass the spring rig)
///   GET  /status  JSON counters
///   GET  /        static operator UI assets (optional)
class HttpBridge {
 public:
  HttpBridge(const Settings& settings, Arena arena, BridgeOptions options = {});
  ~HttpBridge();
  HttpBridge(const HttpBridge&) = delete;
  HttpBridge& operator=(const HttpBridge&) = delete;

  /// Binds and starts the server and tick threads. Returns the bound port.
  int start();
  /// Stops both threads and returns the recorded session. Idempotent.
  SessionLog stop();

  int port() const noexcept { return port_; }
  bool running() const noexcept { return running_; }
  BridgeStatus status() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
  std::atomic<bool> running_{false};
  int port_ = 0;
  std::optional<SessionLog> log_;
};

/// Splits a POST body into protocol lines (LF or CRLF), dropping empties.
std::vector<std::string> split_lines(std::string_view body);

}  // namespace rudder
