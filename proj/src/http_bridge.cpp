#include "rudder/http_bridge.hpp"

#include <httplib.h>
#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <sstream>

#include "rudder/error.hpp"

namespace rudder {

std::vector<std::string> split_lines(std::string_view body) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start < body.size()) {
    auto end = body.find('\n', start);
    if (end == std::string_view::npos) end = body.size();
    std::string_view line = body.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (!line.empty()) out.emplace_back(line);
    start = end + 1;
  }
  return out;
}

struct HttpBridge::Impl {
  Impl(const Settings& s, Arena a, BridgeOptions o)
      : options(std::move(o)), period(1.0 / s.service.tick_hz), loop(s, std::move(a), 0.0) {}

  BridgeOptions options;
  double period;
  ControlLoop loop;
  httplib::Server server;
  std::thread server_thread;
  std::thread tick_thread;

  mutable std::mutex mu;  // guards everything below
  std::vector<std::shared_ptr<OutboundQueue>> subscribers;
  std::uint64_t dropped_closed = 0;
  BridgeStatus snapshot;

  void broadcast(const std::vector<WireMessage>& msgs) {
    std::lock_guard lock(mu);
    for (const auto& q : subscribers) {
      for (const auto& m : msgs) q->push(m);
    }
  }

  void unsubscribe(const std::shared_ptr<OutboundQueue>& q) {
    q->close();
    std::lock_guard lock(mu);
    const auto it = std::find(subscribers.begin(), subscribers.end(), q);
    if (it != subscribers.end()) {
      dropped_closed += q->dropped();
      subscribers.erase(it);
    }
  }

  void close_all() {
    std::lock_guard lock(mu);
    for (const auto& q : subscribers) q->close();
  }

  void run_ticks(const std::atomic<bool>& running) {
    SteadyClock clock;
    using namespace std::chrono;
    const auto start = steady_clock::now();
    for (long k = 1; running; ++k) {
      std::this_thread::sleep_until(start + duration_cast<steady_clock::duration>(duration<double>(k * period)));
      const auto msgs = loop.tick(clock.now());
      broadcast(msgs);
      std::lock_guard lock(mu);
      snapshot.stats = loop.stats();
      snapshot.watchdog_tripped = loop.watchdog().tripped;
      snapshot.outcome = loop.pipeline().outcome();
      snapshot.t = loop.pipeline().last_time();
    }
  }

  void install_routes(const std::atomic<bool>& running) {
    server.set_default_headers({{"Access-Control-Allow-Origin", "*"}});

    server.Get("/stream", [this, &running](const httplib::Request&, httplib::Response& res) {
      auto q = std::make_shared<OutboundQueue>(options.queue_capacity);
      {
        std::lock_guard lock(mu);
        subscribers.push_back(q);
      }
      res.set_header("Cache-Control", "no-cache");
      res.set_chunked_content_provider(
          "text/event-stream",
          [q, &running](std::size_t, httplib::DataSink& sink) {
            if (!running || q->closed()) {
              sink.done();
              return true;
            }
            if (const auto line = q->pop(std::chrono::milliseconds(1000))) {
              const std::string frame = "data: " + *line + "\n\n";
              return sink.write(frame.data(), frame.size());
            }
            static const std::string keepalive = ": keepalive\n\n";
            return sink.write(keepalive.data(), keepalive.size());
          },
          [this, q](bool) { unsubscribe(q); });
    });

    server.Post("/send", [this](const httplib::Request& req, httplib::Response& res) {
      const auto lines = split_lines(req.body);
      for (const auto& line : lines) loop.post(line);
      res.status = 202;
      res.set_content("queued " + std::to_string(lines.size()) + "\n", "text/plain");
    });

    server.Post("/pose", [this](const httplib::Request& req, httplib::Response& res) {
      std::istringstream in(req.body);
      try {
        const auto samples = read_pose_log(in);
        for (const auto& s : samples) loop.post_pose(s);
        res.status = 202;
        res.set_content("queued " + std::to_string(samples.size()) + "\n", "text/plain");
      } catch (const Error& e) {
        res.status = 400;
        res.set_content(std::string(e.what()) + "\n", "text/plain");
      }
    });

    server.Get("/status", [this](const httplib::Request&, httplib::Response& res) {
      const BridgeStatus s = status();
      nlohmann::json j{{"t", s.t},
                       {"ticks", s.stats.ticks},
                       {"malformed", s.stats.malformed},
                       {"ignored", s.stats.ignored},
                       {"errors", s.stats.errors},
                       {"watchdog", s.watchdog_tripped},
                       {"dropped", s.dropped},
                       {"subscribers", s.subscribers}};
      if (s.outcome) {
        j["outcome"] = s.outcome->kind == Outcome::Kind::GoalReached ? "goal" : s.outcome->collision.token();
      } else {
        j["outcome"] = nullptr;
      }
      res.set_content(j.dump(), "application/json");
    });

    if (!options.static_dir.empty() && !server.set_mount_point("/", options.static_dir)) {
      throw ConfigError("static directory '" + options.static_dir + "' does not exist");
    }
  }

  BridgeStatus status() const {
    std::lock_guard lock(mu);
    BridgeStatus s = snapshot;
    s.subscribers = subscribers.size();
    s.dropped = dropped_closed;
    for (const auto& q : subscribers) s.dropped += q->dropped();
    return s;
  }
};

HttpBridge::HttpBridge(const Settings& settings, Arena arena, BridgeOptions options)
    : impl_(std::make_unique<Impl>(settings, std::move(arena), std::move(options))) {
  impl_->install_routes(running_);
}

HttpBridge::~HttpBridge() {
  try {
    stop();
  } catch (...) {
  }
}

int HttpBridge::start() {
  if (running_) return port_;
  if (log_) throw Error("bridge already stopped");
  auto& server = impl_->server;
  const auto& o = impl_->options;
  port_ = o.port == 0 ? server.bind_to_any_port(o.host) : (server.bind_to_port(o.host, o.port) ? o.port : -1);
  if (port_ <= 0) throw ConfigError("cannot listen on " + o.host + ":" + std::to_string(o.port));
  running_ = true;
  impl_->server_thread = std::thread([this] { impl_->server.listen_after_bind(); });
  impl_->tick_thread = std::thread([this] { impl_->run_ticks(running_); });
  server.wait_until_ready();
  return port_;
}

SessionLog HttpBridge::stop() {
  if (log_) return *log_;
  running_ = false;
  if (impl_->tick_thread.joinable()) impl_->tick_thread.join();
  impl_->close_all();
  impl_->server.stop();
  if (impl_->server_thread.joinable()) impl_->server_thread.join();
  log_ = impl_->loop.finish();
  return *log_;
}

BridgeStatus HttpBridge::status() const { return impl_->status(); }

}  // namespace rudder
