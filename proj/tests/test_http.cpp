#include <gtest/gtest.h>

#include <httplib.h>
#include <json.hpp>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <thread>

#include "rudder/error.hpp"
#include "rudder/http_bridge.hpp"

using namespace rudder;
using namespace std::chrono_literals;

namespace {

nlohmann::json get_status(httplib::Client& c) {
  const auto res = c.Get("/status");
  if (!res || res->status != 200) return nullptr;
  return nlohmann::json::parse(res->body);
}

}  // namespace

TEST(SplitLines, HandlesCrlfAndBlanks) {
  const auto l = split_lines("A\r\n\nB\nC");
  ASSERT_EQ(l.size(), 3u);
  EXPECT_EQ(l[0], "A");
  EXPECT_EQ(l[1], "B");
  EXPECT_EQ(l[2], "C");
  EXPECT_TRUE(split_lines("").empty());
}

TEST(HttpBridge, SendStatusStreamAndStop) {
  HttpBridge bridge(default_settings(), preset_arena("corridor_40m"));
  const int port = bridge.start();
  ASSERT_GT(port, 0);
  EXPECT_TRUE(bridge.running());

  httplib::Client c("127.0.0.1", port);
  c.set_read_timeout(5, 0);

  // SSE stream on its own connection; collect the first few frames.
  std::vector<std::string> frames;
  std::thread reader([&] {
    httplib::Client s("127.0.0.1", port);
    s.set_read_timeout(5, 0);
    std::string buf;
    s.Get("/stream", [&](const char* data, std::size_t n) {
      buf.append(data, n);
      std::size_t end;
      while ((end = buf.find("\n\n")) != std::string::npos) {
        if (buf.rfind("data: ", 0) == 0) frames.push_back(buf.substr(6, end - 6));
        buf.erase(0, end + 2);
      }
      return frames.size() < 20;
    });
  });

  for (int i = 0; i < 20; ++i) {
    const auto res = c.Post("/send", "EFFORT seq=" + std::to_string(i + 1) + " t=0 roll=0 pitch=5 yaw=0 engaged=1\n"
                                     "PING seq=" + std::to_string(100 + i) + " t=0\nnot a message\n",
                            "text/plain");
    ASSERT_TRUE(res);
    EXPECT_EQ(res->status, 202);
    EXPECT_EQ(res->body, "queued 3\n");
    EXPECT_EQ(res->get_header_value("Access-Control-Allow-Origin"), "*");
    std::this_thread::sleep_for(20ms);
  }
  reader.join();
  ASSERT_EQ(frames.size(), 20u);
  bool saw_cmd = false, saw_state = false;
  for (const auto& f : frames) {
    const ParseResult r = parse_message(f);
    ASSERT_TRUE(std::holds_alternative<WireMessage>(r)) << f;
    saw_cmd |= f.rfind("CMD ", 0) == 0;
    saw_state |= f.rfind("STATE ", 0) == 0;
  }
  EXPECT_TRUE(saw_cmd);
  EXPECT_TRUE(saw_state);

  std::this_thread::sleep_for(100ms);  // let the tick thread publish
  const auto st = get_status(c);
  ASSERT_FALSE(st.is_null());
  EXPECT_GT(st["ticks"].get<int>(), 0);
  EXPECT_EQ(st["malformed"].get<int>(), 20);
  EXPECT_FALSE(st["watchdog"].get<bool>());
  EXPECT_TRUE(st["outcome"].is_null());

  const auto bad = c.Post("/pose", "0 0 0 0 1 0 0\n", "text/plain");
  ASSERT_TRUE(bad);
  EXPECT_EQ(bad->status, 400);
  EXPECT_NE(bad->body.find("line 1"), std::string::npos);

  const SessionLog log = bridge.stop();
  EXPECT_FALSE(bridge.running());
  EXPECT_GT(log.records().size(), 0u);
  EXPECT_GT(log.records().back().x, 0.0);
  EXPECT_EQ(bridge.stop(), log);  // idempotent
  EXPECT_THROW(bridge.start(), Error);
}

TEST(HttpBridge, PoseEndpointFeedsTheLoop) {
  HttpBridge bridge(default_settings(), preset_arena("corridor_40m"));
  const int port = bridge.start();
  httplib::Client c("127.0.0.1", port);
  std::string body;
  for (int i = 0; i < 5; ++i) body += std::to_string(i * 0.02) + " 0 0 0 1 0 0 0\n";
  const auto res = c.Post("/pose", body, "text/plain");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 202);
  EXPECT_EQ(res->body, "queued 5\n");
  std::this_thread::sleep_for(100ms);
  EXPECT_FALSE(bridge.status().watchdog_tripped);
  bridge.stop();
}

TEST(HttpBridge, ServesStaticAssets) {
  const std::string dir = ::testing::TempDir() + "rudder_static";
  std::filesystem::create_directories(dir);
  std::ofstream(dir + "/index.html") << "<html>ui</html>";
  BridgeOptions o;
  o.static_dir = dir;
  HttpBridge bridge(default_settings(), preset_arena("corridor_40m"), o);
  httplib::Client c("127.0.0.1", bridge.start());
  const auto res = c.Get("/index.html");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 200);
  EXPECT_EQ(res->body, "<html>ui</html>");
  bridge.stop();

  BridgeOptions missing;
  missing.static_dir = dir + "/nope";
  EXPECT_THROW(HttpBridge(default_settings(), preset_arena("corridor_40m"), missing), ConfigError);
}
