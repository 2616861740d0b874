#include "rudder/config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <istream>
#include <map>
#include <set>

#include "rudder/error.hpp"
#include "rudder/numfmt.hpp"

namespace rudder {

namespace {

struct Field {
  std::function<std::string(const Settings&)> get;
  std::function<void(Settings&, const std::string&)> set;
};

double to_double(const std::string& key, const std::string& v) {
  const auto d = parse_double(v);
  if (!d || !std::isfinite(*d)) throw ConfigError("'" + key + "': expected a finite number, got '" + v + "'");
  return *d;
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw ConfigError("'" + key + "': expected true/false, got '" + v + "'");
}

int to_int(const std::string& key, const std::string& v) {
  const auto n = parse_u64(v);
  if (!n || *n > 1000) throw ConfigError("'" + key + "': expected a small non-negative integer, got '" + v + "'");
  return static_cast<int>(*n);
}

Field real(std::function<double&(Settings&)> ref) {
  return {[ref](const Settings& s) {
            Settings copy = s;
            return format_double(ref(copy));
          },
          [ref](Settings& s, const std::string& v) { ref(s) = to_double("value", v); }};
}

Field flag(std::function<bool&(Settings&)> ref) {
  return {[ref](const Settings& s) {
            Settings copy = s;
            return std::string(ref(copy) ? "true" : "false");
          },
          [ref](Settings& s, const std::string& v) { ref(s) = to_bool("value", v); }};
}

const std::map<std::string, Field>& fields() {
  static const std::map<std::string, Field> table = [] {
    std::map<std::string, Field> t;
    t["dead_roll"] = real([](Settings& s) -> double& { return s.mapping.dead_roll; });
    t["dead_pitch"] = real([](Settings& s) -> double& { return s.mapping.dead_pitch; });
    t["dead_yaw"] = real([](Settings& s) -> double& { return s.mapping.dead_yaw; });
    t["stop_rp"] = real([](Settings& s) -> double& { return s.mapping.stop_rp; });
    t["stop_yaw"] = real([](Settings& s) -> double& { return s.mapping.stop_yaw; });
    t["v_max_x"] = real([](Settings& s) -> double& { return s.mapping.v_max_x; });
    t["v_max_y"] = real([](Settings& s) -> double& { return s.mapping.v_max_y; });
    t["w_max"] = real([](Settings& s) -> double& { return s.mapping.w_max; });
    t["a_max_lin"] = real([](Settings& s) -> double& { return s.mapping.a_max_lin; });
    t["a_max_ang"] = real([](Settings& s) -> double& { return s.mapping.a_max_ang; });
    t["smoothing_alpha"] = real([](Settings& s) -> double& { return s.mapping.smoothing_alpha; });
    t["invert_roll"] = flag([](Settings& s) -> bool& { return s.mapping.invert_roll; });
    t["invert_pitch"] = flag([](Settings& s) -> bool& { return s.mapping.invert_pitch; });
    t["invert_yaw"] = flag([](Settings& s) -> bool& { return s.mapping.invert_yaw; });

    for (Axis a : kAllAxes) {
      const std::string p = "rig." + std::string(axis_name(a)) + ".";
      t[p + "n_springs"] = Field{
          [a](const Settings& s) { return std::to_string(s.rig.axis(a).n_springs); },
          [a, p](Settings& s, const std::string& v) { s.rig.axis(a).n_springs = to_int(p + "n_springs", v); }};
      t[p + "k_spring"] = real([a](Settings& s) -> double& { return s.rig.axis(a).k_spring; });
      t[p + "damping"] = real([a](Settings& s) -> double& { return s.rig.axis(a).damping; });
      t[p + "inertia"] = real([a](Settings& s) -> double& { return s.rig.axis(a).inertia; });
      t[p + "stop"] = real([a](Settings& s) -> double& { return s.rig.axis(a).stop; });
      t[p + "rest"] = real([a](Settings& s) -> double& { return s.rig.axis(a).rest; });
    }
    t["rig.substep"] = real([](Settings& s) -> double& { return s.rig.substep; });
    t["service.tick_hz"] = real([](Settings& s) -> double& { return s.service.tick_hz; });
    t["service.watchdog_timeout"] = real([](Settings& s) -> double& { return s.service.watchdog_timeout; });
    t["pose.mount_offset"] = Field{
        [](const Settings& s) {
          const UnitQuat& q = s.pose.mount_offset;
          return format_double(q.w()) + " " + format_double(q.x()) + " " + format_double(q.y()) + " " +
                 format_double(q.z());
        },
        [](Settings& s, const std::string& v) {
          const auto parts = split_ws(v);
          if (parts.size() != 4) throw ConfigError("'pose.mount_offset': expected four numbers w x y z");
          double c[4];
          for (int i = 0; i < 4; ++i) c[i] = to_double("pose.mount_offset", std::string(parts[i]));
          try {
            s.pose.mount_offset = UnitQuat::from_components(c[0], c[1], c[2], c[3]);
          } catch (const InvalidSample& e) {
            throw ConfigError(std::string("'pose.mount_offset': ") + e.what());
          }
        }};
    return t;
  }();
  return table;
}

}  // namespace

void Settings::validate() const {
  mapping.validate();
  rig.validate();
  if (!(service.tick_hz > 0.0) || service.tick_hz > 1000.0) throw ConfigError("service.tick_hz must lie in (0, 1000]");
  if (!(service.watchdog_timeout > 0.0)) throw ConfigError("service.watchdog_timeout must be > 0");
}

Settings default_settings(const std::string& profile) {
  Settings s;
  s.mapping = day_profile(profile);
  return s;
}

void set_config_value(Settings& settings, const std::string& key, const std::string& value) {
  const auto& t = fields();
  const auto it = t.find(key);
  if (it == t.end()) throw ConfigError("unknown config key '" + key + "'");
  try {
    it->second.set(settings, value);
  } catch (const ConfigError& e) {
    std::string msg = e.what();
    // Replace the generic placeholder with the actual key.
    if (msg.rfind("'value'", 0) == 0) msg = "'" + key + "'" + msg.substr(7);
    throw ConfigError(msg);
  }
}

void apply_config(Settings& settings, std::istream& in) {
  std::string line;
  std::size_t lineno = 0;
  std::set<std::string> seen;
  while (std::getline(in, line)) {
    ++lineno;
    std::string_view body = line;
    if (const auto hash = body.find('#'); hash != std::string_view::npos) body = body.substr(0, hash);
    body = trim(body);
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("config line " + std::to_string(lineno) + ": expected 'key = value'");
    }
    const std::string key(trim(body.substr(0, eq)));
    const std::string value(trim(body.substr(eq + 1)));
    if (!seen.insert(key).second) {
      throw ConfigError("config line " + std::to_string(lineno) + ": duplicate key '" + key + "'");
    }
    try {
      set_config_value(settings, key, value);
    } catch (const ConfigError& e) {
      throw ConfigError("config line " + std::to_string(lineno) + ": " + e.what());
    }
  }
}

void apply_config_file(Settings& settings, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  apply_config(settings, in);
}

Settings load_settings(const std::optional<std::string>& explicit_path, const std::string& profile) {
  Settings s = default_settings(profile);
  std::optional<std::string> path = explicit_path;
  if (!path) {
    if (const char* env = std::getenv("RUDDER_CONFIG"); env != nullptr && *env != '\0') path = env;
  }
  if (path) apply_config_file(s, *path);
  s.validate();
  return s;
}

std::vector<std::pair<std::string, std::string>> config_entries(const Settings& settings) {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& [key, field] : fields()) out.emplace_back(key, field.get(settings));
  return out;
}

std::uint64_t config_hash(const Settings& settings) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto mix = [&h](char c) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  };
  for (const auto& [k, v] : config_entries(settings)) {
    for (char c : k) mix(c);
    mix('=');
    for (char c : v) mix(c);
    mix('\n');
  }
  return h;
}

std::string hash_hex(std::uint64_t hash) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(hash));
  return buf;
}

}  // namespace rudder
