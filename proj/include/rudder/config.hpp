#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "rudder/mapping.hpp"
#include "rudder/pose.hpp"
#include "rudder/spring_rig.hpp"

namespace rudder {

struct ServiceSettings {
  double tick_hz = 50.0;
  double watchdog_timeout = 0.5;  // seconds

  friend bool operator==(const ServiceSettings&, const ServiceSettings&) = default;
};

/// Everything configurable about one pipeline.
struct Settings {
  MappingConfig mapping;
  SpringRigConfig rig;
  PoseConfig pose;
  ServiceSettings service;

  void validate() const;
};

/// Defaults with the speed profile `profile` applied.
Settings default_settings(const std::string& profile = "day1");

/// Applies `key = value` lines. Keys are the MappingConfig field names,
/// `rig.<roll|pitch|yaw>.<n_springs|k_spring|damping|inertia|stop|rest>`,
/// `rig.substep`, `service.tick_hz`, `service.watchdog_timeout` and
/// `pose.mount_offset` (four numbers w x y z). Unknown keys, duplicate keys
/// and bad values throw ConfigError naming the line. Does not validate.
void apply_config(Settings& settings, std::istream& in);
void apply_config_file(Settings& settings, const std::string& path);

/// Sets a single key; throws ConfigError.
void set_config_value(Settings& settings, const std::string& key, const std::string& value);

/// Resolves `explicit_path`, falling back to $RUDDER_CONFIG; applies it on
/// top of the profile defaults and validates.
Settings load_settings(const std::optional<std::string>& explicit_path, const std::string& profile = "day1");

/// Canonical (sorted by key) key/value text of every setting.
std::vector<std::pair<std::string, std::string>> config_entries(const Settings& settings);

/// 64-bit FNV-1a over the canonical `key=value\n` lines.
std::uint64_t config_hash(const Settings& settings);
std::string hash_hex(std::uint64_t hash);

}  // namespace rudder
