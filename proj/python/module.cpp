#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "rudder/config.hpp"
#include "rudder/error.hpp"
#include "rudder/mapping.hpp"
#include "rudder/pipeline.hpp"
#include "rudder/robot_sim.hpp"
#include "rudder/service.hpp"
#include "rudder/spring_rig.hpp"
#include "rudder/telemetry.hpp"
#include "rudder/wire.hpp"

namespace py = pybind11;
using namespace rudder;

namespace {

using Triple = std::tuple<double, double, double>;

Settings settings_for(const std::string& profile, const std::optional<std::string>& config_text) {
  Settings s = default_settings(profile);
  if (config_text) {
    std::istringstream in(*config_text);
    apply_config(s, in);
  }
  s.validate();
  return s;
}

std::string log_text(const SessionLog& log) {
  std::ostringstream out;
  write_session_log(out, log);
  return out.str();
}

SessionLog parse_log(const std::string& text) {
  std::istringstream in(text);
  return read_session_log(in);
}

py::dict message_dict(const WireMessage& msg) {
  py::dict d;
  d["type"] = std::string(message_type(msg));
  std::visit(
      [&](const auto& m) {
        using T = std::decay_t<decltype(m)>;
        d["seq"] = m.seq;
        d["t"] = m.t;
        if constexpr (std::is_same_v<T, CmdMsg>) {
          d["vx"] = m.vx;
          d["vy"] = m.vy;
          d["wz"] = m.wz;
        } else if constexpr (std::is_same_v<T, EffortMsg>) {
          d["roll"] = m.roll;
          d["pitch"] = m.pitch;
          d["yaw"] = m.yaw;
          d["engaged"] = m.engaged;
        } else if constexpr (std::is_same_v<T, StateMsg>) {
          d["roll"] = m.roll;
          d["pitch"] = m.pitch;
          d["yaw"] = m.yaw;
          d["vx"] = m.vx;
          d["vy"] = m.vy;
          d["wz"] = m.wz;
          d["x"] = m.x;
          d["y"] = m.y;
          d["heading"] = m.heading;
          d["event"] = m.event;
        } else if constexpr (std::is_same_v<T, CfgMsg>) {
          d["profile"] = m.profile;
        }
      },
      msg);
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "rudder foot-controller core";

  py::register_exception<Error>(m, "RudderError", PyExc_ValueError);

  py::class_<MappingConfig>(m, "MappingConfig")
      .def(py::init<>())
      .def_readwrite("dead_roll", &MappingConfig::dead_roll)
      .def_readwrite("dead_pitch", &MappingConfig::dead_pitch)
      .def_readwrite("dead_yaw", &MappingConfig::dead_yaw)
      .def_readwrite("stop_rp", &MappingConfig::stop_rp)
      .def_readwrite("stop_yaw", &MappingConfig::stop_yaw)
      .def_readwrite("v_max_x", &MappingConfig::v_max_x)
      .def_readwrite("v_max_y", &MappingConfig::v_max_y)
      .def_readwrite("w_max", &MappingConfig::w_max)
      .def_readwrite("a_max_lin", &MappingConfig::a_max_lin)
      .def_readwrite("a_max_ang", &MappingConfig::a_max_ang)
      .def_readwrite("invert_roll", &MappingConfig::invert_roll)
      .def_readwrite("invert_pitch", &MappingConfig::invert_pitch)
      .def_readwrite("invert_yaw", &MappingConfig::invert_yaw)
      .def_readwrite("smoothing_alpha", &MappingConfig::smoothing_alpha)
      .def("validate", &MappingConfig::validate);

  m.def("day_profile", &day_profile, py::arg("name"));
  m.def("normalize_axis", &normalize_axis, py::arg("angle"), py::arg("dead"), py::arg("stop"));
  m.def(
      "map_to_twist",
      [](double roll, double pitch, double yaw, const MappingConfig& cfg) -> Triple {
        const Twist t = map_to_twist(RudderAttitude{roll, pitch, yaw, 0.0}, cfg);
        return {t.vx, t.vy, t.wz};
      },
      py::arg("roll"), py::arg("pitch"), py::arg("yaw"), py::arg("config") = MappingConfig{});

  // Stateful rate limiter.
  struct Mapper {
    MappingConfig cfg;
    MapperState state;
  };
  py::class_<Mapper>(m, "Mapper")
      .def(py::init([](const MappingConfig& cfg, double t0) {
             cfg.validate();
             return Mapper{cfg, MapperState::at_rest(t0)};
           }),
           py::arg("config") = MappingConfig{}, py::arg("t0") = 0.0)
      .def(
          "step",
          [](Mapper& self, Triple raw, double t) {
            const auto [vx, vy, wz] = raw;
            const TwistCommand c = rate_limit(Twist{vx, vy, wz}, self.state, t, self.cfg);
            return py::make_tuple(c.vx, c.vy, c.wz, c.seq);
          },
          py::arg("raw"), py::arg("t"));

  m.def(
      "rig_advance",
      [](Triple angles, Triple velocities, Triple torques, double dt) {
        RigState s;
        std::tie(s.roll.angle, s.pitch.angle, s.yaw.angle) = angles;
        std::tie(s.roll.velocity, s.pitch.velocity, s.yaw.velocity) = velocities;
        FootEffort e;
        std::tie(e.torque_roll, e.torque_pitch, e.torque_yaw) = torques;
        e.engaged = true;
        const RigState n = advance(s, e, dt, SpringRigConfig{});
        return py::make_tuple(Triple{n.roll.angle, n.pitch.angle, n.yaw.angle},
                              Triple{n.roll.velocity, n.pitch.velocity, n.yaw.velocity});
      },
      py::arg("angles"), py::arg("velocities"), py::arg("torques"), py::arg("dt"),
      "Advance the default spring rig by dt under constant torques; returns (angles, velocities).");
  m.def(
      "settle_time",
      [](Triple angles, Triple velocities, double eps) {
        RigState s;
        std::tie(s.roll.angle, s.pitch.angle, s.yaw.angle) = angles;
        std::tie(s.roll.velocity, s.pitch.velocity, s.yaw.velocity) = velocities;
        return settle_time(s, SpringRigConfig{}, eps);
      },
      py::arg("angles"), py::arg("velocities") = Triple{0.0, 0.0, 0.0}, py::arg("eps") = 1e-3);

  m.def(
      "integrate",
      [](Triple pose, Triple twist, double dt) -> Triple {
        RobotState s;
        std::tie(s.x, s.y, s.heading) = pose;
        const auto [vx, vy, wz] = twist;
        const RobotState n = integrate(s, Twist{vx, vy, wz}, dt);
        return {n.x, n.y, n.heading};
      },
      py::arg("pose"), py::arg("twist"), py::arg("dt"));
  m.def("arena_names", &preset_names);
  m.def(
      "arena_text",
      [](const std::string& name) {
        std::ostringstream out;
        write_arena(out, load_arena(name));
        return out.str();
      },
      py::arg("name"));

  m.def(
      "parse_message",
      [](const std::string& line) -> py::object {
        const ParseResult r = parse_message(line);
        if (const auto* msg = std::get_if<WireMessage>(&r)) return message_dict(*msg);
        const auto& rej = std::get<Reject>(r);
        py::dict d;
        d["type"] = "REJECT";
        d["reason"] = std::string(reject_reason_name(rej.reason));
        d["detail"] = rej.detail;
        return d;
      },
      py::arg("line"), "Parse one protocol line into a dict; rejects have type 'REJECT'.");
  m.def(
      "format_effort",
      [](std::uint64_t seq, double t, double roll, double pitch, double yaw, bool engaged) {
        return format_message(EffortMsg{seq, t, roll, pitch, yaw, engaged});
      },
      py::arg("seq"), py::arg("t"), py::arg("roll"), py::arg("pitch"), py::arg("yaw"), py::arg("engaged") = true);

  m.def(
      "config_hash",
      [](const std::string& profile, std::optional<std::string> config_text) {
        return hash_hex(config_hash(settings_for(profile, config_text)));
      },
      py::arg("profile") = "day1", py::arg("config_text") = py::none());

  m.def(
      "drive",
      [](const std::string& script, const std::string& profile, const std::string& arena, double duration,
         std::optional<std::string> config_text) {
        DriveOptions d;
        d.settings = settings_for(profile, config_text);
        d.arena = load_arena(arena);
        d.duration = duration;
        std::istringstream in(script);
        d.script = read_effort_script(in);
        DriveResult r;
        {
          py::gil_scoped_release release;
          r = drive_scripted(d);
        }
        std::ostringstream csv;
        export_channels(csv, r.log);
        return py::make_tuple(log_text(r.log), csv.str(), r.emitted);
      },
      py::arg("script"), py::arg("profile") = "day1", py::arg("arena") = "corridor_40m", py::arg("duration") = 60.0,
      py::arg("config_text") = py::none(),
      "Virtual-clock run of an effort script; returns (session_log, channel_csv, emitted_lines).");

  m.def(
      "replay",
      [](const std::string& text) { return log_text(replay(parse_log(text))); }, py::arg("log_text"));

  m.def(
      "analyze",
      [](const std::string& text, double goal_radius) {
        MetricsOptions mo;
        mo.goal_radius = goal_radius;
        const SessionMetrics s = compute_metrics(parse_log(text), mo);
        py::dict d;
        d["completion_time"] = s.completion_time ? py::cast(*s.completion_time) : py::none();
        d["path_length"] = s.path_length;
        d["reversals"] = s.reversals;
        d["time_in_deadzone"] = s.time_in_deadzone;
        d["time_active"] = s.time_active;
        d["deadzone_fraction"] = s.deadzone_fraction;
        d["duration"] = s.duration;
        d["peak_linear"] = s.peak_linear;
        d["peak_angular"] = s.peak_angular;
        d["command_count"] = s.command_count;
        return d;
      },
      py::arg("log_text"), py::arg("goal_radius") = MetricsOptions{}.goal_radius);
}
