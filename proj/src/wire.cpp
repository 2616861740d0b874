#include "rudder/wire.hpp"

#include <array>
#include <cmath>
#include <optional>
#include <vector>

#include "rudder/numfmt.hpp"

namespace rudder {

std::string_view reject_reason_name(RejectReason reason) noexcept {
  switch (reason) {
    case RejectReason::UnknownType: return "unknown-type";
    case RejectReason::BadField: return "bad-field";
    case RejectReason::NonFinite: return "non-finite";
    case RejectReason::TooLong: return "too-long";
  }
  return "?";
}

namespace {

enum class Kind { U64, Real, Flag, Events, Name };

struct FieldSpec {
  std::string_view name;
  Kind kind;
};

// Raw parsed values in declared field order.
struct Values {
  std::array<std::uint64_t, 1> u{};
  std::vector<double> reals;
  bool flag = false;
  std::string text;
};

bool event_char(char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_' || c == '.' ||
         c == ':' || c == ',' || c == '-';
}

bool name_char(char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_';
}

template <std::size_t N>
std::optional<Reject> parse_fields(const std::vector<std::string_view>& tokens, const std::array<FieldSpec, N>& spec,
                                   Values& out) {
  std::array<std::optional<std::string_view>, N> raw{};
  for (std::size_t i = 1; i < tokens.size(); ++i) {
    const std::string_view tok = tokens[i];
    const auto eq = tok.find('=');
    if (eq == std::string_view::npos) return Reject{RejectReason::BadField, "token without '='"};
    const std::string_view key = tok.substr(0, eq);
    std::size_t idx = N;
    for (std::size_t k = 0; k < N; ++k) {
      if (spec[k].name == key) idx = k;
    }
    if (idx == N) return Reject{RejectReason::BadField, "unknown field"};
    if (raw[idx]) return Reject{RejectReason::BadField, "duplicate field"};
    raw[idx] = tok.substr(eq + 1);
  }

  out.reals.clear();
  for (std::size_t k = 0; k < N; ++k) {
    if (!raw[k]) return Reject{RejectReason::BadField, "missing field " + std::string(spec[k].name)};
    const std::string_view v = *raw[k];
    switch (spec[k].kind) {
      case Kind::U64: {
        const auto n = parse_u64(v);
        if (!n) return Reject{RejectReason::BadField, "bad integer in " + std::string(spec[k].name)};
        out.u[0] = *n;
        break;
      }
      case Kind::Real: {
        const auto d = parse_double(v);
        if (!d) return Reject{RejectReason::BadField, "bad number in " + std::string(spec[k].name)};
        if (!std::isfinite(*d)) return Reject{RejectReason::NonFinite, std::string(spec[k].name)};
        out.reals.push_back(*d);
        break;
      }
      case Kind::Flag:
        if (v != "0" && v != "1") return Reject{RejectReason::BadField, "flag must be 0 or 1"};
        out.flag = v == "1";
        break;
      case Kind::Events:
        if (v.empty()) return Reject{RejectReason::BadField, "empty event"};
        for (char c : v) {
          if (!event_char(c)) return Reject{RejectReason::BadField, "bad event character"};
        }
        out.text = std::string(v);
        break;
      case Kind::Name:
        if (v.empty() || v.size() > 32) return Reject{RejectReason::BadField, "bad name length"};
        for (char c : v) {
          if (!name_char(c)) return Reject{RejectReason::BadField, "bad name character"};
        }
        out.text = std::string(v);
        break;
    }
  }
  return std::nullopt;
}

constexpr std::array<FieldSpec, 5> kCmd{{{"seq", Kind::U64},
                                         {"t", Kind::Real},
                                         {"vx", Kind::Real},
                                         {"vy", Kind::Real},
                                         {"wz", Kind::Real}}};
constexpr std::array<FieldSpec, 6> kEffort{{{"seq", Kind::U64},
                                            {"t", Kind::Real},
                                            {"roll", Kind::Real},
                                            {"pitch", Kind::Real},
                                            {"yaw", Kind::Real},
                                            {"engaged", Kind::Flag}}};
constexpr std::array<FieldSpec, 12> kState{{{"seq", Kind::U64},
                                            {"t", Kind::Real},
                                            {"roll", Kind::Real},
                                            {"pitch", Kind::Real},
                                            {"yaw", Kind::Real},
                                            {"vx", Kind::Real},
                                            {"vy", Kind::Real},
                                            {"wz", Kind::Real},
                                            {"x", Kind::Real},
                                            {"y", Kind::Real},
                                            {"heading", Kind::Real},
                                            {"event", Kind::Events}}};
constexpr std::array<FieldSpec, 2> kSeqT{{{"seq", Kind::U64}, {"t", Kind::Real}}};
constexpr std::array<FieldSpec, 3> kCfg{{{"seq", Kind::U64}, {"t", Kind::Real}, {"profile", Kind::Name}}};

ParseResult parse_impl(std::string_view line) {
  if (line.size() > kMaxLineBytes + 2) return Reject{RejectReason::TooLong, {}};
  if (!line.empty() && line.back() == '\n') line.remove_suffix(1);
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  if (line.size() > kMaxLineBytes) return Reject{RejectReason::TooLong, {}};

  // Tokens are separated by exactly one space; no other control bytes.
  std::vector<std::string_view> tokens;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= line.size(); ++i) {
    if (i == line.size() || line[i] == ' ') {
      tokens.push_back(line.substr(start, i - start));
      start = i + 1;
    }
  }
  const std::string_view type = tokens.front();
  const bool known = type == "CMD" || type == "EFFORT" || type == "STATE" || type == "CAL" || type == "CFG" ||
                     type == "PING" || type == "PONG";
  if (!known) return Reject{RejectReason::UnknownType, {}};
  for (const auto tok : tokens) {
    if (tok.empty()) return Reject{RejectReason::BadField, "empty token"};
  }

  Values v;
  if (type == "CMD") {
    if (auto r = parse_fields(tokens, kCmd, v)) return *r;
    return WireMessage{CmdMsg{v.u[0], v.reals[0], v.reals[1], v.reals[2], v.reals[3]}};
  }
  if (type == "EFFORT") {
    if (auto r = parse_fields(tokens, kEffort, v)) return *r;
    return WireMessage{EffortMsg{v.u[0], v.reals[0], v.reals[1], v.reals[2], v.reals[3], v.flag}};
  }
  if (type == "STATE") {
    if (auto r = parse_fields(tokens, kState, v)) return *r;
    const auto& d = v.reals;
    return WireMessage{StateMsg{v.u[0], d[0], d[1], d[2], d[3], d[4], d[5], d[6], d[7], d[8], d[9], v.text}};
  }
  if (type == "CFG") {
    if (auto r = parse_fields(tokens, kCfg, v)) return *r;
    return WireMessage{CfgMsg{v.u[0], v.reals[0], v.text}};
  }
  if (auto r = parse_fields(tokens, kSeqT, v)) return *r;
  if (type == "CAL") return WireMessage{CalMsg{v.u[0], v.reals[0]}};
  if (type == "PING") return WireMessage{PingMsg{v.u[0], v.reals[0]}};
  return WireMessage{PongMsg{v.u[0], v.reals[0]}};
}

class LineBuilder {
 public:
  explicit LineBuilder(std::string_view type) : line_(type) {}
  LineBuilder& u(std::string_view k, std::uint64_t v) { return raw(k, std::to_string(v)); }
  LineBuilder& d(std::string_view k, double v) { return raw(k, format_double(v)); }
  LineBuilder& raw(std::string_view k, std::string_view v) {
    line_ += ' ';
    line_ += k;
    line_ += '=';
    line_ += v;
    return *this;
  }
  std::string str() { return std::move(line_); }

 private:
  std::string line_;
};

}  // namespace

ParseResult parse_message(std::string_view line) noexcept {
  try {
    return parse_impl(line);
  } catch (...) {
    return Reject{RejectReason::BadField, "internal parser failure"};
  }
}

std::string format_message(const WireMessage& msg) {
  return std::visit(
      [](const auto& m) -> std::string {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, CmdMsg>) {
          return LineBuilder("CMD").u("seq", m.seq).d("t", m.t).d("vx", m.vx).d("vy", m.vy).d("wz", m.wz).str();
        } else if constexpr (std::is_same_v<T, EffortMsg>) {
          return LineBuilder("EFFORT")
              .u("seq", m.seq)
              .d("t", m.t)
              .d("roll", m.roll)
              .d("pitch", m.pitch)
              .d("yaw", m.yaw)
              .raw("engaged", m.engaged ? "1" : "0")
              .str();
        } else if constexpr (std::is_same_v<T, StateMsg>) {
          return LineBuilder("STATE")
              .u("seq", m.seq)
              .d("t", m.t)
              .d("roll", m.roll)
              .d("pitch", m.pitch)
              .d("yaw", m.yaw)
              .d("vx", m.vx)
              .d("vy", m.vy)
              .d("wz", m.wz)
              .d("x", m.x)
              .d("y", m.y)
              .d("heading", m.heading)
              .raw("event", m.event)
              .str();
        } else if constexpr (std::is_same_v<T, CfgMsg>) {
          return LineBuilder("CFG").u("seq", m.seq).d("t", m.t).raw("profile", m.profile).str();
        } else if constexpr (std::is_same_v<T, CalMsg>) {
          return LineBuilder("CAL").u("seq", m.seq).d("t", m.t).str();
        } else if constexpr (std::is_same_v<T, PingMsg>) {
          return LineBuilder("PING").u("seq", m.seq).d("t", m.t).str();
        } else {
          return LineBuilder("PONG").u("seq", m.seq).d("t", m.t).str();
        }
      },
      msg);
}

std::string_view message_type(const WireMessage& msg) noexcept {
  static constexpr std::array<std::string_view, 7> names{"CMD", "EFFORT", "STATE", "CAL", "CFG", "PING", "PONG"};
  return names[msg.index()];
}

std::uint64_t message_seq(const WireMessage& msg) noexcept {
  return std::visit([](const auto& m) { return m.seq; }, msg);
}

}  // namespace rudder
