#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace rudder {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A tracker sample or quaternion that cannot represent a rotation.
class InvalidSample : public Error {
 public:
  using Error::Error;
};

/// Invalid or unknown configuration keys / values.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// A lookup by name (profile, arena) that does not exist.
class UnknownName : public Error {
 public:
  using Error::Error;
};

/// Bad arguments or non-finite state handed to a simulation step.
class SimulationError : public Error {
 public:
  using Error::Error;
};

/// Malformed text input. `line()` is 1-based, 0 when not applicable.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : Error(line == 0 ? what : "line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

}  // namespace rudder
