#pragma once

#include <stdexcept>
#include <string>

namespace t2h {

/// Two images that must share dimensions do not.
class ShapeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Argument outside the documented domain (negative gain, ratio > 1, ...).
class ArgumentError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class CalibrationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A step that needs a reference image ran before calibration finished.
class NotCalibratedError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or truncated session log. `line()` is 1-based; `missing_tick()`
/// is set when the log ended before its footer.
class ReplayError : public std::runtime_error {
 public:
  ReplayError(const std::string& what, std::size_t line, long long missing_tick = -1);
  std::size_t line() const noexcept { return line_; }
  long long missing_tick() const noexcept { return missing_tick_; }
  /// The message without the line prefix.
  const std::string& detail() const noexcept { return detail_; }

 private:
  std::string detail_;
  std::size_t line_;
  long long missing_tick_;
};

class ProtocolError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace t2h
