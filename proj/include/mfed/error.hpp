#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace mfed {

/// Base of every error the library throws. Data problems (bad files, bad
/// shapes, bad answers) derive from this; the CLI maps them to exit code 2.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class WindowOutOfBounds : public Error {
 public:
  using Error::Error;
};

class ShapeError : public Error {
 public:
  using Error::Error;
};

class FormatError : public Error {
 public:
  using Error::Error;
};

class InsufficientData : public Error {
 public:
  using Error::Error;
};

class ClockRegression : public Error {
 public:
  ClockRegression(double previous, double now)
      : Error("clock regression: " + std::to_string(now) + " < " + std::to_string(previous)) {}
};

class InvalidAnswer : public Error {
 public:
  using Error::Error;
};

class InvalidTransition : public Error {
 public:
  using Error::Error;
};

class UnknownHome : public Error {
 public:
  using Error::Error;
};

/// Errors tied to a line of an input file. `line()` is 1-based and counts the
/// header.
class LineError : public Error {
 public:
  LineError(const std::string& what, std::size_t line)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class ParseError : public LineError {
 public:
  using LineError::LineError;
};

class NonMonotonicTimestamp : public LineError {
 public:
  using LineError::LineError;
};

}  // namespace mfed
