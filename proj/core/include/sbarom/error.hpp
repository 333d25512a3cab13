#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace sbarom {

/// Precondition or invariant violated by caller-supplied data.
class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Malformed text input. Carries the 1-based line number of the offending row.
class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, const std::string& what);
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// Bad model configuration. Carries the offending key (dotted path).
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string key, const std::string& what);
  const std::string& key() const noexcept { return key_; }

 private:
  std::string key_;
};

/// File could not be opened, read or written.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Numerical integration produced a non-finite state.
class DivergenceError : public std::runtime_error {
 public:
  explicit DivergenceError(double time);
  double time() const noexcept { return time_; }

 private:
  double time_;
};

/// Signal too short or too flat for the requested estimate.
class InsufficientData : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace sbarom
