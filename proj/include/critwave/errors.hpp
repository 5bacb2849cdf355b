#pragma once

#include <stdexcept>
#include <string>

namespace critwave {

class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Grid or solver parameters that cannot be honored.
class ConfigError : public Error {
public:
  using Error::Error;
};

/// Geometry violation, e.g. a concentrator support leaving the unit square.
class DomainError : public Error {
public:
  using Error::Error;
};

/// Caller broke an operation's precondition.
class PreconditionError : public Error {
public:
  using Error::Error;
};

/// Input for which the requested quantity is undefined (e.g. zero gradient).
class UndefinedInputError : public Error {
public:
  using Error::Error;
};

/// Exponential argument past the 64-bit guard. Carries the offending value so
/// callers can switch to the log-space pipeline.
class OverflowError : public Error {
public:
  OverflowError(const std::string& what, double offending_value)
      : Error(what), value_(offending_value) {}
  double offending_value() const noexcept { return value_; }

private:
  double value_;
};

}  // namespace critwave
