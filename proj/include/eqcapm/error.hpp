#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace eqcapm {

enum class ErrorKind {
  PoleEncountered,
  InvalidTolerance,
  BoundaryCase,
  HorizonExceeded,
  NonRealResult,
  DomainViolation,
  QuadratureNotConverged,
  InvalidDamping,
  Overflow,
  DegenerateTime,
  IntegrabilityViolation,
  InvalidGrid,
  InvalidArgument,
  ConfigError,
  PricingError,
};

std::string_view to_string(ErrorKind kind) noexcept;

/// Exception carrying a machine-readable kind alongside the message.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// Raised by the Riccati integrator when the solution blows up; records
/// the time reached before the overflow guard tripped.
class PoleError : public Error {
 public:
  PoleError(const std::string& what, double time_reached)
      : Error(ErrorKind::PoleEncountered, what), time_reached_(time_reached) {}

  double time_reached() const noexcept { return time_reached_; }

 private:
  double time_reached_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) {
  throw Error(kind, what);
}

inline void require(bool condition, ErrorKind kind, const std::string& what) {
  if (!condition) fail(kind, what);
}

}  // namespace eqcapm
