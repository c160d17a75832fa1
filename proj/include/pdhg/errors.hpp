#pragma once

#include <stdexcept>
#include <string>

namespace pdhg {

/// Caller violated a documented precondition (dimensions, parameter ranges,
/// malformed configuration).
class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// The requested operation is not available for this operator/geometry kind.
class UnsupportedCapability : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// A computation that cannot fail for valid inputs did fail; some invariant
/// was broken upstream.
class InternalConsistencyError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// An iterative routine hit its iteration cap. `last_value` carries the last
/// iterate value or residual, depending on the routine.
class NotConverged : public std::runtime_error {
 public:
  NotConverged(const std::string& what, double last_value)
      : std::runtime_error(what), last_value_(last_value) {}

  double last_value() const noexcept { return last_value_; }

 private:
  double last_value_;
};

/// Failure inside a solver step, tagged with the iteration that produced it.
class StepError : public std::runtime_error {
 public:
  StepError(const std::string& what, long iteration)
      : std::runtime_error(what), iteration_(iteration) {}

  long iteration() const noexcept { return iteration_; }

 private:
  long iteration_;
};

}  // namespace pdhg
