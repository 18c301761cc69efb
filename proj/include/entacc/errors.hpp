#pragma once

#include <stdexcept>
#include <string>

namespace entacc {

/// Thrown when a caller passes a value outside an operation's domain.
class InvalidInput : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// A trajectory cannot support the requested analysis (too short, wrong phase).
class InsufficientData : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// An analysis precondition on its inputs was not met.
class PreconditionError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// The ODE integration could not be completed. Carries the last accepted point.
class IntegrationError : public std::runtime_error {
public:
  enum class Kind { StepUnderflow, BlowUp };

  IntegrationError(Kind kind, double last_time, double last_f3, const std::string& what)
      : std::runtime_error(what), kind_(kind), last_time_(last_time), last_f3_(last_f3) {}

  Kind kind() const noexcept { return kind_; }
  double last_time() const noexcept { return last_time_; }
  double last_f3() const noexcept { return last_f3_; }

private:
  Kind kind_;
  double last_time_;
  double last_f3_;
};

}  // namespace entacc
