#pragma once

#include <stdexcept>
#include <string>

namespace hydrolab {

// Input that violates a documented invariant. The message names the invariant.
class SpecError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Configuration that the backend cannot handle (e.g. spinors on a warped grid).
class UnsupportedError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// An iterative method failed to meet its tolerance or broke down.
class NumericalError : public std::runtime_error {
 public:
  NumericalError(const std::string& what, double best_residual = -1.0)
      : std::runtime_error(what), best_residual_(best_residual) {}
  double best_residual() const noexcept { return best_residual_; }

 private:
  double best_residual_;
};

// A computed quantity violates an invariant it must satisfy (e.g. G < 0 inside).
class InvariantViolation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace hydrolab
