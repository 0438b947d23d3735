#pragma once

#include <stdexcept>
#include <string>

namespace elliptica {

/// Base of every numerical failure. The CLI maps these to exit code 3.
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
  virtual const char* kind() const noexcept { return "NumericalError"; }
};

/// |u| crossed the overflow guard before r_max.
class BlowUpError : public NumericalError {
 public:
  BlowUpError(double radius, double value)
      : NumericalError("solution exceeded the blow-up guard at r = " + std::to_string(radius)),
        radius_(radius),
        value_(value) {}
  double radius() const noexcept { return radius_; }
  double value() const noexcept { return value_; }
  const char* kind() const noexcept override { return "BlowUp"; }

 private:
  double radius_;
  double value_;
};

class StepFailureError : public NumericalError {
 public:
  explicit StepFailureError(double radius, const std::string& why = "step size underflow")
      : NumericalError(why + " at r = " + std::to_string(radius)), radius_(radius) {}
  double radius() const noexcept { return radius_; }
  const char* kind() const noexcept override { return "StepFailure"; }

 private:
  double radius_;
};

class NonConvergenceError : public NumericalError {
 public:
  NonConvergenceError(const std::string& what, double best_residual)
      : NumericalError(what), best_residual_(best_residual) {}
  double best_residual() const noexcept { return best_residual_; }
  const char* kind() const noexcept override { return "NonConvergence"; }

 private:
  double best_residual_;
};

class MeshTooCoarseError : public NumericalError {
 public:
  using NumericalError::NumericalError;
  const char* kind() const noexcept override { return "MeshTooCoarse"; }
};

/// A tail that neither settles nor decays to a finite limit (e.g. u ~ -2 ln r).
class NoFiniteLimitError : public NumericalError {
 public:
  NoFiniteLimitError(const std::string& what, double tail_variation)
      : NumericalError(what), tail_variation_(tail_variation) {}
  double tail_variation() const noexcept { return tail_variation_; }
  const char* kind() const noexcept override { return "NoFiniteLimit"; }

 private:
  double tail_variation_;
};

/// A documented precondition (stability on the support, centring, ...) does not hold.
class PreconditionError : public NumericalError {
 public:
  using NumericalError::NumericalError;
  const char* kind() const noexcept override { return "PreconditionFailed"; }
};

}  // namespace elliptica
