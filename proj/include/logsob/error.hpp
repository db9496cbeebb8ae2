#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace logsob {

/// Argument outside the domain of a function (s <= 0 for log_gamma, p <= 1, inadmissible center, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Vector length does not match the dimension an object was built for.
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Evaluation at a point where a norm (or profile) is not differentiable.
class NonDifferentiableError : public DomainError {
 public:
  using DomainError::DomainError;
};

/// Numerical integration failed: tolerance not reached, or the integrand produced a non-finite value.
/// Carries the best available estimate so callers can still report it.
class QuadratureError : public std::runtime_error {
 public:
  QuadratureError(const std::string& what, double best_estimate, double error_estimate,
                  std::vector<double> location = {})
      : std::runtime_error(what),
        best_estimate_(best_estimate),
        error_estimate_(error_estimate),
        location_(std::move(location)) {}

  double best_estimate() const noexcept { return best_estimate_; }
  double error_estimate() const noexcept { return error_estimate_; }
  /// Node at which a non-finite sample was produced; empty for tolerance failures.
  const std::vector<double>& location() const noexcept { return location_; }

 private:
  double best_estimate_;
  double error_estimate_;
  std::vector<double> location_;
};

/// Iterative procedure stopped without meeting its tolerance.
class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, double residual)
      : std::runtime_error(what), residual_(residual) {}
  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

}  // namespace logsob
