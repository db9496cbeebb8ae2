#pragma once

// Gamma-family functions on the positive real axis. Gamma ratios are formed
// in log space throughout; Gamma(l*D) overflows long before the
// tensorization sequences get interesting.

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "logsob/error.hpp"

namespace logsob {

namespace detail {

inline void require_positive(double s, const char* who) {
  if (!(s > 0.0) || !std::isfinite(s)) {
    throw DomainError(std::string(who) + ": argument must be positive and finite, got " +
                      std::to_string(s));
  }
}

}  // namespace detail

/// ln Gamma(s) for s > 0 (std::lgamma with a domain check).
inline double log_gamma(double s) {
  detail::require_positive(s, "log_gamma");
  return std::lgamma(s);
}

/// Gamma(s); overflows to +inf for s above ~171.6, use log_gamma there.
inline double gamma_fn(double s) { return std::exp(log_gamma(s)); }

/// ln of sqrt(2 pi) s^(s - 1/2) e^(-s).
inline double log_stirling_approx(double s) {
  detail::require_positive(s, "log_stirling_approx");
  return 0.5 * std::log(2.0 * std::numbers::pi) + (s - 0.5) * std::log(s) - s;
}

/// sqrt(2 pi) s^(s - 1/2) e^(-s). Throws std::overflow_error when the value is
/// not representable; log_stirling_approx covers that range.
inline double stirling_approx(double s) {
  const double v = std::exp(log_stirling_approx(s));
  if (!std::isfinite(v)) {
    throw std::overflow_error("stirling_approx: overflow, use log_stirling_approx");
  }
  return v;
}

inline double log_beta(double x, double y) {
  detail::require_positive(x, "beta_fn");
  detail::require_positive(y, "beta_fn");
  return log_gamma(x) + log_gamma(y) - log_gamma(x + y);
}

/// Gamma(x) Gamma(y) / Gamma(x + y), evaluated in log space.
inline double beta_fn(double x, double y) { return std::exp(log_beta(x, y)); }

}  // namespace logsob
