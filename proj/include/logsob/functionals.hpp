#pragma once

// Mass, entropy and energy of a field, and the log-Sobolev deficit
//   (D/p) ln(L_p * energy) - entropy
// of its unit-mass rescaling. Nonnegative for every admissible field; zero on
// the extremal families.

#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "logsob/error.hpp"
#include "logsob/monomial.hpp"
#include "logsob/norms.hpp"
#include "logsob/quadrature.hpp"

namespace logsob {

struct DeficitReport {
  double p = 0.0;
  double mass = 0.0;     ///< of the field as given
  double entropy = 0.0;  ///< of the unit-mass rescaling
  double energy = 0.0;   ///< of the unit-mass rescaling
  double deficit = 0.0;
  double quadrature_err = 0.0;  ///< propagated absolute error bound on the deficit
  double constant = 0.0;        ///< the sharp constant L_p used
};

namespace detail {

inline void check_field(const ScalarField& f, const MonomialWeight& w, const char* who) {
  if (!f.eval) throw DomainError(std::string(who) + ": field has no evaluator");
  if (f.dimension != w.n()) throw DimensionError(std::string(who) + ": field and weight dimensions differ");
}

// |f|^p log |f|^p with 0 log 0 = 0.
inline double entropy_density(double fv, double p) {
  const double a = std::abs(fv);
  if (a < 1e-300) return 0.0;
  const double ap = std::pow(a, p);
  return ap * p * std::log(a);
}

}  // namespace detail

/// Sharp constant L_p for (w, norm); ball measure by quadrature when no closed form exists.
inline double ls_constant(double p, const MonomialWeight& w, const NormSpec& norm) {
  if (norm.is_euclidean() || has_closed_form_ball_measure(norm, w)) return sharp_ls_constant(p, w, norm);
  const QuadratureResult m = weighted_ball_measure_by_quadrature(norm, w, 1e-10);
  return sharp_ls_constant_from_log_ball(p, w.D(), std::log(m.value));
}

inline double mass(const ScalarField& f, double p, const MonomialWeight& w, const QuadratureSpec& spec) {
  if (!(p >= 1.0)) throw DomainError("mass: p must be >= 1");
  detail::check_field(f, w, "mass");
  const VectorIntegrand g = [&](std::span<const double> x, std::span<double> out) {
    out[0] = std::pow(std::abs(f.eval(x)), p);
  };
  const double m = integrate_weighted_many(g, 1, w, spec, f.hints)[0].value;
  if (!(m > 0.0)) throw DomainError("mass: field has zero mass");
  return m;
}

/// Entropy of a unit-mass field; throws when the mass is off by more than 1e-8.
inline double entropy(const ScalarField& f, double p, const MonomialWeight& w, const QuadratureSpec& spec) {
  if (!(p >= 1.0)) throw DomainError("entropy: p must be >= 1");
  detail::check_field(f, w, "entropy");
  const VectorIntegrand g = [&](std::span<const double> x, std::span<double> out) {
    const double fv = f.eval(x);
    out[0] = std::pow(std::abs(fv), p);
    out[1] = detail::entropy_density(fv, p);
  };
  const auto r = integrate_weighted_many(g, 2, w, spec, f.hints);
  if (std::abs(r[0].value - 1.0) > 1e-8) {
    throw DomainError("entropy: field is not unit mass (mass = " + std::to_string(r[0].value) + ")");
  }
  return r[1].value;
}

inline double energy(const ScalarField& f, double p, const MonomialWeight& w, const NormSpec& norm,
                     const QuadratureSpec& spec) {
  if (!(p >= 1.0)) throw DomainError("energy: p must be >= 1");
  detail::check_field(f, w, "energy");
  std::vector<double> grad(w.n());
  const VectorIntegrand g = [&](std::span<const double> x, std::span<double> out) {
    f.gradient(x, grad);
    out[0] = std::pow(norm.dual(grad), p);
  };
  return integrate_weighted_many(g, 1, w, spec, f.hints)[0].value;
}

/// Deficit of the unit-mass rescaling f / mass^{1/p}; mass, entropy and
/// energy come from one quadrature pass.
inline DeficitReport deficit(const ScalarField& f, double p, const MonomialWeight& w, const NormSpec& norm,
                             const QuadratureSpec& spec) {
  if (!(p > 1.0)) throw DomainError("deficit: p must be > 1");
  detail::check_field(f, w, "deficit");
  std::vector<double> grad(w.n());
  const VectorIntegrand g = [&](std::span<const double> x, std::span<double> out) {
    const double fv = f.eval(x);
    out[0] = std::pow(std::abs(fv), p);
    out[1] = detail::entropy_density(fv, p);
    f.gradient(x, grad);
    out[2] = std::pow(norm.dual(grad), p);
  };
  const auto r = integrate_weighted_many(g, 3, w, spec, f.hints);
  const double m = r[0].value;
  if (!(m > 0.0)) throw DomainError("deficit: field has zero mass");
  if (!(r[2].value > 0.0)) throw DomainError("deficit: field has zero energy");

  DeficitReport rep;
  rep.p = p;
  rep.mass = m;
  rep.constant = ls_constant(p, w, norm);
  rep.entropy = r[1].value / m - std::log(m);
  rep.energy = r[2].value / m;
  const double d = w.D();
  rep.deficit = (d / p) * std::log(rep.constant * rep.energy) - rep.entropy;
  const double rel_m = r[0].err / m;
  const double rel_e = r[2].err / r[2].value;
  rep.quadrature_err =
      (d / p) * (rel_e + rel_m) + r[1].err / m + std::abs(r[1].value / m) * rel_m + rel_m;
  return rep;
}

/// ||f||_{p*, A} / ||grad f||_{p, A}, p* = Dp / (D - p), Euclidean gradient.
inline double sobolev_ratio(const ScalarField& f, double p, const MonomialWeight& w, const QuadratureSpec& spec) {
  const double d = w.D();
  if (!(p > 1.0) || !(p < d)) throw DomainError("sobolev_ratio: requires 1 < p < D");
  detail::check_field(f, w, "sobolev_ratio");
  const double pstar = d * p / (d - p);
  std::vector<double> grad(w.n());
  const VectorIntegrand g = [&](std::span<const double> x, std::span<double> out) {
    out[0] = std::pow(std::abs(f.eval(x)), pstar);
    f.gradient(x, grad);
    out[1] = std::pow(detail::lq_norm(grad, 2.0), p);
  };
  const auto r = integrate_weighted_many(g, 2, w, spec, f.hints);
  if (!(r[1].value > 0.0)) throw DomainError("sobolev_ratio: field has zero gradient energy");
  return std::pow(r[0].value, 1.0 / pstar) / std::pow(r[1].value, 1.0 / p);
}

}  // namespace logsob
