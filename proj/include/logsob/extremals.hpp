#pragma once

// Equality cases of the log-Sobolev inequality,
//   f(x) = beta exp(-||x - x0||^{p'} / sigma),
// and the weighted Sobolev extremal h(x) = (sigma_{p,A} + |x|^{p'})^{1 - D/p}.

#include <cmath>
#include <limits>
#include <memory>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "logsob/error.hpp"
#include "logsob/functionals.hpp"
#include "logsob/monomial.hpp"
#include "logsob/norms.hpp"
#include "logsob/quadrature.hpp"
#include "logsob/specialfn.hpp"

namespace logsob {

/// How the normalization beta of an extremal was obtained.
enum class BetaSource {
  gaussian_integral,  ///< Euclidean norm: the weighted Gaussian integral in closed form
  ball_closed_form,   ///< Gamma(D/p'+1) m(B_A) (p/sigma)^{-D/p'} with a closed-form m(B_A)
  ball_quadrature,    ///< same, m(B_A) by angular quadrature
};

inline const char* to_string(BetaSource s) {
  switch (s) {
    case BetaSource::gaussian_integral:
      return "gaussian_integral";
    case BetaSource::ball_closed_form:
      return "ball_closed_form";
    case BetaSource::ball_quadrature:
      return "ball_quadrature";
  }
  return "?";
}

struct ExtremalProfile {
  double p = 2.0;
  double pprime = 2.0;
  double sigma = 1.0;
  std::vector<double> center;
  double beta = 1.0;
  NormSpec norm = NormSpec::euclidean();
  MonomialWeight weight = MonomialWeight::unweighted(1);
  BetaSource beta_source = BetaSource::gaussian_integral;
  /// General norm together with a nontrivial weight: equality is known to
  /// hold, but these are not known to be the only equality cases.
  bool conjectural_equality = false;

  double operator()(std::span<const double> x) const {
    std::vector<double> y(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) y[i] = x[i] - center[i];
    return beta * std::exp(-std::pow(norm.norm(y), pprime) / sigma);
  }

  /// -beta (p'/sigma) ||y||^{p'-1} grad||y|| exp(-||y||^{p'}/sigma); zero at the center.
  void gradient(std::span<const double> x, std::span<double> out) const {
    std::vector<double> y(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) y[i] = x[i] - center[i];
    const double r = norm.norm(y);
    if (r == 0.0) {
      std::fill(out.begin(), out.end(), 0.0);
      return;
    }
    try {
      norm.gradient(y, out);
    } catch (const NonDifferentiableError&) {
      // kink of the norm off the center: take the one-sided gradient from the
      // positive side of each vanishing coordinate
      for (double& v : y) {
        if (v == 0.0) v = std::numeric_limits<double>::min();
      }
      norm.gradient(y, out);
    }
    const double c = -beta * (pprime / sigma) * std::pow(r, pprime - 1.0) * std::exp(-std::pow(r, pprime) / sigma);
    for (double& g : out) g *= c;
  }

  /// The profile as a ScalarField with node-placement hints.
  ScalarField field() const {
    auto self = std::make_shared<const ExtremalProfile>(*this);
    ScalarField f;
    f.dimension = weight.n();
    f.eval = [self](std::span<const double> x) { return (*self)(x); };
    f.grad = [self](std::span<const double> x, std::span<double> out) { self->gradient(x, out); };
    f.hints.center = center;
    f.hints.scale = std::pow(sigma, 1.0 / pprime);
    // |y_i| <= ||e_i||_* ||y||: past this radius every integrand of |f|^p is below e^{-80}
    double spread = 0.0;
    for (std::size_t i = 0; i < weight.n(); ++i) {
      std::vector<double> e(weight.n(), 0.0);
      e[i] = 1.0;
      spread = std::max(spread, norm.dual(e));
    }
    f.hints.radius = spread * std::pow(80.0 * sigma / p, 1.0 / pprime);
    return f;
  }
};

/// |beta|^{-p} = int e^{-(p/sigma)||x - x0||^{p'}} x^A dx = Gamma(D/p'+1) m(B_A) (p/sigma)^{-D/p'}.
inline ExtremalProfile log_sobolev_extremal_profile(double p, double sigma, std::span<const double> center,
                                                    const MonomialWeight& w, const NormSpec& norm) {
  if (!(p > 1.0)) throw DomainError("extremal: p must be > 1");
  if (!(sigma > 0.0)) throw DomainError("extremal: sigma must be positive");
  if (norm.dimension() != 0 && norm.dimension() != w.n()) throw DimensionError("extremal: norm dimension mismatch");
  std::vector<double> c(center.begin(), center.end());
  if (c.empty()) c.assign(w.n(), 0.0);
  if (c.size() != w.n()) throw DimensionError("extremal: center has wrong dimension");
  w.require_admissible(c, "extremal");

  ExtremalProfile e;
  e.p = p;
  e.pprime = hoelder_conjugate(p);
  e.sigma = sigma;
  e.center = c;
  e.norm = norm;
  e.weight = w;
  e.conjectural_equality = !norm.is_euclidean() && !w.is_unweighted();
  const double d = w.D();
  double log_mass;
  if (norm.is_euclidean()) {
    log_mass = std::log(gaussian_integral(e.pprime, p / sigma, w));
    e.beta_source = BetaSource::gaussian_integral;
  } else {
    double log_m = log_weighted_ball_measure(norm, w);
    e.beta_source = BetaSource::ball_closed_form;
    if (std::isnan(log_m)) {
      log_m = std::log(weighted_ball_measure_by_quadrature(norm, w, 1e-11).value);
      e.beta_source = BetaSource::ball_quadrature;
    }
    log_mass = log_gamma(d / e.pprime + 1.0) + log_m - (d / e.pprime) * std::log(p / sigma);
  }
  e.beta = std::exp(-log_mass / p);
  return e;
}

inline ScalarField make_log_sobolev_extremal(double p, double sigma, std::span<const double> center,
                                             const MonomialWeight& w, const NormSpec& norm) {
  return log_sobolev_extremal_profile(p, sigma, center, w, norm).field();
}

/// e^{-|x|^2/4} / (2 Pi(A))^{D/4}: the p = 2, sigma = 4 extremal centered at 0.
inline ScalarField reference_gaussian(const MonomialWeight& w) {
  return make_log_sobolev_extremal(2.0, 4.0, std::vector<double>(w.n(), 0.0), w, NormSpec::euclidean());
}

/// int |x|^2 |f|^2 x^A dx.
inline QuadratureResult second_moment(const ScalarField& f, const MonomialWeight& w, const QuadratureSpec& spec) {
  const VectorIntegrand g = [&](std::span<const double> x, std::span<double> out) {
    const double fv = f.eval(x);
    double r2 = 0.0;
    for (double v : x) r2 += v * v;
    out[0] = r2 * fv * fv;
  };
  return integrate_weighted_many(g, 1, w, spec, f.hints)[0];
}

/// sigma_{p,A}: makes int (sigma + |x|^{p'})^{-D} x^A dx = 1, i.e. the Talenti
/// profile has unit L^{p*} mass. The integral is sigma^{-D/p} K with
/// K = (2/p') Pi^{D/2} Gamma(D/p') Gamma(D/p) / (Gamma(D/2) Gamma(D)).
inline double talenti_sigma(double p, const MonomialWeight& w) {
  const double d = w.D();
  if (!(p > 1.0) || !(p < d)) throw DomainError("talenti: requires 1 < p < D");
  const double pp = hoelder_conjugate(p);
  const double log_k = std::log(2.0 / pp) + 0.5 * d * w.log_pi_A() + log_gamma(d / pp) + log_gamma(d / p) -
                       log_gamma(d / 2.0) - log_gamma(d);
  return std::exp((p / d) * log_k);
}

struct TalentiProfile {
  double p = 2.0;
  double pprime = 2.0;
  double d = 3.0;
  double sigma = 1.0;  ///< sigma_{p,A}
  double lambda = 1.0;
  double scale_c = 1.0;
  std::vector<double> center;

  double operator()(std::span<const double> x) const {
    double r2 = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double y = lambda * (x[i] - center[i]);
      r2 += y * y;
    }
    return scale_c * std::pow(sigma + std::pow(r2, 0.5 * pprime), 1.0 - d / p);
  }

  void gradient(std::span<const double> x, std::span<double> out) const {
    double r2 = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double y = lambda * (x[i] - center[i]);
      r2 += y * y;
    }
    const double r = std::sqrt(r2);
    if (r == 0.0) {
      std::fill(out.begin(), out.end(), 0.0);
      return;
    }
    // d/dx_i = c (1 - D/p) (sigma + r^{p'})^{-D/p} p' r^{p'-2} y_i lambda
    const double c = scale_c * (1.0 - d / p) * std::pow(sigma + std::pow(r, pprime), -d / p) * pprime *
                     std::pow(r, pprime - 2.0) * lambda;
    for (std::size_t i = 0; i < x.size(); ++i) out[i] = c * lambda * (x[i] - center[i]);
  }
};

/// scale_c * h_{p,A}(lambda (x - x0)).
inline ScalarField make_talenti(double p, const MonomialWeight& w, double lambda, std::span<const double> center,
                                double scale_c = 1.0) {
  if (!(lambda > 0.0)) throw DomainError("talenti: lambda must be positive");
  TalentiProfile t;
  t.p = p;
  t.d = w.D();
  t.sigma = talenti_sigma(p, w);
  t.pprime = hoelder_conjugate(p);
  t.lambda = lambda;
  t.scale_c = scale_c;
  t.center.assign(center.begin(), center.end());
  if (t.center.empty()) t.center.assign(w.n(), 0.0);
  if (t.center.size() != w.n()) throw DimensionError("talenti: center has wrong dimension");
  w.require_admissible(t.center, "talenti");
  auto self = std::make_shared<const TalentiProfile>(t);
  ScalarField f;
  f.dimension = w.n();
  f.eval = [self](std::span<const double> x) { return (*self)(x); };
  f.grad = [self](std::span<const double> x, std::span<double> out) { self->gradient(x, out); };
  f.hints.center = t.center;
  f.hints.scale = std::pow(t.sigma, 1.0 / t.pprime) / lambda;
  return f;
}

}  // namespace logsob
