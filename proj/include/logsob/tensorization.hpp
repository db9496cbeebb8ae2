#pragma once

// Product functions F(z) = f(x^1) ... f(x^l) on R^{nl}, the identities they
// satisfy, the tensorized Sobolev constants l C^2_{2,ln,B} and their limit
// L_2(A), and numerical versions of the large-l asymptotics of the
// Talenti-type profiles a_l (1 + b_l |z - z0|^2)^{1 - D_B/2}.

#include <cmath>
#include <limits>
#include <memory>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "logsob/error.hpp"
#include "logsob/extremals.hpp"
#include "logsob/functionals.hpp"
#include "logsob/monomial.hpp"
#include "logsob/norms.hpp"
#include "logsob/quadrature.hpp"
#include "logsob/specialfn.hpp"

namespace logsob {

/// Largest N = n l accepted for product fields that are integrated directly.
inline constexpr std::size_t kMaxProductDimension = 6;

struct TensorConfig {
  std::size_t n = 1;
  std::size_t l = 1;
  double p = 2.0;
  NormSpec base_norm = NormSpec::euclidean();
  MonomialWeight weight = MonomialWeight::unweighted(1);

  std::size_t N() const { return n * l; }
  double D_B() const { return static_cast<double>(l) * weight.D(); }
  MonomialWeight B() const { return weight.repeated(l); }
  NormSpec product_norm() const { return NormSpec::product(base_norm, l, hoelder_conjugate(p)); }
  /// 2_*(B) = 2 D_B / (D_B - 2), D_B > 2.
  double critical_exponent() const {
    const double d = D_B();
    if (!(d > 2.0)) throw DomainError("critical exponent needs D_B > 2");
    return 2.0 * d / (d - 2.0);
  }
};

/// F(z) = prod_i f(x^i), z = (x^1, ..., x^l); gradient assembled blockwise.
inline ScalarField product_field(const ScalarField& f, std::size_t l, bool enforce_cap = true) {
  if (l < 1) throw DomainError("product_field: l must be >= 1");
  if (!f.eval) throw DomainError("product_field: field has no evaluator");
  const std::size_t n = f.dimension;
  if (enforce_cap && n * l > kMaxProductDimension) {
    throw DimensionError("product_field: n l = " + std::to_string(n * l) + " exceeds the quadrature cap of " +
                         std::to_string(kMaxProductDimension));
  }
  auto base = std::make_shared<const ScalarField>(f);
  ScalarField F;
  F.dimension = n * l;
  F.eval = [base, n, l](std::span<const double> z) {
    double v = 1.0;
    for (std::size_t i = 0; i < l; ++i) v *= base->eval(z.subspan(i * n, n));
    return v;
  };
  F.grad = [base, n, l](std::span<const double> z, std::span<double> out) {
    std::vector<double> vals(l);
    for (std::size_t i = 0; i < l; ++i) vals[i] = base->eval(z.subspan(i * n, n));
    for (std::size_t i = 0; i < l; ++i) {
      double others = 1.0;
      for (std::size_t j = 0; j < l; ++j) {
        if (j != i) others *= vals[j];
      }
      auto gi = out.subspan(i * n, n);
      base->gradient(z.subspan(i * n, n), gi);
      for (double& g : gi) g *= others;
    }
  };
  F.hints.scale = f.hints.scale;
  F.hints.radius = f.hints.radius;
  if (!f.hints.center.empty()) {
    for (std::size_t i = 0; i < l; ++i) F.hints.center.insert(F.hints.center.end(), f.hints.center.begin(), f.hints.center.end());
  }
  return F;
}

struct ProductIdentityReport {
  std::size_t l = 1;
  double t = 2.0;
  double p = 2.0;
  double mass_lhs = 0.0;  ///< int |F|^t z^B dz
  double mass_rhs = 0.0;  ///< (int |f|^t x^A dx)^l
  double energy_lhs = 0.0;  ///< int |||grad F|||_*^p z^B dz
  double energy_rhs = 0.0;  ///< l int ||grad f||_*^p x^A dx
  double base_mass = 0.0;   ///< int |f|^p x^A dx, 1 for unit-mass f

  double mass_residual() const { return std::abs(mass_lhs - mass_rhs) / std::abs(mass_rhs); }
  double energy_residual() const { return std::abs(energy_lhs - energy_rhs) / std::abs(energy_rhs); }
};

/// Both sides of the product identities for mass (exponent t) and p-energy
/// with the product norm (sum ||x^i||^{p'})^{1/p'}, whose dual is
/// (sum ||xi^i||_*^p)^{1/p}. The energy identity needs unit L^p mass of f.
inline ProductIdentityReport verify_product_identities(const ScalarField& f, std::size_t l, double t, double p,
                                                       const MonomialWeight& w, const NormSpec& norm,
                                                       const QuadratureSpec& spec) {
  if (!(t >= 1.0)) throw DomainError("product identities: t must be >= 1");
  if (!(p > 1.0)) throw DomainError("product identities: p must be > 1");
  if (f.dimension != w.n()) throw DimensionError("product identities: field and weight dimensions differ");
  const ScalarField F = product_field(f, l);
  const MonomialWeight B = w.repeated(l);
  const NormSpec pnorm = NormSpec::product(norm, l, hoelder_conjugate(p));

  ProductIdentityReport r;
  r.l = l;
  r.t = t;
  r.p = p;
  {
    std::vector<double> grad(w.n());
    const VectorIntegrand g = [&](std::span<const double> x, std::span<double> out) {
      const double fv = std::abs(f.eval(x));
      out[0] = std::pow(fv, t);
      out[1] = std::pow(fv, p);
      f.gradient(x, grad);
      out[2] = std::pow(norm.dual(grad), p);
    };
    const auto base = integrate_weighted_many(g, 3, w, spec, f.hints);
    r.mass_rhs = std::pow(base[0].value, static_cast<double>(l));
    r.base_mass = base[1].value;
    r.energy_rhs = static_cast<double>(l) * base[2].value;
  }
  {
    std::vector<double> grad(F.dimension);
    const VectorIntegrand g = [&](std::span<const double> z, std::span<double> out) {
      out[0] = std::pow(std::abs(F.eval(z)), t);
      F.gradient(z, grad);
      out[1] = std::pow(pnorm.dual(grad), p);
    };
    const auto lifted = integrate_weighted_many(g, 2, B, spec, F.hints);
    r.mass_lhs = lifted[0].value;
    r.energy_lhs = lifted[1].value;
  }
  return r;
}

// ---- tensorized Sobolev constants ----

/// ln m(B_B) for B = (A, ..., A): Pi(B) = Pi(A) and D_B = l D.
inline double log_repeated_ball_measure(const MonomialWeight& w, double l) {
  const double db = l * w.D();
  return 0.5 * db * w.log_pi_A() - log_gamma(0.5 * db + 1.0);
}

/// l C^2_{2, ln, B} from the sharp Sobolev constant with D_B = l D.
inline double tensorized_constant(const MonomialWeight& w, double l) {
  const double db = l * w.D();
  if (!(db > 2.0)) throw DomainError("tensorized constant: needs l D > 2");
  return l * std::exp(2.0 * log_sharp_sobolev_constant(2.0, db, log_repeated_ball_measure(w, l)));
}

/// The same quantity in reduced form
///   (1/D) Pi^{-e} (1/(lD - 2)) [Gamma(lD) / Gamma(lD/2)]^{2/(lD)},
/// with e = 1 (the correct exponent) or e = 2/D.
inline double tensorized_constant_reduced(const MonomialWeight& w, double l, bool pi_exponent_two_over_d = false) {
  const double d = w.D();
  const double db = l * d;
  if (!(db > 2.0)) throw DomainError("tensorized constant: needs l D > 2");
  const double e = pi_exponent_two_over_d ? 2.0 / d : 1.0;
  const double log_v = -std::log(d) - e * w.log_pi_A() - std::log(db - 2.0) +
                       (2.0 / db) * (log_gamma(db) - log_gamma(0.5 * db));
  return std::exp(log_v);
}

/// One row of a convergence table.
struct ConvergenceRow {
  double l = 0.0;
  double value = 0.0;
  double target = 0.0;
  double rel_error = 0.0;
};

inline std::vector<ConvergenceRow> tensorized_constant_sequence(const MonomialWeight& w,
                                                                const std::vector<double>& l_list) {
  const double target = sharp_ls_constant(2.0, w);
  std::vector<ConvergenceRow> rows;
  rows.reserve(l_list.size());
  for (double l : l_list) {
    const double v = tensorized_constant(w, l);
    rows.push_back({l, v, target, std::abs(v / target - 1.0)});
  }
  return rows;
}

/// 10, 100, ..., up to l_max.
inline std::vector<double> log_grid(double l_min, double l_max) {
  std::vector<double> out;
  for (double l = l_min; l <= l_max * (1.0 + 1e-12); l *= 10.0) out.push_back(std::round(l));
  return out;
}

inline bool errors_decreasing(const std::vector<ConvergenceRow>& rows) {
  for (std::size_t i = 1; i < rows.size(); ++i) {
    if (!(rows[i].rel_error < rows[i - 1].rel_error)) return false;
  }
  return true;
}

// ---- large-l asymptotics, Euclidean weighted case ----

/// ln a_l from the unit-mass condition
///   a_l^2 (Pi / b_l)^{D_B/2} Gamma(D_B/2 - 2) / Gamma(D_B - 2) = 1.
inline double log_a_l(const MonomialWeight& w, double l, double b_l) {
  const double db = l * w.D();
  if (!(db > 4.0)) throw DomainError("asymptotics: needs l D > 4");
  if (!(b_l > 0.0)) throw DomainError("asymptotics: b_l must be positive");
  const double log_mass = 0.5 * db * (w.log_pi_A() - std::log(b_l)) + log_gamma(0.5 * db - 2.0) - log_gamma(db - 2.0);
  return -0.5 * log_mass;
}

/// a_l^{1/l} / (2 D l b_l / (e Pi(A)))^{D/4} with b_l = b_tilde / l; tends to 1.
inline double asymptotic_ab_check(const MonomialWeight& w, double b_tilde, double l) {
  if (!(b_tilde > 0.0)) throw DomainError("asymptotics: b_tilde must be positive");
  const double d = w.D();
  const double b_l = b_tilde / l;
  const double log_root = log_a_l(w, l, b_l) / l;
  const double log_target = 0.25 * d * (std::log(2.0 * d * l * b_l) - 1.0 - w.log_pi_A());
  return std::exp(log_root - log_target);
}

/// Arbitrary-norm unweighted version: exact a_l from the unit-L^p-mass
/// condition for a_l (1 + b_l |||z - z0|||^{p'})^{1 - N/p} (needs N > p^2),
/// divided by C(n,p) (p^{p'/p} n / e)^{n/(p p')} (l b_l)^{n/(p p')}, with
/// C(n,p) = (n/p')^{-1/p} m(B^n)^{-1/p} Gamma(n/p')^{-1/p}.
inline double asymptotic_ab_check_p(int n, double p, double m_ball, double b_tilde, long long l) {
  if (!(b_tilde > 0.0)) throw DomainError("asymptotics: b_tilde must be positive");
  const double pp = hoelder_conjugate(p);
  const double dn = n;
  const double dl = static_cast<double>(l);
  const double big_n = dn * dl;
  if (!(big_n > p * p)) throw DomainError("asymptotics: needs N = n l > p^2");
  const double b_l = b_tilde / dl;
  const double log_al = log_product_ball_volume(n, l, pp, m_ball);
  const double log_mass = log_product_cauchy_integral(pp, big_n - p, b_l, big_n, log_al);
  const double log_root = -log_mass / (p * dl);
  const double log_c = -(1.0 / p) * (std::log(dn / pp) + std::log(m_ball) + log_gamma(dn / pp));
  const double log_target =
      log_c + (dn / (p * pp)) * ((pp / p) * std::log(p) + std::log(dn) - 1.0 + std::log(dl * b_l));
  return std::exp(log_root - log_target);
}

/// How b_l depends on l in a profile family.
enum class BRegime {
  scaled,    ///< b_l = b / l: the only regime with a nontrivial limit
  constant,  ///< b_l = b
  growing,   ///< b_l = b l
};

inline double b_of_l(BRegime regime, double b, double l) {
  switch (regime) {
    case BRegime::scaled:
      return b / l;
    case BRegime::constant:
      return b;
    case BRegime::growing:
      return b * l;
  }
  return b;
}

/// f_l(x) = a_l^{1/l} (1 + b_l |x - x0|^2)^{1 - l D/2} with a_l exact.
inline double profile_value(const MonomialWeight& w, double l, double b_l, std::span<const double> x,
                            std::span<const double> x0) {
  double r2 = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double y = x[i] - (x0.empty() ? 0.0 : x0[i]);
    r2 += y * y;
  }
  const double log_v = log_a_l(w, l, b_l) / l + (1.0 - 0.5 * l * w.D()) * std::log1p(b_l * r2);
  return std::exp(log_v);
}

/// (2 D b / (e Pi))^{D/4} exp(-(D/2) b |x - x0|^2).
inline double profile_limit_value(const MonomialWeight& w, double b_tilde, std::span<const double> x,
                                  std::span<const double> x0) {
  const double d = w.D();
  double r2 = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double y = x[i] - (x0.empty() ? 0.0 : x0[i]);
    r2 += y * y;
  }
  return std::exp(0.25 * d * (std::log(2.0 * d * b_tilde) - 1.0 - w.log_pi_A()) - 0.5 * d * b_tilde * r2);
}

/// The one-dimensional reference grid: `count` points evenly spaced on [x0 - half_width, x0 + half_width].
inline std::vector<std::vector<double>> line_grid(double x0 = 0.0, double half_width = 3.0, int count = 33) {
  std::vector<std::vector<double>> g;
  for (int i = 0; i < count; ++i) g.push_back({x0 - half_width + 2.0 * half_width * i / (count - 1)});
  return g;
}

/// sup over the grid of |f_l - f_inf| for each l, b_l = b_tilde / l.
inline std::vector<double> profile_limit_check(const MonomialWeight& w, double b_tilde, const std::vector<double>& l_list,
                                               const std::vector<std::vector<double>>& grid,
                                               std::span<const double> x0 = {}) {
  std::vector<double> out;
  for (double l : l_list) {
    double sup = 0.0;
    for (const auto& x : grid) {
      const double diff = std::abs(profile_value(w, l, b_tilde / l, x, x0) - profile_limit_value(w, b_tilde, x, x0));
      sup = std::max(sup, diff);
    }
    out.push_back(sup);
  }
  return out;
}

/// sup over the grid of f_l in the given regime, skipping x0 itself (where
/// f_l(x0) = a_l^{1/l} blows up outside the scaled regime).
inline std::vector<double> profile_sup(const MonomialWeight& w, BRegime regime, double b,
                                       const std::vector<double>& l_list, const std::vector<std::vector<double>>& grid,
                                       std::span<const double> x0 = {}) {
  std::vector<double> out;
  for (double l : l_list) {
    double sup = 0.0;
    for (const auto& x : grid) {
      bool at_center = true;
      for (std::size_t i = 0; i < x.size(); ++i) {
        if (x[i] != (x0.empty() ? 0.0 : x0[i])) at_center = false;
      }
      if (at_center) continue;
      sup = std::max(sup, profile_value(w, l, b_of_l(regime, b, l), x, x0));
    }
    out.push_back(sup);
  }
  return out;
}

// ---- limit of L^t means ----

struct MeanLimitReport {
  std::vector<double> t;
  std::vector<double> means;  ///< (int |g|^t dmu)^{1/t}
  double target = 0.0;        ///< exp(int log|g| dmu)
  double raw_error = 0.0;     ///< relative error at the smallest t
  double extrapolated = 0.0;  ///< Richardson value from the two smallest t
  double extrapolated_error = 0.0;
};

/// For a probability measure mu = |f|^2 x^A dx (f unit L^2 mass) checks
/// (int |g|^t dmu)^{1/t} -> exp(int log|g| dmu) as t -> 0 along t = 1, 1/2, ..., 2^{-halvings}.
inline MeanLimitReport mean_limit_check(const ScalarField& g, const ScalarField& f, const MonomialWeight& w,
                                        const QuadratureSpec& spec, int halvings = 6) {
  MeanLimitReport r;
  for (int k = 0; k <= halvings; ++k) r.t.push_back(std::ldexp(1.0, -k));
  const std::size_t m = r.t.size();
  const VectorIntegrand h = [&](std::span<const double> x, std::span<double> out) {
    const double fv = f.eval(x);
    const double mu = fv * fv;
    const double gv = std::abs(g.eval(x));
    const double lg = gv > 0.0 ? std::log(gv) : -std::numeric_limits<double>::infinity();
    out[0] = mu;
    out[1] = mu > 0.0 ? mu * lg : 0.0;
    for (std::size_t k = 0; k < m; ++k) out[2 + k] = mu * std::pow(gv, r.t[k]);
  };
  const auto v = integrate_weighted_many(h, m + 2, w, spec, f.hints);
  const double total = v[0].value;
  r.target = std::exp(v[1].value / total);
  for (std::size_t k = 0; k < m; ++k) r.means.push_back(std::pow(v[2 + k].value / total, 1.0 / r.t[k]));
  r.raw_error = std::abs(r.means.back() / r.target - 1.0);
  // the mean is analytic in t with a linear leading term
  r.extrapolated = 2.0 * r.means[m - 1] - r.means[m - 2];
  r.extrapolated_error = std::abs(r.extrapolated / r.target - 1.0);
  return r;
}

/// product_ball_volume against angular quadrature of the product-norm unit ball.
struct VolumeCheck {
  double closed_form = 0.0;
  double quadrature = 0.0;
  double rel_error = 0.0;
};

inline VolumeCheck product_volume_check(const NormSpec& base, int n, std::size_t l, double pprime,
                                        double rel_tol = 1e-8) {
  const double m_ball = std::exp(log_weighted_ball_measure(base, MonomialWeight::unweighted(n)));
  VolumeCheck c;
  c.closed_form = product_ball_volume(n, static_cast<long long>(l), pprime, m_ball);
  c.quadrature = unit_ball_volume_by_quadrature(NormSpec::product(base, l, pprime), n * l, rel_tol).value;
  c.rel_error = std::abs(c.quadrature / c.closed_form - 1.0);
  return c;
}

}  // namespace logsob
