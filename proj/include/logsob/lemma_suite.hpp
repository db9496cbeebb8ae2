#pragma once

// Closed forms of the monomial module checked against the adaptive
// quadrature scheme over a parameter matrix.
//
//   gaussian   int e^{-t|x-x0|^a} x^A dx and its |x-x0|^a moment
//   cauchy     int (1 + s|x-x0|^a)^{-b} x^A dx
//   ball       A_l, through int e^{-|||z|||^{p'}} dz = Gamma(N/p'+1) A_l, and
//              by angular quadrature of the ball where N > 3
//   product    int (1 + s|||z-z0|||^a)^{-b} dz

#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <string>
#include <vector>

#include "logsob/error.hpp"
#include "logsob/monomial.hpp"
#include "logsob/norms.hpp"
#include "logsob/quadrature.hpp"
#include "logsob/specialfn.hpp"

namespace logsob {

struct LemmaCheck {
  std::string lemma;  ///< gaussian, gaussian_moment, cauchy, ball_volume, product_cauchy
  std::string label;  ///< parameters of the case
  double closed_form = 0.0;
  double quadrature = 0.0;
  double quadrature_err = 0.0;
  double rel_error = 0.0;
  bool pass = false;
};

struct LemmaSuiteOptions {
  double rel_tol = 1e-6;  ///< pass threshold on |quadrature / closed form - 1|
  QuadratureSpec spec = [] {
    QuadratureSpec s;
    s.scheme = Scheme::adaptive;
    s.rel_tol = 3e-7;
    s.max_subdivisions = 400;
    return s;
  }();
  std::size_t max_n = 3;
  std::vector<double> exponent_values = {0.0, 0.5, 1.0, 2.0};
  std::vector<double> alphas = {1.5, 2.0, 3.0};
  std::vector<double> scales = {0.5, 1.0, 2.0};  ///< t for the Gaussian, sigma for the Cauchy integrals
  double free_center = 0.25;                     ///< center coordinate on axes with A_i = 0
};

struct LemmaSuiteReport {
  std::vector<LemmaCheck> rows;
  double seconds = 0.0;

  bool all_pass() const {
    for (const auto& r : rows) {
      if (!r.pass) return false;
    }
    return !rows.empty();
  }
  double worst_rel_error() const {
    double w = 0.0;
    for (const auto& r : rows) w = std::max(w, std::isfinite(r.rel_error) ? r.rel_error : INFINITY);
    return w;
  }
  std::size_t failures() const {
    std::size_t f = 0;
    for (const auto& r : rows) f += r.pass ? 0 : 1;
    return f;
  }
};

/// Nondecreasing exponent vectors of length 1..max_n drawn from `values`.
inline std::vector<std::vector<double>> exponent_multisets(std::size_t max_n, const std::vector<double>& values) {
  std::vector<std::vector<double>> out;
  std::vector<std::size_t> idx;
  for (std::size_t n = 1; n <= max_n; ++n) {
    idx.assign(n, 0);
    while (true) {
      std::vector<double> a(n);
      for (std::size_t i = 0; i < n; ++i) a[i] = values[idx[i]];
      out.push_back(a);
      std::size_t i = n;
      while (i > 0 && idx[i - 1] + 1 == values.size()) --i;
      if (i == 0) break;
      ++idx[i - 1];
      for (std::size_t j = i; j < n; ++j) idx[j] = idx[i - 1];
    }
  }
  return out;
}

namespace detail {

inline std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

inline void add_check(LemmaSuiteReport& rep, std::string lemma, std::string label, double exact,
                      const QuadratureResult& q, double tol) {
  LemmaCheck c;
  c.lemma = std::move(lemma);
  c.label = std::move(label);
  c.closed_form = exact;
  c.quadrature = q.value;
  c.quadrature_err = q.err;
  c.rel_error = std::abs(q.value / exact - 1.0);
  c.pass = c.rel_error <= tol;
  rep.rows.push_back(std::move(c));
}

inline void add_failure(LemmaSuiteReport& rep, std::string lemma, std::string label, double exact,
                        const QuadratureError& e) {
  LemmaCheck c;
  c.lemma = std::move(lemma);
  c.label = std::move(label) + " (quadrature failed: " + e.what() + ")";
  c.closed_form = exact;
  c.quadrature = e.best_estimate();
  c.quadrature_err = e.error_estimate();
  c.rel_error = std::abs(e.best_estimate() / exact - 1.0);
  c.pass = false;
  rep.rows.push_back(std::move(c));
}

// One adaptive pass per (A, alpha): both Gaussian forms at every t and the
// Cauchy form at every sigma for beta = D/alpha + 1 and D/alpha + 2.
inline void weighted_cell(LemmaSuiteReport& rep, const std::vector<double>& a, double alpha,
                          const LemmaSuiteOptions& opt) {
  const MonomialWeight w(a);
  const double d = w.D();
  std::vector<double> x0(a.size(), 0.0);
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] == 0.0) x0[i] = opt.free_center;
  }
  const std::vector<double>& s = opt.scales;
  const std::size_t m = s.size();
  const std::array<double, 2> betas = {d / alpha + 1.0, d / alpha + 2.0};
  const VectorIntegrand g = [&](std::span<const double> x, std::span<double> out) {
    double r2 = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) r2 += (x[i] - x0[i]) * (x[i] - x0[i]);
    const double ra = std::pow(r2, 0.5 * alpha);
    for (std::size_t k = 0; k < m; ++k) {
      const double e = std::exp(-s[k] * ra);
      out[k] = e;
      out[m + k] = ra * e;
      out[2 * m + k] = std::pow(1.0 + s[k] * ra, -betas[0]);
      out[3 * m + k] = std::pow(1.0 + s[k] * ra, -betas[1]);
    }
  };
  const std::string base = "A=" + w.describe() + " alpha=" + fmt(alpha);
  std::vector<double> exact(4 * m);
  for (std::size_t k = 0; k < m; ++k) {
    exact[k] = gaussian_integral(alpha, s[k], w, x0);
    exact[m + k] = gaussian_integral(alpha, s[k], w, x0, true);
    exact[2 * m + k] = cauchy_integral(alpha, betas[0], s[k], w, x0);
    exact[3 * m + k] = cauchy_integral(alpha, betas[1], s[k], w, x0);
  }
  auto label = [&](std::size_t j) {
    const std::size_t k = j % m;
    if (j < 2 * m) return base + " t=" + fmt(s[k]);
    return base + " beta=" + fmt(betas[j / m - 2]) + " sigma=" + fmt(s[k]);
  };
  auto lemma = [&](std::size_t j) {
    return std::string(j < m ? "gaussian" : j < 2 * m ? "gaussian_moment" : "cauchy");
  };
  FieldHints hints;
  hints.center = x0;
  try {
    const auto r = integrate_weighted_many(g, 4 * m, w, opt.spec, hints);
    for (std::size_t j = 0; j < 4 * m; ++j) add_check(rep, lemma(j), label(j), exact[j], r[j], opt.rel_tol);
  } catch (const QuadratureError& e) {
    for (std::size_t j = 0; j < 4 * m; ++j) add_failure(rep, lemma(j), label(j), exact[j], e);
  }
}

// |||z||| for the product of l copies of |.| on R: the l^{p'} norm of z.
inline double product_norm_1d(std::span<const double> z, std::span<const double> z0, double pprime) {
  double s = 0.0;
  for (std::size_t i = 0; i < z.size(); ++i) s += std::pow(std::abs(z[i] - z0[i]), pprime);
  return std::pow(s, 1.0 / pprime);
}

inline void product_cells(LemmaSuiteReport& rep, const LemmaSuiteOptions& opt) {
  const std::vector<double> pprimes = {1.5, 2.0, 3.0};
  for (std::size_t l : {std::size_t{2}, std::size_t{3}}) {
    const int big_n = static_cast<int>(l);
    const MonomialWeight flat = MonomialWeight::unweighted(l);
    std::vector<double> z0(l);
    for (std::size_t i = 0; i < l; ++i) z0[i] = opt.free_center * static_cast<double>(i + 1);
    FieldHints hints;
    hints.center = z0;
    for (double pp : pprimes) {
      const double a_l = product_ball_volume(1, static_cast<long long>(l), pp, 2.0);
      const std::string base = "n=1 l=" + std::to_string(l) + " p'=" + fmt(pp);
      // A_l through the layer-cake identity
      {
        const VectorIntegrand g = [&](std::span<const double> z, std::span<double> out) {
          out[0] = std::exp(-std::pow(product_norm_1d(z, z0, pp), pp));
        };
        const double exact = a_l * gamma_fn(big_n / pp + 1.0);
        try {
          add_check(rep, "ball_volume", base, exact, integrate_weighted_many(g, 1, flat, opt.spec, hints)[0],
                    opt.rel_tol);
        } catch (const QuadratureError& e) {
          add_failure(rep, "ball_volume", base, exact, e);
        }
      }
      for (double alpha : opt.alphas) {
        const std::array<double, 2> betas = {big_n / alpha + 1.0, big_n / alpha + 2.0};
        const std::size_t m = opt.scales.size();
        const VectorIntegrand g = [&](std::span<const double> z, std::span<double> out) {
          const double ra = std::pow(product_norm_1d(z, z0, pp), alpha);
          for (std::size_t k = 0; k < m; ++k) {
            out[k] = std::pow(1.0 + opt.scales[k] * ra, -betas[0]);
            out[m + k] = std::pow(1.0 + opt.scales[k] * ra, -betas[1]);
          }
        };
        std::vector<double> exact(2 * m);
        std::vector<std::string> labels(2 * m);
        for (std::size_t j = 0; j < 2 * m; ++j) {
          const double beta = betas[j / m];
          const double sigma = opt.scales[j % m];
          exact[j] = product_cauchy_integral(alpha, beta, sigma, big_n, a_l);
          labels[j] = base + " alpha=" + fmt(alpha) + " beta=" + fmt(beta) + " sigma=" + fmt(sigma);
        }
        try {
          const auto r = integrate_weighted_many(g, 2 * m, flat, opt.spec, hints);
          for (std::size_t j = 0; j < 2 * m; ++j) {
            add_check(rep, "product_cauchy", labels[j], exact[j], r[j], opt.rel_tol);
          }
        } catch (const QuadratureError& e) {
          for (std::size_t j = 0; j < 2 * m; ++j) add_failure(rep, "product_cauchy", labels[j], exact[j], e);
        }
      }
    }
  }
  // N = 4: the Euclidean-block ball volume by angular quadrature
  for (double pp : pprimes) {
    const NormSpec prod = NormSpec::product(NormSpec::euclidean(2), 2, pp);
    const double exact = product_ball_volume(2, 2, pp, std::numbers::pi);
    const std::string label = "n=2 l=2 p'=" + fmt(pp) + " (angular)";
    try {
      add_check(rep, "ball_volume", label, exact, unit_ball_volume_by_quadrature(prod, 4, 1e-9), opt.rel_tol);
    } catch (const QuadratureError& e) {
      add_failure(rep, "ball_volume", label, exact, e);
    }
  }
}

}  // namespace detail

inline LemmaSuiteReport run_lemma_suite(const LemmaSuiteOptions& opt = {}) {
  if (!(opt.rel_tol > 0.0)) throw DomainError("lemma suite: rel_tol must be positive");
  opt.spec.validate();
  const auto t0 = std::chrono::steady_clock::now();
  LemmaSuiteReport rep;
  for (const auto& a : exponent_multisets(opt.max_n, opt.exponent_values)) {
    for (double alpha : opt.alphas) detail::weighted_cell(rep, a, alpha, opt);
  }
  detail::product_cells(rep, opt);
  rep.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return rep;
}

}  // namespace logsob
