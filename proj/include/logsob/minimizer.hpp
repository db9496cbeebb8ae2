#pragma once

// Derivative-free search for deficit minimizers over small parametric
// families (GSL's Nelder-Mead simplex), and the L^2 distance of a minimizer to
// the nearest extremal.
//
// The deficit is invariant under f -> c f, under dilations and under
// admissible translations. Parameters that only move along those directions
// (the "gauge" parameters: sigma and the center for the stretched
// exponential, the value at r = 0 and the center for the spline) are held at
// their start values unless MinimizeOptions::optimize_gauge is set.

#include <gsl/gsl_errno.h>
#include <gsl/gsl_multimin.h>
#include <gsl/gsl_vector.h>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <memory>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "logsob/error.hpp"
#include "logsob/extremals.hpp"
#include "logsob/functionals.hpp"
#include "logsob/monomial.hpp"
#include "logsob/norms.hpp"
#include "logsob/quadrature.hpp"

namespace logsob {

// ---- Nelder-Mead driver ----

struct SimplexOutcome {
  std::vector<double> x;
  double fx = 0.0;
  int iterations = 0;
  bool converged = false;
  double size = 0.0;
  std::vector<double> best_history;  ///< best value after each iteration
};

/// Minimizes f from x0 with initial steps `step`; converged when the simplex
/// characteristic size falls below `tol`.
inline SimplexOutcome nelder_mead(const std::function<double(std::span<const double>)>& f, std::vector<double> x0,
                                  std::vector<double> step, int max_iters, double tol) {
  const std::size_t n = x0.size();
  SimplexOutcome out;
  if (n == 0) {
    out.x = x0;
    out.fx = f(x0);
    out.converged = true;
    return out;
  }
  struct Ctx {
    const std::function<double(std::span<const double>)>* f;
    std::vector<double> buf;
  } ctx{&f, std::vector<double>(n)};
  gsl_multimin_function fn;
  fn.n = n;
  fn.params = &ctx;
  fn.f = [](const gsl_vector* v, void* p) -> double {
    auto* c = static_cast<Ctx*>(p);
    for (std::size_t i = 0; i < c->buf.size(); ++i) c->buf[i] = gsl_vector_get(v, i);
    const double r = (*c->f)(c->buf);
    return std::isfinite(r) ? r : std::numeric_limits<double>::max() / 4;
  };

  gsl_error_handler_t* old = gsl_set_error_handler_off();
  std::unique_ptr<gsl_vector, decltype(&gsl_vector_free)> x(gsl_vector_alloc(n), gsl_vector_free);
  std::unique_ptr<gsl_vector, decltype(&gsl_vector_free)> ss(gsl_vector_alloc(n), gsl_vector_free);
  for (std::size_t i = 0; i < n; ++i) {
    gsl_vector_set(x.get(), i, x0[i]);
    gsl_vector_set(ss.get(), i, step[i]);
  }
  std::unique_ptr<gsl_multimin_fminimizer, decltype(&gsl_multimin_fminimizer_free)> s(
      gsl_multimin_fminimizer_alloc(gsl_multimin_fminimizer_nmsimplex2, n), gsl_multimin_fminimizer_free);
  gsl_multimin_fminimizer_set(s.get(), &fn, x.get(), ss.get());

  int it = 0;
  while (it < max_iters) {
    ++it;
    if (gsl_multimin_fminimizer_iterate(s.get()) != GSL_SUCCESS) break;
    out.best_history.push_back(s->fval);
    out.size = gsl_multimin_fminimizer_size(s.get());
    if (gsl_multimin_test_size(out.size, tol) == GSL_SUCCESS) {
      out.converged = true;
      break;
    }
  }
  gsl_set_error_handler(old);
  out.iterations = it;
  out.fx = s->fval;
  out.x.resize(n);
  for (std::size_t i = 0; i < n; ++i) out.x[i] = gsl_vector_get(s->x, i);
  return out;
}

// ---- profile families ----

namespace detail {

// Cubic spline in r through (r_k, s_k) with s'(0) = 0 and a quadratic last
// piece; quadratic extrapolation past the last knot, forced to decay.
class RadialSpline {
 public:
  RadialSpline(std::vector<double> r, std::vector<double> s) : r_(std::move(r)), s_(std::move(s)), m_(r_.size()) {
    const std::size_t k = r_.size();
    // unknowns M_0..M_{k-1} (second derivatives), dense solve: k is tiny
    std::vector<std::vector<double>> a(k, std::vector<double>(k + 1, 0.0));
    const double h0 = r_[1] - r_[0];
    a[0][0] = 2.0 * h0;
    a[0][1] = h0;
    a[0][k] = 6.0 * ((s_[1] - s_[0]) / h0);
    for (std::size_t i = 1; i + 1 < k; ++i) {
      const double hl = r_[i] - r_[i - 1];
      const double hr = r_[i + 1] - r_[i];
      a[i][i - 1] = hl;
      a[i][i] = 2.0 * (hl + hr);
      a[i][i + 1] = hr;
      a[i][k] = 6.0 * ((s_[i + 1] - s_[i]) / hr - (s_[i] - s_[i - 1]) / hl);
    }
    a[k - 1][k - 2] = -1.0;
    a[k - 1][k - 1] = 1.0;
    for (std::size_t c = 0; c < k; ++c) {
      std::size_t piv = c;
      for (std::size_t r = c + 1; r < k; ++r) {
        if (std::abs(a[r][c]) > std::abs(a[piv][c])) piv = r;
      }
      std::swap(a[c], a[piv]);
      for (std::size_t r = c + 1; r < k; ++r) {
        const double f = a[r][c] / a[c][c];
        for (std::size_t j = c; j <= k; ++j) a[r][j] -= f * a[c][j];
      }
    }
    for (std::size_t c = k; c-- > 0;) {
      double v = a[c][k];
      for (std::size_t j = c + 1; j < k; ++j) v -= a[c][j] * m_[j];
      m_[c] = v / a[c][c];
    }
    const std::size_t last = k - 1;
    const double hl = r_[last] - r_[last - 1];
    tail_value_ = s_[last];
    tail_slope_ = (s_[last] - s_[last - 1]) / hl + hl * (2.0 * m_[last] + m_[last - 1]) / 6.0;
    tail_curv_ = m_[last] < 0.0 ? m_[last] : -1.0;
  }

  // value and derivative at r >= 0
  void eval(double r, double& s, double& ds) const {
    const std::size_t k = r_.size();
    if (r >= r_[k - 1]) {
      const double t = r - r_[k - 1];
      s = tail_value_ + tail_slope_ * t + 0.5 * tail_curv_ * t * t;
      ds = tail_slope_ + tail_curv_ * t;
      return;
    }
    const std::size_t i =
        static_cast<std::size_t>(std::upper_bound(r_.begin(), r_.end(), r) - r_.begin()) - 1;
    const double h = r_[i + 1] - r_[i];
    const double a = (r_[i + 1] - r) / h;
    const double b = (r - r_[i]) / h;
    s = a * s_[i] + b * s_[i + 1] + ((a * a * a - a) * m_[i] + (b * b * b - b) * m_[i + 1]) * h * h / 6.0;
    ds = (s_[i + 1] - s_[i]) / h + ((-3.0 * a * a + 1.0) * m_[i] + (3.0 * b * b - 1.0) * m_[i + 1]) * h / 6.0;
  }

 private:
  std::vector<double> r_;
  std::vector<double> s_;
  std::vector<double> m_;
  double tail_value_ = 0.0;
  double tail_slope_ = 0.0;
  double tail_curv_ = -1.0;
};

}  // namespace detail

struct ProfileFamily {
  enum class Kind { stretched_exponential, radial_spline };

  Kind kind = Kind::stretched_exponential;
  std::size_t n = 1;
  int knots = 8;              ///< spline only
  double spline_radius = 5.0;  ///< last knot; knots at 0 and R 2^{-j}, j = K-2, ..., 0
  std::vector<double> lower;
  std::vector<double> upper;

  /// exp(-||x - c||^q / sigma); theta = (q, ln sigma, c_1..c_n).
  static ProfileFamily stretched_exponential(std::size_t n) {
    ProfileFamily f;
    f.kind = Kind::stretched_exponential;
    f.n = n;
    f.lower = {1.05, -5.0};
    f.upper = {8.0, 5.0};
    for (std::size_t i = 0; i < n; ++i) {
      f.lower.push_back(-3.0);
      f.upper.push_back(3.0);
    }
    return f;
  }

  /// exp(s(||x - c||)) with s the radial spline through the knot values; theta = (s_0..s_{K-1}, c_1..c_n).
  static ProfileFamily radial_spline(std::size_t n, int knots = 8, double radius = 5.0) {
    if (knots < 3) throw DomainError("radial_spline: need at least 3 knots");
    ProfileFamily f;
    f.kind = Kind::radial_spline;
    f.n = n;
    f.knots = knots;
    f.spline_radius = radius;
    for (int k = 0; k < knots; ++k) {
      f.lower.push_back(-60.0);
      f.upper.push_back(10.0);
    }
    for (std::size_t i = 0; i < n; ++i) {
      f.lower.push_back(-3.0);
      f.upper.push_back(3.0);
    }
    return f;
  }

  std::string name() const { return kind == Kind::stretched_exponential ? "stretched_exponential" : "radial_spline"; }

  std::size_t parameter_count() const { return lower.size(); }

  std::size_t center_offset() const {
    return kind == Kind::stretched_exponential ? 2 : static_cast<std::size_t>(knots);
  }

  /// Parameters the deficit does not depend on.
  std::vector<bool> gauge_mask() const {
    std::vector<bool> m(parameter_count(), false);
    for (std::size_t i = center_offset(); i < m.size(); ++i) m[i] = true;
    if (kind == Kind::stretched_exponential) {
      m[1] = true;
    } else {
      m[0] = true;
    }
    return m;
  }

  std::vector<double> knot_radii() const {
    std::vector<double> r{0.0};
    for (int j = knots - 2; j >= 0; --j) r.push_back(spline_radius * std::ldexp(1.0, -j));
    return r;
  }

  std::vector<double> clamp(std::span<const double> theta) const {
    std::vector<double> t(theta.begin(), theta.end());
    for (std::size_t i = 0; i < t.size(); ++i) t[i] = std::clamp(t[i], lower[i], upper[i]);
    return t;
  }

  void check(std::span<const double> theta) const {
    if (theta.size() != parameter_count()) {
      throw DimensionError("ProfileFamily: expected " + std::to_string(parameter_count()) + " parameters");
    }
  }

  /// Field for theta (clamped into bounds, center projected to admissibility).
  ScalarField field(std::span<const double> theta_in, const MonomialWeight& w, const NormSpec& norm) const {
    check(theta_in);
    if (w.n() != n) throw DimensionError("ProfileFamily: weight dimension mismatch");
    const std::vector<double> theta = clamp(theta_in);
    const std::vector<double> center =
        w.project_center(std::span<const double>(theta).subspan(center_offset(), n));
    ScalarField f;
    f.dimension = n;
    f.hints.center = center;
    if (kind == Kind::stretched_exponential) {
      const double q = theta[0];
      const double sigma = std::exp(theta[1]);
      auto nm = std::make_shared<const NormSpec>(norm);
      f.eval = [=](std::span<const double> x) {
        std::vector<double> y(x.size());
        for (std::size_t i = 0; i < y.size(); ++i) y[i] = x[i] - center[i];
        return std::exp(-std::pow(nm->norm(y), q) / sigma);
      };
      f.grad = [=](std::span<const double> x, std::span<double> out) {
        std::vector<double> y(x.size());
        for (std::size_t i = 0; i < y.size(); ++i) y[i] = x[i] - center[i];
        const double r = nm->norm(y);
        if (r == 0.0) {
          std::fill(out.begin(), out.end(), 0.0);
          return;
        }
        nm->gradient(y, out);
        const double c = -(q / sigma) * std::pow(r, q - 1.0) * std::exp(-std::pow(r, q) / sigma);
        for (double& g : out) g *= c;
      };
      f.hints.scale = std::pow(sigma, 1.0 / q);
    } else {
      auto spline = std::make_shared<const detail::RadialSpline>(
          knot_radii(), std::vector<double>(theta.begin(), theta.begin() + knots));
      auto nm = std::make_shared<const NormSpec>(norm);
      f.eval = [=](std::span<const double> x) {
        std::vector<double> y(x.size());
        for (std::size_t i = 0; i < y.size(); ++i) y[i] = x[i] - center[i];
        double s = 0.0, ds = 0.0;
        spline->eval(nm->norm(y), s, ds);
        return std::exp(s);
      };
      f.grad = [=](std::span<const double> x, std::span<double> out) {
        std::vector<double> y(x.size());
        for (std::size_t i = 0; i < y.size(); ++i) y[i] = x[i] - center[i];
        const double r = nm->norm(y);
        if (r == 0.0) {
          std::fill(out.begin(), out.end(), 0.0);
          return;
        }
        double s = 0.0, ds = 0.0;
        spline->eval(r, s, ds);
        nm->gradient(y, out);
        const double c = ds * std::exp(s);
        for (double& g : out) g *= c;
      };
      f.hints.scale = 1.0;
    }
    return f;
  }

  /// A deliberately non-extremal starting point.
  std::vector<double> default_start() const {
    std::vector<double> t;
    if (kind == Kind::stretched_exponential) {
      t = {3.5, 0.0};
    } else {
      for (double r : knot_radii()) t.push_back(-r);
    }
    t.resize(parameter_count(), 0.0);
    return t;
  }

  std::vector<double> default_step() const {
    std::vector<double> s(parameter_count(), 0.3);
    if (kind == Kind::stretched_exponential) s[0] = 0.5;
    return s;
  }
};

// ---- minimization ----

struct MinimizeOptions {
  int max_iters = 2000;
  double simplex_tol = 1e-8;
  QuadratureSpec quadrature{};
  std::vector<double> start;  ///< empty: family default
  std::vector<double> step;   ///< empty: family default
  bool optimize_gauge = false;
  bool compute_distance = true;
};

struct MinimizeResult {
  std::vector<double> theta_star;
  double deficit_star = 0.0;
  int iterations = 0;
  bool converged = false;
  double distance_to_extremal = std::numeric_limits<double>::quiet_NaN();
  int failed_evaluations = 0;
  std::vector<double> best_history;
  std::vector<double> best_fit;  ///< (ln sigma, free center coordinates) of the nearest extremal
  bool conjectural = false;
};

/// L^2(x^A) distance between |f| / ||f||_{L^p} and the nearest extremal
/// beta exp(-||x - x0||^{p'} / sigma), minimized over sigma and the free
/// coordinates of x0. Returns {distance, ln sigma, x0 free coordinates...}.
inline std::vector<double> distance_to_extremal(const ScalarField& f, double p, const MonomialWeight& w,
                                                const NormSpec& norm, const QuadratureSpec& spec,
                                                double log_sigma_guess = 0.0) {
  const double m = mass(f, p, w, spec);
  const double scale = std::pow(m, -1.0 / p);
  std::vector<std::size_t> free_axes;
  for (std::size_t i = 0; i < w.n(); ++i) {
    if (!w.constrained(i)) free_axes.push_back(i);
  }
  // the squared distance of near-identical functions is tiny; judge it against
  // the squared norms (both 1 for p = 2)
  QuadratureSpec loose = spec;
  loose.abs_tol = std::max(spec.abs_tol, 1e-12);
  auto dist2 = [&](std::span<const double> v) {
    std::vector<double> x0(w.n(), 0.0);
    for (std::size_t j = 0; j < free_axes.size(); ++j) {
      x0[free_axes[j]] = (f.hints.center.empty() ? 0.0 : f.hints.center[free_axes[j]]) + v[1 + j];
    }
    const ExtremalProfile e = log_sobolev_extremal_profile(p, std::exp(v[0]), x0, w, norm);
    const VectorIntegrand g = [&](std::span<const double> x, std::span<double> out) {
      const double d = scale * std::abs(f.eval(x)) - e(x);
      out[0] = d * d;
    };
    return integrate_weighted_many(g, 1, w, loose, f.hints)[0].value;
  };
  std::vector<double> start(1 + free_axes.size(), 0.0);
  start[0] = log_sigma_guess;
  std::vector<double> step(start.size(), 0.1);
  step[0] = 0.5;
  const SimplexOutcome o = nelder_mead(
      [&](std::span<const double> v) {
        try {
          return dist2(v);
        } catch (const std::exception&) {
          return std::numeric_limits<double>::infinity();
        }
      },
      start, step, 500, 1e-7);
  std::vector<double> out{std::sqrt(std::max(o.fx, 0.0))};
  out.insert(out.end(), o.x.begin(), o.x.end());
  return out;
}

inline MinimizeResult minimize_deficit(const ProfileFamily& family, double p, const MonomialWeight& w,
                                       const NormSpec& norm, const MinimizeOptions& opts = {}) {
  if (!(p > 1.0)) throw DomainError("minimize_deficit: p must be > 1");
  if (family.n != w.n()) throw DimensionError("minimize_deficit: family and weight dimensions differ");
  std::vector<double> theta0 = opts.start.empty() ? family.default_start() : opts.start;
  family.check(theta0);
  theta0 = family.clamp(theta0);
  std::vector<double> step = opts.step.empty() ? family.default_step() : opts.step;
  if (step.size() != theta0.size()) throw DimensionError("minimize_deficit: step has wrong length");

  std::vector<bool> frozen(theta0.size(), false);
  if (!opts.optimize_gauge) frozen = family.gauge_mask();
  std::vector<std::size_t> active;
  for (std::size_t i = 0; i < theta0.size(); ++i) {
    if (!frozen[i]) active.push_back(i);
  }

  MinimizeResult res;
  auto expand = [&](std::span<const double> v) {
    std::vector<double> t = theta0;
    for (std::size_t j = 0; j < active.size(); ++j) t[active[j]] = v[j];
    return t;
  };
  auto objective = [&](std::span<const double> v) {
    const std::vector<double> t = expand(v);
    const std::vector<double> tc = family.clamp(t);
    double penalty = 0.0;
    for (std::size_t i = 0; i < t.size(); ++i) penalty += (t[i] - tc[i]) * (t[i] - tc[i]);
    try {
      const ScalarField f = family.field(tc, w, norm);
      return deficit(f, p, w, norm, opts.quadrature).deficit + 1e3 * penalty;
    } catch (const std::exception&) {
      ++res.failed_evaluations;
      return 1e3 + 1e3 * penalty;
    }
  };
  std::vector<double> v0, s0;
  for (std::size_t i : active) {
    v0.push_back(theta0[i]);
    s0.push_back(step[i]);
  }
  const SimplexOutcome o = nelder_mead(objective, v0, s0, opts.max_iters, opts.simplex_tol);
  res.theta_star = family.clamp(expand(o.x));
  res.iterations = o.iterations;
  res.converged = o.converged;
  res.best_history = o.best_history;
  res.conjectural = !norm.is_euclidean() && !w.is_unweighted();
  const ScalarField best = family.field(res.theta_star, w, norm);
  res.deficit_star = deficit(best, p, w, norm, opts.quadrature).deficit;
  if (opts.compute_distance) {
    const double guess = family.kind == ProfileFamily::Kind::stretched_exponential ? res.theta_star[1] : 0.0;
    const std::vector<double> d = distance_to_extremal(best, p, w, norm, opts.quadrature, guess);
    res.distance_to_extremal = d[0];
    res.best_fit.assign(d.begin() + 1, d.end());
  }
  return res;
}

/// Random starting points inside the family bounds (gauge parameters kept at the default start).
inline std::vector<std::vector<double>> random_starts(const ProfileFamily& family, std::size_t count,
                                                      std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const std::vector<bool> gauge = family.gauge_mask();
  const std::vector<double> base = family.default_start();
  std::vector<std::vector<double>> out;
  for (std::size_t c = 0; c < count; ++c) {
    std::vector<double> t = base;
    for (std::size_t i = 0; i < t.size(); ++i) {
      if (gauge[i]) continue;
      double lo = family.lower[i], hi = family.upper[i];
      if (family.kind == ProfileFamily::Kind::stretched_exponential && i == 0) {
        lo = 1.3;
        hi = 4.0;
      } else if (family.kind == ProfileFamily::Kind::radial_spline) {
        lo = base[i] - 0.5;
        hi = base[i] + 0.5;
      }
      t[i] = std::uniform_real_distribution<double>(lo, hi)(rng);
    }
    out.push_back(std::move(t));
  }
  return out;
}

struct LandscapeCell {
  std::vector<double> theta;
  double deficit = std::numeric_limits<double>::quiet_NaN();
  std::string error;  ///< empty on success
};

/// Deficit on a list of parameter vectors; failures are recorded per cell.
inline std::vector<LandscapeCell> deficit_landscape(const ProfileFamily& family, double p, const MonomialWeight& w,
                                                    const NormSpec& norm,
                                                    const std::vector<std::vector<double>>& param_grid,
                                                    const QuadratureSpec& spec = {}) {
  std::vector<LandscapeCell> out;
  for (const auto& theta : param_grid) {
    LandscapeCell c;
    c.theta = theta;
    try {
      c.deficit = deficit(family.field(theta, w, norm), p, w, norm, spec).deficit;
    } catch (const std::exception& e) {
      c.error = e.what();
    }
    out.push_back(std::move(c));
  }
  return out;
}

}  // namespace logsob
