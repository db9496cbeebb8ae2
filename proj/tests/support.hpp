#pragma once

// Seeded generators and random test fields shared by the unit and
// acceptance tests.

#include <cmath>
#include <cstdint>
#include <memory>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "logsob/monomial.hpp"
#include "logsob/quadrature.hpp"

namespace logsob::testkit {

class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
  double log_uniform(double lo, double hi) { return std::exp(uniform(std::log(lo), std::log(hi))); }

  std::vector<double> vec(std::size_t n, double lo, double hi) {
    std::vector<double> v(n);
    for (double& x : v) x = uniform(lo, hi);
    return v;
  }

  /// Nonzero vector with entries in [-scale, scale].
  std::vector<double> nonzero(std::size_t n, double scale = 3.0) {
    std::vector<double> v;
    do {
      v = vec(n, -scale, scale);
    } while (std::abs(v[0]) + (n > 1 ? std::abs(v[1]) : 0.0) < 1e-3);
    return v;
  }

  /// A point of the cone: positive on constrained axes.
  std::vector<double> cone_point(const MonomialWeight& w, double scale = 2.0) {
    std::vector<double> v(w.n());
    for (std::size_t i = 0; i < w.n(); ++i) v[i] = w.constrained(i) ? uniform(0.05, scale) : uniform(-scale, scale);
    return v;
  }

  /// An admissible center: zero on constrained axes.
  std::vector<double> center(const MonomialWeight& w, double scale = 0.5) {
    std::vector<double> v(w.n(), 0.0);
    for (std::size_t i = 0; i < w.n(); ++i) {
      if (!w.constrained(i)) v[i] = uniform(-scale, scale);
    }
    return v;
  }

 private:
  std::mt19937_64 rng_;
};

inline double sq_dist(std::span<const double> x, std::span<const double> m) {
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += (x[i] - m[i]) * (x[i] - m[i]);
  return s;
}

/// sum_k c_k exp(-|x - m_k|^2 / s_k).
inline ScalarField gaussian_mixture(Gen& g, const MonomialWeight& w) {
  struct Bump {
    double c, s;
    std::vector<double> m;
  };
  auto bumps = std::make_shared<std::vector<Bump>>();
  const int k = g.integer(2, 3);
  for (int i = 0; i < k; ++i) bumps->push_back({g.uniform(0.2, 1.0), g.log_uniform(0.3, 3.0), g.cone_point(w, 1.2)});
  ScalarField f;
  f.dimension = w.n();
  f.eval = [bumps](std::span<const double> x) {
    double v = 0.0;
    for (const auto& b : *bumps) v += b.c * std::exp(-sq_dist(x, b.m) / b.s);
    return v;
  };
  f.grad = [bumps](std::span<const double> x, std::span<double> out) {
    std::fill(out.begin(), out.end(), 0.0);
    for (const auto& b : *bumps) {
      const double e = b.c * std::exp(-sq_dist(x, b.m) / b.s);
      for (std::size_t i = 0; i < x.size(); ++i) out[i] -= 2.0 * (x[i] - b.m[i]) / b.s * e;
    }
  };
  f.hints.center = w.project_center(bumps->front().m);
  f.hints.scale = std::sqrt(bumps->front().s);
  return f;
}

/// (1 + a tanh(v . (x - m))) exp(-(|x - m|^2 / s)^e), e in [0.75, 1.5].
inline ScalarField tilted_bump(Gen& g, const MonomialWeight& w) {
  struct P {
    double a, s, e;
    std::vector<double> m, v;
  };
  auto q = std::make_shared<P>(P{g.uniform(-0.8, 0.8), g.log_uniform(0.5, 3.0), g.uniform(0.75, 1.5),
                                 g.center(w, 0.8), g.vec(w.n(), -1.5, 1.5)});
  ScalarField f;
  f.dimension = w.n();
  f.eval = [q](std::span<const double> x) {
    double t = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) t += q->v[i] * (x[i] - q->m[i]);
    return (1.0 + q->a * std::tanh(t)) * std::exp(-std::pow(sq_dist(x, q->m) / q->s, q->e));
  };
  f.grad = [q](std::span<const double> x, std::span<double> out) {
    double t = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) t += q->v[i] * (x[i] - q->m[i]);
    const double u = sq_dist(x, q->m) / q->s;
    const double env = std::exp(-std::pow(u, q->e));
    const double th = std::tanh(t);
    const double amp = 1.0 + q->a * th;
    // d/dx_i u^e = e u^{e-1} 2 (x_i - m_i) / s, zero at the center
    const double du = u > 0.0 ? q->e * std::pow(u, q->e - 1.0) * 2.0 / q->s : 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      out[i] = q->a * (1.0 - th * th) * q->v[i] * env - amp * env * du * (x[i] - q->m[i]);
    }
  };
  f.hints.center = q->m;
  f.hints.scale = std::sqrt(q->s);
  return f;
}

/// (c + (a . (x - m))^2 + b |x - m|^2) exp(-|x - m|^2 / s).
inline ScalarField poly_gaussian(Gen& g, const MonomialWeight& w) {
  struct P {
    double c, b, s;
    std::vector<double> m, a;
  };
  auto q = std::make_shared<P>(P{g.uniform(0.05, 1.0), g.uniform(0.0, 1.0), g.log_uniform(0.4, 3.0),
                                 g.center(w, 0.8), g.vec(w.n(), -1.5, 1.5)});
  ScalarField f;
  f.dimension = w.n();
  f.eval = [q](std::span<const double> x) {
    double t = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) t += q->a[i] * (x[i] - q->m[i]);
    const double r2 = sq_dist(x, q->m);
    return (q->c + t * t + q->b * r2) * std::exp(-r2 / q->s);
  };
  f.grad = [q](std::span<const double> x, std::span<double> out) {
    double t = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) t += q->a[i] * (x[i] - q->m[i]);
    const double r2 = sq_dist(x, q->m);
    const double e = std::exp(-r2 / q->s);
    const double poly = q->c + t * t + q->b * r2;
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double y = x[i] - q->m[i];
      out[i] = (2.0 * t * q->a[i] + 2.0 * q->b * y) * e - poly * e * 2.0 * y / q->s;
    }
  };
  f.hints.center = q->m;
  f.hints.scale = std::sqrt(q->s);
  return f;
}

/// The i-th member of the randomized nonnegativity suite: cycles through the three families.
inline ScalarField random_field(Gen& g, const MonomialWeight& w, int i, std::string* kind = nullptr) {
  switch (i % 3) {
    case 0:
      if (kind) *kind = "gaussian_mixture";
      return gaussian_mixture(g, w);
    case 1:
      if (kind) *kind = "tilted_bump";
      return tilted_bump(g, w);
    default:
      if (kind) *kind = "poly_gaussian";
      return poly_gaussian(g, w);
  }
}

/// c f, gradient included.
inline ScalarField scaled(const ScalarField& f, double c) {
  ScalarField g = f;
  g.eval = [f, c](std::span<const double> x) { return c * f.eval(x); };
  g.grad = [f, c](std::span<const double> x, std::span<double> out) {
    f.gradient(x, out);
    for (double& v : out) v *= c;
  };
  return g;
}

/// max_i |grad_i - central difference_i| at x with step h.
inline double gradient_mismatch(const ScalarField& f, std::span<const double> x, double h) {
  std::vector<double> g(x.size()), y(x.begin(), x.end());
  f.grad(x, g);
  double worst = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    y[i] = x[i] + h;
    const double fp = f.eval(y);
    y[i] = x[i] - h;
    const double fm = f.eval(y);
    y[i] = x[i];
    worst = std::max(worst, std::abs(g[i] - (fp - fm) / (2.0 * h)));
  }
  return worst;
}

}  // namespace logsob::testkit
