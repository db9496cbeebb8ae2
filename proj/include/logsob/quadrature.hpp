#pragma once

// Integration of x^A-weighted integrands over the cone R^n_A.
//
// Every axis is split at the integrand's center into half-lines, and each
// half-line [0, inf) is mapped by the double-exponential substitution
//   x = s * exp(pi/2 * sinh(t)),
// which clusters nodes geometrically toward the center (monomial weights,
// cusps of |x - x0|^alpha) and sweeps the far tail in a handful of nodes
// (Gaussian and power-law decay alike). Two schemes sit on top:
//
//   tensor    product trapezoid rule in t; the error estimate compares the
//             rule with its own even-index subrule (step 2h) and the step is
//             halved until the tolerance is met.
//   adaptive  globally adaptive bisection of a parameter box with
//             Gauss-Kronrod (7/15) regions: t itself in one dimension,
//             hyperspherical coordinates about the center (radius in t) in
//             two or more.
//
// Node evaluation order is fixed and sums are compensated, so results are
// bit-reproducible.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <numbers>
#include <queue>
#include <span>
#include <string>
#include <vector>

#include "logsob/error.hpp"
#include "logsob/monomial.hpp"
#include "logsob/norms.hpp"

namespace logsob {

/// What a field knows about its own shape; used to place quadrature nodes.
struct FieldHints {
  std::vector<double> center;  ///< point where the integrand may be non-smooth; empty = origin
  double scale = 1.0;          ///< characteristic length
  double radius = 0.0;         ///< |x - center| beyond which the integrand is negligible; 0 = unknown
};

/// A pure map R^n -> R with an optional analytic gradient.
struct ScalarField {
  std::size_t dimension = 0;
  std::function<double(std::span<const double>)> eval;
  std::function<void(std::span<const double>, std::span<double>)> grad;
  FieldHints hints;

  double operator()(std::span<const double> x) const { return eval(x); }
  bool has_gradient() const noexcept { return static_cast<bool>(grad); }

  /// Analytic gradient when available, otherwise central differences with
  /// step cbrt(eps) * (1 + |x_i|).
  void gradient(std::span<const double> x, std::span<double> out) const {
    if (grad) {
      grad(x, out);
      return;
    }
    finite_difference_gradient(x, out);
  }

  void finite_difference_gradient(std::span<const double> x, std::span<double> out) const {
    static const double kStep = std::cbrt(std::numeric_limits<double>::epsilon());
    std::vector<double> y(x.begin(), x.end());
    for (std::size_t i = 0; i < y.size(); ++i) {
      const double h = kStep * (1.0 + std::abs(x[i]));
      y[i] = x[i] + h;
      const double fp = eval(y);
      y[i] = x[i] - h;
      const double fm = eval(y);
      y[i] = x[i];
      out[i] = (fp - fm) / (2.0 * h);
    }
  }
};

enum class Scheme { tensor, adaptive };

inline const char* to_string(Scheme s) { return s == Scheme::tensor ? "tensor" : "adaptive"; }

inline Scheme parse_scheme(const std::string& s) {
  if (s == "tensor" || s == "tensor_gauss" || s == "tensor_de") return Scheme::tensor;
  if (s == "adaptive") return Scheme::adaptive;
  throw DomainError("unknown quadrature scheme '" + s + "'");
}

struct QuadratureSpec {
  Scheme scheme = Scheme::tensor;
  /// Trapezoid nodes per half-line at the starting step (tensor); the
  /// adaptive scheme starts from nodes_per_axis / 15 Kronrod panels.
  int nodes_per_axis = 81;
  /// Largest |x_i - center_i| covered; 0 = use the field's hint, else 1e8 * scale.
  double truncation_radius = 0.0;
  double rel_tol = 1e-8;
  /// Absolute error accepted regardless of rel_tol (for integrals that may vanish).
  double abs_tol = 0.0;
  /// Adaptive: interval cap per one-dimensional integral.
  int max_subdivisions = 200;
  /// Tensor: no refinement beyond this many evaluation points.
  double max_points = 4.0e7;

  void validate() const {
    if (nodes_per_axis < 4) throw DomainError("QuadratureSpec: nodes_per_axis must be >= 4");
    if (!(rel_tol > 0.0)) throw DomainError("QuadratureSpec: rel_tol must be positive");
    if (!(abs_tol >= 0.0)) throw DomainError("QuadratureSpec: abs_tol must be >= 0");
    if (truncation_radius < 0.0) throw DomainError("QuadratureSpec: truncation_radius must be >= 0");
    if (max_subdivisions < 1) throw DomainError("QuadratureSpec: max_subdivisions must be >= 1");
  }
};

struct QuadratureResult {
  double value = 0.0;
  double err = 0.0;
};

/// Writes `count` integrand values at x into out.
using VectorIntegrand = std::function<void(std::span<const double> x, std::span<double> out)>;

namespace detail {

// Neumaier summation.
struct CompensatedSum {
  double sum = 0.0;
  double c = 0.0;
  void add(double v) {
    const double t = sum + v;
    if (std::abs(sum) >= std::abs(v)) {
      c += (sum - t) + v;
    } else {
      c += (v - t) + sum;
    }
    sum = t;
  }
  double value() const { return sum + c; }
};

// Nodes no closer to the center than 1e-16 * scale.
inline constexpr double kInnerRatio = 1e-16;

inline constexpr int kMaxHalfLineNodes = 1 << 14;

inline double window_left() {
  return std::asinh((2.0 / std::numbers::pi) * std::log(1.0 / kInnerRatio));
}

inline double window_right(double scale, double radius) {
  const double ratio = std::max(radius / scale, 6.0);
  return std::max(1.0, std::asinh((2.0 / std::numbers::pi) * std::log(ratio)));
}

inline double effective_radius(const QuadratureSpec& spec, const FieldHints& hints) {
  if (spec.truncation_radius > 0.0) return spec.truncation_radius;
  if (hints.radius > 0.0) return hints.radius;
  return 1e8 * hints.scale;
}

// One coordinate axis: nodes, weights (including |x|^a) and the even-subrule flag.
struct AxisRule {
  std::vector<double> x;
  std::vector<double> w;
  std::vector<char> coarse;
};

inline void append_half_line(AxisRule& rule, double origin, double dir, double power, double scale,
                             double radius, int nodes, double weight_origin) {
  const double tl = window_left();
  const double tr = window_right(scale, radius);
  const int n = (nodes % 2 == 0) ? nodes + 1 : nodes;
  const double h = (tl + tr) / (n - 1);
  for (int k = 0; k < n; ++k) {
    const double t = -tl + k * h;
    const double u = scale * std::exp(0.5 * std::numbers::pi * std::sinh(t));
    const double du = u * 0.5 * std::numbers::pi * std::cosh(t);
    const double xv = origin + dir * u;
    double wv = h * du;
    if (power != 0.0) wv *= std::pow(std::abs(xv - weight_origin), power);
    if (!(wv > 0.0) || !std::isfinite(wv) || !std::isfinite(xv)) continue;
    rule.x.push_back(xv);
    rule.w.push_back(wv);
    rule.coarse.push_back(k % 2 == 0);
  }
}

// Full line (split at c) when a == 0, half-line (0, inf) when a > 0.
inline AxisRule axis_rule(double a, double c, double scale, double radius, int nodes) {
  AxisRule rule;
  if (a > 0.0) {
    append_half_line(rule, 0.0, 1.0, a, scale, radius, nodes, 0.0);
  } else {
    append_half_line(rule, c, -1.0, 0.0, scale, radius, nodes, 0.0);
    append_half_line(rule, c, 1.0, 0.0, scale, radius, nodes, 0.0);
  }
  return rule;
}

struct TensorPass {
  std::vector<double> fine;
  std::vector<double> coarse;
  std::vector<double> magnitude;  // sum |w g|, for the roundoff floor
};

inline TensorPass tensor_pass(const VectorIntegrand& g, std::size_t count, const std::vector<AxisRule>& axes) {
  const std::size_t n = axes.size();
  std::vector<CompensatedSum> fine(count), coarse(count), mag(count);
  std::vector<std::size_t> idx(n, 0);
  std::vector<double> x(n), out(count);
  // partial weight products: pw[i] = prod_{j < i} w_j(idx_j)
  std::vector<double> pw(n + 1, 1.0);
  std::vector<int> pc(n + 1, 1);
  for (const auto& a : axes) {
    if (a.x.empty()) return {std::vector<double>(count, 0.0), std::vector<double>(count, 0.0),
                             std::vector<double>(count, 0.0)};
  }
  const double coarse_factor = std::ldexp(1.0, static_cast<int>(n));
  auto refresh = [&](std::size_t from) {
    for (std::size_t i = from; i < n; ++i) {
      x[i] = axes[i].x[idx[i]];
      pw[i + 1] = pw[i] * axes[i].w[idx[i]];
      pc[i + 1] = pc[i] & axes[i].coarse[idx[i]];
    }
  };
  refresh(0);
  while (true) {
    const double wt = pw[n];
    if (wt > 0.0) {
      g(x, out);
      for (std::size_t c = 0; c < count; ++c) {
        const double v = out[c];
        if (!std::isfinite(v)) {
          throw QuadratureError("integrand is not finite at a quadrature node", fine[0].value(),
                                std::numeric_limits<double>::infinity(), x);
        }
        const double contrib = wt * v;
        fine[c].add(contrib);
        mag[c].add(std::abs(contrib));
        if (pc[n]) coarse[c].add(coarse_factor * contrib);
      }
    }
    // odometer
    std::size_t i = n;
    while (i > 0) {
      --i;
      if (++idx[i] < axes[i].x.size()) {
        refresh(i);
        break;
      }
      idx[i] = 0;
      if (i == 0) {
        TensorPass r;
        for (std::size_t c = 0; c < count; ++c) {
          r.fine.push_back(fine[c].value());
          r.coarse.push_back(coarse[c].value());
          r.magnitude.push_back(mag[c].value());
        }
        return r;
      }
    }
  }
}

// Error model for the double-exponential trapezoid rule: the error at step h
// is roughly the square of the relative error at 2h; the 3/2 power keeps
// the estimate honest for algebraic tails.
inline double tensor_error(double fine, double coarse, double magnitude) {
  const double diff = std::abs(fine - coarse);
  const double scale = std::max(std::abs(fine), 1e-300);
  const double rel = diff / scale;
  const double est = rel < 0.1 ? std::max(10.0 * rel * rel, std::pow(rel, 1.5)) * scale : diff;
  return std::max(est, 64.0 * std::numeric_limits<double>::epsilon() * magnitude);
}

inline std::vector<QuadratureResult> integrate_tensor(const VectorIntegrand& g, std::size_t count,
                                                      std::span<const double> exponents,
                                                      const QuadratureSpec& spec, const FieldHints& hints) {
  const std::size_t n = exponents.size();
  const double radius = effective_radius(spec, hints);
  int nodes = spec.nodes_per_axis;
  std::vector<QuadratureResult> best;
  while (true) {
    std::vector<AxisRule> axes;
    double points = 1.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double c = hints.center.empty() ? 0.0 : hints.center[i];
      axes.push_back(axis_rule(exponents[i], exponents[i] > 0.0 ? 0.0 : c, hints.scale, radius, nodes));
      points *= static_cast<double>(axes.back().x.size());
    }
    const TensorPass pass = tensor_pass(g, count, axes);
    best.assign(count, {});
    bool ok = true;
    for (std::size_t c = 0; c < count; ++c) {
      best[c].value = pass.fine[c];
      best[c].err = tensor_error(pass.fine[c], pass.coarse[c], pass.magnitude[c]);
      const double floor = 64.0 * std::numeric_limits<double>::epsilon() * pass.magnitude[c];
      if (best[c].err > std::max({spec.rel_tol * std::abs(best[c].value), spec.abs_tol, floor})) ok = false;
    }
    if (ok) return best;
    const double next_points = points * std::pow(2.0, static_cast<double>(n));
    if (next_points > spec.max_points || nodes > kMaxHalfLineNodes) {
      throw QuadratureError("tensor quadrature: tolerance not met within the node budget", best[0].value,
                            best[0].err);
    }
    nodes = 2 * nodes - 1;
  }
}

// ---- adaptive (global subdivision of a parameter box) ----
// One axis: G7K15 on each side of the center in the double-exponential
// variable. Two or more: hyperspherical coordinates about the center, radius
// double-exponential, angles smoothstep-mapped on quarter panels (so sign
// constraints and the kinks of x^A sit on panel edges), tensor G7K15 regions.

inline constexpr std::array<double, 8> kXgk = {0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
                                               0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
                                               0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
                                               0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kWgk = {0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
                                               0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
                                               0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
                                               0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> kWg = {0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
                                              0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

// A half-line piece of one axis, parameterized by t in [-tl, tr].
struct HalfLine {
  double origin;
  double dir;
  double power;
  double scale;
  double tl;
  double tr;
};

class AdaptiveCubature {
 public:
  AdaptiveCubature(const VectorIntegrand& g, std::size_t count, std::span<const double> exponents,
                   const QuadratureSpec& spec, const FieldHints& hints)
      : g_(g),
        count_(count),
        spec_(spec),
        n_(exponents.size()),
        exponents_(exponents.begin(), exponents.end()),
        x_(exponents.size()),
        out_(count) {
    const double radius = effective_radius(spec, hints);
    const double tl = window_left();
    const double tr = window_right(hints.scale, radius);
    centre_ = hints.center.empty() ? std::vector<double>(n_, 0.0) : hints.center;
    if (n_ == 1) {
      if (exponents[0] > 0.0) {
        pieces_.push_back({0.0, 1.0, exponents[0], hints.scale, tl, tr});
      } else {
        pieces_.push_back({centre_[0], -1.0, 0.0, hints.scale, tl, tr});
        pieces_.push_back({centre_[0], 1.0, 0.0, hints.scale, tl, tr});
      }
    } else {
      pieces_.push_back({0.0, 1.0, 0.0, hints.scale, tl, tr});
    }
    panels_ = std::max(1, spec.nodes_per_axis / 40);
    const double cap = std::pow(static_cast<double>(spec.max_subdivisions), static_cast<double>(n_));
    max_regions_ = static_cast<std::size_t>(std::min(cap, 1e7));
  }

  std::vector<QuadratureResult> run() {
    std::vector<Region> regions;
    // piece[0] picks the radial half-line (or the side of the center when
    // n = 1); piece[j], j >= 1, the quarter panel of angle j
    std::vector<std::size_t> pick(n_, 0), span(n_, 1);
    span[0] = pieces_.size();
    for (std::size_t j = 1; j < n_; ++j) span[j] = (j + 1 == n_) ? 4 : 2;
    while (true) {
      if (sign_ok(pick)) {
        for (int p = 0; p < panels_; ++p) {
          Region r;
          r.piece = pick;
          r.c.assign(n_, 0.0);
          r.h.assign(n_, kAngleWindow);
          const HalfLine& hl = pieces_[pick[0]];
          r.h[0] = 0.5 * (hl.tl + hl.tr) / panels_;
          r.c[0] = -hl.tl + (2 * p + 1) * r.h[0];
          evaluate(r);
          regions.push_back(std::move(r));
        }
      }
      std::size_t i = 0;
      for (; i < n_; ++i) {
        if (++pick[i] < span[i]) break;
        pick[i] = 0;
      }
      if (i == n_) break;
    }

    std::vector<double> val(count_, 0.0), err(count_, 0.0);
    auto retotal = [&] {
      std::fill(val.begin(), val.end(), 0.0);
      std::fill(err.begin(), err.end(), 0.0);
      for (const Region& r : regions) {
        for (std::size_t k = 0; k < count_; ++k) {
          val[k] += r.val[k];
          err[k] += r.err[k];
        }
      }
    };
    auto goal = [&](std::size_t k) {
      return std::max({spec_.rel_tol * std::abs(val[k]), spec_.abs_tol, std::numeric_limits<double>::min()});
    };
    auto priority = [&](const Region& r) {
      double worst = 0.0;
      for (std::size_t k = 0; k < count_; ++k) worst = std::max(worst, r.err[k] / goal(k));
      return worst;
    };
    auto done = [&] {
      for (std::size_t k = 0; k < count_; ++k) {
        if (err[k] > goal(k)) return false;
      }
      return true;
    };
    auto by_priority = [](const Region& a, const Region& b) { return a.priority < b.priority; };
    auto rekey = [&] {
      for (Region& r : regions) r.priority = priority(r);
      std::make_heap(regions.begin(), regions.end(), by_priority);
    };

    retotal();
    rekey();
    std::size_t next_rekey = 2 * regions.size();
    while (!done()) {
      if (regions.size() >= max_regions_ || evaluations_ > spec_.max_points) {
        retotal();
        throw QuadratureError("adaptive quadrature: tolerance not met within the subdivision budget", val[0],
                              err[0]);
      }
      std::pop_heap(regions.begin(), regions.end(), by_priority);
      Region worst = std::move(regions.back());
      regions.pop_back();
      const std::size_t ax = worst.split_axis;
      Region left = worst, right = worst;
      left.h[ax] *= 0.5;
      right.h[ax] *= 0.5;
      left.c[ax] -= left.h[ax];
      right.c[ax] += right.h[ax];
      evaluate(left);
      evaluate(right);
      for (std::size_t k = 0; k < count_; ++k) {
        val[k] += left.val[k] + right.val[k] - worst.val[k];
        err[k] = std::max(0.0, err[k] + left.err[k] + right.err[k] - worst.err[k]);
      }
      for (Region* r : {&left, &right}) {
        r->priority = priority(*r);
        regions.push_back(std::move(*r));
        std::push_heap(regions.begin(), regions.end(), by_priority);
      }
      if (regions.size() >= next_rekey) {
        retotal();
        rekey();
        next_rekey = 2 * regions.size();
      }
    }
    // sum the leaves afresh to shed accumulated rounding
    std::sort(regions.begin(), regions.end(), [](const Region& a, const Region& b) { return a.c < b.c; });
    retotal();
    std::vector<QuadratureResult> r(count_);
    for (std::size_t k = 0; k < count_; ++k) r[k] = {val[k], err[k]};
    return r;
  }

 private:
  struct Region {
    std::vector<std::size_t> piece;
    std::vector<double> c;
    std::vector<double> h;
    std::vector<double> val;
    std::vector<double> err;
    std::size_t split_axis = 0;
    double priority = 0.0;
  };

  // f(t) times the Jacobian of t -> x and the weight, into fv.
  static constexpr double kAngleWindow = 1.0;

  // Direction cosines for the quarter panels `piece` at panel midpoints.
  bool sign_ok(const std::vector<std::size_t>& piece) const {
    if (n_ == 1) return true;
    std::vector<double> theta(n_ - 1), omega(n_);
    for (std::size_t j = 1; j < n_; ++j) theta[j - 1] = (piece[j] + 0.5) * 0.5 * std::numbers::pi;
    directions(theta, omega);
    for (std::size_t i = 0; i < n_; ++i) {
      if (exponents_[i] > 0.0 && omega[i] < 0.0) return false;
    }
    return true;
  }

  void directions(std::span<const double> theta, std::span<double> omega) const {
    double prod = 1.0;
    for (std::size_t j = 0; j + 1 < n_; ++j) {
      omega[j] = prod * std::cos(theta[j]);
      prod *= std::sin(theta[j]);
    }
    omega[n_ - 1] = prod;
  }

  // Integrand times the Jacobian of the parameterization and the weight.
  void sample(const Region& r, std::span<const double> t, std::span<double> fv) {
    ++evaluations_;
    const HalfLine& hl = pieces_[r.piece[0]];
    const double u = hl.scale * std::exp(0.5 * std::numbers::pi * std::sinh(t[0]));
    double jac = u * 0.5 * std::numbers::pi * std::cosh(t[0]);
    if (n_ == 1) {
      if (hl.power != 0.0) jac *= std::pow(u, hl.power);
      x_[0] = hl.origin + hl.dir * u;
    } else {
      // x = x0 + u omega(theta); on its quarter panel each angle is a cubic
      // smoothstep of t, which makes |theta - edge|^{A_i} dtheta analytic for
      // integer and half-integer A_i
      std::array<double, 16> theta_buf{};
      std::vector<double> theta_vec;
      std::span<double> theta;
      if (n_ - 1 <= theta_buf.size()) {
        theta = std::span<double>(theta_buf.data(), n_ - 1);
      } else {
        theta_vec.resize(n_ - 1);
        theta = theta_vec;
      }
      constexpr double q = 0.25 * std::numbers::pi;
      for (std::size_t j = 1; j < n_; ++j) {
        const double v = 0.5 * (t[j] + 1.0);
        theta[j - 1] = q * (2.0 * r.piece[j] + 2.0 * v * v * (3.0 - 2.0 * v));
        jac *= 6.0 * q * v * (1.0 - v);
      }
      jac *= std::pow(u, static_cast<double>(n_ - 1));
      double prod = 1.0;
      for (std::size_t j = 0; j + 1 < n_; ++j) {
        const double c = std::cos(theta[j]);
        const double sn = std::sin(theta[j]);
        x_[j] = centre_[j] + u * prod * c;
        prod *= sn;
        if (j + 2 < n_) jac *= std::pow(std::abs(sn), static_cast<double>(n_ - 2 - j));
      }
      x_[n_ - 1] = centre_[n_ - 1] + u * prod;
      for (std::size_t i = 0; i < n_; ++i) {
        if (exponents_[i] > 0.0) {
          x_[i] = std::abs(x_[i]);
          jac *= std::pow(x_[i], exponents_[i]);
        }
      }
    }
    if (!(jac > 0.0) || !std::isfinite(jac)) {
      std::fill(fv.begin(), fv.end(), 0.0);
      return;
    }
    g_(x_, out_);
    for (std::size_t k = 0; k < count_; ++k) {
      if (!std::isfinite(out_[k])) {
        throw QuadratureError("integrand is not finite at a quadrature node", 0.0,
                              std::numeric_limits<double>::infinity(), x_);
      }
      fv[k] = jac * out_[k];
    }
  }

  void evaluate(Region& r) {
    r.val.assign(count_, 0.0);
    r.err.assign(count_, 0.0);
    if (n_ == 1) {
      kronrod(r);
    } else {
      tensor_kronrod(r);
    }
  }

  void kronrod(Region& r) {
    std::vector<double> rk(count_, 0.0), rg(count_, 0.0), fv(15 * count_);
    std::array<double, 1> t{};
    for (std::size_t j = 0; j < 15; ++j) {
      const std::size_t jj = j < 8 ? j : 14 - j;
      t[0] = r.c[0] + (j < 8 ? -1.0 : 1.0) * r.h[0] * kXgk[jj];
      std::span<double> f(fv.data() + j * count_, count_);
      sample(r, t, f);
      for (std::size_t k = 0; k < count_; ++k) {
        rk[k] += kWgk[jj] * f[k];
        if (jj % 2 == 1) rg[k] += kWg[jj / 2] * f[k];
      }
    }
    const double hw = r.h[0];
    for (std::size_t k = 0; k < count_; ++k) {
      double asc = 0.0, mag = 0.0;
      for (std::size_t j = 0; j < 15; ++j) {
        const std::size_t jj = j < 8 ? j : 14 - j;
        asc += kWgk[jj] * std::abs(fv[j * count_ + k] - 0.5 * rk[k]);
        mag += kWgk[jj] * std::abs(fv[j * count_ + k]);
      }
      asc *= hw;
      mag *= hw;
      const double diff = std::abs(hw * (rk[k] - rg[k]));
      double e = diff;
      if (asc > 0.0 && diff > 0.0) e = asc * std::min(1.0, std::pow(200.0 * diff / asc, 1.5));
      r.val[k] = hw * rk[k];
      r.err[k] = std::max(e, 50.0 * std::numeric_limits<double>::epsilon() * mag);
    }
  }

  // Tensor G7K15 over the region; the embedded 7^n Gauss rule gives the
  // error, and per-axis Gauss/Kronrod differences choose the split axis.
  void tensor_kronrod(Region& r) {
    constexpr std::size_t m = 15;
    std::array<double, m> node{}, wk{}, wg{};
    for (std::size_t j = 0; j < m; ++j) {
      const std::size_t jj = j < 8 ? j : 14 - j;
      node[j] = (j < 8 ? -1.0 : 1.0) * kXgk[jj];
      wk[j] = kWgk[jj];
      wg[j] = (jj % 2 == 1) ? kWg[jj / 2] : 0.0;
    }
    std::size_t total = 1;
    for (std::size_t i = 0; i < n_; ++i) total *= m;
    fbuf_.resize(total * count_);
    std::vector<std::size_t> idx(n_, 0);
    std::vector<double> t(n_), rk(count_, 0.0), rg(count_, 0.0), mag(count_, 0.0);
    std::vector<double> axis_g(n_ * count_, 0.0);
    for (std::size_t pt = 0; pt < total; ++pt) {
      double w_k = 1.0, w_g = 1.0;
      for (std::size_t i = 0; i < n_; ++i) {
        t[i] = r.c[i] + r.h[i] * node[idx[i]];
        w_k *= wk[idx[i]];
        w_g *= wg[idx[i]];
      }
      std::span<double> f(fbuf_.data() + pt * count_, count_);
      sample(r, t, f);
      for (std::size_t k = 0; k < count_; ++k) {
        rk[k] += w_k * f[k];
        rg[k] += w_g * f[k];
        mag[k] += w_k * std::abs(f[k]);
      }
      for (std::size_t i = 0; i < n_; ++i) {
        const double wgi = wg[idx[i]];
        if (wgi == 0.0) continue;
        const double w_mix = w_k / wk[idx[i]] * wgi;
        for (std::size_t k = 0; k < count_; ++k) axis_g[i * count_ + k] += w_mix * f[k];
      }
      for (std::size_t i = 0; i < n_; ++i) {
        if (++idx[i] < m) break;
        idx[i] = 0;
      }
    }
    double vol = 1.0;
    for (double h : r.h) vol *= h;
    std::vector<double> asc(count_, 0.0);
    std::fill(idx.begin(), idx.end(), 0);
    const double cell = std::ldexp(1.0, static_cast<int>(n_));
    for (std::size_t pt = 0; pt < total; ++pt) {
      double w_k = 1.0;
      for (std::size_t i = 0; i < n_; ++i) w_k *= wk[idx[i]];
      for (std::size_t k = 0; k < count_; ++k) asc[k] += w_k * std::abs(fbuf_[pt * count_ + k] - rk[k] / cell);
      for (std::size_t i = 0; i < n_; ++i) {
        if (++idx[i] < m) break;
        idx[i] = 0;
      }
    }
    double worst_axis = -1.0;
    for (std::size_t k = 0; k < count_; ++k) {
      r.val[k] = vol * rk[k];
      const double sc = vol * asc[k];
      const double diff = vol * std::abs(rk[k] - rg[k]);
      double e = diff;
      if (sc > 0.0 && diff > 0.0) e = sc * std::min(1.0, std::pow(200.0 * diff / sc, 1.5));
      r.err[k] = std::max(e, 50.0 * std::numeric_limits<double>::epsilon() * vol * mag[k]);
    }
    for (std::size_t i = 0; i < n_; ++i) {
      double d = 0.0;
      for (std::size_t k = 0; k < count_; ++k) {
        const double ref = std::max(mag[k], std::numeric_limits<double>::min());
        d = std::max(d, std::abs(rk[k] - axis_g[i * count_ + k]) / ref);
      }
      if (d > worst_axis * (1.0 + 1e-6) || (d >= worst_axis * (1.0 - 1e-6) && r.h[i] > r.h[r.split_axis])) {
        worst_axis = d;
        r.split_axis = i;
      }
    }
  }

  const VectorIntegrand& g_;
  std::size_t count_;
  QuadratureSpec spec_;
  std::size_t n_;
  std::vector<double> exponents_;
  std::vector<double> centre_;
  std::vector<HalfLine> pieces_;
  std::vector<double> x_;
  std::vector<double> out_;
  std::vector<double> fbuf_;
  int panels_ = 1;
  std::size_t max_regions_ = 0;
  double evaluations_ = 0.0;
};

}  // namespace detail

/// Integrates `count` functions at once against x^A dx over R^n_A.
///
/// The error reported per component is the scheme's estimate; a
/// QuadratureError is thrown when rel_tol cannot be met within the budget
/// (tensor: max_points, adaptive: max_subdivisions per axis integral) or when
/// the integrand returns a non-finite value.
inline std::vector<QuadratureResult> integrate_weighted_many(const VectorIntegrand& g, std::size_t count,
                                                             const MonomialWeight& w, const QuadratureSpec& spec,
                                                             const FieldHints& hints = {}) {
  spec.validate();
  if (!hints.center.empty()) {
    if (hints.center.size() != w.n()) throw DimensionError("integrate: center has wrong dimension");
    w.require_admissible(hints.center, "integrate");
  }
  if (!(hints.scale > 0.0)) throw DomainError("integrate: scale hint must be positive");
  if (spec.scheme == Scheme::tensor) return detail::integrate_tensor(g, count, w.exponents(), spec, hints);
  return detail::AdaptiveCubature(g, count, w.exponents(), spec, hints).run();
}

inline QuadratureResult integrate_weighted(const ScalarField& g, const MonomialWeight& w, const QuadratureSpec& spec) {
  if (g.dimension != w.n()) throw DimensionError("integrate_weighted: field and weight dimensions differ");
  VectorIntegrand vg = [&](std::span<const double> x, std::span<double> out) { out[0] = g.eval(x); };
  return integrate_weighted_many(vg, 1, w, spec, g.hints)[0];
}

/// int_0^inf g(r) r^power dr over the half-line, with the same node machinery.
inline QuadratureResult integrate_half_line(const std::function<double(double)>& g, double power,
                                            const QuadratureSpec& spec, double scale = 1.0, double radius = 0.0) {
  spec.validate();
  if (!(power > -1.0)) throw DomainError("integrate_half_line: power must exceed -1");
  // a one-axis cone with exponent 1 is the half-line with weight r
  FieldHints hints{{}, scale, radius};
  const std::vector<double> exps{1.0};
  VectorIntegrand vg = [&](std::span<const double> x, std::span<double> out) {
    out[0] = g(x[0]) * std::pow(x[0], power - 1.0);
  };
  if (spec.scheme == Scheme::tensor) return detail::integrate_tensor(vg, 1, exps, spec, hints)[0];
  return detail::AdaptiveCubature(vg, 1, exps, spec, hints).run()[0];
}

/// P(B_A) int_0^inf profile(r) r^{D-1} dr with P(B_A) = D m(B_A): the integral
/// of profile(|x|) x^A over the cone by polar decomposition.
inline QuadratureResult integrate_radial(const std::function<double(double)>& profile, const MonomialWeight& w,
                                         const QuadratureSpec& spec, double scale = 1.0, double radius = 0.0) {
  const double perimeter = w.D() * w.ball_measure();
  QuadratureResult r = integrate_half_line(profile, w.D() - 1.0, spec, scale, radius);
  return {perimeter * r.value, perimeter * r.err};
}

namespace detail {

// Tanh-sinh nodes on [a, b] at step h; endpoint singularities are harmless.
inline void tanh_sinh_panel(double a, double b, double h, std::vector<double>& x, std::vector<double>& w) {
  const double c = 0.5 * (a + b);
  const double hw = 0.5 * (b - a);
  const int kmax = static_cast<int>(std::ceil(3.2 / h));
  for (int k = -kmax; k <= kmax; ++k) {
    const double t = k * h;
    const double s = 0.5 * std::numbers::pi * std::sinh(t);
    const double u = std::tanh(s);
    const double ch = std::cosh(s);
    const double wt = h * 0.5 * std::numbers::pi * std::cosh(t) / (ch * ch);
    const double xv = c + hw * u;
    if (!(wt > 0.0) || xv <= a || xv >= b) continue;
    x.push_back(xv);
    w.push_back(hw * wt);
  }
}

// (1/D) * int over the cone part of the unit sphere of ||theta||^{-D} theta^A,
// hyperspherical coordinates, panels cut at multiples of pi/2 so every
// coordinate keeps a fixed sign inside a panel; up to three dimensions the
// panels are halved again so the planar l^inf kinks fall on panel edges.
inline double sphere_ball_measure(const NormSpec& norm, const MonomialWeight& w, double h) {
  const std::size_t n = w.n();
  const double d = w.D();
  if (n == 1) {
    double acc = 0.0;
    for (double s : {1.0, -1.0}) {
      if (s < 0.0 && w.constrained(0)) continue;
      const std::array<double, 1> th{s};
      acc += std::pow(norm.norm(th), -d);
    }
    return acc / d;
  }
  const std::size_t nang = n - 1;
  std::vector<std::vector<double>> nodes(nang), weights(nang);
  for (std::size_t j = 0; j < nang; ++j) {
    const bool last = (j + 1 == nang);
    const int split = n <= 3 ? 2 : 1;
    const int panels = (last ? 4 : 2) * split;
    for (int piece = 0; piece < panels; ++piece) {
      const int pi = piece / split;
      const double a = piece * (0.5 / split) * std::numbers::pi;
      const double b = a + (0.5 / split) * std::numbers::pi;
      // sign of the coordinate(s) this angle controls
      bool allowed = true;
      if (!last) {
        const double sgn = pi == 0 ? 1.0 : -1.0;
        if (sgn < 0.0 && w.constrained(j)) allowed = false;
      } else {
        const double cs = (pi == 0 || pi == 3) ? 1.0 : -1.0;
        const double sn = (pi == 0 || pi == 1) ? 1.0 : -1.0;
        if ((cs < 0.0 && w.constrained(n - 2)) || (sn < 0.0 && w.constrained(n - 1))) allowed = false;
      }
      if (allowed) tanh_sinh_panel(a, b, h, nodes[j], weights[j]);
    }
  }
  std::vector<std::size_t> idx(nang, 0);
  std::vector<double> theta(n);
  CompensatedSum acc;
  for (const auto& nd : nodes) {
    if (nd.empty()) return 0.0;
  }
  while (true) {
    double jac = 1.0;
    double sprod = 1.0;
    for (std::size_t j = 0; j < nang; ++j) {
      const double phi = nodes[j][idx[j]];
      jac *= weights[j][idx[j]];
      if (j + 1 < nang) {
        theta[j] = sprod * std::cos(phi);
        jac *= std::pow(std::sin(phi), static_cast<double>(n - 2 - j));
        sprod *= std::sin(phi);
      } else {
        theta[j] = sprod * std::cos(phi);
        theta[j + 1] = sprod * std::sin(phi);
      }
    }
    const double nv = norm.norm(theta);
    acc.add(jac * std::pow(nv, -d) * w.weight_at(theta));
    std::size_t j = nang;
    bool done = true;
    while (j > 0) {
      --j;
      if (++idx[j] < nodes[j].size()) {
        done = false;
        break;
      }
      idx[j] = 0;
    }
    if (done) break;
  }
  return acc.value() / d;
}

}  // namespace detail

/// m(B_A) = int over {||x|| < 1} of x^A dx for any norm, by quadrature of the
/// ball indicator in polar form: the radial part is integrated exactly,
/// the angular part by tanh-sinh on each quadrant, halving the step until two
/// levels agree to rel_tol.
inline QuadratureResult weighted_ball_measure_by_quadrature(const NormSpec& norm, const MonomialWeight& w,
                                                            double rel_tol = 1e-10) {
  if (norm.dimension() != 0 && norm.dimension() != w.n()) {
    throw DimensionError("ball measure: norm and weight dimensions differ");
  }
  double h = 0.5;
  double prev = detail::sphere_ball_measure(norm, w, h);
  // norms with kinks inside a quadrant converge only algebraically; cap the work
  const double h_min = w.n() <= 2 ? 1.0 / 4096.0 : (w.n() == 3 ? 1.0 / 128.0 : 1.0 / 32.0);
  while (h > h_min) {
    h *= 0.5;
    const double cur = detail::sphere_ball_measure(norm, w, h);
    const double diff = std::abs(cur - prev);
    if (diff <= rel_tol * std::abs(cur)) return {cur, diff};
    prev = cur;
  }
  throw QuadratureError("ball measure: angular quadrature did not converge", prev, 0.0);
}

/// Volume of the unit ball of `norm` in R^n.
inline QuadratureResult unit_ball_volume_by_quadrature(const NormSpec& norm, std::size_t n, double rel_tol = 1e-10) {
  return weighted_ball_measure_by_quadrature(norm, MonomialWeight::unweighted(n), rel_tol);
}

}  // namespace logsob
