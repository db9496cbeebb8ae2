#pragma once

// Norms on R^n and on product spaces R^{n l}, with closed-form dual norms and
// gradients. A NormSpec is an immutable value; evaluation is pure.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <memory>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "logsob/error.hpp"

namespace logsob {

/// Holder conjugate q/(q-1), with 1 <-> infinity.
inline double conjugate_exponent(double q) {
  if (q == 1.0) return std::numeric_limits<double>::infinity();
  if (std::isinf(q)) return 1.0;
  return q / (q - 1.0);
}

namespace detail {

// l^q norm of a vector, scaled to avoid overflow/underflow.
inline double lq_norm(std::span<const double> x, double q) {
  double amax = 0.0;
  for (double v : x) amax = std::max(amax, std::abs(v));
  if (amax == 0.0 || std::isinf(q)) return amax;
  if (q == 1.0) {
    double s = 0.0;
    for (double v : x) s += std::abs(v);
    return s;
  }
  double s = 0.0;
  if (q == 2.0) {
    for (double v : x) {
      const double r = v / amax;
      s += r * r;
    }
    return amax * std::sqrt(s);
  }
  for (double v : x) s += std::pow(std::abs(v) / amax, q);
  return amax * std::pow(s, 1.0 / q);
}

inline double sign(double v) { return (v > 0.0) - (v < 0.0); }

// Gradient of the l^q norm at x (x != 0) written into out.
inline void lq_gradient(std::span<const double> x, double q, std::span<double> out) {
  const double nx = lq_norm(x, q);
  if (nx == 0.0) throw NonDifferentiableError("norm_gradient: norm is not differentiable at 0");
  if (q == 1.0) {
    for (std::size_t i = 0; i < x.size(); ++i) {
      if (x[i] == 0.0) {
        throw NonDifferentiableError("norm_gradient: l^1 norm is not differentiable on a coordinate hyperplane");
      }
      out[i] = sign(x[i]);
    }
    return;
  }
  if (std::isinf(q)) {
    std::size_t arg = 0;
    std::size_t ties = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      if (std::abs(x[i]) == nx) {
        arg = i;
        ++ties;
      }
    }
    if (ties != 1) throw NonDifferentiableError("norm_gradient: l^inf norm has a tied maximum");
    std::fill(out.begin(), out.end(), 0.0);
    out[arg] = sign(x[arg]);
    return;
  }
  for (std::size_t i = 0; i < x.size(); ++i) {
    out[i] = sign(x[i]) * std::pow(std::abs(x[i]) / nx, q - 1.0);
  }
}

}  // namespace detail

/// A norm on R^n, or the product norm (sum_i ||x^i||^e)^(1/e) on (R^n)^l.
///
/// dimension() == 0 means "any length" for euclidean / q_norm. The product
/// variant evaluates blockwise; its dual is (sum_i ||xi^i||_*^{e'})^(1/e').
class NormSpec {
 public:
  enum class Kind { euclidean, q_norm, diagonal_weighted, product };

  static NormSpec euclidean(std::size_t dim = 0) {
    NormSpec s;
    s.kind_ = Kind::euclidean;
    s.q_ = 2.0;
    s.dim_ = dim;
    return s;
  }

  static NormSpec q_norm(double q, std::size_t dim = 0) {
    if (!(q >= 1.0)) throw DomainError("q_norm: q must be >= 1 (or +inf)");
    NormSpec s;
    s.kind_ = Kind::q_norm;
    s.q_ = q;
    s.dim_ = dim;
    return s;
  }

  /// ||x|| = ||(w_1 x_1, ..., w_n x_n)||_q with w_i > 0.
  static NormSpec diagonal_weighted(std::vector<double> weights, double q = 2.0) {
    if (weights.empty()) throw DomainError("diagonal_weighted: empty weight vector");
    for (double w : weights) {
      if (!(w > 0.0) || !std::isfinite(w)) throw DomainError("diagonal_weighted: weights must be positive");
    }
    if (!(q >= 1.0)) throw DomainError("diagonal_weighted: q must be >= 1");
    NormSpec s;
    s.kind_ = Kind::diagonal_weighted;
    s.q_ = q;
    s.dim_ = weights.size();
    s.weights_ = std::move(weights);
    return s;
  }

  /// |||z||| = (sum_{i<l} ||x^i||^exponent)^(1/exponent), z = (x^1, ..., x^l).
  static NormSpec product(const NormSpec& base, std::size_t copies, double exponent) {
    if (copies == 0) throw DomainError("product norm: l must be positive");
    if (!(exponent > 1.0)) throw DomainError("product norm: exponent must be > 1");
    NormSpec s;
    s.kind_ = Kind::product;
    s.q_ = exponent;
    s.copies_ = copies;
    s.base_ = std::make_shared<const NormSpec>(base);
    s.dim_ = base.dimension() * copies;
    return s;
  }

  Kind kind() const noexcept { return kind_; }
  /// q for euclidean/q_norm/diagonal, the block exponent for product.
  double exponent() const noexcept { return q_; }
  std::span<const double> weights() const noexcept { return weights_; }
  std::size_t copies() const noexcept { return copies_; }
  const NormSpec& base() const {
    if (!base_) throw DomainError("NormSpec::base: not a product norm");
    return *base_;
  }
  std::size_t dimension() const noexcept { return dim_; }

  bool is_euclidean() const noexcept {
    return kind_ == Kind::euclidean || (kind_ == Kind::q_norm && q_ == 2.0);
  }

  double norm(std::span<const double> x) const {
    check_dim(x.size(), "norm");
    switch (kind_) {
      case Kind::euclidean:
        return detail::lq_norm(x, 2.0);
      case Kind::q_norm:
        return detail::lq_norm(x, q_);
      case Kind::diagonal_weighted: {
        std::vector<double> wx(x.size());
        for (std::size_t i = 0; i < x.size(); ++i) wx[i] = weights_[i] * x[i];
        return detail::lq_norm(wx, q_);
      }
      case Kind::product: {
        std::vector<double> blocks(copies_);
        const std::size_t m = x.size() / copies_;
        for (std::size_t i = 0; i < copies_; ++i) blocks[i] = base_->norm(x.subspan(i * m, m));
        return detail::lq_norm(blocks, q_);
      }
    }
    return 0.0;
  }

  double dual(std::span<const double> xi) const {
    check_dim(xi.size(), "dual_norm");
    switch (kind_) {
      case Kind::euclidean:
        return detail::lq_norm(xi, 2.0);
      case Kind::q_norm:
        return detail::lq_norm(xi, conjugate_exponent(q_));
      case Kind::diagonal_weighted: {
        std::vector<double> v(xi.size());
        for (std::size_t i = 0; i < xi.size(); ++i) v[i] = xi[i] / weights_[i];
        return detail::lq_norm(v, conjugate_exponent(q_));
      }
      case Kind::product: {
        std::vector<double> blocks(copies_);
        const std::size_t m = xi.size() / copies_;
        for (std::size_t i = 0; i < copies_; ++i) blocks[i] = base_->dual(xi.subspan(i * m, m));
        return detail::lq_norm(blocks, conjugate_exponent(q_));
      }
    }
    return 0.0;
  }

  void gradient(std::span<const double> x, std::span<double> out) const {
    check_dim(x.size(), "norm_gradient");
    if (out.size() != x.size()) throw DimensionError("norm_gradient: output length mismatch");
    switch (kind_) {
      case Kind::euclidean:
        detail::lq_gradient(x, 2.0, out);
        return;
      case Kind::q_norm:
        detail::lq_gradient(x, q_, out);
        return;
      case Kind::diagonal_weighted: {
        std::vector<double> wx(x.size());
        for (std::size_t i = 0; i < x.size(); ++i) wx[i] = weights_[i] * x[i];
        detail::lq_gradient(wx, q_, out);
        for (std::size_t i = 0; i < x.size(); ++i) out[i] *= weights_[i];
        return;
      }
      case Kind::product: {
        const double total = norm(x);
        if (total == 0.0) throw NonDifferentiableError("norm_gradient: norm is not differentiable at 0");
        const std::size_t m = x.size() / copies_;
        for (std::size_t i = 0; i < copies_; ++i) {
          auto xi = x.subspan(i * m, m);
          auto gi = out.subspan(i * m, m);
          const double bi = base_->norm(xi);
          if (bi == 0.0) {
            // d/dx ||x||^e vanishes at 0 for e > 1
            std::fill(gi.begin(), gi.end(), 0.0);
            continue;
          }
          base_->gradient(xi, gi);
          const double c = std::pow(bi / total, q_ - 1.0);
          for (double& g : gi) g *= c;
        }
        return;
      }
    }
  }

  std::vector<double> gradient(std::span<const double> x) const {
    std::vector<double> g(x.size());
    gradient(x, g);
    return g;
  }

  std::string describe() const {
    switch (kind_) {
      case Kind::euclidean:
        return "euclidean";
      case Kind::q_norm:
        return std::isinf(q_) ? "l^inf" : "l^" + format_real(q_);
      case Kind::diagonal_weighted:
        return "diag-l^" + format_real(q_);
      case Kind::product:
        return "product(" + base_->describe() + ", l=" + std::to_string(copies_) +
               ", e=" + format_real(q_) + ")";
    }
    return "";
  }

 private:
  NormSpec() = default;

  static std::string format_real(double v) {
    std::string s = std::to_string(v);
    s.erase(s.find_last_not_of('0') + 1);
    if (!s.empty() && s.back() == '.') s.pop_back();
    return s;
  }

  void check_dim(std::size_t len, const char* who) const {
    if (len == 0) throw DimensionError(std::string(who) + ": empty vector");
    if (dim_ != 0 && len != dim_) {
      throw DimensionError(std::string(who) + ": expected length " + std::to_string(dim_) + ", got " +
                           std::to_string(len));
    }
    if (kind_ == Kind::product && len % copies_ != 0) {
      throw DimensionError(std::string(who) + ": length not divisible by the number of blocks");
    }
    if (kind_ == Kind::product && base_->dimension() == 0 && len / copies_ == 0) {
      throw DimensionError(std::string(who) + ": empty blocks");
    }
  }

  Kind kind_ = Kind::euclidean;
  double q_ = 2.0;
  std::size_t dim_ = 0;
  std::size_t copies_ = 1;
  std::vector<double> weights_;
  std::shared_ptr<const NormSpec> base_;
};

inline double norm(const NormSpec& spec, std::span<const double> x) { return spec.norm(x); }
inline double dual_norm(const NormSpec& spec, std::span<const double> xi) { return spec.dual(xi); }
inline std::vector<double> norm_gradient(const NormSpec& spec, std::span<const double> x) {
  return spec.gradient(x);
}

struct DualNormEstimate {
  double value;
  double residual;  ///< final pattern-search step; the estimate is a certified lower bound
  std::vector<double> maximizer;
};

/// Support-function evaluation sup_{||x|| <= 1} x . xi by direct search.
///
/// Maximizes the scale-invariant ratio x.xi / ||x|| with a compass search
/// started from xi and from every signed coordinate direction. Only needs
/// norm evaluations, so it serves as an independent check on the closed-form
/// duals. Throws ConvergenceError if the step does not shrink below tol.
inline DualNormEstimate dual_norm_search(const NormSpec& spec, std::span<const double> xi,
                                         double tol = 1e-12, int max_iters = 20000) {
  const std::size_t n = xi.size();
  if (spec.dimension() != 0 && spec.dimension() != n) throw DimensionError("dual_norm_search: length mismatch");
  if (detail::lq_norm(xi, 2.0) == 0.0) return {0.0, 0.0, std::vector<double>(n, 0.0)};

  auto ratio = [&](const std::vector<double>& x) {
    const double nx = spec.norm(x);
    if (nx == 0.0) return -std::numeric_limits<double>::infinity();
    return std::inner_product(x.begin(), x.end(), xi.begin(), 0.0) / nx;
  };

  std::vector<std::vector<double>> starts;
  starts.emplace_back(xi.begin(), xi.end());
  for (std::size_t i = 0; i < n; ++i) {
    for (double s : {1.0, -1.0}) {
      std::vector<double> e(n, 0.0);
      e[i] = s;
      starts.push_back(std::move(e));
    }
  }

  DualNormEstimate best{-std::numeric_limits<double>::infinity(), 1.0, {}};
  for (auto x : starts) {
    // keep iterates on the Euclidean unit sphere so step sizes are meaningful
    const double r0 = detail::lq_norm(x, 2.0);
    for (double& v : x) v /= r0;
    double fx = ratio(x);
    double step = 0.5;
    int it = 0;
    while (step > tol && it < max_iters) {
      ++it;
      bool improved = false;
      for (std::size_t i = 0; i < n && !improved; ++i) {
        for (double s : {step, -step}) {
          std::vector<double> y = x;
          y[i] += s;
          const double ry = detail::lq_norm(y, 2.0);
          if (ry == 0.0) continue;
          for (double& v : y) v /= ry;
          const double fy = ratio(y);
          if (fy > fx) {
            x = std::move(y);
            fx = fy;
            improved = true;
            break;
          }
        }
      }
      if (!improved) step *= 0.5;
    }
    if (step > tol) throw ConvergenceError("dual_norm_search: step did not converge", step);
    if (fx > best.value) best = {fx, step, x};
  }
  return best;
}

}  // namespace logsob
