#pragma once

// The cone R^n_A with the monomial weight x^A = |x_1|^{A_1} ... |x_n|^{A_n}:
// homogeneous dimension D, the Gamma-product constant Pi(A), the weighted
// unit-ball measure m(B_A), the sharp log-Sobolev and Sobolev constants, and
// the closed-form Gaussian / Cauchy-type integrals over the cone.
//
// All Gamma ratios are assembled in log space.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "logsob/error.hpp"
#include "logsob/norms.hpp"
#include "logsob/specialfn.hpp"

namespace logsob {

class MonomialWeight {
 public:
  explicit MonomialWeight(std::vector<double> exponents) : a_(std::move(exponents)) {
    if (a_.empty()) throw DomainError("MonomialWeight: dimension must be positive");
    double log_prod = 0.0;
    for (double a : a_) {
      if (!(a >= 0.0) || !std::isfinite(a)) {
        throw DomainError("MonomialWeight: exponents must be finite and >= 0");
      }
      d_ += a;
      if (a > 0.0) ++k_;
      log_prod += log_gamma((a + 1.0) / 2.0);
    }
    d_ += static_cast<double>(a_.size());
    log_pi_ = (2.0 / d_) * (log_prod - k_ * std::numbers::ln2);
    log_ball_ = 0.5 * d_ * log_pi_ - log_gamma(d_ / 2.0 + 1.0);
  }

  static MonomialWeight unweighted(std::size_t n) { return MonomialWeight(std::vector<double>(n, 0.0)); }

  std::span<const double> exponents() const noexcept { return a_; }
  double exponent(std::size_t i) const { return a_.at(i); }
  std::size_t n() const noexcept { return a_.size(); }
  /// Homogeneous dimension n + sum A_i.
  double D() const noexcept { return d_; }
  /// Number of positive exponents.
  int k() const noexcept { return k_; }
  bool is_unweighted() const noexcept { return k_ == 0; }
  /// Coordinate i is restricted to x_i > 0.
  bool constrained(std::size_t i) const { return a_.at(i) > 0.0; }

  double log_pi_A() const noexcept { return log_pi_; }
  double pi_A() const noexcept { return std::exp(log_pi_); }
  /// m(B_A) for the Euclidean unit ball.
  double log_ball_measure() const noexcept { return log_ball_; }
  double ball_measure() const noexcept { return std::exp(log_ball_); }

  /// x^A at a point of the cone (coordinates with A_i > 0 must be positive).
  double weight_at(std::span<const double> x) const {
    double w = 1.0;
    for (std::size_t i = 0; i < a_.size(); ++i) {
      if (a_[i] > 0.0) w *= std::pow(std::abs(x[i]), a_[i]);
    }
    return w;
  }

  bool admissible(std::span<const double> x0) const {
    if (x0.empty()) return true;
    if (x0.size() != a_.size()) return false;
    for (std::size_t i = 0; i < a_.size(); ++i) {
      if (a_[i] > 0.0 && x0[i] != 0.0) return false;
    }
    return true;
  }

  /// Throws DomainError unless (x0)_i = 0 wherever A_i > 0. An empty x0 is the origin.
  void require_admissible(std::span<const double> x0, const char* who) const {
    if (!x0.empty() && x0.size() != a_.size()) {
      throw DimensionError(std::string(who) + ": center has wrong dimension");
    }
    if (!admissible(x0)) {
      throw DomainError(std::string(who) + ": center must vanish in every coordinate with A_i > 0");
    }
  }

  /// Zero the coordinates that must vanish.
  std::vector<double> project_center(std::span<const double> x0) const {
    std::vector<double> c(a_.size(), 0.0);
    for (std::size_t i = 0; i < a_.size() && i < x0.size(); ++i) {
      if (a_[i] == 0.0) c[i] = x0[i];
    }
    return c;
  }

  /// B = (A, A, ..., A), l copies.
  MonomialWeight repeated(std::size_t l) const {
    std::vector<double> b;
    b.reserve(a_.size() * l);
    for (std::size_t i = 0; i < l; ++i) b.insert(b.end(), a_.begin(), a_.end());
    return MonomialWeight(std::move(b));
  }

  std::string describe() const {
    std::string s = "(";
    for (std::size_t i = 0; i < a_.size(); ++i) {
      if (i) s += ",";
      std::string v = std::to_string(a_[i]);
      v.erase(v.find_last_not_of('0') + 1);
      if (v.back() == '.') v.pop_back();
      s += v;
    }
    return s + ")";
  }

 private:
  std::vector<double> a_;
  double d_ = 0.0;
  int k_ = 0;
  double log_pi_ = 0.0;
  double log_ball_ = 0.0;
};

inline double hoelder_conjugate(double p) {
  if (!(p > 1.0)) throw DomainError("Hoelder conjugate needs p > 1");
  return p / (p - 1.0);
}

/// Pi(A) = [prod Gamma((A_i+1)/2) / 2^k]^(2/D).
inline double pi_constant(std::span<const double> a) {
  return MonomialWeight(std::vector<double>(a.begin(), a.end())).pi_A();
}

inline double ball_measure(const MonomialWeight& w) { return w.ball_measure(); }

/// ln m(B_A) for the unit ball of an l^q or diagonal norm, or nullopt-like NaN
/// when no closed form is known (product norms with weights, ...).
///
/// For ||.||_q: int_{cone} e^{-||x||_q^q} x^A dx = prod_i c_i Gamma((A_i+1)/q)/q
/// with c_i = 2 on free axes, and the same integral equals Gamma(D/q+1) m(B_A).
inline double log_weighted_ball_measure(const NormSpec& norm, const MonomialWeight& w) {
  using Kind = NormSpec::Kind;
  if (norm.dimension() != 0 && norm.dimension() != w.n()) {
    throw DimensionError("weighted ball measure: norm and weight dimensions differ");
  }
  if (norm.kind() == Kind::euclidean) return w.log_ball_measure();
  if (norm.kind() == Kind::q_norm || norm.kind() == Kind::diagonal_weighted) {
    const double q = norm.exponent();
    double acc = 0.0;
    for (std::size_t i = 0; i < w.n(); ++i) {
      const double a = w.exponent(i);
      const double half = std::isinf(q) ? -std::log(a + 1.0) : log_gamma((a + 1.0) / q) - std::log(q);
      acc += half + (a > 0.0 ? 0.0 : std::numbers::ln2);
      if (norm.kind() == Kind::diagonal_weighted) acc -= (a + 1.0) * std::log(norm.weights()[i]);
    }
    if (!std::isinf(q)) acc -= log_gamma(w.D() / q + 1.0);
    return acc;
  }
  if (norm.kind() == Kind::product && w.is_unweighted()) {
    const NormSpec& base = norm.base();
    const std::size_t l = norm.copies();
    const std::size_t n = w.n() / l;
    if (n * l != w.n()) throw DimensionError("weighted ball measure: dimension not divisible by l");
    const double log_mb = log_weighted_ball_measure(base, MonomialWeight::unweighted(n));
    // product_ball_volume in log form, inlined to keep this header self-contained
    const double e = norm.exponent();
    const double dn = static_cast<double>(n);
    const double dl = static_cast<double>(l);
    return (dl - 1.0) * std::log(dn / e) + dl * log_mb + dl * log_gamma(dn / e) - std::log(dl) -
           log_gamma(dn * dl / e);
  }
  return std::numeric_limits<double>::quiet_NaN();
}

inline bool has_closed_form_ball_measure(const NormSpec& norm, const MonomialWeight& w) {
  return !std::isnan(log_weighted_ball_measure(norm, w));
}

/// L_p(A) = (p/D) ((p-1)/e)^(p-1) [Gamma(D/p'+1) m(B_A)]^(-p/D), from ln m(B_A).
inline double sharp_ls_constant_from_log_ball(double p, double d, double log_m_ball) {
  if (!(p > 1.0)) throw DomainError("sharp_ls_constant: p must be > 1");
  const double pp = hoelder_conjugate(p);
  const double log_l = std::log(p / d) + (p - 1.0) * (std::log(p - 1.0) - 1.0) -
                       (p / d) * (log_gamma(d / pp + 1.0) + log_m_ball);
  return std::exp(log_l);
}

/// Sharp weighted constant L_p(A) with the Euclidean norm.
inline double sharp_ls_constant(double p, const MonomialWeight& w) {
  if (p == 2.0) {
    // 2 / (Pi(A) e D), same value as the general formula up to rounding
    return 2.0 / (w.pi_A() * std::numbers::e * w.D());
  }
  return sharp_ls_constant_from_log_ball(p, w.D(), w.log_ball_measure());
}

/// Sharp weighted constant for an arbitrary norm; needs a closed-form m(B_A)
/// (see log_weighted_ball_measure) or an externally computed one.
inline double sharp_ls_constant(double p, const MonomialWeight& w, const NormSpec& norm) {
  if (norm.is_euclidean()) return sharp_ls_constant(p, w);
  const double log_m = log_weighted_ball_measure(norm, w);
  if (std::isnan(log_m)) {
    throw DomainError("sharp_ls_constant: no closed-form ball measure for " + norm.describe() +
                      "; pass m(B_A) explicitly");
  }
  return sharp_ls_constant_from_log_ball(p, w.D(), log_m);
}

/// Unweighted sharp constant (p/n)((p-1)/e)^(p-1) (Gamma(n/p'+1) m(B^n))^(-p/n).
inline double unweighted_ls_constant(double p, double m_ball, int n) {
  if (!(p > 1.0)) throw DomainError("unweighted_ls_constant: p must be > 1");
  if (!(m_ball > 0.0)) throw DomainError("unweighted_ls_constant: m(B^n) must be positive");
  if (n < 1) throw DomainError("unweighted_ls_constant: n must be positive");
  return sharp_ls_constant_from_log_ball(p, static_cast<double>(n), std::log(m_ball));
}

/// ln C_{p,n,A} given D and ln m(B_A); lets the tensorization code work with
/// D = l D_A without building the repeated weight.
inline double log_sharp_sobolev_constant(double p, double d, double log_m_ball) {
  if (!(p > 1.0)) throw DomainError("sharp_sobolev_constant: p must be > 1");
  if (!(p < d)) throw DomainError("sharp_sobolev_constant: requires p < D");
  const double pp = hoelder_conjugate(p);
  return (-1.0 / p - 1.0 / d) * std::log(d) + (1.0 / pp) * std::log((p - 1.0) / (d - p)) +
         (1.0 / d) * (std::log(pp) + log_gamma(d) - log_gamma(d / p) - log_gamma(d / pp) - log_m_ball);
}

/// Sharp constant of the weighted Sobolev inequality, 1 < p < D.
inline double sharp_sobolev_constant(double p, const MonomialWeight& w) {
  return std::exp(log_sharp_sobolev_constant(p, w.D(), w.log_ball_measure()));
}

/// int_{R^n_A} e^{-t|x-x0|^alpha} x^A dx, or with the extra factor |x-x0|^alpha when moment is set.
inline double gaussian_integral(double alpha, double t, const MonomialWeight& w,
                                std::span<const double> x0 = {}, bool moment = false) {
  if (!(alpha > 0.0) || !(t > 0.0)) throw DomainError("gaussian_integral: alpha and t must be positive");
  w.require_admissible(x0, "gaussian_integral");
  const double d = w.D();
  double log_v = -(d / alpha) * std::log(t) + log_gamma(d / alpha + 1.0) - log_gamma(d / 2.0 + 1.0) +
                 0.5 * d * w.log_pi_A();
  if (moment) log_v += std::log(d / alpha) - std::log(t);
  return std::exp(log_v);
}

/// ln of int_{R^n_A} (1 + sigma |x-x0|^alpha)^(-beta) x^A dx, alpha beta > D.
inline double log_cauchy_integral(double alpha, double beta, double sigma, const MonomialWeight& w,
                                  std::span<const double> x0 = {}) {
  if (!(alpha > 1.0)) throw DomainError("cauchy_integral: alpha must be > 1");
  if (!(sigma > 0.0)) throw DomainError("cauchy_integral: sigma must be positive");
  const double d = w.D();
  if (!(alpha * beta > d)) throw DomainError("cauchy_integral: divergent, needs alpha*beta > D");
  w.require_admissible(x0, "cauchy_integral");
  return std::log(2.0 / alpha) + 0.5 * d * w.log_pi_A() - (d / alpha) * std::log(sigma) +
         log_gamma(d / alpha) - log_gamma(d / 2.0) + log_gamma(beta - d / alpha) - log_gamma(beta);
}

inline double cauchy_integral(double alpha, double beta, double sigma, const MonomialWeight& w,
                              std::span<const double> x0 = {}) {
  return std::exp(log_cauchy_integral(alpha, beta, sigma, w, x0));
}

/// ln A_l, the volume of the unit ball of |||z||| = (sum ||x^i||^p')^(1/p') on R^{n l}.
inline double log_product_ball_volume(int n, long long l, double pprime, double m_ball) {
  if (n < 1 || l < 1) throw DomainError("product_ball_volume: n and l must be positive");
  if (!(pprime > 1.0)) throw DomainError("product_ball_volume: p' must be > 1");
  if (!(m_ball > 0.0)) throw DomainError("product_ball_volume: m(B^n) must be positive");
  const double dn = n;
  const double dl = static_cast<double>(l);
  return (dl - 1.0) * std::log(dn / pprime) + dl * std::log(m_ball) + dl * log_gamma(dn / pprime) -
         std::log(dl) - log_gamma(dn * dl / pprime);
}

inline double product_ball_volume(int n, long long l, double pprime, double m_ball) {
  return std::exp(log_product_ball_volume(n, l, pprime, m_ball));
}

/// ln of int_{R^N} (1 + sigma |||z - z0|||^alpha)^(-beta) dz, given ln A_l.
inline double log_product_cauchy_integral(double alpha, double beta, double sigma, double n_total,
                                          double log_a_l) {
  if (!(alpha > 0.0) || !(sigma > 0.0)) throw DomainError("product_cauchy_integral: alpha, sigma must be positive");
  if (!(alpha * beta > n_total)) throw DomainError("product_cauchy_integral: divergent, needs alpha*beta > N");
  const double r = n_total / alpha;
  return std::log(n_total) + log_a_l + log_gamma(r) + log_gamma(beta - r) - std::log(alpha) - log_gamma(beta) -
         r * std::log(sigma);
}

inline double product_cauchy_integral(double alpha, double beta, double sigma, int n_total, double a_l) {
  if (!(a_l > 0.0)) throw DomainError("product_cauchy_integral: A_l must be positive");
  return std::exp(log_product_cauchy_integral(alpha, beta, sigma, n_total, std::log(a_l)));
}

}  // namespace logsob
