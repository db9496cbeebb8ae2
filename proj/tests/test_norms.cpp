#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

#include "logsob/norms.hpp"
#include "support.hpp"

using namespace logsob;

namespace {

const double kInf = std::numeric_limits<double>::infinity();

std::vector<NormSpec> sample_norms(std::size_t n) {
  return {NormSpec::euclidean(), NormSpec::q_norm(1.0), NormSpec::q_norm(1.5), NormSpec::q_norm(3.0),
          NormSpec::q_norm(kInf), NormSpec::diagonal_weighted(std::vector<double>(n, 0.7), 3.0)};
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

}  // namespace

TEST(Norms, Examples) {
  EXPECT_DOUBLE_EQ(NormSpec::euclidean().norm(std::vector<double>{3, 4}), 5.0);
  EXPECT_DOUBLE_EQ(NormSpec::q_norm(1).norm(std::vector<double>{1, -2, 3}), 6.0);
  EXPECT_DOUBLE_EQ(NormSpec::q_norm(kInf).norm(std::vector<double>{1, -7, 3}), 7.0);
  EXPECT_DOUBLE_EQ(NormSpec::euclidean().dual(std::vector<double>{3, 4}), 5.0);
  EXPECT_DOUBLE_EQ(NormSpec::q_norm(1).dual(std::vector<double>{1, -2}), 2.0);

  const std::vector<double> x{0.3, -1.2};
  const NormSpec prod = NormSpec::product(NormSpec::euclidean(2), 2, 2.0);
  const std::vector<double> z{x[0], x[1], x[0], x[1]};
  EXPECT_NEAR(prod.norm(z), std::sqrt(2.0) * NormSpec::euclidean().norm(x), 1e-15);
}

TEST(Norms, ProductDualIsBlockwiseConjugate) {
  testkit::Gen g(21);
  for (double e : {1.5, 2.0, 3.0}) {
    const NormSpec base = NormSpec::q_norm(3.0, 2);
    const NormSpec prod = NormSpec::product(base, 3, e);
    const double ep = conjugate_exponent(e);
    for (int i = 0; i < 50; ++i) {
      const std::vector<double> xi = g.nonzero(6);
      double s = 0.0;
      for (int b = 0; b < 3; ++b) s += std::pow(base.dual(std::span<const double>(xi).subspan(2 * b, 2)), ep);
      EXPECT_NEAR(prod.dual(xi), std::pow(s, 1.0 / ep), 1e-12 * prod.dual(xi));
    }
  }
}

TEST(Norms, ClosedFormDualsMatchDirectSearch) {
  testkit::Gen g(22);
  for (const NormSpec& nm : sample_norms(3)) {
    for (int i = 0; i < 10; ++i) {
      const std::vector<double> xi = g.nonzero(3);
      const DualNormEstimate est = dual_norm_search(nm, xi);
      EXPECT_NEAR(est.value, nm.dual(xi), 1e-8 * nm.dual(xi)) << nm.describe();
      EXPECT_LE(est.value, nm.dual(xi) * (1.0 + 1e-12));
    }
  }
  const NormSpec prod = NormSpec::product(NormSpec::q_norm(3.0), 2, 1.5);
  const std::vector<double> xi{0.4, -1.0, 2.0, 0.1};
  EXPECT_NEAR(dual_norm_search(prod, xi).value, prod.dual(xi), 1e-8 * prod.dual(xi));
}

TEST(Norms, HomogeneityTriangleDefiniteness) {
  testkit::Gen g(23);
  for (const NormSpec& nm : sample_norms(4)) {
    EXPECT_EQ(nm.norm(std::vector<double>(4, 0.0)), 0.0);
    for (int i = 0; i < 200; ++i) {
      const std::vector<double> x = g.nonzero(4), y = g.nonzero(4);
      const double lam = g.uniform(-5.0, 5.0);
      std::vector<double> lx(4), s(4);
      for (int k = 0; k < 4; ++k) {
        lx[k] = lam * x[k];
        s[k] = x[k] + y[k];
      }
      EXPECT_NEAR(nm.norm(lx), std::abs(lam) * nm.norm(x), 1e-12 * std::abs(lam) * nm.norm(x)) << nm.describe();
      EXPECT_LE(nm.norm(s), (nm.norm(x) + nm.norm(y)) * (1.0 + 1e-14)) << nm.describe();
      EXPECT_GT(nm.norm(x), 0.0);
    }
  }
}

TEST(Norms, HoelderDuality) {
  testkit::Gen g(24);
  for (const NormSpec& nm : sample_norms(3)) {
    for (int i = 0; i < 1000; ++i) {
      const std::vector<double> x = g.nonzero(3), xi = g.nonzero(3);
      EXPECT_LE(dot(x, xi), nm.norm(x) * nm.dual(xi) + 1e-10) << nm.describe();
    }
  }
}

TEST(Norms, Bidual) {
  testkit::Gen g(25);
  for (double q : {1.0, 1.25, 2.0, 3.0, 7.0, kInf}) {
    const NormSpec primal = NormSpec::q_norm(q);
    const NormSpec dual = NormSpec::q_norm(conjugate_exponent(q));
    for (int i = 0; i < 100; ++i) {
      const std::vector<double> x = g.nonzero(3);
      EXPECT_NEAR(dual.dual(x), primal.norm(x), 1e-10 * primal.norm(x)) << q;
    }
  }
}

TEST(Norms, GradientExamples) {
  const std::vector<double> x{3, 4};
  const auto g = NormSpec::euclidean().gradient(x);
  EXPECT_NEAR(g[0], 0.6, 1e-15);
  EXPECT_NEAR(g[1], 0.8, 1e-15);
  const auto g2 = NormSpec::q_norm(2.0).gradient(x);
  EXPECT_NEAR(g2[0], 0.6, 1e-15);
  EXPECT_NEAR(g2[1], 0.8, 1e-15);

  const NormSpec l3 = NormSpec::q_norm(3.0);
  const std::vector<double> one{1.0, 1.0};
  const auto g3 = l3.gradient(one);
  const double h = 1e-5;
  for (int i = 0; i < 2; ++i) {
    std::vector<double> p = one, m = one;
    p[i] += h;
    m[i] -= h;
    EXPECT_NEAR(g3[i], (l3.norm(p) - l3.norm(m)) / (2 * h), 1e-6);
  }
}

TEST(Norms, GradientEulerAndDegreeZero) {
  testkit::Gen g(26);
  std::vector<NormSpec> norms = {NormSpec::euclidean(), NormSpec::q_norm(1.5), NormSpec::q_norm(3.0),
                                 NormSpec::diagonal_weighted({0.5, 2.0, 1.0}, 4.0),
                                 NormSpec::product(NormSpec::q_norm(3.0), 3, 1.5)};
  for (const NormSpec& nm : norms) {
    for (int i = 0; i < 200; ++i) {
      const std::vector<double> x = g.nonzero(3);
      const auto gx = nm.gradient(x);
      EXPECT_NEAR(dot(x, gx), nm.norm(x), 1e-10 * nm.norm(x)) << nm.describe();
      const double lam = g.log_uniform(0.01, 100.0);
      std::vector<double> lx = x;
      for (double& v : lx) v *= lam;
      const auto glx = nm.gradient(lx);
      for (int k = 0; k < 3; ++k) EXPECT_NEAR(glx[k], gx[k], 1e-10 * (1.0 + std::abs(gx[k])));
    }
  }
}

TEST(Norms, NonDifferentiablePointsThrow) {
  EXPECT_THROW(NormSpec::euclidean().gradient(std::vector<double>{0.0, 0.0}), NonDifferentiableError);
  EXPECT_THROW(NormSpec::q_norm(1.0).gradient(std::vector<double>{1.0, 0.0}), NonDifferentiableError);
}

TEST(Norms, Errors) {
  EXPECT_THROW(NormSpec::q_norm(0.5), DomainError);
  EXPECT_THROW(NormSpec::diagonal_weighted({1.0, -1.0}), DomainError);
  EXPECT_THROW(NormSpec::product(NormSpec::euclidean(), 2, 1.0), DomainError);
  EXPECT_THROW(NormSpec::euclidean(3).norm(std::vector<double>{1, 2}), DimensionError);
  EXPECT_THROW(NormSpec::product(NormSpec::euclidean(2), 2, 2.0).dual(std::vector<double>{1, 2, 3}), DimensionError);
}
