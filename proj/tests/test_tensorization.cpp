#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <tuple>
#include <vector>

#include "logsob/extremals.hpp"
#include "logsob/tensorization.hpp"
#include "support.hpp"

using namespace logsob;

namespace {

constexpr double kPi = std::numbers::pi;

QuadratureSpec tight() {
  QuadratureSpec s;
  s.rel_tol = 1e-9;
  return s;
}

}  // namespace

TEST(Tensorization, ProductFieldEvaluatesBlockwise) {
  testkit::Gen g(71);
  const MonomialWeight w({0, 1});
  const ScalarField f = testkit::random_field(g, w, 1);
  const ScalarField F = product_field(f, 3);
  EXPECT_EQ(F.dimension, 6u);
  for (int i = 0; i < 50; ++i) {
    const std::vector<double> a = g.cone_point(w), b = g.cone_point(w), c = g.cone_point(w);
    const std::vector<double> z{a[0], a[1], b[0], b[1], c[0], c[1]};
    EXPECT_NEAR(F(z), f(a) * f(b) * f(c), 1e-14);
    EXPECT_LT(testkit::gradient_mismatch(F, z, 1e-6), 1e-7);
  }
  EXPECT_THROW(product_field(f, 4), DimensionError);
  EXPECT_NO_THROW(product_field(f, 4, false));
  EXPECT_THROW(product_field(f, 0), DomainError);
}

TEST(Tensorization, ProductIdentities) {
  testkit::Gen g(72);
  const MonomialWeight w({0});
  std::vector<ScalarField> fields = {
      make_log_sobolev_extremal(2.0, 1.0, std::vector<double>{0.2}, w, NormSpec::euclidean()),
      testkit::tilted_bump(g, w), testkit::poly_gaussian(g, w)};
  for (const ScalarField& f : fields) {
    for (double p : {2.0, 3.0}) {
      for (double t : {1.0, 2.0, 3.5}) {
        const auto r = verify_product_identities(f, 2, t, p, w, NormSpec::euclidean(), tight());
        EXPECT_LT(r.mass_residual(), 1e-8) << "t " << t;
      }
    }
  }
  // the energy identity needs unit L^p mass
  for (double p : {2.0, 3.0}) {
    const ScalarField f = make_log_sobolev_extremal(p, 0.7, std::vector<double>{-0.1}, w, NormSpec::euclidean());
    const auto r = verify_product_identities(f, 2, p, p, w, NormSpec::euclidean(), tight());
    EXPECT_NEAR(r.base_mass, 1.0, 1e-9);
    EXPECT_LT(r.energy_residual(), 1e-8);
  }
  const MonomialWeight w1({1});
  const ScalarField h = make_log_sobolev_extremal(2.0, 1.0, std::vector<double>{}, w1, NormSpec::euclidean());
  EXPECT_LT(verify_product_identities(h, 3, 2.0, 2.0, w1, NormSpec::euclidean(), tight()).energy_residual(), 1e-8);
}

TEST(Tensorization, ConstantSequenceConverges) {
  for (const auto& a : std::vector<std::vector<double>>{{0}, {2}, {1, 0}, {0.5, 0.5, 0}}) {
    const MonomialWeight w(a);
    const auto rows = tensorized_constant_sequence(w, log_grid(10, 1e6));
    ASSERT_EQ(rows.size(), 6u);
    EXPECT_TRUE(errors_decreasing(rows)) << w.describe();
    EXPECT_LT(rows.back().rel_error, 1e-4) << w.describe();
    EXPECT_NEAR(rows.back().target, sharp_ls_constant(2.0, w), 0.0);
    for (const auto& r : rows) {
      EXPECT_NEAR(tensorized_constant_reduced(w, r.l) / r.value, 1.0, 1e-12);
      const double other = tensorized_constant_reduced(w, r.l, true);
      if (w.D() == 2.0) {
        EXPECT_NEAR(other / r.value, 1.0, 1e-12);
      } else {
        EXPECT_GT(std::abs(other / r.value - 1.0), 1e-3);
      }
    }
  }
  EXPECT_THROW(tensorized_constant(MonomialWeight({0}), 2.0), DomainError);
}

TEST(Tensorization, LogGrid) {
  EXPECT_EQ(log_grid(10, 1e4), (std::vector<double>{10, 100, 1000, 10000}));
  EXPECT_EQ(log_grid(1, 1), (std::vector<double>{1}));
}

TEST(Tensorization, AsymptoticNormalization) {
  const MonomialWeight w({0});
  double prev = INFINITY;
  for (double l : log_grid(100, 1e6)) {
    const double e = std::abs(asymptotic_ab_check(w, 1.0, l) - 1.0);
    EXPECT_LT(e, prev) << l;
    prev = e;
  }
  EXPECT_LT(std::abs(asymptotic_ab_check(w, 1.0, 1e4) - 1.0), 1e-3);
  EXPECT_LT(std::abs(asymptotic_ab_check(w, 1.0, 1e6) - 1.0), 1e-5);
  EXPECT_LT(std::abs(asymptotic_ab_check(MonomialWeight({2, 0}), 0.4, 1e6) - 1.0), 1e-5);
  // Euclidean p = 2 agrees with the general-norm version
  for (long long l : {100LL, 10000LL}) {
    EXPECT_NEAR(asymptotic_ab_check_p(1, 2.0, 2.0, 1.0, l), asymptotic_ab_check(w, 1.0, static_cast<double>(l)), 1e-10);
  }
  EXPECT_LT(std::abs(asymptotic_ab_check_p(2, 3.0, kPi, 1.0, 1000000) - 1.0), 1e-5);
  EXPECT_THROW(asymptotic_ab_check(w, 0.0, 100), DomainError);
  EXPECT_THROW(asymptotic_ab_check_p(1, 3.0, 2.0, 1.0, 5), DomainError);
}

TEST(Tensorization, ProfileLimit) {
  const MonomialWeight w({0});
  const std::vector<double> x0{0.0};
  const std::vector<double> one{1.0};
  // (2 b / (e pi))^{1/4} at the center, times e^{-b/2} at distance 1
  const double peak = std::pow(2.0 / (std::numbers::e * kPi), 0.25);
  EXPECT_NEAR(profile_limit_value(w, 1.0, x0, {}), peak, 1e-15);
  EXPECT_NEAR(profile_limit_value(w, 1.0, one, {}), peak * std::exp(-0.5), 1e-15);
  const auto sup = profile_limit_check(w, 1.0, {1e2, 1e3, 1e4, 1e5}, line_grid());
  for (std::size_t i = 1; i < sup.size(); ++i) EXPECT_LT(sup[i], sup[i - 1]);
  EXPECT_LT(sup[2], 1e-3);
  const std::vector<double> c{0.7};
  EXPECT_LT(profile_limit_check(w, 2.0, {1e4}, line_grid(0.7), c)[0], 1e-3);
}

TEST(Tensorization, DegenerateRegimesVanish) {
  const MonomialWeight w({0});
  const auto grid = line_grid();
  for (BRegime reg : {BRegime::constant, BRegime::growing}) {
    const auto s = profile_sup(w, reg, 1.0, {1e2, 1e3, 1e4}, grid);
    EXPECT_LT(s.back(), 1e-6);
  }
  EXPECT_DOUBLE_EQ(b_of_l(BRegime::scaled, 2.0, 4.0), 0.5);
  EXPECT_DOUBLE_EQ(b_of_l(BRegime::growing, 2.0, 4.0), 8.0);
}

TEST(Tensorization, ProductBallVolumes) {
  for (const auto& [n, l, pp] : std::vector<std::tuple<int, std::size_t, double>>{
           {1, 2, 2.0}, {2, 2, 2.0}, {1, 3, 1.5}, {1, 2, 3.0}, {2, 2, 3.0}, {1, 4, 1.5}}) {
    const auto c = product_volume_check(NormSpec::euclidean(), n, l, pp);
    EXPECT_LT(c.rel_error, 1e-4) << n << " " << l << " " << pp;
  }
  EXPECT_LT(product_volume_check(NormSpec::q_norm(1.0), 2, 2, 2.0).rel_error, 1e-4);
}

TEST(Tensorization, MeanLimit) {
  testkit::Gen g(73);
  const MonomialWeight w({0});
  const ScalarField f = make_log_sobolev_extremal(2.0, 1.0, std::vector<double>{0.2}, w, NormSpec::euclidean());
  const auto r = mean_limit_check(f, f, w, tight());
  EXPECT_LT(r.extrapolated_error, 1e-3);
  EXPECT_LT(r.extrapolated_error, r.raw_error);
  for (std::size_t k = 1; k < r.means.size(); ++k) EXPECT_LE(r.means[k], r.means[k - 1] * (1.0 + 1e-12));
  const ScalarField h = testkit::poly_gaussian(g, w);
  EXPECT_LT(mean_limit_check(h, f, w, tight()).extrapolated_error, 1e-3);
}
