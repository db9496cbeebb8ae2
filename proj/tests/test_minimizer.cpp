#include <gtest/gtest.h>

#include <cmath>
#include <utility>
#include <vector>

#include "logsob/minimizer.hpp"
#include "support.hpp"

using namespace logsob;

namespace {

MinimizeOptions options() {
  MinimizeOptions o;
  o.quadrature.rel_tol = 1e-10;
  return o;
}

}  // namespace

TEST(Minimizer, NelderMeadRosenbrock) {
  const auto rosen = [](std::span<const double> x) {
    return 100.0 * std::pow(x[1] - x[0] * x[0], 2) + std::pow(1.0 - x[0], 2);
  };
  const SimplexOutcome o = nelder_mead(rosen, {-1.2, 1.0}, {0.5, 0.5}, 5000, 1e-10);
  EXPECT_TRUE(o.converged);
  EXPECT_NEAR(o.x[0], 1.0, 1e-4);
  EXPECT_NEAR(o.x[1], 1.0, 1e-4);
  for (std::size_t i = 1; i < o.best_history.size(); ++i) EXPECT_LE(o.best_history[i], o.best_history[i - 1]);
}

TEST(Minimizer, LandscapeMinimumAtConjugateExponent) {
  for (const auto& [p, a] : std::vector<std::pair<double, std::vector<double>>>{{2.0, {2}}, {3.0, {0}}, {1.5, {1}}}) {
    const MonomialWeight w(a);
    const ProfileFamily fam = ProfileFamily::stretched_exponential(1);
    std::vector<std::vector<double>> grid;
    for (double q = 1.2; q <= 4.0 + 1e-9; q += 0.05) grid.push_back({q, 0.0, 0.0});
    QuadratureSpec spec;
    spec.rel_tol = 1e-10;
    const auto cells = deficit_landscape(fam, p, w, NormSpec::euclidean(), grid, spec);
    std::size_t best = 0;
    for (std::size_t i = 0; i < cells.size(); ++i) {
      ASSERT_TRUE(cells[i].error.empty()) << cells[i].error;
      EXPECT_GE(cells[i].deficit, -1e-6);
      if (cells[i].deficit < cells[best].deficit) best = i;
    }
    EXPECT_NEAR(cells[best].theta[0], hoelder_conjugate(p), 0.026) << "p " << p;
  }
}

TEST(Minimizer, GaugeParametersAreFlat) {
  const MonomialWeight w({0, 1});
  const ProfileFamily fam = ProfileFamily::stretched_exponential(2);
  QuadratureSpec spec;
  spec.rel_tol = 1e-10;
  const auto cells = deficit_landscape(fam, 2.0, w, NormSpec::euclidean(),
                                       {{2.7, 0.0, 0.0, 0.0}, {2.7, 1.3, 0.0, 0.0}, {2.7, 0.0, -0.8, 0.0},
                                        {2.7, -0.7, 1.1, 0.0}},
                                       spec);
  for (const auto& c : cells) EXPECT_NEAR(c.deficit, cells[0].deficit, 1e-8);
  // the constrained coordinate of the center is projected to zero
  const auto moved = deficit_landscape(fam, 2.0, w, NormSpec::euclidean(), {{2.7, 0.0, 0.0, 0.9}}, spec);
  EXPECT_NEAR(moved[0].deficit, cells[0].deficit, 1e-8);
}

TEST(Minimizer, RecoversExtremals) {
  {
    const auto r = minimize_deficit(ProfileFamily::stretched_exponential(1), 2.0, MonomialWeight({2}),
                                    NormSpec::euclidean(), options());
    EXPECT_NEAR(r.theta_star[0], 2.0, 0.06);
    EXPECT_LE(r.deficit_star, 1e-5);
    EXPECT_LT(r.distance_to_extremal, 1e-3);
    EXPECT_EQ(r.failed_evaluations, 0);
    EXPECT_FALSE(r.conjectural);
    for (std::size_t i = 1; i < r.best_history.size(); ++i) EXPECT_LE(r.best_history[i], r.best_history[i - 1]);
  }
  {
    const auto r = minimize_deficit(ProfileFamily::stretched_exponential(1), 3.0, MonomialWeight({0}),
                                    NormSpec::euclidean(), options());
    EXPECT_NEAR(r.theta_star[0], 1.5, 0.045);
    EXPECT_LE(r.deficit_star, 1e-5);
  }
  {
    const auto r = minimize_deficit(ProfileFamily::radial_spline(1, 8), 2.0, MonomialWeight({2}),
                                    NormSpec::euclidean(), options());
    EXPECT_LE(r.distance_to_extremal, 5e-3);
    EXPECT_GE(r.deficit_star, -1e-6);
  }
}

TEST(Minimizer, RestartsAgree) {
  const ProfileFamily fam = ProfileFamily::stretched_exponential(1);
  const auto starts = random_starts(fam, 4, 2024);
  ASSERT_EQ(starts.size(), 4u);
  EXPECT_EQ(random_starts(fam, 4, 2024), starts);
  for (const auto& s : starts) {
    MinimizeOptions o = options();
    o.start = s;
    o.compute_distance = false;
    const auto r = minimize_deficit(fam, 2.0, MonomialWeight({1}), NormSpec::euclidean(), o);
    EXPECT_NEAR(r.theta_star[0], 2.0, 0.06) << s[0];
  }
}

TEST(Minimizer, FamilyValidation) {
  EXPECT_THROW(ProfileFamily::radial_spline(1, 2), DomainError);
  const ProfileFamily fam = ProfileFamily::stretched_exponential(2);
  EXPECT_THROW(fam.field(std::vector<double>{2.0, 0.0}, MonomialWeight({0, 0}), NormSpec::euclidean()),
               DimensionError);
  EXPECT_THROW(minimize_deficit(fam, 2.0, MonomialWeight({0}), NormSpec::euclidean()), DimensionError);
  EXPECT_THROW(minimize_deficit(fam, 1.0, MonomialWeight({0, 0}), NormSpec::euclidean()), DomainError);
  const auto mask = fam.gauge_mask();
  EXPECT_EQ(mask, (std::vector<bool>{false, true, true, true}));
}
