// Deficit of an extremal, of a perturbed extremal and of a wrong-exponent
// profile, followed by a minimizer run that recovers the right exponent.

#include <cmath>
#include <cstdio>
#include <vector>

#include "logsob/extremals.hpp"
#include "logsob/functionals.hpp"
#include "logsob/minimizer.hpp"

int main() {
  using namespace logsob;
  const double p = 2.0;
  const MonomialWeight w({1, 0});
  const NormSpec norm = NormSpec::euclidean();
  QuadratureSpec spec;
  spec.rel_tol = 1e-10;

  const std::vector<double> center{0.0, 0.5};
  const ScalarField ext = make_log_sobolev_extremal(p, 1.5, center, w, norm);
  std::printf("extremal:           deficit %+.3e\n", deficit(ext, p, w, norm, spec).deficit);

  ScalarField bumped = ext;
  bumped.eval = [ext](std::span<const double> x) { return ext(x) * (1.0 + 0.3 * std::sin(x[1])); };
  bumped.grad = nullptr;
  std::printf("perturbed extremal: deficit %+.3e\n", deficit(bumped, p, w, norm, spec).deficit);

  const ProfileFamily fam = ProfileFamily::stretched_exponential(w.n());
  const ScalarField wrong = fam.field(std::vector<double>{3.0, 0.0, 0.0, 0.0}, w, norm);
  std::printf("exp(-|x|^3):        deficit %+.3e\n", deficit(wrong, p, w, norm, spec).deficit);

  MinimizeOptions opts;
  opts.quadrature = spec;
  const MinimizeResult r = minimize_deficit(fam, p, w, norm, opts);
  std::printf("minimizer: q* = %.6f (p' = %.1f), deficit* %.2e, %d iterations\n", r.theta_star[0],
              hoelder_conjugate(p), r.deficit_star, r.iterations);
}
