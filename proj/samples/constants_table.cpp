// Prints Pi(A), m(B_A), L_2(A) and C_{2,n,A} for a few weights, then the
// convergence of the tensorized constant for A = (2).

#include <cstdio>
#include <vector>

#include "logsob/monomial.hpp"
#include "logsob/tensorization.hpp"

int main() {
  using namespace logsob;
  std::printf("%-14s %6s %12s %12s %12s %12s\n", "A", "D", "Pi(A)", "m(B_A)", "L_2", "C_2");
  for (const auto& a : std::vector<std::vector<double>>{{0}, {2}, {0, 0, 0}, {1, 1}, {0.5, 0, 2}}) {
    const MonomialWeight w(a);
    std::printf("%-14s %6.2f %12.8f %12.8f %12.8f ", w.describe().c_str(), w.D(), w.pi_A(), w.ball_measure(),
                sharp_ls_constant(2.0, w));
    if (w.D() > 2.0) {
      std::printf("%12.8f\n", sharp_sobolev_constant(2.0, w));
    } else {
      std::printf("%12s\n", "-");
    }
  }
  std::printf("\nl C^2 for A = (2):\n");
  for (const auto& r : tensorized_constant_sequence(MonomialWeight({2}), log_grid(10, 1e6))) {
    std::printf("  l = %-8g %.12f  rel error %.3e\n", r.l, r.value, r.rel_error);
  }
}
