// Sweep lambda and print how the equilibrium set grows, for a constant and a
// saturating diffusivity side by side.

#include <cstdio>

#include "kci/equilibria.hpp"

using namespace kci;

int main() {
  auto a1 = diffusivity_constant(1.0);
  auto as = diffusivity_saturating();
  std::printf("%8s  %12s  %14s\n", "lambda", "count (a=1)", "count (saturating)");
  for (double lambda = 0.5; lambda <= 9.6; lambda += 1.0) {
    auto c1 = equilibria_catalog(lambda, 1.0, a1, 127);
    auto c2 = equilibria_catalog(lambda, 1.0, as, 127);
    std::printf("%8.2f  %12zu  %14zu\n", lambda, c1.size(), c2.size());
  }

  std::printf("\nbranches at lambda = 9.1 (a = 1):\n");
  for (const auto& r : equilibria_catalog(9.1, 1.0, a1, 127)) {
    std::printf("  j=%d sign=%+d  |u_x|^2=%.6f  c*=%.6f  residual=%.2e  (%s)\n", r.j, r.sign,
                r.h10, r.c_star, r.residual, method_name(r.method));
  }
  return 0;
}
