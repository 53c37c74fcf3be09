// Evolve an ordered triple under the two auxiliary local flows and the
// Kirchhoff problem between them, and report how well the ordering holds.

#include <cmath>
#include <cstdio>

#include "kci/comparison.hpp"

using namespace kci;

int main() {
  Grid g = Grid::make(127);
  Profile u1 = Profile::from_function(g, [](double x) { return 0.8 * std::sin(x); });
  Profile u0 = u1, u2 = u1;
  for (auto& v : u0.values) v *= 0.5;
  for (auto& v : u2.values) v *= 1.5;
  u0.modes.reset();
  u2.modes.reset();

  auto problem = ProblemSpec::nonlocal(diffusivity_saturating(),
                                       ForcingSpec::sinusoidal(5.0, 1.0, 2.0, 1.0));
  SandwichReport rep = sandwich_run(u0, u1, u2, 0.0, 10.0, problem, 1e-3, 500);

  std::printf("sandwich over [0, 10], lambda=5, beta in [1,2]\n");
  std::printf("gamma shift %.4f sized for radius %.4f\n", rep.gamma, rep.radius);
  std::printf("%8s  %16s  %16s\n", "t", "lower violation", "upper violation");
  for (size_t i = 0; i < rep.times.size(); ++i)
    std::printf("%8.2f  %16.3e  %16.3e\n", rep.times[i], rep.lower_violation[i],
                rep.upper_violation[i]);
  std::printf("max violations: lower %.3e, upper %.3e\n", rep.max_lower_violation,
              rep.max_upper_violation);
  return 0;
}
