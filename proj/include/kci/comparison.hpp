#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "kci/evolution.hpp"

namespace kci {

// Smallest gamma >= 0 that makes both bounding reactions increasing after the
// shift u -> u + dt (f(u) + gamma u) on [-R, R]:
//   d/du [(lambda/2) u - b2 u^3] >= -gamma  and  d/du [lambda u - (b1/2) u^3] >= -gamma.
// The middle reaction (lambda u - beta u^3)/a with a in [1,2], beta in [b1,b2]
// is dominated by the same bound, so one shift serves all three legs.
inline double gamma_bound(double R, double lambda, double b1, double b2) {
  require(R >= 0.0 && std::isfinite(R), "gamma_bound needs R >= 0");
  require(lambda > 0.0 && std::isfinite(lambda), "gamma_bound needs lambda > 0");
  require(b1 > 0.0 && b1 <= b2 && std::isfinite(b2), "gamma_bound needs 0 < b1 <= b2");
  double g1 = 3.0 * b2 * R * R - 0.5 * lambda;
  double g2 = 1.5 * b1 * R * R - lambda;
  return std::max({0.0, g1, g2});
}

struct SandwichReport {
  double start_time = 0.0;
  double horizon = 0.0;       // elapsed time covered
  long samples = 0;
  double dt = defaults::dt;
  double gamma = 0.0;         // shared shift used by all three legs
  double radius = 0.0;        // sup bound the shift was sized for
  double max_lower_violation = 0.0;  // where the lower flow exceeds the middle
  double max_upper_violation = 0.0;  // where the middle exceeds the upper flow
  std::vector<double> times;
  std::vector<double> lower_violation, upper_violation;  // per sample
  std::vector<int> lower_worst_node, upper_worst_node;   // -1 when no violation
};

// Evolve the ordered triple 0 <= u0 <= u1 <= u2: u0 under the lower local flow
// ((lambda/2) u - b2 u^3), u2 under the upper local flow (lambda u - (b1/2) u^3),
// and u1 under the changed-frame Kirchhoff problem, all in lockstep with one
// dt and one gamma shift, recording how far the ordering is violated at each
// sample. A nonlocal problem is moved into the changed frame first; that is
// the frame where all three legs share unit diffusion and the ordering holds
// exactly for the discrete maps as well.
inline SandwichReport sandwich_run(const Profile& u0, const Profile& u1, const Profile& u2,
                                   double s, double t, const ProblemSpec& problem,
                                   double dt = defaults::dt, int sample_every = 1) {
  require(u0.grid == u1.grid && u1.grid == u2.grid, "sandwich triple must share one grid");
  require(t >= s, "sandwich needs t >= s");
  require(sample_every >= 1, "sample_every must be >= 1");
  require(problem.kind == ProblemKind::nonlocal || problem.kind == ProblemKind::time_changed,
          "middle trajectory must be the nonlocal problem or its changed-frame form");
  const ForcingSpec& forcing = problem.forcing;
  require(forcing.lambda > 0.0, "sandwich expects lambda > 0");
  for (double v : u0.values)
    require(v >= 0.0, "sandwich triple must lie in the positive cone");
  require(partial_order_leq(u0, u1).holds && partial_order_leq(u1, u2).holds,
          "sandwich needs u0 <= u1 <= u2 nodewise");

  double sup = std::sqrt(2.0 * forcing.lambda / forcing.b1);
  sup = std::max({sup, u0.max_abs(), u1.max_abs(), u2.max_abs()});
  double radius = 1.01 * sup;
  StepOptions opt{.gamma = gamma_bound(radius, forcing.lambda, forcing.b1, forcing.b2)};

  ProblemSpec middle = problem.kind == ProblemKind::time_changed
                           ? problem
                           : ProblemSpec::time_changed(problem.diffusivity, forcing);
  Stepper lower(u0, s, ProblemSpec::local_lower(forcing), dt, opt);
  Stepper mid(u1, s, middle, dt, opt);
  Stepper upper(u2, s, ProblemSpec::local_upper(forcing), dt, opt);

  SandwichReport rep;
  rep.start_time = s;
  rep.horizon = t - s;
  rep.dt = dt;
  rep.gamma = opt.gamma;
  rep.radius = radius;

  auto record = [&] {
    const auto& lo = lower.values();
    const auto& md = mid.values();
    const auto& up = upper.values();
    double lv = 0.0, uv = 0.0;
    int li = -1, ui = -1;
    for (size_t i = 0; i < lo.size(); ++i) {
      double dlow = lo[i] - md[i];
      double dup = md[i] - up[i];
      if (dlow > lv) {
        lv = dlow;
        li = static_cast<int>(i);
      }
      if (dup > uv) {
        uv = dup;
        ui = static_cast<int>(i);
      }
    }
    rep.times.push_back(lower.time());
    rep.lower_violation.push_back(lv);
    rep.upper_violation.push_back(uv);
    rep.lower_worst_node.push_back(li);
    rep.upper_worst_node.push_back(ui);
    rep.max_lower_violation = std::max(rep.max_lower_violation, lv);
    rep.max_upper_violation = std::max(rep.max_upper_violation, uv);
    ++rep.samples;
  };

  record();
  double rem = 0.0;
  long nfull = detail::full_steps(s, t, dt, rem);
  for (long k = 1; k <= nfull; ++k) {
    bool ok = lower.advance() && mid.advance() && upper.advance();
    if (!ok) throw numerical_error("a sandwich leg blew up at step " + std::to_string(k));
    if (k % sample_every == 0 && !(k == nfull && rem == 0.0)) record();
  }
  if (rem > 0.0) {
    bool ok = lower.advance(rem) && mid.advance(rem) && upper.advance(rem);
    if (!ok) throw numerical_error("a sandwich leg blew up on the final step");
  }
  if (nfull > 0 || rem > 0.0) record();
  return rep;
}

}  // namespace kci
