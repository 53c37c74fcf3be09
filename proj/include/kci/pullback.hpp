#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "kci/defaults.hpp"
#include "kci/evolution.hpp"
#include "kci/regions.hpp"
#include "kci/spatial.hpp"

namespace kci {

// Pullback iteration: evolve the same start profile from geometrically deeper
// start times s_k = t - 2^k T0 and watch the end slices settle. Convergence is
// declared from the Cauchy gap between consecutive slices, never from a known
// limit; uniqueness of the limiting trajectory inside the region is reported,
// not assumed.

struct PullbackRun {
  double target_time = 0.0;
  int depth = 0;                     // K
  double base_horizon = defaults::pullback_T0;
  std::vector<double> start_depths;  // s_k = t - 2^k T0, k = 0..K
  std::vector<Profile> slices;       // end slice from each start depth
  std::vector<double> gaps;          // gaps[k-1] = sup |slice_k - slice_{k-1}|
  bool converged = false;            // deepest gap at or below the tolerance
  RegionSpec region;

  const Profile& final_slice() const { return slices.back(); }
  double final_gap() const { return gaps.back(); }
};

namespace detail {

// plain march from s to t, no sampling
inline Profile run_between(const Profile& u0, double s, double t, double dt,
                           const ProblemSpec& problem) {
  Stepper st(u0, s, problem, dt);
  double rem = 0.0;
  long nsteps = full_steps(s, t, dt, rem);
  for (long k = 0; k < nsteps; ++k)
    if (!st.advance())
      throw numerical_error("blow-up during pullback evolution at t=" + std::to_string(st.time()));
  if (rem > 0.0 && !st.advance(rem))
    throw numerical_error("blow-up during pullback evolution at t=" + std::to_string(st.time()));
  return st.current_profile();
}

}  // namespace detail

inline PullbackRun pullback_slice(double t, int depth, const RegionSpec& region,
                                  const ProblemSpec& problem, const Profile& u_start,
                                  double dt = defaults::dt,
                                  double base_horizon = defaults::pullback_T0) {
  require(depth >= 1 && depth <= 40, "pullback depth must lie in [1, 40]");
  require(dt > 0.0, "need a positive step");
  require(base_horizon > 0.0, "need a positive base horizon");
  detail::check_region_problem(region, problem);
  require(u_start.grid == region.lower.grid, "start profile grid does not match region grid");
  require(in_region(u_start, region), "start profile is not in the region");

  PullbackRun run;
  run.target_time = t;
  run.depth = depth;
  run.base_horizon = base_horizon;
  run.region = region;
  for (int k = 0; k <= depth; ++k) {
    double s = t - std::ldexp(base_horizon, k);
    run.start_depths.push_back(s);
    Profile xi = detail::run_between(u_start, s, t, dt, problem);
    if (!in_region(xi, region))
      throw numerical_error("pullback slice left the region at depth " + std::to_string(k));
    run.slices.push_back(std::move(xi));
    if (k > 0)
      run.gaps.push_back(sup_distance(run.slices[static_cast<size_t>(k)],
                                      run.slices[static_cast<size_t>(k - 1)]));
  }
  run.converged = run.gaps.back() <= defaults::pullback_gap_tol;
  return run;
}

struct TraceSample {
  double t = 0.0;
  PullbackRun run;
  std::vector<double> zeros;
  bool zeros_ok = false;
  bool sandwich_ok = false;
  bool floor_ok = false;
};

struct TraceRecord {
  int j = 1;
  int sign = +1;
  double window_start = 0.0;
  double window_end = 0.0;
  RegionSpec region;
  Profile floor;  // fundamental-arch magnitude floor, half the lower envelope
  std::vector<TraceSample> samples;
  bool valid = false;
  std::optional<double> first_failure_time;
  std::string failure_reason;
};

namespace detail {

// signed magnitude folded onto the fundamental arch: the envelopes are
// palindromic per arch, so no index reflection is needed
inline Profile fold_to_arch(const Profile& u, const RegionSpec& spec, const Grid& arch_grid) {
  const int P = spec.arch_stride();
  const int m = P - 1;
  std::vector<double> folded(static_cast<size_t>(m));
  for (int q = 0; q < m; ++q) {
    double v = spec.arch_sign(0) * u.values[static_cast<size_t>(q)];
    for (int a = 1; a < spec.j; ++a)
      v = std::min(v, spec.arch_sign(a) * u.values[static_cast<size_t>(a * P + q)]);
    folded[static_cast<size_t>(q)] = v;
  }
  return Profile::from_values(arch_grid, std::move(folded));
}

}  // namespace detail

// Windowed pullback trace of the non-autonomous equilibrium candidate in
// X_j^sign. Each sampled time gets its own pullback run; validity demands a
// constant zero set at the arch junctions, the envelope sandwich, and
// dominance over the fixed positive floor on every arch.
inline TraceRecord trace_equilibrium(int j, int sign, const ProblemSpec& problem,
                                     double window_start, double window_end, double sample_dt,
                                     int n = defaults::grid_n,
                                     int depth = defaults::pullback_depth,
                                     double dt = defaults::dt,
                                     double base_horizon = defaults::pullback_T0) {
  require(window_end >= window_start, "window must be ordered");
  require(sample_dt > 0.0, "need a positive sample spacing");
  const ForcingSpec& f = problem.forcing;

  TraceRecord rec;
  rec.j = j;
  rec.sign = sign;
  rec.window_start = window_start;
  rec.window_end = window_end;
  rec.region = region_spec(j, sign, f.lambda, f.b1, f.b2, n);
  const RegionSpec& spec = rec.region;
  const Grid& g = spec.lower.grid;
  const int P = spec.arch_stride();
  const int m = P - 1;

  Grid arch_grid = Grid::make(m, g.length / j);
  {
    std::vector<double> fl(static_cast<size_t>(m));
    for (int q = 0; q < m; ++q) {
      double alo = (spec.arch_sign(0) > 0) ? spec.lower.values[static_cast<size_t>(q)]
                                           : -spec.upper.values[static_cast<size_t>(q)];
      fl[static_cast<size_t>(q)] = 0.5 * alo;
    }
    rec.floor = Profile::from_values(arch_grid, std::move(fl));
  }

  std::vector<double> mid(static_cast<size_t>(g.n));
  for (size_t i = 0; i < mid.size(); ++i)
    mid[i] = 0.5 * (spec.lower.values[i] + spec.upper.values[i]);
  Profile u_start = Profile::from_values(g, std::move(mid));

  auto fail = [&rec](double t, const std::string& why) {
    if (!rec.first_failure_time) {
      rec.first_failure_time = t;
      rec.failure_reason = why;
    }
  };

  const double two_h = 2.0 * g.h();
  for (double t = window_start; t <= window_end + 1e-9 * (1.0 + std::fabs(window_end));
       t += sample_dt) {
    TraceSample s;
    s.t = t;
    s.run = pullback_slice(t, depth, spec, problem, u_start, dt, base_horizon);
    const Profile& xi = s.run.final_slice();
    if (!s.run.converged) fail(t, "pullback gap above tolerance");

    auto zf = zero_crossings(xi);
    s.zeros = zf.zeros;
    s.zeros_ok = !zf.identically_small && zf.zeros.size() == static_cast<size_t>(j) + 1;
    if (s.zeros_ok)
      for (int k = 0; k <= j; ++k)
        if (std::fabs(zf.zeros[static_cast<size_t>(k)] - k * g.length / j) > two_h)
          s.zeros_ok = false;
    if (!s.zeros_ok) fail(t, "zero set drifted off the arch junctions");

    s.sandwich_ok = region_distance(xi, spec).box <= defaults::region_tol;
    if (!s.sandwich_ok) fail(t, "slice left the envelope sandwich");

    s.floor_ok = nondegeneracy_check({detail::fold_to_arch(xi, spec, arch_grid)}, rec.floor);
    if (!s.floor_ok) fail(t, "slice degenerated below the arch floor");

    rec.samples.push_back(std::move(s));
  }
  rec.valid = !rec.first_failure_time.has_value();
  return rec;
}

// Bundle attraction: evolve several region samples from a single deep start
// time and measure how far apart they end up. A shrinking gap as the depth
// grows is evidence (not proof) that the sectional attractor is one point.
inline double attraction_test(const RegionSpec& region, const ProblemSpec& problem, double t,
                              int bundle_size, int depth, unsigned seed = 1234,
                              double dt = defaults::dt,
                              double base_horizon = defaults::pullback_T0) {
  require(bundle_size >= 1, "need at least one bundle member");
  require(depth >= 0 && depth <= 40, "attraction depth must lie in [0, 40]");
  require(dt > 0.0, "need a positive step");
  detail::check_region_problem(region, problem);

  auto starts = sample_region(region, seed, bundle_size);
  double s = t - std::ldexp(base_horizon, depth);
  std::vector<Profile> ends;
  ends.reserve(starts.size());
  for (const auto& u0 : starts) {
    Profile xi = detail::run_between(u0, s, t, dt, problem);
    if (!in_region(xi, region)) throw numerical_error("bundle member left the region");
    ends.push_back(std::move(xi));
  }
  double gap = 0.0;
  for (size_t i = 0; i < ends.size(); ++i)
    for (size_t k = i + 1; k < ends.size(); ++k)
      gap = std::max(gap, sup_distance(ends[i], ends[k]));
  return gap;
}

}  // namespace kci
