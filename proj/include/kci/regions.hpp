#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "kci/equilibria.hpp"
#include "kci/evolution.hpp"
#include "kci/spatial.hpp"

namespace kci {

// Box-with-symmetry set: profiles between the two envelopes that carry the
// j-arch symmetry pattern. The envelopes come from the auxiliary constant-
// diffusion problems (lambda, b1/2) and (lambda/2, b2); on each arch the box
// spans [min, max] of the two equilibria, with signs alternating per arch.
struct RegionSpec {
  int j = 1;
  int sign = +1;
  double lambda = 0.0;
  double b1 = 0.0;
  double b2 = 0.0;
  Profile lower;
  Profile upper;
  SymmetryClass symmetry;

  // nodes per arch, junction to junction
  int arch_stride() const { return (lower.grid.n + 1) / j; }
  // sign of arch a under this spec's overall sign
  int arch_sign(int a) const { return (a % 2 == 0) ? sign : -sign; }
};

inline RegionSpec region_spec(int j, int sign, double lambda, double b1, double b2,
                              int n = defaults::grid_n) {
  require(j >= 1, "region needs j >= 1");
  require(sign == 1 || sign == -1, "sign must be +1 or -1");
  require(b1 > 0.0 && b1 <= b2, "need 0 < b1 <= b2");
  require(lambda > 2.0 * j * j,
          "region needs lambda > 2 j^2: " + std::to_string(lambda) + " vs " +
              std::to_string(2.0 * j * j));
  // force an even node count per arch so the symmetry group acts as a node
  // permutation on (0, pi): (n_eff + 1) divisible by 2j
  int m = static_cast<int>(std::lround(static_cast<double>(n + 1) / j)) - 1;
  if ((m + 1) % 2 != 0) --m;
  require(m >= 3, "grid too coarse for the requested number of arches");
  const int n_eff = j * (m + 1) - 1;

  auto a1 = diffusivity_constant(1.0);
  // both auxiliary thresholds reduce to lambda > 2 j^2
  auto hi_rec = nonlocal_positive_equilibrium(lambda, b1 / 2.0, a1, j, n_eff);
  auto lo_rec = nonlocal_positive_equilibrium(lambda / 2.0, b2, a1, j, n_eff);

  // fundamental-arch magnitudes, mirror-averaged so the box is exactly
  // symmetric (the shooting arch is symmetric only to integration accuracy)
  std::vector<double> alo(static_cast<size_t>(m)), ahi(static_cast<size_t>(m));
  for (int q = 0; q < m; ++q) {
    double v1 = hi_rec.profile.values[static_cast<size_t>(q)];
    double v2 = lo_rec.profile.values[static_cast<size_t>(q)];
    alo[static_cast<size_t>(q)] = std::min(v1, v2);
    ahi[static_cast<size_t>(q)] = std::max(v1, v2);
  }
  for (int q = 0; q < m / 2; ++q) {
    size_t l = static_cast<size_t>(q), r = static_cast<size_t>(m - 1 - q);
    double lo_avg = 0.5 * (alo[l] + alo[r]);
    double hi_avg = 0.5 * (ahi[l] + ahi[r]);
    alo[l] = alo[r] = lo_avg;
    ahi[l] = ahi[r] = hi_avg;
  }
  for (int q = 0; q < m; ++q) {
    require(alo[static_cast<size_t>(q)] > 0.0, "envelope lost positivity");
    require(alo[static_cast<size_t>(q)] <= ahi[static_cast<size_t>(q)],
            "envelope ordering failed");
  }

  Grid g = Grid::make(n_eff, std::numbers::pi);
  std::vector<double> lower_v(static_cast<size_t>(n_eff), 0.0);
  std::vector<double> upper_v(static_cast<size_t>(n_eff), 0.0);
  for (int a = 0; a < j; ++a) {
    int s = (a % 2 == 0) ? sign : -sign;
    for (int q = 0; q < m; ++q) {
      size_t idx = static_cast<size_t>(a * (m + 1) + q);
      if (s > 0) {
        lower_v[idx] = alo[static_cast<size_t>(q)];
        upper_v[idx] = ahi[static_cast<size_t>(q)];
      } else {
        lower_v[idx] = -ahi[static_cast<size_t>(q)];
        upper_v[idx] = -alo[static_cast<size_t>(q)];
      }
    }
    // junction nodes (q = m) stay exact zeros
  }
  RegionSpec spec;
  spec.j = j;
  spec.sign = sign;
  spec.lambda = lambda;
  spec.b1 = b1;
  spec.b2 = b2;
  spec.lower = Profile::from_values(g, std::move(lower_v));
  spec.upper = Profile::from_values(g, std::move(upper_v));
  spec.symmetry = SymmetryClass::make(j, g);
  return spec;
}

// Signed distances from the region: positive box distance means some node lies
// outside [lower, upper]; symmetry is the sup distance to the symmetry class.
struct RegionDistance {
  double box = 0.0;
  double symmetry = 0.0;
};

inline RegionDistance region_distance(const Profile& u, const RegionSpec& spec) {
  require(u.grid == spec.lower.grid, "profile grid does not match region grid");
  RegionDistance d;
  double worst = -std::numeric_limits<double>::infinity();
  for (size_t i = 0; i < u.values.size(); ++i) {
    worst = std::max(worst, spec.lower.values[i] - u.values[i]);
    worst = std::max(worst, u.values[i] - spec.upper.values[i]);
  }
  d.box = std::max(0.0, worst);
  d.symmetry = symmetry_distance(u, spec.j);
  return d;
}

inline bool in_region(const Profile& u, const RegionSpec& spec,
                      double tol = defaults::region_tol) {
  require(tol >= 0.0, "tolerance must be nonnegative");
  RegionDistance d = region_distance(u, spec);
  return d.box <= tol && d.symmetry <= tol;
}

// Random members: theta-interpolation between the envelopes with theta drawn
// on the fundamental half-arch and replicated bitwise through the symmetry
// group, so every sample passes in_region at tolerance zero.
inline std::vector<Profile> sample_region(const RegionSpec& spec, unsigned seed, int count) {
  require(count >= 1, "need count >= 1");
  const int j = spec.j;
  const int P = spec.arch_stride();
  const int m = P - 1;
  std::mt19937 gen(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  // fundamental-arch envelope magnitudes (arch 0 carries spec.sign)
  std::vector<double> alo(static_cast<size_t>(m)), ahi(static_cast<size_t>(m));
  for (int q = 0; q < m; ++q) {
    double lo = spec.lower.values[static_cast<size_t>(q)];
    double hi = spec.upper.values[static_cast<size_t>(q)];
    if (spec.sign > 0) {
      alo[static_cast<size_t>(q)] = lo;
      ahi[static_cast<size_t>(q)] = hi;
    } else {
      alo[static_cast<size_t>(q)] = -hi;
      ahi[static_cast<size_t>(q)] = -lo;
    }
  }
  std::vector<Profile> out;
  out.reserve(static_cast<size_t>(count));
  std::vector<double> theta(static_cast<size_t>(m));
  for (int k = 0; k < count; ++k) {
    for (int q = 0; q <= (m - 1) / 2; ++q) {
      double t = unit(gen);
      theta[static_cast<size_t>(q)] = t;
      theta[static_cast<size_t>(m - 1 - q)] = t;
    }
    std::vector<double> vals(static_cast<size_t>(spec.lower.grid.n), 0.0);
    for (int q = 0; q < m; ++q) {
      double lo = alo[static_cast<size_t>(q)], hi = ahi[static_cast<size_t>(q)];
      double v = lo + theta[static_cast<size_t>(q)] * (hi - lo);
      v = std::clamp(v, lo, hi);  // one-ulp insurance at the box faces
      for (int a = 0; a < j; ++a) {
        int s = spec.arch_sign(a);
        vals[static_cast<size_t>(a * P + q)] = s > 0 ? v : -v;
      }
    }
    out.push_back(Profile::from_values(spec.lower.grid, std::move(vals)));
  }
  return out;
}

struct InvarianceReport {
  int samples = 0;
  double horizon = 0.0;
  double dt = 0.0;
  double max_exit = 0.0;            // box exit distance over samples/times/nodes
  double max_symmetry_drift = 0.0;
  double max_pinned_zero = 0.0;     // |u| at interior junctions (0 when j = 1)
  double max_sign_violation = 0.0;  // per-arch sign pattern slip
  std::vector<double> per_sample_exit;
};

namespace detail {

inline void check_region_problem(const RegionSpec& spec, const ProblemSpec& problem) {
  require(problem.kind == ProblemKind::nonlocal ||
              problem.kind == ProblemKind::autonomous_nonlocal,
          "invariance applies to the non-local problem kinds");
  const auto& f = problem.forcing;
  require(std::fabs(f.lambda - spec.lambda) <= 1e-12 * (1.0 + spec.lambda),
          "problem lambda does not match the region");
  require(f.b1 >= spec.b1 - 1e-12 && f.b2 <= spec.b2 + 1e-12,
          "forcing range [" + std::to_string(f.b1) + ", " + std::to_string(f.b2) +
              "] is not inside the region's [" + std::to_string(spec.b1) + ", " +
              std::to_string(spec.b2) + "]");
}

}  // namespace detail

inline InvarianceReport invariance_test(const RegionSpec& spec, const ProblemSpec& problem,
                                        double start_time, double horizon,
                                        const std::vector<Profile>& samples,
                                        double dt = defaults::dt) {
  detail::check_region_problem(spec, problem);
  require(horizon > 0.0, "need a positive horizon");
  require(!samples.empty(), "need at least one sample");
  InvarianceReport rep;
  rep.samples = static_cast<int>(samples.size());
  rep.horizon = horizon;
  rep.dt = dt;

  const int j = spec.j;
  const int P = spec.arch_stride();
  auto record = [&](const std::vector<double>& v, double& sample_exit) {
    double worst = 0.0;
    for (size_t i = 0; i < v.size(); ++i) {
      worst = std::max(worst, spec.lower.values[i] - v[i]);
      worst = std::max(worst, v[i] - spec.upper.values[i]);
    }
    sample_exit = std::max(sample_exit, worst);
    for (int a = 1; a < j; ++a)
      rep.max_pinned_zero =
          std::max(rep.max_pinned_zero, std::fabs(v[static_cast<size_t>(a * P - 1)]));
    for (int a = 0; a < j; ++a) {
      double s = spec.arch_sign(a);
      for (int q = 0; q < P - 1; ++q)
        rep.max_sign_violation =
            std::max(rep.max_sign_violation, -s * v[static_cast<size_t>(a * P + q)]);
    }
  };

  for (const auto& u0 : samples) {
    require(u0.grid == spec.lower.grid, "sample grid does not match region grid");
    double sample_exit = 0.0;
    record(u0.values, sample_exit);
    rep.max_symmetry_drift = std::max(rep.max_symmetry_drift, symmetry_distance(u0, j));
    Stepper st(u0, start_time, problem, dt);
    double rem = 0.0;
    long nsteps = detail::full_steps(start_time, start_time + horizon, dt, rem);
    for (long k = 0; k < nsteps; ++k) {
      if (!st.advance())
        throw numerical_error("blow-up inside the region at t=" + std::to_string(st.time()));
      record(st.values(), sample_exit);
      rep.max_symmetry_drift =
          std::max(rep.max_symmetry_drift, symmetry_distance(st.current_profile(), j));
    }
    if (rem > 0.0) {
      if (!st.advance(rem))
        throw numerical_error("blow-up inside the region at t=" + std::to_string(st.time()));
      record(st.values(), sample_exit);
      rep.max_symmetry_drift =
          std::max(rep.max_symmetry_drift, symmetry_distance(st.current_profile(), j));
    }
    rep.per_sample_exit.push_back(std::max(0.0, sample_exit));
    rep.max_exit = std::max(rep.max_exit, std::max(0.0, sample_exit));
  }
  return rep;
}

inline InvarianceReport invariance_test(const RegionSpec& spec, const ProblemSpec& problem,
                                        double start_time, double horizon, int sample_count,
                                        unsigned seed, double dt = defaults::dt) {
  return invariance_test(spec, problem, start_time, horizon,
                         sample_region(spec, seed, sample_count), dt);
}

}  // namespace kci
