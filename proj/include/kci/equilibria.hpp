#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "kci/evolution.hpp"
#include "kci/spatial.hpp"

namespace kci {

namespace detail {

inline double adaptive_simpson_rec(const std::function<double(double)>& f, double lo, double hi,
                                   double flo, double fmid, double fhi, double whole, double tol,
                                   int depth) {
  double mid = 0.5 * (lo + hi);
  double lm = 0.5 * (lo + mid), rm = 0.5 * (mid + hi);
  double flm = f(lm), frm = f(rm);
  double left = (mid - lo) / 6.0 * (flo + 4.0 * flm + fmid);
  double right = (hi - mid) / 6.0 * (fmid + 4.0 * frm + fhi);
  if (depth <= 0 || std::fabs(left + right - whole) <= 15.0 * tol)
    return left + right + (left + right - whole) / 15.0;
  return adaptive_simpson_rec(f, lo, mid, flo, flm, fmid, left, tol / 2.0, depth - 1) +
         adaptive_simpson_rec(f, mid, hi, fmid, frm, fhi, right, tol / 2.0, depth - 1);
}

inline double adaptive_simpson(const std::function<double(double)>& f, double lo, double hi,
                               double tol) {
  if (lo == hi) return 0.0;
  double flo = f(lo), fhi = f(hi), fmid = f(0.5 * (lo + hi));
  double whole = (hi - lo) / 6.0 * (flo + 4.0 * fmid + fhi);
  return adaptive_simpson_rec(f, lo, hi, flo, fmid, fhi, whole, tol, 40);
}

struct ShootDiagnostics {
  Profile profile;
  double slope = 0.0;         // u'(0)
  double energy_drift = 0.0;  // max |c v^2/2 + lambda u^2/2 - b u^4/4 - E(0)|
  double end_value = 0.0;     // u at L from the final integration
};

// One pass of the phase-plane integration at slope p. Fills the nodal values
// when out != nullptr and reports whether u reached zero strictly before the
// last substep. Orbits above the separatrix blow up in finite x; they stop at
// the first non-finite state and count as "never hit zero".
struct ShotClassification {
  bool hit_zero_early = false;
  bool escaped = false;
  double end_value = 0.0;
  double energy_drift = 0.0;
};

inline ShotClassification integrate_shot(double p, double c, double lambda, double b,
                                         const Grid& g, int substeps,
                                         std::vector<double>* out) {
  const double hs = g.h() / substeps;
  const long total = static_cast<long>(g.n + 1) * substeps;
  double u = 0.0, v = p;
  const double E0 = c * p * p / 2.0;
  ShotClassification r;
  auto acc = [&](double uu) { return -(lambda * uu - b * uu * uu * uu) / c; };
  if (out) out->assign(static_cast<size_t>(g.n), 0.0);
  for (long i = 0; i < total; ++i) {
    double k1u = v, k1v = acc(u);
    double k2u = v + 0.5 * hs * k1v, k2v = acc(u + 0.5 * hs * k1u);
    double k3u = v + 0.5 * hs * k2v, k3v = acc(u + 0.5 * hs * k2u);
    double k4u = v + hs * k3v, k4v = acc(u + hs * k3u);
    u += hs / 6.0 * (k1u + 2.0 * k2u + 2.0 * k3u + k4u);
    v += hs / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
    if (!std::isfinite(u) || !std::isfinite(v)) {
      r.escaped = true;
      return r;
    }
    if (u <= 0.0 && i + 1 < total) {
      r.hit_zero_early = true;
      if (!out) return r;  // classification only: stop at the first zero
    }
    double E = c * v * v / 2.0 + lambda * u * u / 2.0 - b * u * u * u * u / 4.0;
    r.energy_drift = std::max(r.energy_drift, std::fabs(E - E0));
    if (out && (i + 1) % substeps == 0) {
      long node = (i + 1) / substeps - 1;
      if (node < g.n) (*out)[static_cast<size_t>(node)] = u;
    }
  }
  r.end_value = u;
  return r;
}

inline ShootDiagnostics shoot_with_diagnostics(double c, double lambda, double b, double L, int n,
                                               int substeps) {
  require(c > 0.0 && std::isfinite(c), "shooting needs c > 0");
  require(b > 0.0 && std::isfinite(b), "shooting needs b > 0");
  require(L > 0.0 && std::isfinite(L), "shooting needs L > 0");
  require(substeps >= 1, "shooting needs at least one substep per interval");
  const double pi = std::numbers::pi;
  double lam_min = c * (pi / L) * (pi / L);
  require(lambda > lam_min,
          "no positive solution: lambda = " + std::to_string(lambda) +
              " is not above the first eigenvalue " + std::to_string(lam_min));
  Grid g = Grid::make(n, L);

  double p_max = 2.0 * std::sqrt(lambda / c) * std::sqrt(lambda / b);
  // The first return to zero moves right as the slope grows: too small a slope
  // comes back to the axis before L, too large a slope stays positive through L
  // (or escapes along the separatrix). Escapes count as "too large".
  auto slope_too_small = [&](double p) {
    ShotClassification s = integrate_shot(p, c, lambda, b, g, substeps, nullptr);
    return !s.escaped && (s.hit_zero_early || s.end_value <= 0.0);
  };
  if (slope_too_small(p_max)) {
    p_max *= 2.0;  // phase-plane estimate can be shy once; widen a single time
    if (slope_too_small(p_max))
      throw numerical_error("shooting bracket failure: slope " + std::to_string(p_max) +
                            " still reaches zero before L");
  }
  double lo = 0.0, hi = p_max;
  for (int it = 0; it < 200 && hi - lo > 1e-16 * p_max; ++it) {
    double mid = 0.5 * (lo + hi);
    if (slope_too_small(mid))
      lo = mid;
    else
      hi = mid;
  }
  double p = 0.5 * (lo + hi);
  ShootDiagnostics d;
  std::vector<double> vals;
  ShotClassification fin = integrate_shot(p, c, lambda, b, g, substeps, &vals);
  d.slope = p;
  d.end_value = fin.end_value;
  d.energy_drift = fin.energy_drift;
  double scale = std::max(1.0, lambda / std::sqrt(b));
  if (fin.energy_drift > 1e-9 * scale)
    throw numerical_error("shooting integration drift " + std::to_string(fin.energy_drift) +
                          " exceeds tolerance; increase substeps");
  for (double x : vals)
    if (!(x > 0.0))
      throw numerical_error("shooting produced a non-positive interior value");
  // the arch must come back symmetric; asymmetry signals a wrong slope bracket
  double peak = *std::max_element(vals.begin(), vals.end());
  for (int i = 0; i < g.n / 2; ++i) {
    double gap = std::fabs(vals[static_cast<size_t>(i)] - vals[static_cast<size_t>(g.n - 1 - i)]);
    if (gap > 1e-7 * peak)
      throw numerical_error("shooting profile asymmetric by " + std::to_string(gap));
  }
  d.profile = Profile::from_values(g, std::move(vals));
  return d;
}

}  // namespace detail

// Positive arch of c u'' + lambda u - b u^3 = 0 on (0, L) with zero boundary,
// found by bisection on the initial slope.
inline Profile shoot_positive(double c, double lambda, double b, double L,
                              int n = defaults::grid_n,
                              int substeps = defaults::shoot_substeps) {
  return detail::shoot_with_diagnostics(c, lambda, b, L, n, substeps).profile;
}

// u(x) = v(x)/sqrt(j) on the first arch, extended to (0, pi) by successive odd
// reflections. When v solves the (0, pi/j) problem with cubic coefficient b/j,
// the result solves the full problem with coefficient b and the same Kirchhoff
// value, because |u_x|^2 over (0,pi) equals |v_x|^2 over (0,pi/j) under this
// scaling.
inline Profile odd_reflect_scale(const Profile& v, int j) {
  require(j >= 1, "reflection needs j >= 1");
  const double pi = std::numbers::pi;
  require(std::fabs(v.grid.length - pi / j) <= 1e-12 * pi,
          "input must live on (0, pi/j) for the requested j");
  const int m = v.grid.n;
  double peak = v.max_abs();
  for (int i = 0; i < m; ++i) {
    require(v.values[static_cast<size_t>(i)] > 0.0, "reflection input must be positive inside");
    double gap = std::fabs(v.values[static_cast<size_t>(i)] -
                           v.values[static_cast<size_t>(m - 1 - i)]);
    require(gap <= 1e-6 * (1.0 + peak), "reflection input must be symmetric about its midpoint");
  }
  if (j == 1) return v;

  const int n_full = j * (m + 1) - 1;
  Grid g = Grid::make(n_full, pi);
  std::vector<double> vals(static_cast<size_t>(n_full));
  const double scale = 1.0 / std::sqrt(static_cast<double>(j));
  for (int r = 0; r < j; ++r) {
    const double sgn = (r % 2 == 0) ? 1.0 : -1.0;
    for (int q = 0; q <= m; ++q) {
      int idx = r * (m + 1) + q;
      if (idx >= n_full) break;  // the very last junction is the boundary at pi
      if (q == m) {
        vals[static_cast<size_t>(idx)] = 0.0;  // junction nodes are exact zeros
      } else {
        int qq = (r % 2 == 0) ? q : m - 1 - q;
        vals[static_cast<size_t>(idx)] = sgn * scale * v.values[static_cast<size_t>(qq)];
      }
    }
  }
  return Profile::from_values(g, std::move(vals));
}

// L2 norm of the strong-form residual a(|u_x|^2) u_xx + lambda u - b u^3,
// with u_xx taken spectrally.
inline double residual_norm(const Profile& u, double lambda, double b,
                            const DiffusivitySpec& a) {
  Profile um = with_modes(u);
  double s = h10_norm_sq(um);
  double as = a(s);
  const int n = u.grid.n;
  const double L = u.grid.length;
  std::vector<double> lap_modes(static_cast<size_t>(n));
  for (int k = 1; k <= n; ++k) {
    double w = k * std::numbers::pi / L;
    lap_modes[static_cast<size_t>(k - 1)] = -(w * w) * (*um.modes)[static_cast<size_t>(k - 1)];
  }
  std::vector<double> uxx;
  detail::sine_values(lap_modes, uxx);
  double acc = 0.0;
  for (int i = 0; i < n; ++i) {
    double ui = um.values[static_cast<size_t>(i)];
    double r = as * uxx[static_cast<size_t>(i)] + lambda * ui - b * ui * ui * ui;
    acc += r * r;
  }
  return std::sqrt(acc * u.grid.h());
}

// E(u) = 1/2 int_0^{|u_x|^2} a(s) ds + int (-lambda/2 u^2 + b/4 u^4) dx on
// (0, pi/j). With j = 1 this is the Lyapunov functional of the autonomous
// problem.
inline double energy(const Profile& u, int j, double lambda, double b,
                     const DiffusivitySpec& a) {
  require(j >= 1, "energy needs j >= 1");
  require(std::fabs(u.grid.length - std::numbers::pi / j) <= 1e-12 * std::numbers::pi,
          "energy expects a profile on (0, pi/j)");
  Profile um = with_modes(u);
  double s = h10_norm_sq(um);
  double kirchhoff = detail::adaptive_simpson([&a](double t) { return a(t); }, 0.0, s, 1e-10);
  std::vector<double> integrand(static_cast<size_t>(u.grid.n));
  for (int i = 0; i < u.grid.n; ++i) {
    double ui = u.values[static_cast<size_t>(i)];
    integrand[static_cast<size_t>(i)] = -0.5 * lambda * ui * ui + 0.25 * b * ui * ui * ui * ui;
  }
  return 0.5 * kirchhoff + trapezoid(u.grid, integrand);
}

enum class Method { trivial, shooting_fixed_point, energy_minimization, reflection_construction };

inline const char* method_name(Method m) {
  switch (m) {
    case Method::trivial: return "trivial";
    case Method::shooting_fixed_point: return "shooting-fixed-point";
    case Method::energy_minimization: return "energy-minimization";
    case Method::reflection_construction: return "reflection-construction";
  }
  return "?";
}

struct EquilibriumRecord {
  Profile profile;             // on (0, pi)
  int j = 0;                   // number of arches; 0 for the zero state
  int sign = 0;                // +1, -1, or 0 for the zero state
  double c_star = 1.0;         // self-consistent diffusion value
  double residual = 0.0;
  double h10 = 0.0;            // |u_x|^2 of the profile
  Method method = Method::trivial;
  std::vector<double> c_roots; // every self-consistent c found
  bool multiple_roots = false;
};

// Self-consistent j-arch equilibrium of a(|u_x|^2) u_xx + lambda u - b u^3 = 0:
// solve the constant-c arch problem on (0, pi/j) with coefficient b/j, then
// find c with a(N(c)) = c, N(c) the Kirchhoff argument of the reflected
// profile (equal to the arch value by the scaling identity). Bisection on
// [1, min(2, lambda/j^2)]; a's range [1,2] guarantees the bracket. For a
// non-monotone a the interval is scanned first and every root is kept.
inline EquilibriumRecord nonlocal_positive_equilibrium(double lambda, double b,
                                                       const DiffusivitySpec& a, int j,
                                                       int n = defaults::grid_n) {
  require(j >= 1, "need j >= 1");
  require(b > 0.0, "need b > 0");
  double a0 = a(0.0);
  require(lambda > a0 * j * j,
          "no j-arch equilibrium: lambda = " + std::to_string(lambda) +
              " is not above the threshold " + std::to_string(a0 * j * j));
  const double pi = std::numbers::pi;
  int m = static_cast<int>(std::lround(static_cast<double>(n + 1) / j)) - 1;
  require(m >= 3, "grid too coarse for the requested number of arches");
  const double L = pi / j;
  const double b_eff = b / j;

  double c_lo = 1.0;
  double c_hi = std::min(2.0, (lambda / (j * j)) * (1.0 - 1e-9));
  auto arch_at = [&](double c) { return shoot_positive(c, lambda, b_eff, L, m); };
  auto g_of = [&](double c) {
    Profile v = arch_at(c);
    return a(h10_norm_sq(v)) - c;
  };

  double g_lo = g_of(c_lo);
  double g_hi = g_of(c_hi);
  std::vector<double> roots;

  auto bisect_root = [&](double lo, double hi, double glo) {
    for (int it = 0; it < 60 && hi - lo > 1e-13; ++it) {
      double mid = 0.5 * (lo + hi);
      double gm = g_of(mid);
      if ((gm >= 0.0) == (glo >= 0.0)) {
        lo = mid;
        glo = gm;
      } else {
        hi = mid;
      }
    }
    return 0.5 * (lo + hi);
  };

  if (g_lo == 0.0) {
    roots.push_back(c_lo);
  }
  if (a.monotone) {
    if (!(g_lo >= 0.0 && g_hi <= 0.0))
      throw numerical_error("self-consistency bracket failure: g(" + std::to_string(c_lo) +
                            ")=" + std::to_string(g_lo) + ", g(" + std::to_string(c_hi) +
                            ")=" + std::to_string(g_hi));
    if (roots.empty()) roots.push_back(bisect_root(c_lo, c_hi, g_lo));
  } else {
    // scan for every sign change; non-monotone a can have several fixed points
    const double dc = 1e-3;
    double prev_c = c_lo, prev_g = g_lo;
    for (double c = c_lo + dc; c < c_hi + dc / 2; c += dc) {
      double cc = std::min(c, c_hi);
      double gc = cc == c_hi ? g_hi : g_of(cc);
      if (gc == 0.0)
        roots.push_back(cc);
      else if ((prev_g > 0.0 && gc < 0.0) || (prev_g < 0.0 && gc > 0.0))
        roots.push_back(bisect_root(prev_c, cc, prev_g));
      prev_c = cc;
      prev_g = gc;
      if (cc == c_hi) break;
    }
    if (roots.empty())
      throw numerical_error("self-consistency scan found no root: g(" + std::to_string(c_lo) +
                            ")=" + std::to_string(g_lo) + ", g(" + std::to_string(c_hi) +
                            ")=" + std::to_string(g_hi));
  }

  double c_star = roots.front();
  Profile arch = arch_at(c_star);
  double defect = std::fabs(a(h10_norm_sq(arch)) - c_star);
  if (defect > 1e-8)
    throw numerical_error("self-consistency defect " + std::to_string(defect) +
                          " above tolerance");

  EquilibriumRecord rec;
  rec.j = j;
  rec.sign = +1;
  rec.c_star = c_star;
  rec.c_roots = roots;
  rec.multiple_roots = roots.size() > 1;
  rec.profile = odd_reflect_scale(arch, j);
  rec.method = j == 1 ? Method::shooting_fixed_point : Method::reflection_construction;
  rec.h10 = h10_norm_sq(with_modes(rec.profile));
  rec.residual = residual_norm(rec.profile, lambda, b, a);
  return rec;
}

namespace detail {
inline EquilibriumRecord negate_record(const EquilibriumRecord& r) {
  EquilibriumRecord out = r;
  std::vector<double> v = r.profile.values;
  for (auto& x : v) x = -x;
  out.profile = Profile::from_values(r.profile.grid, std::move(v));
  out.sign = -r.sign;
  return out;
}
}  // namespace detail

// {0} plus the pair of j-arch equilibria for every j with a(0) j^2 < lambda.
inline std::vector<EquilibriumRecord> equilibria_catalog(double lambda, double b,
                                                         const DiffusivitySpec& a,
                                                         int n = defaults::grid_n) {
  require(b > 0.0, "need b > 0");
  std::vector<EquilibriumRecord> out;
  EquilibriumRecord zero;
  zero.profile = Profile::zero(Grid::make(n, std::numbers::pi));
  zero.c_star = a(0.0);
  out.push_back(std::move(zero));
  double a0 = a(0.0);
  for (int j = 1; a0 * j * j < lambda; ++j) {
    EquilibriumRecord plus = nonlocal_positive_equilibrium(lambda, b, a, j, n);
    EquilibriumRecord minus = detail::negate_record(plus);
    out.push_back(std::move(plus));
    out.push_back(std::move(minus));
  }
  return out;
}

struct BranchResult {
  int j = 0;
  int sign = 0;
  double h10 = 0.0;
  double c_star = 1.0;
  double residual = 0.0;
};

struct SweepRow {
  double lambda = 0.0;
  int count = 0;
  std::vector<BranchResult> branches;
  std::string error;  // empty when the row is complete
};

inline std::vector<SweepRow> bifurcation_sweep(const std::vector<double>& lambda_values, double b,
                                               const DiffusivitySpec& a,
                                               int n = defaults::grid_n) {
  require(std::is_sorted(lambda_values.begin(), lambda_values.end()),
          "lambda values must be sorted");
  std::vector<SweepRow> rows;
  rows.reserve(lambda_values.size());
  for (double lambda : lambda_values) {
    SweepRow row;
    row.lambda = lambda;
    try {
      auto cat = equilibria_catalog(lambda, b, a, n);
      row.count = static_cast<int>(cat.size());
      for (const auto& r : cat) {
        if (r.j == 0) continue;
        row.branches.push_back(BranchResult{r.j, r.sign, r.h10, r.c_star, r.residual});
      }
    } catch (const std::exception& e) {
      row.error = e.what();
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

// Projected gradient descent for E over the constraint set
// {0 <= u <= sqrt(lambda/b), u symmetric about the midpoint of (0, pi/j)}.
// The gradient is preconditioned mode-wise by a(s) k^2 (the quadratic part of
// E), the projection is symmetrize-then-clamp (the exact metric projection of
// the intersection), and the step is backtracked from 1 with an Armijo test.
inline Profile minimize_energy(double lambda, double b, const DiffusivitySpec& a, int j,
                               const Profile& init,
                               double grad_tol = defaults::minimize_grad_tol,
                               long max_iters = defaults::minimize_max_iters) {
  require(j >= 1, "need j >= 1");
  require(b > 0.0, "need b > 0");
  require(lambda > a(0.0) * j * j,
          "below the bifurcation threshold only the zero state exists: lambda = " +
              std::to_string(lambda) + " vs " + std::to_string(a(0.0) * j * j));
  const double pi = std::numbers::pi;
  require(std::fabs(init.grid.length - pi / j) <= 1e-12 * pi,
          "initial guess must live on (0, pi/j)");
  const Grid g = init.grid;
  const int n = g.n;
  const double ceiling = std::sqrt(lambda / b);

  auto project = [&](std::vector<double> v) {
    for (int i = 0; i < n / 2; ++i) {
      double avg = 0.5 * (v[static_cast<size_t>(i)] + v[static_cast<size_t>(n - 1 - i)]);
      v[static_cast<size_t>(i)] = avg;
      v[static_cast<size_t>(n - 1 - i)] = avg;
    }
    for (auto& x : v) x = std::clamp(x, 0.0, ceiling);
    return v;
  };
  auto E_of = [&](const std::vector<double>& v) {
    return energy(Profile::from_values(g, v), j, lambda, b, a);
  };

  std::vector<double> w2(static_cast<size_t>(n));
  for (int k = 1; k <= n; ++k) {
    double w = k * pi / g.length;
    w2[static_cast<size_t>(k - 1)] = w * w;
  }

  std::vector<double> u = project(init.values);
  double Eu = E_of(u);
  std::vector<double> modes, grad_modes, dir, trial;
  double pg_norm = std::numeric_limits<double>::infinity();
  for (long it = 0; it < max_iters; ++it) {
    detail::sine_coeffs(u, modes);
    double s = 0.0;
    for (int k = 0; k < n; ++k)
      s += w2[static_cast<size_t>(k)] * modes[static_cast<size_t>(k)] *
           modes[static_cast<size_t>(k)];
    s *= g.length / 2.0;
    double as = a(s);
    // strong-form gradient a(s)(-u'') - lambda u + b u^3, preconditioned by
    // the inverse of its linear part a(s) k^2 in mode space
    std::vector<double> gmod(static_cast<size_t>(n));
    for (int k = 0; k < n; ++k)
      gmod[static_cast<size_t>(k)] = as * w2[static_cast<size_t>(k)] *
                                     modes[static_cast<size_t>(k)];
    std::vector<double> aterm;
    detail::sine_values(gmod, aterm);
    std::vector<double> G(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) {
      double ui = u[static_cast<size_t>(i)];
      G[static_cast<size_t>(i)] = aterm[static_cast<size_t>(i)] - lambda * ui + b * ui * ui * ui;
    }
    detail::sine_coeffs(G, grad_modes);
    for (int k = 0; k < n; ++k)
      grad_modes[static_cast<size_t>(k)] /= as * w2[static_cast<size_t>(k)];
    detail::sine_values(grad_modes, dir);

    // projected-gradient stationarity measure at unit step
    double pg = 0.0;
    {
      std::vector<double> probe(static_cast<size_t>(n));
      for (int i = 0; i < n; ++i)
        probe[static_cast<size_t>(i)] = u[static_cast<size_t>(i)] - dir[static_cast<size_t>(i)];
      probe = project(std::move(probe));
      for (int i = 0; i < n; ++i)
        pg = std::max(pg, std::fabs(u[static_cast<size_t>(i)] - probe[static_cast<size_t>(i)]));
    }
    pg_norm = pg;
    if (pg <= grad_tol) break;

    double alpha = 1.0;
    bool accepted = false;
    for (int bt = 0; bt < 60; ++bt) {
      trial.resize(static_cast<size_t>(n));
      for (int i = 0; i < n; ++i)
        trial[static_cast<size_t>(i)] =
            u[static_cast<size_t>(i)] - alpha * dir[static_cast<size_t>(i)];
      trial = project(std::move(trial));
      double diff2 = 0.0;
      for (int i = 0; i < n; ++i) {
        double d = u[static_cast<size_t>(i)] - trial[static_cast<size_t>(i)];
        diff2 += d * d;
      }
      if (diff2 == 0.0) break;  // projection swallowed the whole step
      double Et = E_of(trial);
      if (Et <= Eu - 1e-4 / alpha * g.h() * diff2) {
        u.swap(trial);
        Eu = Et;
        accepted = true;
        break;
      }
      alpha *= 0.5;
    }
    if (!accepted) {
      if (pg <= 10.0 * grad_tol) break;  // flat to roundoff but already at the target scale
      throw numerical_error("energy descent stalled with projected gradient " +
                            std::to_string(pg));
    }
  }
  if (pg_norm > 10.0 * grad_tol)
    throw numerical_error("energy minimization did not converge: projected gradient " +
                          std::to_string(pg_norm) + " after " + std::to_string(max_iters) +
                          " iterations");
  if (!(Eu < 0.0))
    throw numerical_error("energy minimization reached a trivial state with E = " +
                          std::to_string(Eu));
  return Profile::from_values(g, std::move(u));
}

}  // namespace kci
