#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "kci/defaults.hpp"
#include "kci/dst.hpp"
#include "kci/errors.hpp"

namespace kci {

// Uniform interior grid for homogeneous Dirichlet problems on (0, L):
// nodes x_i = (i+1) h, i = 0..n-1, h = L/(n+1). Boundary values are implicit zeros.
struct Grid {
  int n = 0;
  double length = 0.0;

  static Grid make(int n, double length = std::numbers::pi) {
    require(n >= 3, "grid needs at least 3 interior nodes, got " + std::to_string(n));
    require(length > 0.0 && std::isfinite(length), "grid length must be positive and finite");
    return Grid{n, length};
  }

  double h() const { return length / (n + 1); }
  double node(int i) const { return (i + 1) * h(); }
  bool operator==(const Grid& o) const { return n == o.n && length == o.length; }
  bool operator!=(const Grid& o) const { return !(*this == o); }
};

inline Grid make_grid(int n, double length = std::numbers::pi) {
  return Grid::make(n, length);
}

// Interior nodal values of a Dirichlet function, optionally with its sine
// coefficients attached when a construction path already knows them.
// Profiles are immutable value objects; every operation below is pure.
struct Profile {
  Grid grid;
  std::vector<double> values;
  std::optional<std::vector<double>> modes;

  static Profile zero(const Grid& g) {
    Profile p;
    p.grid = g;
    p.values.assign(static_cast<size_t>(g.n), 0.0);
    p.modes = std::vector<double>(static_cast<size_t>(g.n), 0.0);
    return p;
  }

  static Profile from_values(const Grid& g, std::vector<double> v) {
    require(static_cast<int>(v.size()) == g.n, "value count does not match grid");
    for (double x : v) require(std::isfinite(x), "profile values must be finite");
    Profile p;
    p.grid = g;
    p.values = std::move(v);
    return p;
  }

  static Profile from_modes(const Grid& g, std::vector<double> m) {
    require(static_cast<int>(m.size()) == g.n, "mode count does not match grid");
    Profile p;
    p.grid = g;
    detail::sine_values(m, p.values);
    p.modes = std::move(m);
    return p;
  }

  static Profile from_function(const Grid& g, const std::function<double(double)>& f) {
    std::vector<double> v(static_cast<size_t>(g.n));
    for (int i = 0; i < g.n; ++i) v[static_cast<size_t>(i)] = f(g.node(i));
    return from_values(g, std::move(v));
  }

  double max_abs() const {
    double m = 0.0;
    for (double v : values) m = std::max(m, std::fabs(v));
    return m;
  }
};

// Sine coefficients of u (cached copy if present, else one transform).
inline std::vector<double> sine_transform(const Profile& u) {
  if (u.modes) return *u.modes;
  std::vector<double> c;
  detail::sine_coeffs(u.values, c);
  return c;
}

inline Profile inverse_sine_transform(const Grid& g, std::vector<double> modes) {
  return Profile::from_modes(g, std::move(modes));
}

// Copy of u with the mode cache guaranteed present.
inline Profile with_modes(Profile u) {
  if (!u.modes) {
    std::vector<double> c;
    detail::sine_coeffs(u.values, c);
    u.modes = std::move(c);
  }
  return u;
}

// Squared H^1_0 seminorm int_0^L u_x^2 dx via Parseval:
// sum_k (k pi / L)^2 c_k^2 * (L/2).
inline double h10_norm_sq(const Profile& u) {
  const double L = u.grid.length;
  const double base = std::numbers::pi / L;
  double s = 0.0;
  if (u.modes) {
    const auto& c = *u.modes;
    for (int k = 1; k <= u.grid.n; ++k) {
      double w = k * base;
      s += w * w * c[static_cast<size_t>(k - 1)] * c[static_cast<size_t>(k - 1)];
    }
  } else {
    std::vector<double> c;
    detail::sine_coeffs(u.values, c);
    for (int k = 1; k <= u.grid.n; ++k) {
      double w = k * base;
      s += w * w * c[static_cast<size_t>(k - 1)] * c[static_cast<size_t>(k - 1)];
    }
  }
  return s * (L / 2.0);
}

// Trapezoid rule for integrands given at the interior nodes that vanish at the
// boundary (every integrand in this library is built from Dirichlet data).
inline double trapezoid(const Grid& g, const std::vector<double>& integrand) {
  double s = 0.0;
  for (double v : integrand) s += v;
  return s * g.h();
}

inline double l2_norm(const Profile& u) {
  double s = 0.0;
  for (double v : u.values) s += v * v;
  return std::sqrt(s * u.grid.h());
}

struct OrderResult {
  bool holds = false;
  double max_violation = 0.0;  // max over nodes of (u - v)_+
};

// Nodewise check of u <= v + tol.
inline OrderResult partial_order_leq(const Profile& u, const Profile& v, double tol = 0.0) {
  require(u.grid == v.grid, "partial order needs matching grids");
  require(tol >= 0.0, "tolerance must be nonnegative");
  OrderResult r;
  for (size_t i = 0; i < u.values.size(); ++i)
    r.max_violation = std::max(r.max_violation, u.values[i] - v.values[i]);
  if (r.max_violation < 0.0) r.max_violation = 0.0;
  r.holds = r.max_violation <= tol;
  return r;
}

// Symmetry pattern of j-arch states: even about the centers of odd half-periods
// (u(x) = u((2k-1)L/j - x)) and odd about the arch junctions (u(x) = -u(2kL/j - x)).
struct SymmetryClass {
  int j = 1;

  static SymmetryClass make(int j, const Grid& g) {
    require(j >= 1, "symmetry index must be >= 1");
    require(4 * j <= g.n, "symmetry index too large for grid (need j <= n/4)");
    return SymmetryClass{j};
  }

  std::string describe() const {
    return "j=" + std::to_string(j) + " alternating arch pattern";
  }
};

// Orthogonal projection onto the j-arch symmetry class, computed as the group
// average over the 2j reflected/negated arch copies. Exact on members,
// idempotent, and a sup-norm contraction. Needs (n+1) divisible by 2j so the
// reflections act as node permutations.
inline Profile symmetry_project(const Profile& u, int j) {
  SymmetryClass::make(j, u.grid);
  const int n = u.grid.n;
  require((n + 1) % (2 * j) == 0,
          "symmetry projection needs (n+1) divisible by 2j (n=" + std::to_string(n) +
              ", j=" + std::to_string(j) + ")");
  const int P = (n + 1) / j;  // nodes per arch, junction to junction
  std::vector<double> arch(static_cast<size_t>(P), 0.0);  // arch[r], r = 1..P-1 used
  for (int r = 1; r < P; ++r) {
    // wide accumulator keeps the group average exact on class members (2j
    // equal doubles sum without rounding in 64-bit precision)
    long double acc = 0.0L;
    for (int a = 0; a < j; ++a) {
      double sign = (a % 2 == 0) ? 1.0 : -1.0;
      acc += sign * u.values[static_cast<size_t>(a * P + r - 1)];
      acc += sign * u.values[static_cast<size_t>((a + 1) * P - r - 1)];
    }
    arch[static_cast<size_t>(r)] = static_cast<double>(acc / (2.0L * j));
  }
  std::vector<double> out(static_cast<size_t>(n), 0.0);
  for (int a = 0; a < j; ++a) {
    double sign = (a % 2 == 0) ? 1.0 : -1.0;
    for (int r = 1; r < P; ++r) out[static_cast<size_t>(a * P + r - 1)] = sign * arch[static_cast<size_t>(r)];
    // arch junction nodes stay exactly zero
  }
  return Profile::from_values(u.grid, std::move(out));
}

inline double symmetry_distance(const Profile& u, int j) {
  Profile p = symmetry_project(u, j);
  double d = 0.0;
  for (size_t i = 0; i < u.values.size(); ++i)
    d = std::max(d, std::fabs(u.values[i] - p.values[i]));
  return d;
}

inline double sup_distance(const Profile& u, const Profile& v) {
  require(u.grid == v.grid, "profiles live on different grids");
  double d = 0.0;
  for (size_t i = 0; i < u.values.size(); ++i)
    d = std::max(d, std::fabs(u.values[i] - v.values[i]));
  return d;
}

struct ZeroFindings {
  bool identically_small = false;
  std::vector<double> zeros;  // includes 0 and L unless identically small
};

inline double default_deadband(const Profile& u) { return defaults::deadband_rel * u.max_abs(); }

// Boundary zeros plus interior sign changes. Nodes within the dead band are
// treated as zero; a crossing needs |u| > delta on both flanks. An isolated
// zero run between opposite signs locates the zero at the run midpoint,
// otherwise linear interpolation between the bracketing nodes.
inline ZeroFindings zero_crossings(const Profile& u, std::optional<double> deadband = std::nullopt) {
  double delta = deadband ? *deadband : default_deadband(u);
  require(delta >= 0.0, "dead band must be nonnegative");
  ZeroFindings zf;
  if (u.max_abs() <= delta || u.max_abs() == 0.0) {
    zf.identically_small = true;
    return zf;
  }
  zf.zeros.push_back(0.0);
  const Grid& g = u.grid;
  int prev = -1;      // index of last node with |u| > delta
  int prev_sign = 0;
  for (int i = 0; i < g.n; ++i) {
    double v = u.values[static_cast<size_t>(i)];
    int s = (v > delta) ? 1 : (v < -delta ? -1 : 0);
    if (s == 0) continue;
    if (prev_sign != 0 && s != prev_sign) {
      if (i - prev > 1) {
        zf.zeros.push_back(0.5 * (g.node(prev + 1) + g.node(i - 1)));
      } else {
        double x0 = g.node(prev), x1 = g.node(i);
        double u0 = u.values[static_cast<size_t>(prev)], u1 = v;
        zf.zeros.push_back(x0 + (x1 - x0) * (-u0) / (u1 - u0));
      }
    }
    prev = i;
    prev_sign = s;
  }
  zf.zeros.push_back(g.length);
  return zf;
}

// Every slice dominates the floor nodewise within tol. The floor must be a
// genuinely positive interior profile (this is what rules out degeneracy).
inline bool nondegeneracy_check(const std::vector<Profile>& slices, const Profile& floor_profile,
                                double tol = defaults::nondegeneracy_tol) {
  double fmin = floor_profile.values.empty() ? 0.0 : floor_profile.values[0];
  for (double v : floor_profile.values) fmin = std::min(fmin, v);
  require(fmin > 0.0, "non-degeneracy floor must be positive at interior nodes");
  for (const auto& s : slices) {
    require(s.grid == floor_profile.grid, "slice grid does not match floor grid");
    for (size_t i = 0; i < s.values.size(); ++i)
      if (s.values[i] < floor_profile.values[i] - tol) return false;
  }
  return true;
}

}  // namespace kci
