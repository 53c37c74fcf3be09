#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <random>

#include "kci/spatial.hpp"

using namespace kci;
using std::numbers::pi;

namespace {

Profile random_profile(const Grid& g, unsigned seed, double amp = 1.0) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-amp, amp);
  std::vector<double> v(static_cast<size_t>(g.n));
  for (auto& x : v) x = dist(rng);
  return Profile::from_values(g, std::move(v));
}

// independent projection oracle: keep only modes k = m*j with m odd
Profile spectral_arch_filter(const Profile& u, int j) {
  auto c = sine_transform(u);
  for (int k = 1; k <= u.grid.n; ++k) {
    bool keep = (k % j == 0) && ((k / j) % 2 == 1);
    if (!keep) c[static_cast<size_t>(k - 1)] = 0.0;
  }
  return Profile::from_modes(u.grid, std::move(c));
}

}  // namespace

TEST_CASE("grid construction and node layout", "[spatial]") {
  Grid g = make_grid(255, pi);
  CHECK(g.h() == Catch::Approx(pi / 256).epsilon(1e-15));
  CHECK(g.node(0) == Catch::Approx(pi / 256));
  CHECK(g.node(254) == Catch::Approx(255 * pi / 256));
  CHECK_THROWS_AS(make_grid(2, pi), validation_error);
  CHECK_THROWS_AS(make_grid(31, 0.0), validation_error);
  CHECK_THROWS_AS(make_grid(31, -1.0), validation_error);
}

TEST_CASE("sine transform round trip", "[spatial]") {
  for (int n : {3, 16, 63, 255, 254}) {
    Grid g = make_grid(n, pi);
    Profile u = random_profile(g, 1000u + static_cast<unsigned>(n));
    auto c = sine_transform(u);
    Profile back = inverse_sine_transform(g, c);
    double err = 0.0;
    for (int i = 0; i < n; ++i) err = std::max(err, std::fabs(back.values[i] - u.values[i]));
    CHECK(err <= 1e-12 * (1.0 + u.max_abs()));
    REQUIRE(back.modes.has_value());
  }
}

TEST_CASE("pure mode transforms exactly", "[spatial]") {
  Grid g = make_grid(63, pi);
  Profile u = Profile::from_function(g, [](double x) { return 2.0 * std::sin(3.0 * x); });
  auto c = sine_transform(u);
  CHECK(c[2] == Catch::Approx(2.0).margin(1e-13));
  double off = 0.0;
  for (int k = 1; k <= g.n; ++k)
    if (k != 3) off = std::max(off, std::fabs(c[k - 1]));
  CHECK(off <= 1e-13);
}

TEST_CASE("h10 seminorm values", "[spatial]") {
  Grid g = make_grid(255, pi);
  Profile s1 = Profile::from_function(g, [](double x) { return std::sin(x); });
  CHECK(h10_norm_sq(s1) == Catch::Approx(pi / 2).epsilon(1e-12));
  Profile s3 = Profile::from_function(g, [](double x) { return 2.0 * std::sin(3.0 * x); });
  CHECK(h10_norm_sq(s3) == Catch::Approx(18.0 * pi / 2 * 2.0).epsilon(1e-12));  // 9*4*(pi/2)
  CHECK(h10_norm_sq(Profile::zero(g)) == 0.0);
}

TEST_CASE("h10 matches finite-difference estimate at second order", "[spatial]") {
  auto fd_estimate = [](const Profile& u) {
    // centered differences interior, one-sided at the boundaries, trapezoid in x
    const Grid& g = u.grid;
    const double h = g.h();
    auto at = [&](int i) {  // i = 0..n+1 with boundary zeros
      if (i <= 0 || i >= g.n + 1) return 0.0;
      return u.values[static_cast<size_t>(i - 1)];
    };
    std::vector<double> dsq(static_cast<size_t>(g.n + 2));
    for (int i = 0; i <= g.n + 1; ++i) {
      double d;
      if (i == 0)
        d = (at(1) - at(0)) / h;
      else if (i == g.n + 1)
        d = (at(g.n + 1) - at(g.n)) / h;
      else
        d = (at(i + 1) - at(i - 1)) / (2 * h);
      dsq[static_cast<size_t>(i)] = d * d;
    }
    double s = 0.5 * (dsq.front() + dsq.back());
    for (int i = 1; i <= g.n; ++i) s += dsq[static_cast<size_t>(i)];
    return s * h;
  };
  auto diff_at = [&](int n) {
    Grid g = make_grid(n, pi);
    Profile u = Profile::from_function(g, [](double x) { return x * (pi - x); });
    return std::fabs(h10_norm_sq(u) - fd_estimate(u));
  };
  double d1 = diff_at(127), d2 = diff_at(255);
  double ratio = d1 / d2;
  CHECK(ratio > 3.0);
  CHECK(ratio < 5.5);
}

TEST_CASE("partial order", "[spatial]") {
  Grid g = make_grid(63, pi);
  Profile u = Profile::from_function(g, [](double x) { return std::sin(x); });
  Profile v = Profile::from_function(g, [](double x) { return std::sin(x) + 0.1; });
  CHECK(partial_order_leq(u, v).holds);
  auto r = partial_order_leq(v, u);
  CHECK_FALSE(r.holds);
  CHECK(r.max_violation == Catch::Approx(0.1).margin(1e-14));
  CHECK(partial_order_leq(v, u, 0.1 + 1e-12).holds);
  Grid g2 = make_grid(31, pi);
  CHECK_THROWS_AS(partial_order_leq(u, Profile::zero(g2)), validation_error);
}

TEST_CASE("symmetry class validation", "[spatial]") {
  Grid g = make_grid(255, pi);
  CHECK_NOTHROW(SymmetryClass::make(63, g));
  CHECK_THROWS_AS(SymmetryClass::make(64, g), validation_error);
  CHECK_THROWS_AS(SymmetryClass::make(0, g), validation_error);
}

TEST_CASE("symmetry projection fixes members and kills sin(x) for j=2", "[spatial]") {
  Grid g = make_grid(255, pi);
  Profile s2 = Profile::from_function(g, [](double x) { return std::sin(2.0 * x); });
  Profile p = symmetry_project(s2, 2);
  double err = 0.0;
  for (int i = 0; i < g.n; ++i) err = std::max(err, std::fabs(p.values[i] - s2.values[i]));
  CHECK(err <= 1e-13);

  Profile s1 = Profile::from_function(g, [](double x) { return std::sin(x); });
  Profile q = symmetry_project(s1, 2);
  CHECK(q.max_abs() <= 1e-13);

  Profile r = symmetry_project(s1, 1);
  err = 0.0;
  for (int i = 0; i < g.n; ++i) err = std::max(err, std::fabs(r.values[i] - s1.values[i]));
  CHECK(err <= 1e-13);
}

TEST_CASE("symmetry projection is idempotent, contractive, and matches the mode filter", "[spatial]") {
  Grid g = make_grid(63, pi);
  for (int j : {1, 2, 4}) {
    Profile u = random_profile(g, 77u + static_cast<unsigned>(j));
    Profile p = symmetry_project(u, j);
    Profile pp = symmetry_project(p, j);
    double drift = 0.0;
    for (int i = 0; i < g.n; ++i) drift = std::max(drift, std::fabs(pp.values[i] - p.values[i]));
    CHECK(drift <= 1e-14);
    CHECK(p.max_abs() <= u.max_abs() + 1e-15);
    Profile oracle = spectral_arch_filter(u, j);
    double dist = 0.0;
    for (int i = 0; i < g.n; ++i) dist = std::max(dist, std::fabs(oracle.values[i] - p.values[i]));
    CHECK(dist <= 1e-12);
  }
  CHECK_THROWS_AS(symmetry_project(random_profile(g, 5u), 3), validation_error);  // 64 % 6 != 0
}

TEST_CASE("zero crossings of sin(2x)", "[spatial]") {
  Grid g = make_grid(255, pi);
  Profile u = Profile::from_function(g, [](double x) { return std::sin(2.0 * x); });
  auto zf = zero_crossings(u);
  REQUIRE_FALSE(zf.identically_small);
  REQUIRE(zf.zeros.size() == 3);
  CHECK(zf.zeros[0] == 0.0);
  CHECK(zf.zeros[1] == Catch::Approx(pi / 2).margin(2 * g.h()));
  CHECK(zf.zeros[2] == Catch::Approx(pi).margin(1e-15));
}

TEST_CASE("zero crossing interpolation and dead band", "[spatial]") {
  Grid g = make_grid(254, pi);  // no node exactly at pi/2
  Profile u = Profile::from_function(g, [](double x) { return std::cos(x); });  // nonzero at ends? interior sign change at pi/2
  auto zf = zero_crossings(u, 1e-9);
  // cos is not Dirichlet data, but crossings only look at interior nodes
  bool found = false;
  for (double z : zf.zeros)
    if (std::fabs(z - pi / 2) < 1e-4) found = true;
  CHECK(found);

  Profile tiny = Profile::from_function(g, [](double x) { return 1e-9 * std::sin(x); });
  CHECK(zero_crossings(tiny, 1e-8).identically_small);
  CHECK_FALSE(zero_crossings(tiny).identically_small);  // default band is relative
}

TEST_CASE("noise inside the dead band does not create crossings", "[spatial]") {
  Grid g = make_grid(255, pi);
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> jitter(-1e-8, 1e-8);
  Profile u = Profile::from_function(g, [](double x) { return std::sin(x); });
  for (auto& v : u.values) v += jitter(rng);
  u.modes.reset();
  auto zf = zero_crossings(u);
  CHECK(zf.zeros.size() == 2);  // just the boundary zeros
}

TEST_CASE("nondegeneracy check", "[spatial]") {
  Grid g = make_grid(63, pi);
  Profile floor_p = Profile::from_function(g, [](double x) { return 0.5 * std::sin(x); });
  std::vector<Profile> good = {Profile::from_function(g, [](double x) { return std::sin(x); }),
                               Profile::from_function(g, [](double x) { return 0.51 * std::sin(x); })};
  CHECK(nondegeneracy_check(good, floor_p));
  std::vector<Profile> bad = {Profile::from_function(g, [](double x) { return 0.4 * std::sin(x); })};
  CHECK_FALSE(nondegeneracy_check(bad, floor_p));
  // within-tolerance dip passes
  std::vector<Profile> close = {Profile::from_function(g, [](double x) { return 0.5 * std::sin(x); })};
  for (auto& v : close[0].values) v -= 1e-12;
  close[0].modes.reset();
  CHECK(nondegeneracy_check(close, floor_p));
  CHECK_THROWS_AS(nondegeneracy_check(good, Profile::zero(g)), validation_error);
}
