#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <vector>

#include "kci/equilibria.hpp"
#include "kci/evolution.hpp"
#include "kci/regions.hpp"
#include "kci/spatial.hpp"

using namespace kci;

namespace {

const double pi = std::numbers::pi;

double sup_gap(const std::vector<double>& a, const std::vector<double>& b) {
  REQUIRE(a.size() == b.size());
  double m = 0.0;
  for (size_t i = 0; i < a.size(); ++i) m = std::max(m, std::fabs(a[i] - b[i]));
  return m;
}

}  // namespace

TEST_CASE("one-arch region reproduces the auxiliary equilibria", "[regions]") {
  auto spec = region_spec(1, +1, 3.0, 1.0, 2.0);
  auto a1 = diffusivity_constant(1.0);
  Profile direct_lo = nonlocal_positive_equilibrium(1.5, 2.0, a1, 1).profile;
  Profile direct_hi = nonlocal_positive_equilibrium(3.0, 0.5, a1, 1).profile;
  CHECK(sup_gap(spec.lower.values, direct_lo.values) <= 1e-10);
  CHECK(sup_gap(spec.upper.values, direct_hi.values) <= 1e-10);
  for (size_t i = 0; i < spec.lower.values.size(); ++i) {
    CHECK(spec.lower.values[i] > 0.0);
    CHECK(spec.lower.values[i] < spec.upper.values[i]);
  }
}

TEST_CASE("region construction rejects bad parameters", "[regions]") {
  CHECK_THROWS_AS(region_spec(1, +1, 1.5, 1.0, 1.0), validation_error);
  CHECK_THROWS_AS(region_spec(2, +1, 7.9, 1.0, 2.0), validation_error);
  CHECK_THROWS_AS(region_spec(1, 0, 3.0, 1.0, 2.0), validation_error);
  CHECK_THROWS_AS(region_spec(1, +1, 3.0, 2.0, 1.0), validation_error);
}

TEST_CASE("negative region mirrors the positive one", "[regions]") {
  auto plus = region_spec(2, +1, 9.0, 1.0, 2.0);
  auto minus = region_spec(2, -1, 9.0, 1.0, 2.0);
  REQUIRE(plus.lower.values.size() == minus.lower.values.size());
  for (size_t i = 0; i < plus.lower.values.size(); ++i) {
    CHECK(minus.lower.values[i] == -plus.upper.values[i]);
    CHECK(minus.upper.values[i] == -plus.lower.values[i]);
  }
}

TEST_CASE("membership follows box and symmetry", "[regions]") {
  auto spec = region_spec(1, +1, 3.0, 1.0, 2.0);
  const Grid& g = spec.lower.grid;

  CHECK(in_region(spec.lower, spec, 0.0));
  CHECK(in_region(spec.upper, spec, 0.0));

  std::vector<double> mid(spec.lower.values.size());
  for (size_t i = 0; i < mid.size(); ++i)
    mid[i] = 0.5 * (spec.lower.values[i] + spec.upper.values[i]);
  Profile pm = Profile::from_values(g, mid);
  CHECK(in_region(pm, spec, 0.0));

  // outside the box on part of the arch
  std::vector<double> big = spec.upper.values;
  for (size_t i = 0; i < big.size() / 2; ++i) big[i] += 0.1;
  // restore even symmetry so only the box clause can fail
  for (size_t i = 0; i < big.size() / 2; ++i) big[big.size() - 1 - i] = big[i];
  CHECK_FALSE(in_region(Profile::from_values(g, big), spec));

  // inside the box but asymmetric
  std::vector<double> skew = mid;
  for (size_t i = 0; i < skew.size(); ++i) skew[i] += 0.01 * std::sin(2.0 * g.node(static_cast<int>(i)));
  CHECK_FALSE(in_region(Profile::from_values(g, skew), spec));

  Grid other = Grid::make(63);
  CHECK_THROWS_AS(in_region(Profile::zero(other), spec), validation_error);
}

TEST_CASE("two-arch region semantics", "[regions]") {
  auto spec = region_spec(2, +1, 9.0, 1.0, 2.0);
  const Grid& g = spec.lower.grid;
  std::vector<double> mid(spec.lower.values.size());
  for (size_t i = 0; i < mid.size(); ++i)
    mid[i] = 0.5 * (spec.lower.values[i] + spec.upper.values[i]);
  CHECK(in_region(Profile::from_values(g, mid), spec, 0.0));
  // the box corner is not symmetric for j >= 2, so it is not a member
  CHECK_FALSE(in_region(spec.lower, spec));
  // second arch of the box is negative
  int P = spec.arch_stride();
  for (int q = 0; q < P - 1; ++q) {
    CHECK(spec.upper.values[static_cast<size_t>(P + q)] < 0.0);
    CHECK(spec.lower.values[static_cast<size_t>(P + q)] <
          spec.upper.values[static_cast<size_t>(P + q)]);
  }
  // junction pinned at zero in both envelopes
  CHECK(spec.lower.values[static_cast<size_t>(P - 1)] == 0.0);
  CHECK(spec.upper.values[static_cast<size_t>(P - 1)] == 0.0);
}

TEST_CASE("samples are exact members", "[regions]") {
  struct Case {
    int j;
    double lambda;
  };
  for (Case c : {Case{1, 3.0}, Case{2, 9.0}, Case{3, 19.0}}) {
    auto spec = region_spec(c.j, +1, c.lambda, 1.0, 2.0);
    auto samples = sample_region(spec, 42, 25);
    REQUIRE(samples.size() == 25);
    for (const auto& s : samples) CHECK(in_region(s, spec, 0.0));
  }

  auto spec = region_spec(1, -1, 3.0, 1.0, 2.0);
  auto samples = sample_region(spec, 9, 10);
  for (const auto& s : samples) {
    CHECK(in_region(s, spec, 0.0));
    for (double v : s.values) CHECK(v <= 0.0);
  }

  // deterministic in the seed
  auto again = sample_region(spec, 9, 10);
  for (size_t k = 0; k < samples.size(); ++k)
    CHECK(samples[k].values == again[k].values);
}

TEST_CASE("stationary sample never exits", "[regions]") {
  auto spec = region_spec(1, +1, 3.0, 1.0, 1.0);
  auto a = diffusivity_saturating();
  auto rec = nonlocal_positive_equilibrium(3.0, 1.0, a, 1);
  auto p = ProblemSpec::autonomous_nonlocal(a, 3.0, 1.0);
  auto rep = invariance_test(spec, p, 0.0, 10.0, {rec.profile});
  CHECK(rep.max_exit <= 1e-8);
  CHECK(rep.per_sample_exit.size() == 1);
}

TEST_CASE("region is invariant under the driven flow", "[regions]") {
  SECTION("one arch") {
    auto spec = region_spec(1, +1, 3.0, 1.0, 2.0);
    auto p = ProblemSpec::nonlocal(diffusivity_saturating(),
                                   ForcingSpec::sinusoidal(3.0, 1.0, 2.0, 1.0));
    auto rep = invariance_test(spec, p, 0.0, 10.0, 8, 123);
    INFO("exit " << rep.max_exit << " sym " << rep.max_symmetry_drift);
    CHECK(rep.max_exit <= 1e-6);
    CHECK(rep.max_symmetry_drift <= 1e-6);
    CHECK(rep.max_sign_violation <= 1e-8);
    CHECK(rep.max_pinned_zero == 0.0);  // no interior junctions for j = 1
  }

  SECTION("two arches with pinned midpoint zero") {
    auto spec = region_spec(2, +1, 9.0, 1.0, 2.0);
    auto p = ProblemSpec::nonlocal(diffusivity_saturating(),
                                   ForcingSpec::sinusoidal(9.0, 1.0, 2.0, 1.0));
    auto rep = invariance_test(spec, p, 0.0, 10.0, 8, 321);
    INFO("exit " << rep.max_exit << " pinned " << rep.max_pinned_zero);
    CHECK(rep.max_exit <= 1e-6);
    CHECK(rep.max_pinned_zero <= 1e-8);
    CHECK(rep.max_sign_violation <= 1e-8);
  }

  SECTION("negative sign") {
    auto spec = region_spec(1, -1, 3.0, 1.0, 2.0);
    auto p = ProblemSpec::nonlocal(diffusivity_saturating(),
                                   ForcingSpec::sinusoidal(3.0, 1.0, 2.0, 1.0));
    auto rep = invariance_test(spec, p, 0.0, 5.0, 5, 5);
    CHECK(rep.max_exit <= 1e-6);
  }
}

TEST_CASE("invariance rejects mismatched problems", "[regions]") {
  auto spec = region_spec(1, +1, 3.0, 1.0, 2.0);
  auto a = diffusivity_saturating();
  CHECK_THROWS_AS(
      invariance_test(spec, ProblemSpec::nonlocal(a, ForcingSpec::sinusoidal(3.0, 0.5, 2.0, 1.0)),
                      0.0, 1.0, 2, 1),
      validation_error);
  CHECK_THROWS_AS(
      invariance_test(spec, ProblemSpec::nonlocal(a, ForcingSpec::sinusoidal(4.0, 1.0, 2.0, 1.0)),
                      0.0, 1.0, 2, 1),
      validation_error);
  auto forcing = ForcingSpec::sinusoidal(3.0, 1.0, 2.0, 1.0);
  CHECK_THROWS_AS(invariance_test(spec, ProblemSpec::local_upper(forcing), 0.0, 1.0, 2, 1),
                  validation_error);
  std::vector<Profile> bad = {Profile::zero(Grid::make(63))};
  CHECK_THROWS_AS(invariance_test(spec, ProblemSpec::nonlocal(a, forcing), 0.0, 1.0, bad),
                  validation_error);
}
