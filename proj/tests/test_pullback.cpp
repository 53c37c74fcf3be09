#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <vector>

#include "kci/equilibria.hpp"
#include "kci/evolution.hpp"
#include "kci/pullback.hpp"
#include "kci/regions.hpp"
#include "kci/spatial.hpp"

using namespace kci;

namespace {

const double pi = std::numbers::pi;

Profile region_midpoint(const RegionSpec& spec) {
  std::vector<double> mid(spec.lower.values.size());
  for (size_t i = 0; i < mid.size(); ++i)
    mid[i] = 0.5 * (spec.lower.values[i] + spec.upper.values[i]);
  return Profile::from_values(spec.lower.grid, std::move(mid));
}

}  // namespace

TEST_CASE("autonomous pullback limit is the equilibrium", "[pullback]") {
  auto a = diffusivity_saturating();
  auto spec = region_spec(1, +1, 3.0, 1.0, 1.0);
  auto p = ProblemSpec::autonomous_nonlocal(a, 3.0, 1.0);
  auto rec = nonlocal_positive_equilibrium(3.0, 1.0, a, 1);

  auto run = pullback_slice(0.0, 4, spec, p, region_midpoint(spec));
  REQUIRE(run.slices.size() == 5);
  REQUIRE(run.gaps.size() == 4);
  CHECK(run.converged);
  CHECK(sup_distance(run.final_slice(), rec.profile) <= 1e-5);
  CHECK(run.start_depths[0] == -5.0);
  CHECK(run.start_depths[4] == -80.0);
}

TEST_CASE("driven pullback converges in the Cauchy sense", "[pullback]") {
  auto spec = region_spec(1, +1, 3.0, 1.0, 2.0);
  auto p = ProblemSpec::nonlocal(diffusivity_saturating(),
                                 ForcingSpec::sinusoidal(3.0, 1.0, 2.0, 1.0));
  // depth 7 contains the depth-6 run as a prefix, so one run cross-checks both
  auto run = pullback_slice(1.7, 7, spec, p, region_midpoint(spec));
  REQUIRE(run.gaps.size() == 7);
  for (size_t k = 0; k + 1 < run.gaps.size(); ++k)
    CHECK(run.gaps[k + 1] <= run.gaps[k] + 1e-12);
  CHECK(run.gaps[5] <= 1e-6);  // the depth-6 verdict
  CHECK(run.gaps[6] <= 1e-6);
  CHECK(run.converged);
}

TEST_CASE("two starts agree on the final slice", "[pullback]") {
  auto spec = region_spec(1, +1, 3.0, 1.0, 2.0);
  auto p = ProblemSpec::nonlocal(diffusivity_saturating(),
                                 ForcingSpec::sinusoidal(3.0, 1.0, 2.0, 1.0));
  auto from_lower = pullback_slice(0.4, 4, spec, p, spec.lower);
  auto from_upper = pullback_slice(0.4, 4, spec, p, spec.upper);
  CHECK(sup_distance(from_lower.final_slice(), from_upper.final_slice()) <= 1e-5);
}

TEST_CASE("pullback slice is a global solution", "[pullback]") {
  auto spec = region_spec(1, +1, 3.0, 1.0, 2.0);
  auto p = ProblemSpec::nonlocal(diffusivity_saturating(),
                                 ForcingSpec::sinusoidal(3.0, 1.0, 2.0, 1.0));
  Profile mid = region_midpoint(spec);
  auto at_zero = pullback_slice(0.0, 5, spec, p, mid);
  auto at_two = pullback_slice(2.0, 5, spec, p, mid);
  Profile pushed = detail::run_between(at_zero.final_slice(), 0.0, 2.0, defaults::dt, p);
  CHECK(sup_distance(pushed, at_two.final_slice()) <= 1e-5);
}

TEST_CASE("pullback input validation", "[pullback]") {
  auto spec = region_spec(1, +1, 3.0, 1.0, 2.0);
  auto p = ProblemSpec::nonlocal(diffusivity_saturating(),
                                 ForcingSpec::sinusoidal(3.0, 1.0, 2.0, 1.0));
  Profile mid = region_midpoint(spec);
  CHECK_THROWS_AS(pullback_slice(0.0, 0, spec, p, mid), validation_error);
  CHECK_THROWS_AS(pullback_slice(0.0, 4, spec, p, mid, -1e-3), validation_error);
  // start outside the region
  std::vector<double> big(mid.values.size(), 3.0);
  CHECK_THROWS_AS(
      pullback_slice(0.0, 4, spec, p, Profile::from_values(spec.lower.grid, big)),
      validation_error);
  // mismatched problem
  auto wrong = ProblemSpec::nonlocal(diffusivity_saturating(),
                                     ForcingSpec::sinusoidal(4.0, 1.0, 2.0, 1.0));
  CHECK_THROWS_AS(pullback_slice(0.0, 4, spec, wrong, mid), validation_error);
}

TEST_CASE("trace of the one-arch equilibrium", "[pullback]") {
  auto p = ProblemSpec::nonlocal(diffusivity_saturating(),
                                 ForcingSpec::sinusoidal(3.0, 1.0, 2.0, 1.0));
  auto rec = trace_equilibrium(1, +1, p, 0.0, 2.0, 1.0, defaults::grid_n, 5);
  REQUIRE(rec.samples.size() == 3);
  CHECK(rec.valid);
  CHECK_FALSE(rec.first_failure_time.has_value());
  for (const auto& s : rec.samples) {
    CHECK(s.run.converged);
    CHECK(s.zeros_ok);
    CHECK(s.sandwich_ok);
    CHECK(s.floor_ok);
    REQUIRE(s.zeros.size() == 2);
    CHECK(std::fabs(s.zeros[0]) <= 1e-12);
    CHECK(std::fabs(s.zeros[1] - pi) <= 1e-12);
    // the slice genuinely moves with the forcing, it is not a frozen profile
    CHECK(s.run.final_slice().max_abs() > 0.5);
  }
  // distinct sample times give distinct slices under a nonconstant beta
  CHECK(sup_distance(rec.samples[0].run.final_slice(), rec.samples[1].run.final_slice()) > 1e-3);
}

TEST_CASE("trace of the two-arch equilibrium", "[pullback]") {
  auto p = ProblemSpec::nonlocal(diffusivity_saturating(),
                                 ForcingSpec::sinusoidal(9.0, 1.0, 2.0, 1.0));
  auto rec = trace_equilibrium(2, +1, p, 0.0, 1.0, 0.5, defaults::grid_n, 5);
  REQUIRE(rec.samples.size() == 3);
  CHECK(rec.valid);
  for (const auto& s : rec.samples) {
    REQUIRE(s.zeros.size() == 3);
    CHECK(std::fabs(s.zeros[0]) <= 1e-12);
    CHECK(std::fabs(s.zeros[1] - pi / 2.0) <= 2.0 * rec.region.lower.grid.h());
    CHECK(std::fabs(s.zeros[2] - pi) <= 1e-12);
  }
}

TEST_CASE("negative-sign trace mirrors the positive one", "[pullback]") {
  auto p = ProblemSpec::nonlocal(diffusivity_saturating(),
                                 ForcingSpec::sinusoidal(3.0, 1.0, 2.0, 1.0));
  auto neg = trace_equilibrium(1, -1, p, 0.5, 0.5, 1.0, defaults::grid_n, 4);
  REQUIRE(neg.samples.size() == 1);
  CHECK(neg.valid);
  for (double v : neg.samples[0].run.final_slice().values) CHECK(v <= 0.0);

  auto pos = trace_equilibrium(1, +1, p, 0.5, 0.5, 1.0, defaults::grid_n, 4);
  // odd symmetry of the flow maps one trace onto the other
  Profile mirrored = pos.samples[0].run.final_slice();
  for (double& v : mirrored.values) v = -v;
  mirrored.modes.reset();
  CHECK(sup_distance(mirrored, neg.samples[0].run.final_slice()) <= 1e-8);
}

TEST_CASE("trace precondition on lambda", "[pullback]") {
  auto p = ProblemSpec::nonlocal(diffusivity_saturating(),
                                 ForcingSpec::sinusoidal(3.0, 1.0, 2.0, 1.0));
  CHECK_THROWS_AS(trace_equilibrium(2, +1, p, 0.0, 1.0, 0.5), validation_error);
}

TEST_CASE("bundle attraction inside the region", "[pullback]") {
  auto a = diffusivity_saturating();
  SECTION("autonomous bundle collapses onto the equilibrium") {
    auto spec = region_spec(1, +1, 3.0, 1.0, 1.0);
    auto p = ProblemSpec::autonomous_nonlocal(a, 3.0, 1.0);
    double gap = attraction_test(spec, p, 0.0, 3, 6);
    CHECK(gap <= 1e-5);
  }
  SECTION("driven bundle gap shrinks with depth") {
    auto spec = region_spec(1, +1, 3.0, 1.0, 2.0);
    auto p = ProblemSpec::nonlocal(a, ForcingSpec::sinusoidal(3.0, 1.0, 2.0, 1.0));
    double shallow = attraction_test(spec, p, 0.0, 4, 2, 77);
    double deep = attraction_test(spec, p, 0.0, 4, 4, 77);
    CHECK(deep <= shallow + 1e-12);
    CHECK(deep <= 1e-4);
  }
  SECTION("single member has zero gap") {
    auto spec = region_spec(1, +1, 3.0, 1.0, 2.0);
    auto p = ProblemSpec::nonlocal(a, ForcingSpec::sinusoidal(3.0, 1.0, 2.0, 1.0));
    CHECK(attraction_test(spec, p, 0.0, 1, 2) == 0.0);
  }
}
