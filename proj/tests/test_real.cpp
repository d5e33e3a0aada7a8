#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "linten/real/additivity.hpp"
#include "linten/real/oracle.hpp"

using namespace linten;

TEST_CASE("contraction factor cases", "[real]") {
  CHECK(kappa({0.01}) == 1.0);
  CHECK(kappa({0.02}) == 1.0);  // boundary included in the inner ball
  CHECK(kappa({0.03}) == Catch::Approx(1.5));
  CHECK(kappa({1.0}) == Catch::Approx(50.0));
  CHECK(kappa({3.0, 4.0}) == Catch::Approx(250.0));
}

TEST_CASE("directional corrector is exact on additive functions", "[real]") {
  auto zoo = zoo_additive({2.0});
  RealOracle f(1, zoo.eval);
  CHECK(g_direction(f, {0.98}, {0.5}) == Catch::Approx(1.96));
  CHECK(f.query_count() == 2);

  auto zoo3 = zoo_additive({1.0, -2.0, 0.5});
  RealOracle f3(3, zoo3.eval);
  Rng rng(4);
  for (int i = 0; i < 50; ++i) {
    const RVec p = sample_gaussian(3, rng, 2.0);
    const RVec x = sample_gaussian(3, rng);
    CHECK(g_direction(f3, p, x) == Catch::Approx(zoo3.eval(p)).margin(1e-9));
  }
}

TEST_CASE("characterization rounds accept additive functions", "[real]") {
  auto zoo = zoo_additive({1.5, -0.25});
  RealOracle f(2, zoo.eval);
  Rng rng(9);
  const auto out = test_additivity(f, rng, 30);
  CHECK(out.accepted);
  CHECK(out.queries_used == 30 * kAdditivityRoundQueries);
}

TEST_CASE("nonzero offset is caught by the negation identity", "[real]") {
  auto zoo = zoo_affine({1.0, 1.0}, 1.0);
  RealOracle f(2, zoo.eval);
  Rng rng(9);
  const auto out = test_additivity(f, rng, 30);
  REQUIRE_FALSE(out.accepted);
  REQUIRE(out.witness.has_value());
  CHECK(out.witness->check == "negation");
  CHECK(out.queries_used == 2);  // rejected on the very first pair of calls
}

TEST_CASE("full tester accepts additive with exact query accounting", "[real]") {
  auto zoo = zoo_additive({0.7, 0.1, -3.0});
  const auto dist = SamplableDistribution::standard_gaussian(3);
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    RealOracle f(3, zoo.eval);
    Rng rng(seed);
    const auto out = additivity_tester(f, dist, 0.2, rng);
    CHECK(out.accepted);
    CHECK(out.comparison_iterations == 20);  // ceil(4/0.2)
    CHECK(out.queries_used == 20 * kAdditivityRoundQueries + 3 * 20);
  }
}

TEST_CASE("full tester rejects the halfspace jump", "[real]") {
  const double threshold = gaussian_upper_quantile(0.2);
  auto zoo = zoo_bump({1.0, -1.0}, 1.0, threshold);
  const auto dist = SamplableDistribution::standard_gaussian(2);
  int rejects = 0;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    RealOracle f(2, zoo.eval);
    Rng rng(seed);
    if (!additivity_tester(f, dist, 0.1, rng).accepted) ++rejects;
  }
  CHECK(rejects >= 48);
}

TEST_CASE("upper quantile inverts the gaussian tail", "[real]") {
  CHECK(gaussian_upper_quantile(0.5) == Catch::Approx(0.0).margin(1e-9));
  CHECK(gaussian_upper_quantile(0.025) == Catch::Approx(1.959963985).margin(1e-6));
  CHECK(gaussian_upper_quantile(0.2) == Catch::Approx(0.8416212336).margin(1e-6));
  CHECK_THROWS_AS(gaussian_upper_quantile(0.0), std::invalid_argument);
}

TEST_CASE("distribution machinery", "[real]") {
  Rng rng(2);
  // a point mass is a zero-sigma component
  auto pm = SamplableDistribution::mixture(2, {{2.0, {1.0, -1.0}, 0.0}});
  const RVec x = pm.sample(rng);
  CHECK(x[0] == 1.0);
  CHECK(x[1] == -1.0);
  CHECK_THROWS_AS(SamplableDistribution::mixture(2, {}), std::invalid_argument);
  CHECK_THROWS_AS(SamplableDistribution::mixture(2, {{1.0, {1.0}, 1.0}}),
                  std::invalid_argument);

  RealOracle f(2, [](const RVec& v) { return v[0]; });
  CHECK_THROWS_AS(f({1.0, 2.0, 3.0}), std::invalid_argument);
}

TEST_CASE("tolerance combines absolute and relative parts", "[real]") {
  Tolerance tol{1e-9, 1e-9};
  CHECK(tol.eq(1.0, 1.0 + 5e-10));
  CHECK_FALSE(tol.eq(1.0, 1.0 + 5e-9));
  CHECK(tol.eq(1e6, 1e6 + 5e-4));       // relative part carries large scales
  CHECK(tol.eq(0.0, 5e-7, 1e-6));       // widening by a propagated error bound
  CHECK_FALSE(tol.eq(0.0, 5e-7));
}

TEST_CASE("gaussian sampler moments look right", "[real]") {
  Rng rng(55);
  double sum = 0, sumsq = 0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double g = rng.next_gaussian();
    sum += g;
    sumsq += g * g;
  }
  CHECK(std::fabs(sum / n) < 0.01);
  CHECK(std::fabs(sumsq / n - 1.0) < 0.02);
}
