#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "linten/real/low_degree.hpp"
#include "linten/real/oracle.hpp"

using namespace linten;

namespace {

double horner_eval(const std::vector<double>& coeffs, double x) {
  double v = 0;
  for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) v = v * x + *it;
  return v;
}

}  // namespace

TEST_CASE("binomial weights have the right signs and sizes", "[low-degree]") {
  const AlphaCoeffs a1(1);
  CHECK(a1.alpha == std::vector<double>{-1.0, 2.0, -1.0});
  const AlphaCoeffs a3(3);
  CHECK(a3.alpha == std::vector<double>{-1.0, 4.0, -6.0, 4.0, -1.0});
  CHECK_THROWS_AS(AlphaCoeffs(0), std::invalid_argument);
}

TEST_CASE("weighted sum annihilates low-degree polynomials", "[low-degree]") {
  // 1000 random (degree, coefficients, line) draws; the alternating sum
  // along the line must vanish to relative precision
  Rng rng(31);
  for (int rep = 0; rep < 1000; ++rep) {
    const int d = 1 + static_cast<int>(rng.below(8));
    std::vector<double> coeffs(static_cast<std::size_t>(d) + 1);
    for (auto& c : coeffs) c = 2.0 * rng.next_double() - 1.0;
    const double p = 2.0 * rng.next_double() - 1.0;
    const double q = 2.0 * rng.next_double() - 1.0;
    const AlphaCoeffs a(d);
    double s = 0, mag = 0;
    for (int i = 0; i <= d + 1; ++i) {
      const double term = a.alpha[static_cast<std::size_t>(i)] * horner_eval(coeffs, p + i * q);
      s += term;
      mag += std::fabs(term);
    }
    CHECK(std::fabs(s) <= 1e-9 * std::max(1.0, mag));
  }
}

TEST_CASE("degree-1 corrector is the two-point extrapolation", "[low-degree]") {
  auto zoo = zoo_additive({3.0, -1.0});
  RealOracle f(2, zoo.eval);
  const RVec p = {0.5, 0.25};
  const RVec q = {0.1, -0.3};
  const auto got = g_q_lowdeg(f, 1, p, q);
  const double want = 2.0 * zoo.eval(p + q) - zoo.eval(p + 2.0 * q);
  CHECK(got.value == Catch::Approx(want));
  CHECK(f.query_count() == 2);
}

TEST_CASE("top-degree monomial leaves the exact factorial residue", "[low-degree]") {
  // f(x) = x_1^(d+1): the weighted sum equals (-1)^d (d+1)! q_1^(d+1),
  // exactly in floating point for small integer arguments
  for (int d = 1; d <= 4; ++d) {
    RealOracle f(1, [d](const RVec& x) {
      double v = 1;
      for (int e = 0; e < d + 1; ++e) v *= x[0];
      return v;
    });
    const AlphaCoeffs aw(d);
    double s = 0;
    for (int i = 0; i <= d + 1; ++i) {
      RVec arg = {0.0 + 2.0 * i};
      s += aw.alpha[static_cast<std::size_t>(i)] * f(arg);
    }
    double fact = 1;
    for (int i = 2; i <= d + 1; ++i) fact *= i;
    double want = fact * std::pow(2.0, d + 1);
    if (d % 2 == 1) want = -want;
    CHECK(s == want);
  }
}

TEST_CASE("interpolation hits polynomial values exactly", "[low-degree]") {
  // quadratic through three nodes, evaluated elsewhere
  auto quad = [](double x) { return 2.0 * x * x - 3.0 * x + 1.5; };
  std::vector<InterpolationNode> nodes = {{0.0, quad(0.0)}, {1.0, quad(1.0)}, {2.5, quad(2.5)}};
  const auto r = lagrange_interpolate(nodes, 4.0);
  CHECK(r.value == Catch::Approx(quad(4.0)));
  CHECK(r.lebesgue >= 1.0);

  CHECK_THROWS_AS(lagrange_interpolate({}, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(lagrange_interpolate({{1.0, 0.0}, {1.0, 2.0}}, 0.0),
                  std::invalid_argument);
}

TEST_CASE("characterization accepts polynomials with exact query count", "[low-degree]") {
  for (int d = 1; d <= 3; ++d) {
    Rng gen(100 + static_cast<std::uint64_t>(d));
    auto zoo = zoo_random_poly(2, d, gen);
    RealOracle f(2, zoo.eval);
    Rng rng(7);
    const int rounds = 5;
    const auto out = characterization_test(f, d, rounds, rng);
    CHECK(out.accepted);
    CHECK(out.queries_used == rounds * characterization_round_queries(d));
  }
  CHECK(characterization_round_queries(2) == 108);
}

TEST_CASE("characterization rejects a jump immediately", "[low-degree]") {
  Rng gen(5);
  auto zoo = zoo_poly_bump(zoo_random_poly(2, 2, gen), 5.0, 0.3);
  int rejects = 0;
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    RealOracle f(2, zoo.eval);
    Rng rng(seed);
    if (!characterization_test(f, 2, 10, rng).accepted) ++rejects;
  }
  CHECK(rejects == 30);
}

TEST_CASE("in-ball and out-ball correctors agree near the boundary", "[low-degree]") {
  // exact polynomial: the corrected value must match f(p) on both branches
  for (int d = 1; d <= 3; ++d) {
    Rng gen(40 + static_cast<std::uint64_t>(d));
    auto zoo = zoo_random_poly(2, d, gen);
    RealOracle f(2, zoo.eval);
    Rng rng(3);
    const double r = contraction_radius(d);

    RVec inside = {0.5 * r, 0.5 * r};
    const auto vin = query_g_lowdeg(f, d, inside, rng);
    CHECK(std::fabs(vin.value - zoo.eval(inside)) <= 1e-9 + vin.err_bound);
    CHECK(f.query_count() == d + 1);

    // just outside: nodes stay spread out, so the extrapolation is benign
    RVec outside = {1.00001 * r, 0.0};
    const auto vout = query_g_lowdeg(f, d, outside, rng);
    CHECK(std::fabs(vout.value - zoo.eval(outside)) <= 1e-6 + vout.err_bound);
    CHECK(f.query_count() == (d + 1) + (d + 1) * (d + 1));
  }
}

TEST_CASE("full tester accepts polynomials with exact accounting", "[low-degree]") {
  for (int d = 1; d <= 3; ++d) {
    Rng gen(60 + static_cast<std::uint64_t>(d));
    auto zoo = zoo_random_poly(2, d, gen);
    const auto dist = SamplableDistribution::standard_gaussian(2);
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      RealOracle f(2, zoo.eval);
      Rng rng(seed);
      const auto out = low_degree_tester(f, d, dist, 0.5, rng);
      CHECK(out.accepted);
      const int rounds = static_cast<int>(std::ceil(8.0 * d * d));
      CHECK(out.queries_used == expected_low_degree_queries(d, rounds, out.in_ball_evals,
                                                            out.out_ball_evals));
      CHECK(out.comparison_iterations == 8);  // ceil(4/0.5)
    }
  }
}

TEST_CASE("full tester rejects a polynomial plus jump", "[low-degree]") {
  Rng gen(71);
  auto zoo = zoo_poly_bump(zoo_random_poly(2, 2, gen), 5.0,
                           gaussian_upper_quantile(0.2));
  const auto dist = SamplableDistribution::standard_gaussian(2);
  int rejects = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    RealOracle f(2, zoo.eval);
    Rng rng(seed);
    if (!low_degree_tester(f, 2, dist, 0.1, rng).accepted) ++rejects;
  }
  CHECK(rejects >= 19);
}

TEST_CASE("degree-1 verdicts track the additivity tester", "[low-degree]") {
  // the d=1 tester and the additivity tester should agree on additive
  // instances in nearly all seeded runs
  auto zoo = zoo_additive({1.5, -0.25});
  const auto dist = SamplableDistribution::standard_gaussian(2);
  int agree = 0;
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    RealOracle f1(2, zoo.eval), f2(2, zoo.eval);
    Rng r1(seed), r2(seed);
    const bool a = low_degree_tester(f1, 1, dist, 0.25, r1).accepted;
    const bool b = additivity_tester(f2, dist, 0.25, r2).accepted;
    if (a == b) ++agree;
  }
  CHECK(agree >= 38);
}

TEST_CASE("parameter validation", "[low-degree]") {
  auto zoo = zoo_additive({1.0});
  RealOracle f(1, zoo.eval);
  const auto dist = SamplableDistribution::standard_gaussian(1);
  Rng rng(1);
  CHECK_THROWS_AS(low_degree_tester(f, 0, dist, 0.1, rng), std::invalid_argument);
  CHECK_THROWS_AS(low_degree_tester(f, 9, dist, 0.1, rng), std::invalid_argument);
  CHECK_THROWS_AS(low_degree_tester(f, 2, dist, 0.0, rng), std::invalid_argument);
}
