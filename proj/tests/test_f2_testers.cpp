#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "linten/f2/spectrum.hpp"
#include "linten/oracle/adversaries.hpp"
#include "linten/testers/f2_testers.hpp"

using namespace linten;

namespace {

TableSession null_session(BoolFn f, std::uint64_t seed) {
  return TableSession(TableDomain(std::move(f)), AdversaryConfig{},
                      adversary_null<TableDomain>(), seed);
}

BoolFn not_x1(int n) {
  // f(x) = 1 xor x_1: every even index maps to 1
  std::vector<std::uint8_t> table(std::size_t{1} << n);
  for (std::uint32_t i = 0; i < table.size(); ++i)
    table[i] = static_cast<std::uint8_t>(1 ^ (i & 1));
  return BoolFn(n, std::move(table));
}

}  // namespace

TEST_CASE("batch size arithmetic", "[f2-testers]") {
  CHECK(batch_size_m(0.5, 32.0) == 100);   // 4*(log2(32) + 20)
  CHECK(batch_size_m(0.5, 0.25) == 80);    // log term clamped at t < 1
  CHECK(batch_size_m(0.1, 1024.0) == 440);  // 4*(10 + 100)
  CHECK_THROWS_AS(batch_size_m(0.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(batch_size_m(0.6, 1.0), std::invalid_argument);
}

TEST_CASE("k-point rounds always catch the affine counterexample", "[f2-testers]") {
  // f = 1 xor x_1 flips the parity of every k+1 tuple, for every even k
  for (const int k : {2, 4, 8}) {
    for (std::uint64_t seed = 1; seed <= 50; ++seed) {
      auto s = null_session(not_x1(3), seed);
      CHECK(k_point_round(s, k) == RoundResult::Fail);
    }
  }
}

TEST_CASE("k-point rounds pass on linear functions", "[f2-testers]") {
  const BoolFn f = LinearFn(8, 0xa5).materialize();
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    auto s = null_session(f, seed);
    CHECK(k_point_round(s, 4) == RoundResult::Pass);
  }
  auto s = null_session(f, 1);
  CHECK_THROWS_AS(k_point_round(s, 3), std::invalid_argument);
}

TEST_CASE("triple-test violation rate matches exhaustive enumeration", "[f2-testers]") {
  // exact violation probability by summing over all (x, y) pairs, then a
  // Monte Carlo run that must land within 4 sigma of it
  Rng rng(77);
  const BoolFn f = make_far_function(10, 102, rng);
  const std::size_t size = f.size();
  std::int64_t violations = 0;
  for (std::uint32_t x = 0; x < size; ++x) {
    for (std::uint32_t y = 0; y < size; ++y) {
      if ((f.eval_index(x) ^ f.eval_index(y)) != f.eval_index(x ^ y)) ++violations;
    }
  }
  const double exact = static_cast<double>(violations) / static_cast<double>(size * size);
  CHECK(exact > 0.0);

  const int trials = 20000;
  int seen = 0;
  for (int i = 0; i < trials; ++i) {
    auto s = null_session(f, 1000 + static_cast<std::uint64_t>(i));
    PointF2 x = s.domain().sample(s.rng());
    PointF2 y = s.domain().sample(s.rng());
    const int ax = s.query(x).bit();
    const int ay = s.query(y).bit();
    if ((ax ^ ay) != s.query(x ^ y).bit()) ++seen;
  }
  const double est = static_cast<double>(seen) / trials;
  const double sigma = std::sqrt(exact * (1 - exact) / trials);
  CHECK(std::fabs(est - exact) <= 4 * sigma);
}

TEST_CASE("repeated triple test accepts linear and rejects far", "[f2-testers]") {
  const BoolFn lin = LinearFn(10, 0x155).materialize();
  Rng rng(5);
  const BoolFn far = make_far_function(10, 102, rng);  // 0.1-far
  int far_rejects = 0;
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    auto s1 = null_session(lin, seed);
    CHECK(blr3_repeated(s1, 0.1).accepted());
    auto s2 = null_session(far, seed);
    if (!blr3_repeated(s2, 0.1).accepted()) ++far_rejects;
  }
  CHECK(far_rejects >= 150);  // expected essentially all of them
}

TEST_CASE("batch tester accepts linear functions", "[f2-testers]") {
  // wide implicit domain: 510 uniform draws never collide, so the query
  // counter (which only counts fresh cells) is exactly 6 * (m + 1)
  Rng gen(3);
  const WidePoint coeffs = random_wide_point(300, gen);
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    ImplicitSession s(ImplicitLinearDomain(coeffs), AdversaryConfig{},
                      adversary_null<ImplicitLinearDomain>(), seed);
    const auto out = online_linearity_tester(s, 0.5, 2.0, /*enforce_case1=*/false);
    CHECK(out.accepted());
    CHECK(out.iterations == 6);
    CHECK(out.queries_used == 6 * (batch_size_m(0.5, 2.0) + 1));
  }
}

TEST_CASE("batch tester rejects far functions", "[f2-testers]") {
  Rng rng(13);
  const BoolFn far = make_far_function(12, 1024, rng);  // 0.25-far
  int rejects = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    auto s = null_session(far, seed);
    if (!online_linearity_tester(s, 0.25, 2.0, false).accepted()) ++rejects;
  }
  CHECK(rejects >= 90);
  // a rejection always carries a re-checkable witness
  auto s = null_session(far, 0);
  const auto out = online_linearity_tester(s, 0.25, 2.0, false);
  if (!out.accepted()) {
    REQUIRE(out.witness.has_value());
    int parity = 0;
    PointF2 acc = out.witness->points.back() ^ out.witness->points.back();
    for (std::size_t i = 0; i + 1 < out.witness->points.size(); ++i) {
      parity ^= out.witness->bits[i];
      acc = acc ^ out.witness->points[i];
    }
    CHECK(acc == out.witness->points.back());
    CHECK((parity ^ out.witness->bits.back()) == 1);
  }
}

TEST_CASE("batch tester enforces its regime unless told otherwise", "[f2-testers]") {
  auto s = null_session(LinearFn(12, 1).materialize(), 1);
  CHECK_THROWS_AS(online_linearity_tester(s, 0.5, 2.0, true), std::invalid_argument);
}

TEST_CASE("batch tester never rejects linear under erasures", "[f2-testers]") {
  const BoolFn lin = LinearFn(12, 0x35).materialize();
  for (std::uint64_t seed = 0; seed < 60; ++seed) {
    AdversaryConfig cfg(ManipulationKind::Erasure, BudgetRate::FixedRate, 3.0);
    TableSession s(TableDomain(lin), cfg, adversary_pair_eraser<TableDomain>(), seed);
    CHECK(online_linearity_tester(s, 0.5, 3.0, false).accepted());
  }
}

TEST_CASE("sample tester accepts linear and recovers the coefficients", "[f2-testers]") {
  const BoolFn lin = LinearFn(12, 0x9c3).materialize();
  int full_span = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    auto s = null_session(lin, seed);
    const auto out = gr_sample_tester(s, 0.25);
    CHECK(out.accepted());
    if (out.queries_used > 12 + 7) ++full_span;  // comparisons actually ran
  }
  CHECK(full_span >= 95);  // span failure probability is about 2^-7
}

TEST_CASE("sample tester rejects far functions", "[f2-testers]") {
  Rng rng(29);
  const BoolFn far = make_far_function(12, 1024, rng);
  int rejects = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    auto s = null_session(far, seed);
    if (!gr_sample_tester(s, 0.25).accepted()) ++rejects;
  }
  CHECK(rejects >= 90);
}

TEST_CASE("sample tester accepts as soon as an answer is erased", "[f2-testers]") {
  Rng rng(31);
  const BoolFn far = make_far_function(10, 256, rng);
  // saturating eraser: huge budget wipes everything queryable via pairs
  AdversaryConfig cfg(ManipulationKind::Erasure, BudgetRate::BudgetManaging, 50.0);
  int erased_accepts = 0;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    TableSession s(TableDomain(far), cfg, adversary_pair_eraser<TableDomain>(), seed);
    const auto out = gr_sample_tester(s, 0.25);
    if (out.erasures_seen > 0) {
      CHECK(out.accepted());
      ++erased_accepts;
    }
  }
  CHECK(erased_accepts > 0);
}

TEST_CASE("dispatcher arithmetic and branch choice", "[f2-testers]") {
  CHECK(admissible_t_max(16, 0.5, 1.0) == Catch::Approx(256.0));
  CHECK(admissible_t_max(16, 0.05, 1.0) == Catch::Approx(0.0025 * 65536));

  // small n forces the sample-based branch
  auto s = null_session(LinearFn(12, 3).materialize(), 7);
  const auto out = doubly_optimal_tester(s, 0.5, 1e-5);
  CHECK(out.case_used == 'S');
  CHECK(out.accepted());

  // wide implicit domain with small batch takes the batch branch
  WidePoint coeffs = random_wide_point(300, s.rng());
  ImplicitSession si(ImplicitLinearDomain(coeffs), AdversaryConfig{},
                     adversary_null<ImplicitLinearDomain>(), 7);
  const auto wide_out = doubly_optimal_tester(si, 0.5, 32.0);
  CHECK(wide_out.case_used == 'I');
  CHECK(wide_out.accepted());

  // out-of-regime t refuses to run
  auto s2 = null_session(LinearFn(12, 3).materialize(), 7);
  CHECK_THROWS_AS(doubly_optimal_tester(s2, 0.5, 1e6), std::invalid_argument);
}

TEST_CASE("implicit and explicit domains agree on linear instances", "[f2-testers]") {
  // same coefficient pattern, table vs implicit evaluation
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    auto st = null_session(LinearFn(12, 0x0f0).materialize(), seed);
    WidePoint coeffs(12);
    for (int b = 4; b < 8; ++b) coeffs.set_coord(b, 1);
    ImplicitSession si(ImplicitLinearDomain(coeffs), AdversaryConfig{},
                       adversary_null<ImplicitLinearDomain>(), seed);
    const auto a = online_linearity_tester(st, 0.5, 0.0, false);
    const auto b = online_linearity_tester(si, 0.5, 0.0, false);
    CHECK(a.accepted());
    CHECK(b.accepted());
    CHECK(a.queries_used == b.queries_used);
  }
}
