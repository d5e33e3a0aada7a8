#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

#include "linten/harness/report.hpp"
#include "linten/harness/stats.hpp"
#include "linten/real/additivity.hpp"
#include "linten/real/low_degree.hpp"
#include "linten/real/oracle.hpp"

namespace linten {

/// What the instance is known to be, which decides the registered bound:
/// a structured instance must never be rejected; a far instance must be
/// rejected at the usual 2/3 rate.
enum class RealExpectation { Structured, Far, None };

struct RealExperimentConfig {
  std::string verb;  // "additivity" | "low-degree"
  ZooEntry fn;
  std::string dist = "gaussian";
  double eps = 0.1;
  int d = 0;       // low-degree only
  int rounds = 0;  // characterization-round override; 0 = verb default
  std::int64_t trials = 0;
  std::uint64_t seed = 0;
  Tolerance tol;
  RealExpectation expectation = RealExpectation::None;
};

/// Runs the real-valued tester `trials` times on fresh counted oracles and
/// aggregates. Every accepting run (and every comparison-phase rejection)
/// must hit the closed-form query count exactly; violations feed a bound
/// check that tolerates none.
inline TrialReport run_real_experiment(const RealExperimentConfig& c) {
  if (c.trials <= 0) throw std::invalid_argument("real experiment: trials must be >= 1");
  if (c.dist != "gaussian")
    throw std::invalid_argument("real experiment: unknown distribution '" + c.dist + "'");
  const bool lowdeg = c.verb == "low-degree";
  if (!lowdeg && c.verb != "additivity")
    throw std::invalid_argument("real experiment: unknown verb '" + c.verb + "'");
  const SamplableDistribution dist = SamplableDistribution::standard_gaussian(c.fn.n);

  std::int64_t accepts = 0, rejects = 0, total_queries = 0, comparison_iters = 0;
  std::int64_t accounting_violations = 0, accounting_checked = 0;
  for (std::int64_t trial = 0; trial < c.trials; ++trial) {
    Rng rng = Rng::derive(c.seed, static_cast<std::uint64_t>(trial));
    RealOracle oracle(c.fn.n, c.fn.eval, c.tol);
    if (lowdeg) {
      LowDegreeOptions opts;
      opts.characterization_rounds = c.rounds;
      const int rounds_used =
          c.rounds > 0 ? c.rounds : static_cast<int>(std::ceil(8.0 * c.d * c.d));
      const LowDegreeOutcome out = low_degree_tester(oracle, c.d, dist, c.eps, rng, opts);
      out.accepted ? ++accepts : ++rejects;
      total_queries += out.queries_used;
      comparison_iters += out.comparison_iterations;
      if (out.accepted || out.phase == RealPhase::Comparison) {
        ++accounting_checked;
        const std::int64_t want = expected_low_degree_queries(
            c.d, rounds_used, out.in_ball_evals, out.out_ball_evals);
        if (out.queries_used != want) ++accounting_violations;
      }
    } else {
      AdditivityOptions opts;
      if (c.rounds > 0) opts.characterization_rounds = c.rounds;
      const int rounds_used = opts.characterization_rounds;
      const RealTestOutcome out = additivity_tester(oracle, dist, c.eps, rng, opts);
      out.accepted ? ++accepts : ++rejects;
      total_queries += out.queries_used;
      comparison_iters += out.comparison_iterations;
      if (out.accepted || out.phase == RealPhase::Comparison) {
        ++accounting_checked;
        const std::int64_t want =
            static_cast<std::int64_t>(kAdditivityRoundQueries) * rounds_used +
            3 * out.comparison_iterations;
        if (out.queries_used != want) ++accounting_violations;
      }
    }
  }

  TrialReport r;
  r.tester = c.verb;
  r.instance = c.fn.descriptor;
  r.adversary = "none";
  r.trials = c.trials;
  r.seed = c.seed;
  r.accepts = accepts;
  r.rejects = rejects;
  r.iterations = comparison_iters;
  r.total_queries = total_queries;
  r.mean_queries = static_cast<double>(total_queries) / static_cast<double>(c.trials);
  r.accept_ci = wilson_interval(accepts, c.trials);

  if (c.expectation == RealExpectation::Structured) {
    r.bounds.push_back(BoundCheck::make("zero-false-rejection", '>', 1.0, r.accept_ci));
  } else if (c.expectation == RealExpectation::Far) {
    const auto reject_ci = wilson_interval(rejects, c.trials);
    const double slack = 2.0 * bound_sigma(2.0 / 3.0, c.trials);
    r.bounds.push_back(
        BoundCheck::make("soundness-two-thirds", '>', 2.0 / 3.0 - slack, reject_ci));
  }
  if (accounting_checked > 0) {
    const auto viol_ci = wilson_interval(accounting_violations, accounting_checked);
    r.bounds.push_back(BoundCheck::make("query-accounting-exact", '<', 0.0, viol_ci));
  }
  return r;
}

}  // namespace linten
