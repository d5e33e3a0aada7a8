#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "linten/real/oracle.hpp"

namespace linten {

enum class RealPhase { Characterization, Comparison };

struct RealWitness {
  std::string check;              // which identity failed
  std::vector<RVec> points;      // the sampled points behind the violation
  std::vector<double> values;    // the oracle values involved
  double lhs = 0, rhs = 0;
};

struct RealTestOutcome {
  bool accepted = true;
  RealPhase phase = RealPhase::Characterization;
  std::int64_t queries_used = 0;
  std::int64_t comparison_iterations = 0;
  std::optional<RealWitness> witness;
};

/// Queries issued per characterization round: f(-x), f(x), f(x-y), f(y)
/// and the three sqrt2-scaled differences, with f(x) reused between the
/// negation and difference checks.
inline constexpr int kAdditivityRoundQueries = 7;

/// Characterization rounds: negation, difference and sqrt2-additivity
/// checks on fresh Gaussian triples, rejecting on the first tolerance
/// violation.
inline RealTestOutcome test_additivity(RealOracle& f, Rng& rng, int rounds) {
  if (rounds < 1) throw std::invalid_argument("test_additivity: rounds must be >= 1");
  const int n = f.arity();
  const Tolerance& tol = f.tol();
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  RealTestOutcome out;
  for (int r = 0; r < rounds; ++r) {
    const RVec x = sample_gaussian(n, rng);
    const RVec y = sample_gaussian(n, rng);
    const RVec z = sample_gaussian(n, rng);

    const double f_neg_x = f(-x);
    const double fx = f(x);
    if (!tol.eq(f_neg_x, -fx)) {
      out.accepted = false;
      out.witness = RealWitness{"negation", {x}, {fx, f_neg_x}, f_neg_x, -fx};
      break;
    }
    const double f_xy = f(x - y);
    const double fy = f(y);
    if (!tol.eq(f_xy, fx - fy)) {
      out.accepted = false;
      out.witness = RealWitness{"difference", {x, y}, {fx, fy, f_xy}, f_xy, fx - fy};
      break;
    }
    const double a = f(inv_sqrt2 * (x - y));
    const double b = f(inv_sqrt2 * (x - z));
    const double c = f(inv_sqrt2 * (z - y));
    if (!tol.eq(a, b + c)) {
      out.accepted = false;
      out.witness = RealWitness{"scaled-additivity", {x, y, z}, {a, b, c}, a, b + c};
      break;
    }
  }
  out.queries_used = f.query_count();
  return out;
}

struct AdditivityOptions {
  int characterization_rounds = 20;
};

/// Characterization phase, then ceil(4/eps) comparison iterations of
/// f(p) against a single-direction self-corrected value. 3 queries per
/// comparison iteration; rejects are carried with a re-checkable witness.
inline RealTestOutcome additivity_tester(RealOracle& f, const SamplableDistribution& dist,
                                         double eps, Rng& rng,
                                         AdditivityOptions opts = {}) {
  if (!(eps > 0.0 && eps < 1.0))
    throw std::invalid_argument("additivity_tester: eps out of (0,1)");
  RealTestOutcome out = test_additivity(f, rng, opts.characterization_rounds);
  if (!out.accepted) {
    out.phase = RealPhase::Characterization;
    out.queries_used = f.query_count();
    return out;
  }

  const int n = f.arity();
  const Tolerance& tol = f.tol();
  const int iterations = static_cast<int>(std::ceil(4.0 / eps - 1e-12));
  for (int i = 0; i < iterations; ++i) {
    ++out.comparison_iterations;
    const RVec p = dist.sample(rng);
    const RVec x = sample_gaussian(n, rng);
    const double fp = f(p);
    const double kp = kappa(p);
    const double fa = f((1.0 / kp) * p - x);
    const double fx = f(x);
    const double corrected = kp * (fa + fx);
    if (!tol.eq(fp, corrected)) {
      out.accepted = false;
      out.phase = RealPhase::Comparison;
      out.witness = RealWitness{"self-correction", {p, x}, {fp, fa, fx}, fp, corrected};
      break;
    }
  }
  out.queries_used = f.query_count();
  return out;
}

}  // namespace linten
