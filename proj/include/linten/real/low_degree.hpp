#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "linten/real/additivity.hpp"
#include "linten/real/oracle.hpp"

namespace linten {

/// Signed binomial weights alpha_i = (-1)^(i+1) * C(d+1, i), i = 0..d+1.
/// The weighted sum over an arithmetic progression of arguments is the
/// (d+1)-st finite difference, which annihilates every polynomial of
/// degree <= d.
struct AlphaCoeffs {
  int d;
  std::vector<double> alpha;

  explicit AlphaCoeffs(int d_) : d(d_) {
    if (d < 1) throw std::invalid_argument("AlphaCoeffs: d must be >= 1");
    alpha.resize(static_cast<std::size_t>(d) + 2);
    double binom = 1.0;  // C(d+1, 0)
    for (int i = 0; i <= d + 1; ++i) {
      alpha[static_cast<std::size_t>(i)] = (i % 2 == 0 ? -1.0 : 1.0) * binom;
      binom = binom * (d + 1 - i) / (i + 1);
    }
  }
};

inline double contraction_radius(int d) { return std::pow(3.0 * d, -6.0); }

struct InterpolationNode {
  double c;
  double v;
};

/// Value at `at` of the unique interpolant through the nodes, plus the
/// Lebesgue-style amplification sum |l_i(at)| * |v_i| used to propagate
/// node-value error through the (badly conditioned) extrapolation.
struct InterpolationResult {
  double value = 0;
  double amplification = 0;  // sum over nodes of |l_i(at)| * |v_i|
  double lebesgue = 0;       // sum of |l_i(at)|
};

inline InterpolationResult lagrange_interpolate(const std::vector<InterpolationNode>& nodes,
                                                double at) {
  const std::size_t k = nodes.size();
  if (k == 0) throw std::invalid_argument("lagrange_interpolate: no nodes");
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = i + 1; j < k; ++j) {
      if (nodes[i].c == nodes[j].c)
        throw std::invalid_argument("lagrange_interpolate: duplicate abscissae");
    }
  }
  InterpolationResult r;
  for (std::size_t i = 0; i < k; ++i) {
    // barycentric weight w_i = 1 / prod_{j != i} (c_i - c_j)
    double w = 1.0;
    double num = 1.0;
    for (std::size_t j = 0; j < k; ++j) {
      if (j == i) continue;
      w /= nodes[i].c - nodes[j].c;
      num *= at - nodes[j].c;
    }
    const double li = w * num;
    r.value += li * nodes[i].v;
    r.amplification += std::fabs(li) * std::fabs(nodes[i].v);
    r.lebesgue += std::fabs(li);
  }
  return r;
}

struct CorrectedValue {
  double value = 0;
  /// Propagated roundoff bound for the returned value; comparison checks
  /// widen their tolerance by this much.
  double err_bound = 0;
};

namespace detail {

// One directional finite-difference correction: sum_{i=1..d+1} alpha_i f(p + i q).
// d+1 queries. magnitude collects sum |alpha_i f(p+iq)| for error scaling.
inline CorrectedValue g_q_eval(RealOracle& f, const AlphaCoeffs& a, const RVec& p,
                               const RVec& q) {
  double s = 0, mag = 0;
  RVec arg = p;
  for (int i = 1; i <= a.d + 1; ++i) {
    for (std::size_t j = 0; j < arg.size(); ++j) arg[j] = p[j] + i * q[j];
    const double term = a.alpha[static_cast<std::size_t>(i)] * f(arg);
    s += term;
    mag += std::fabs(term);
  }
  // cancellation-aware roundoff estimate for the weighted sum
  return {s, 1e-12 * mag};
}

}  // namespace detail

inline CorrectedValue g_q_lowdeg(RealOracle& f, int d, const RVec& p, const RVec& q) {
  return detail::g_q_eval(f, AlphaCoeffs(d), p, q);
}

/// Finite-difference characterization: the (d+2)-point weighted sum along
/// random lines must vanish, across three scale patterns per (j, t) pair.
/// Tolerance scales with sum |alpha_i f| since the weights grow like 2^d.
template <typename Witness = RealWitness>
inline RealTestOutcome characterization_test(RealOracle& f, int d, int rounds, Rng& rng) {
  if (d < 1) throw std::invalid_argument("characterization_test: d must be >= 1");
  if (rounds < 1) throw std::invalid_argument("characterization_test: rounds must be >= 1");
  const AlphaCoeffs a(d);
  const int n = f.arity();
  const Tolerance& tol = f.tol();
  RealTestOutcome out;

  auto check_sum = [&](double sp, double sq) -> bool {
    const RVec p = sample_gaussian(n, rng, sp);
    const RVec q = sample_gaussian(n, rng, sq);
    double s = 0, mag = 0;
    RVec arg(p.size());
    for (int i = 0; i <= d + 1; ++i) {
      for (std::size_t j = 0; j < arg.size(); ++j) arg[j] = p[j] + i * q[j];
      const double term = a.alpha[static_cast<std::size_t>(i)] * f(arg);
      s += term;
      mag += std::fabs(term);
    }
    if (std::fabs(s) > tol.abs + tol.rel * mag) {
      out.accepted = false;
      out.witness = RealWitness{"finite-difference", {p, q}, {s, mag}, s, 0.0};
      return false;
    }
    return true;
  };

  for (int r = 0; r < rounds && out.accepted; ++r) {
    for (int j = 1; j <= d + 1 && out.accepted; ++j) {
      for (int t = 0; t <= d + 1 && out.accepted; ++t) {
        const double wide = std::sqrt(static_cast<double>(j) * j * (t * t + 1));
        if (!check_sum(wide, 1.0)) break;
        if (!check_sum(static_cast<double>(j), std::sqrt(static_cast<double>(t * t + 1))))
          break;
      }
      if (out.accepted) check_sum(static_cast<double>(j), static_cast<double>(j));
    }
  }
  out.queries_used = f.query_count();
  return out;
}

/// Queries per full characterization round: (d+1)(d+2)(2d+5) evaluations.
inline std::int64_t characterization_round_queries(int d) {
  return static_cast<std::int64_t>(d + 1) * (d + 2) * (2 * d + 5);
}

/// Self-corrected value at p. Inside the contraction ball this is a single
/// directional correction (d+1 queries); outside, d+1 corrections along
/// the radial line with one shared direction ((d+1)^2 queries), then
/// extrapolation to radial coordinate 1. Nodes are inset by 1e-9
/// relatively so all of them lie strictly inside the open ball.
inline CorrectedValue query_g_lowdeg(RealOracle& f, int d, const RVec& p, Rng& rng) {
  const AlphaCoeffs a(d);
  const double r = contraction_radius(d);
  const RVec q = sample_gaussian(f.arity(), rng);
  const double pnorm = norm2(p);
  if (pnorm < r) return detail::g_q_eval(f, a, p, q);

  std::vector<InterpolationNode> nodes;
  nodes.reserve(static_cast<std::size_t>(d) + 1);
  std::vector<double> node_err;
  for (int i = 1; i <= d + 1; ++i) {
    const double ci = (1.0 - 1e-9) * i * r / ((d + 1) * pnorm);
    const CorrectedValue v = detail::g_q_eval(f, a, ci * p, q);
    nodes.push_back({ci, v.value});
    node_err.push_back(v.err_bound);
  }
  InterpolationResult interp = lagrange_interpolate(nodes, 1.0);
  // propagate node errors through the extrapolation weights
  double err = 0;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    double w = 1.0, num = 1.0;
    for (std::size_t j = 0; j < nodes.size(); ++j) {
      if (j == i) continue;
      w /= nodes[i].c - nodes[j].c;
      num *= 1.0 - nodes[j].c;
    }
    err += std::fabs(w * num) * (node_err[i] + 1e-15 * std::fabs(nodes[i].v));
  }
  return {interp.value, err};
}

struct LowDegreeOptions {
  int characterization_rounds = 0;  // 0 -> ceil(8 d^2)
};

struct LowDegreeOutcome : RealTestOutcome {
  std::int64_t in_ball_evals = 0;
  std::int64_t out_ball_evals = 0;
};

/// Degree-d tester: characterization phase, then ceil(4/eps) comparisons
/// of f(p) against the self-corrected value, with the comparison tolerance
/// widened by the propagated extrapolation error.
inline LowDegreeOutcome low_degree_tester(RealOracle& f, int d,
                                          const SamplableDistribution& dist, double eps,
                                          Rng& rng, LowDegreeOptions opts = {}) {
  if (!(eps > 0.0 && eps < 1.0))
    throw std::invalid_argument("low_degree_tester: eps out of (0,1)");
  if (d < 1 || d > 8)
    throw std::invalid_argument("low_degree_tester: supported degrees are 1..8");
  const int rounds = opts.characterization_rounds > 0
                         ? opts.characterization_rounds
                         : static_cast<int>(std::ceil(8.0 * d * d));
  LowDegreeOutcome out;
  {
    RealTestOutcome chr = characterization_test(f, d, rounds, rng);
    if (!chr.accepted) {
      out.accepted = false;
      out.phase = RealPhase::Characterization;
      out.witness = std::move(chr.witness);
      out.queries_used = f.query_count();
      return out;
    }
  }

  const Tolerance& tol = f.tol();
  const double r = contraction_radius(d);
  const int iterations = static_cast<int>(std::ceil(4.0 / eps - 1e-12));
  for (int i = 0; i < iterations; ++i) {
    ++out.comparison_iterations;
    const RVec p = dist.sample(rng);
    const double fp = f(p);
    if (norm2(p) < r)
      ++out.in_ball_evals;
    else
      ++out.out_ball_evals;
    const CorrectedValue g = query_g_lowdeg(f, d, p, rng);
    if (!tol.eq(fp, g.value, g.err_bound)) {
      out.accepted = false;
      out.phase = RealPhase::Comparison;
      out.witness = RealWitness{"self-correction", {p}, {fp, g.value, g.err_bound}, fp, g.value};
      break;
    }
  }
  out.queries_used = f.query_count();
  return out;
}

/// Closed-form query count for an accepting run, cross-checked against the
/// oracle counter in tests.
inline std::int64_t expected_low_degree_queries(int d, int rounds, std::int64_t in_ball,
                                                std::int64_t out_ball) {
  const std::int64_t comparison =
      in_ball * (1 + (d + 1)) + out_ball * (1 + static_cast<std::int64_t>(d + 1) * (d + 1));
  return static_cast<std::int64_t>(rounds) * characterization_round_queries(d) + comparison;
}

}  // namespace linten
