#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>

namespace linten {

/// Two-sided 95% normal quantile used for every interval in the harness.
inline constexpr double kZ95 = 1.959963984540054;

/// Wilson score interval for a binomial proportion. Always a subinterval
/// of [0,1] and always contains the point estimate, including at the
/// 0-success and all-success corners where the Wald interval collapses.
struct WilsonInterval {
  double point = 0;
  double lo = 0;
  double hi = 0;
};

inline WilsonInterval wilson_interval(std::int64_t successes, std::int64_t trials,
                                      double z = kZ95) {
  if (trials <= 0) throw std::invalid_argument("wilson_interval: trials must be > 0");
  if (successes < 0 || successes > trials)
    throw std::invalid_argument("wilson_interval: successes out of [0, trials]");
  const double n = static_cast<double>(trials);
  const double p = static_cast<double>(successes) / n;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / n;
  const double center = (p + z2 / (2.0 * n)) / denom;
  const double half = (z / denom) * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n));
  WilsonInterval w;
  w.point = p;
  w.lo = std::max(0.0, center - half);
  w.hi = std::min(1.0, center + half);
  // at the corners the interval endpoint is exactly the corner; rounding
  // in center + half must not pull it inside, or >= 1.0 bounds would
  // depend on the trial count
  if (successes == 0) w.lo = 0.0;
  if (successes == trials) w.hi = 1.0;
  return w;
}

/// Standard error of an empirical proportion; the sigma behind the
/// "+/- k sigma" slack in rate bounds.
inline double proportion_sigma(double p, std::int64_t trials) {
  if (trials <= 0) throw std::invalid_argument("proportion_sigma: trials must be > 0");
  return std::sqrt(p * (1.0 - p) / static_cast<double>(trials));
}

/// Sigma for a hypothesized rate p under `trials` draws, used when the
/// slack is anchored at the bound rather than the estimate.
inline double bound_sigma(double p, std::int64_t trials) {
  return proportion_sigma(p, trials);
}

}  // namespace linten
