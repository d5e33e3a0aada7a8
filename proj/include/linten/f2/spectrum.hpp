#pragma once

#include <cstdint>
#include <stdexcept>
#include <unordered_set>
#include <vector>

#include "linten/f2/bool_fn.hpp"
#include "linten/rng.hpp"

namespace linten {

/// Exact rational with denominator 2^n. Distances over {0,1}^n are always
/// of this form, so acceptance checks can be integer-exact.
struct Dyadic {
  std::int64_t num = 0;
  int log2_den = 0;  // denominator is 2^log2_den

  double value() const { return static_cast<double>(num) / static_cast<double>(std::int64_t{1} << log2_den); }

  friend bool operator==(const Dyadic& a, const Dyadic& b) {
    // cross-multiply on a common power of two
    const int d = a.log2_den - b.log2_den;
    if (d >= 0) return a.num == (b.num << d);
    return (a.num << -d) == b.num;
  }
};

/// Normalized Walsh coefficients of the +/-1 view; each lies in [-1,1] and
/// their squares sum to 1.
struct Spectrum {
  int n = 0;
  std::vector<double> coeffs;
};

/// In-place transform of the +/-1 view, unnormalized (integer-exact).
inline std::vector<std::int64_t> walsh_hadamard_int(const BoolFn& f) {
  const std::size_t size = f.size();
  std::vector<std::int64_t> a(size);
  for (std::uint32_t i = 0; i < size; ++i) a[i] = f.sign(i);
  for (std::size_t len = 1; len < size; len <<= 1) {
    for (std::size_t i = 0; i < size; i += len << 1) {
      for (std::size_t j = i; j < i + len; ++j) {
        const std::int64_t u = a[j];
        const std::int64_t v = a[j + len];
        a[j] = u + v;
        a[j + len] = u - v;
      }
    }
  }
  return a;
}

inline Spectrum walsh_hadamard(const BoolFn& f) {
  const auto ints = walsh_hadamard_int(f);
  Spectrum s;
  s.n = f.n();
  s.coeffs.resize(ints.size());
  const double scale = 1.0 / static_cast<double>(std::size_t{1} << f.n());
  for (std::size_t i = 0; i < ints.size(); ++i)
    s.coeffs[i] = static_cast<double>(ints[i]) * scale;
  return s;
}

struct LinearDistance {
  Dyadic distance;
  LinearFn argmin;
};

/// Exact distance to the nearest linear function, with the minimizer.
/// dist = (2^n - max_a W(a)) / 2^(n+1); ties broken by smallest index.
inline LinearDistance distance_to_linear(const BoolFn& f) {
  const auto w = walsh_hadamard_int(f);
  std::size_t best = 0;
  for (std::size_t a = 1; a < w.size(); ++a) {
    if (w[a] > w[best]) best = a;
  }
  const std::int64_t full = std::int64_t{1} << f.n();
  // Disagreements with the best linear function: (2^n - W(a)) / 2.
  Dyadic d{(full - w[best]) / 2, f.n()};
  return LinearDistance{d, LinearFn(f.n(), static_cast<std::uint32_t>(best))};
}

/// A random linear function flipped on exactly `flips` uniformly chosen
/// points. For flips/2^n <= 1/4 the result is exactly flips/2^n far from
/// linear (the nearest other linear function is at distance >= 1/2 - eps),
/// which the construction asserts via the exact spectrum.
inline BoolFn make_far_function(int n, std::int64_t flips, Rng& rng) {
  const std::int64_t full = std::int64_t{1} << n;
  if (flips < 0 || flips * 4 > full)
    throw std::invalid_argument("make_far_function: requires flips/2^n <= 1/4");
  const LinearFn base(n, static_cast<std::uint32_t>(rng.next_u64() & (full - 1)));
  BoolFn f = base.materialize();
  std::vector<std::uint8_t> table = f.table();
  std::unordered_set<std::uint32_t> chosen;
  while (static_cast<std::int64_t>(chosen.size()) < flips) {
    chosen.insert(static_cast<std::uint32_t>(rng.below(static_cast<std::uint64_t>(full))));
  }
  for (auto idx : chosen) table[idx] ^= 1;
  BoolFn out(n, std::move(table));
  const Dyadic want{flips, n};
  if (!(distance_to_linear(out).distance == want))
    throw std::logic_error("make_far_function: exact-distance postcondition failed");
  return out;
}

}  // namespace linten
