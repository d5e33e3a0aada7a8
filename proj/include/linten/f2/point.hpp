#pragma once

#include <bit>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "linten/rng.hpp"

namespace linten {

/// A point of {0,1}^n for n <= 30, packed into one word. The cap keeps
/// explicit truth tables (2^n cells) within desk-scale memory; wider
/// domains use WidePoint below.
struct PointF2 {
  int n = 0;
  std::uint32_t bits = 0;

  PointF2() = default;
  PointF2(int n_, std::uint32_t bits_) : n(n_), bits(bits_) {
    if (n < 1 || n > 30) throw std::invalid_argument("PointF2: n out of [1,30]");
    if (bits >> n) throw std::invalid_argument("PointF2: bits >= 2^n");
  }

  friend PointF2 operator^(const PointF2& a, const PointF2& b) {
    if (a.n != b.n) throw std::invalid_argument("PointF2: dimension mismatch");
    PointF2 r;
    r.n = a.n;
    r.bits = a.bits ^ b.bits;
    return r;
  }
  friend bool operator==(const PointF2& a, const PointF2& b) {
    return a.n == b.n && a.bits == b.bits;
  }

  int coord(int i) const { return (bits >> i) & 1; }
};

/// A point of {0,1}^n for arbitrary n, as a little-endian word array.
struct WidePoint {
  int n = 0;
  std::vector<std::uint64_t> w;

  WidePoint() = default;
  explicit WidePoint(int n_) : n(n_), w((n_ + 63) / 64, 0) {}

  static WidePoint zero(int n) { return WidePoint(n); }

  int coord(int i) const { return (w[i / 64] >> (i % 64)) & 1; }
  void set_coord(int i, int v) {
    const std::uint64_t m = std::uint64_t{1} << (i % 64);
    if (v)
      w[i / 64] |= m;
    else
      w[i / 64] &= ~m;
  }

  friend WidePoint operator^(const WidePoint& a, const WidePoint& b) {
    if (a.n != b.n) throw std::invalid_argument("WidePoint: dimension mismatch");
    WidePoint r = a;
    for (std::size_t i = 0; i < r.w.size(); ++i) r.w[i] ^= b.w[i];
    return r;
  }
  WidePoint& operator^=(const WidePoint& b) {
    if (n != b.n) throw std::invalid_argument("WidePoint: dimension mismatch");
    for (std::size_t i = 0; i < w.size(); ++i) w[i] ^= b.w[i];
    return *this;
  }
  friend bool operator==(const WidePoint& a, const WidePoint& b) {
    return a.n == b.n && a.w == b.w;
  }

  /// Parity of the AND with another point; <a, x> over F2.
  int dot(const WidePoint& o) const {
    std::uint64_t acc = 0;
    for (std::size_t i = 0; i < w.size(); ++i) acc ^= w[i] & o.w[i];
    return std::popcount(acc) & 1;
  }

  std::string hex() const {
    static const char* digits = "0123456789abcdef";
    std::string s;
    const int nibbles = (n + 3) / 4;
    for (int i = nibbles - 1; i >= 0; --i) {
      const int v = static_cast<int>((w[i / 16] >> (4 * (i % 16))) & 0xf);
      s += digits[v];
    }
    return s;
  }

  std::size_t hash() const {
    std::uint64_t h = 0x9e3779b97f4a7c15ULL ^ static_cast<std::uint64_t>(n);
    for (std::uint64_t x : w) {
      h ^= x + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    }
    return static_cast<std::size_t>(h);
  }
};

struct WidePointHash {
  std::size_t operator()(const WidePoint& p) const { return p.hash(); }
};

/// XOR of the points selected by `subset`; the empty subset gives the
/// all-zeros point of the shared dimension.
template <typename Point>
inline Point xor_subset(const std::vector<Point>& points, const std::vector<int>& subset) {
  if (points.empty()) throw std::invalid_argument("xor_subset: no points");
  const int n = points[0].n;
  for (const auto& p : points) {
    if (p.n != n) throw std::invalid_argument("xor_subset: dimension mismatch");
  }
  Point acc = points[0] ^ points[0];  // all-zeros of the right shape
  for (int i : subset) {
    if (i < 0 || i >= static_cast<int>(points.size()))
      throw std::out_of_range("xor_subset: index out of range");
    acc = acc ^ points[static_cast<std::size_t>(i)];
  }
  return acc;
}

inline PointF2 random_point(int n, Rng& rng) {
  return PointF2(n, static_cast<std::uint32_t>(rng.next_u64() & ((std::uint64_t{1} << n) - 1)));
}

inline WidePoint random_wide_point(int n, Rng& rng) {
  WidePoint p(n);
  for (auto& word : p.w) word = rng.next_u64();
  const int rem = n % 64;
  if (rem) p.w.back() &= (std::uint64_t{1} << rem) - 1;
  return p;
}

}  // namespace linten
