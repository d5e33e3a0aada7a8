#pragma once

#include <bit>
#include <cstdint>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "linten/f2/point.hpp"

namespace linten {

/// Explicit Boolean function {0,1}^n -> {0,1} as a truth table of 2^n bits.
/// The +/-1 view used by product tests is derived as 1 - 2*bit.
class BoolFn {
 public:
  BoolFn(int n, std::vector<std::uint8_t> table) : n_(n), table_(std::move(table)) {
    if (n < 1 || n > 30) throw std::invalid_argument("BoolFn: n out of [1,30]");
    if (table_.size() != (std::size_t{1} << n))
      throw std::invalid_argument("BoolFn: table length != 2^n");
    for (auto v : table_) {
      if (v > 1) throw std::invalid_argument("BoolFn: table entry not in {0,1}");
    }
  }

  int n() const { return n_; }
  std::size_t size() const { return table_.size(); }

  int eval(PointF2 x) const { return table_[x.bits]; }
  int eval_index(std::uint32_t idx) const { return table_[idx]; }
  /// +/-1 view: 1 - 2*bit.
  int sign(std::uint32_t idx) const { return 1 - 2 * table_[idx]; }

  const std::vector<std::uint8_t>& table() const { return table_; }

  /// Fixture format: header line `n=<int>` followed by 2^n '0'/'1'
  /// characters in little-endian index order.
  void serialize(std::ostream& os) const {
    os << "n=" << n_ << "\n";
    for (auto v : table_) os << static_cast<char>('0' + v);
    os << "\n";
  }

  static BoolFn deserialize(std::istream& is) {
    std::string header;
    if (!std::getline(is, header) || header.rfind("n=", 0) != 0)
      throw std::runtime_error("BoolFn: missing n= header");
    const int n = std::stoi(header.substr(2));
    if (n < 1 || n > 30) throw std::runtime_error("BoolFn: n out of [1,30]");
    std::vector<std::uint8_t> table;
    table.reserve(std::size_t{1} << n);
    char c;
    while (table.size() < (std::size_t{1} << n) && is.get(c)) {
      if (c == '\n' || c == '\r') continue;
      if (c != '0' && c != '1') throw std::runtime_error("BoolFn: bad table character");
      table.push_back(static_cast<std::uint8_t>(c - '0'));
    }
    if (table.size() != (std::size_t{1} << n))
      throw std::runtime_error("BoolFn: truncated table");
    return BoolFn(n, std::move(table));
  }

 private:
  int n_;
  std::vector<std::uint8_t> table_;
};

/// f(x) = <a, x> mod 2 for a coefficient vector a, stored as a point.
class LinearFn {
 public:
  LinearFn(int n, std::uint32_t coeffs) : coeffs_(n, coeffs) {}
  explicit LinearFn(PointF2 coeffs) : coeffs_(coeffs) {}

  int n() const { return coeffs_.n; }
  PointF2 coeffs() const { return coeffs_; }

  int eval(PointF2 x) const {
    return std::popcount(coeffs_.bits & x.bits) & 1;
  }
  int eval_index(std::uint32_t idx) const {
    return std::popcount(coeffs_.bits & idx) & 1;
  }

  BoolFn materialize() const {
    std::vector<std::uint8_t> table(std::size_t{1} << coeffs_.n);
    for (std::uint32_t i = 0; i < table.size(); ++i)
      table[i] = static_cast<std::uint8_t>(eval_index(i));
    return BoolFn(coeffs_.n, std::move(table));
  }

 private:
  PointF2 coeffs_;
};

}  // namespace linten
