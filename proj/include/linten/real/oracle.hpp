#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <memory>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "linten/rng.hpp"

namespace linten {

using RVec = std::vector<double>;

inline RVec operator-(const RVec& a) {
  RVec r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = -a[i];
  return r;
}
inline RVec operator-(const RVec& a, const RVec& b) {
  RVec r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
  return r;
}
inline RVec operator+(const RVec& a, const RVec& b) {
  RVec r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] + b[i];
  return r;
}
inline RVec operator*(double c, const RVec& a) {
  RVec r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = c * a[i];
  return r;
}
inline double norm2(const RVec& a) {
  double s = 0;
  for (double v : a) s += v * v;
  return std::sqrt(s);
}

/// Relative-plus-absolute equality threshold. Exact real arithmetic is
/// assumed by the identities being tested; the tolerance keeps roundoff on
/// exactly-satisfying inputs from turning into false rejections.
struct Tolerance {
  double abs = 1e-9;
  double rel = 1e-9;

  bool eq(double a, double b, double extra_abs = 0.0) const {
    return std::fabs(a - b) <= abs + extra_abs + rel * std::max(std::fabs(a), std::fabs(b));
  }
};

/// Counted black-box function R^n -> R. Deterministic by contract; the
/// counter increments exactly once per evaluation.
class RealOracle {
 public:
  RealOracle(int n, std::function<double(const RVec&)> eval, Tolerance tol = {})
      : n_(n), eval_(std::move(eval)), tol_(tol) {}

  int arity() const { return n_; }
  const Tolerance& tol() const { return tol_; }
  std::int64_t query_count() const { return count_; }

  double operator()(const RVec& x) {
    if (static_cast<int>(x.size()) != n_)
      throw std::invalid_argument("RealOracle: arity mismatch");
    ++count_;
    return eval_(x);
  }

 private:
  int n_;
  std::function<double(const RVec&)> eval_;
  Tolerance tol_;
  std::int64_t count_ = 0;
};

/// Seeded sampler of points in R^n. Gaussian mixtures cover the built-in
/// cases; a component with zero sigma is a point mass.
class SamplableDistribution {
 public:
  struct Component {
    double weight = 1.0;
    RVec mean;
    double sigma = 1.0;
  };

  static SamplableDistribution standard_gaussian(int n) {
    SamplableDistribution d;
    d.n_ = n;
    d.components_.push_back({1.0, RVec(static_cast<std::size_t>(n), 0.0), 1.0});
    d.descriptor_ = "gaussian";
    return d;
  }

  static SamplableDistribution mixture(int n, std::vector<Component> comps,
                                       std::string descriptor = "mixture") {
    if (comps.empty()) throw std::invalid_argument("SamplableDistribution: empty mixture");
    double total = 0;
    for (auto& c : comps) {
      if (static_cast<int>(c.mean.size()) != n)
        throw std::invalid_argument("SamplableDistribution: component arity mismatch");
      if (c.weight < 0 || c.sigma < 0)
        throw std::invalid_argument("SamplableDistribution: negative weight or sigma");
      total += c.weight;
    }
    if (total <= 0) throw std::invalid_argument("SamplableDistribution: zero total weight");
    for (auto& c : comps) c.weight /= total;
    SamplableDistribution d;
    d.n_ = n;
    d.components_ = std::move(comps);
    d.descriptor_ = std::move(descriptor);
    return d;
  }

  int arity() const { return n_; }
  const std::string& descriptor() const { return descriptor_; }

  RVec sample(Rng& rng) const {
    const Component* c = &components_[0];
    if (components_.size() > 1) {
      double u = rng.next_double();
      for (const auto& comp : components_) {
        u -= comp.weight;
        c = &comp;
        if (u <= 0) break;
      }
    }
    RVec x(static_cast<std::size_t>(n_));
    for (int i = 0; i < n_; ++i)
      x[static_cast<std::size_t>(i)] = c->mean[static_cast<std::size_t>(i)] +
                                       c->sigma * rng.next_gaussian();
    return x;
  }

 private:
  int n_ = 0;
  std::vector<Component> components_;
  std::string descriptor_;
};

inline RVec sample_gaussian(int n, Rng& rng, double sigma = 1.0) {
  RVec x(static_cast<std::size_t>(n));
  for (auto& v : x) v = sigma * rng.next_gaussian();
  return x;
}

/// Radial contraction factor pulling p into the ball of radius 1/50;
/// continuous at the boundary.
inline double kappa(const RVec& p) {
  const double norm = norm2(p);
  return norm <= 0.02 ? 1.0 : 50.0 * norm;
}

/// The direction x's opinion of the value at p: kappa_p * (f(p/kappa_p - x) + f(x)).
/// Exactly two oracle queries.
inline double g_direction(RealOracle& f, const RVec& p, const RVec& x) {
  const double kp = kappa(p);
  return kp * (f((1.0 / kp) * p - x) + f(x));
}

/// One fresh Gaussian direction, then g_direction. Two oracle queries.
inline double query_g_additive(RealOracle& f, const RVec& p, Rng& rng) {
  const RVec x = sample_gaussian(f.arity(), rng);
  return g_direction(f, p, x);
}

// ---------------------------------------------------------------------------
// Built-in function zoo, addressable by CLI descriptor.

struct ZooEntry {
  std::string descriptor;
  int n = 0;
  bool exactly_additive = false;
  std::function<double(const RVec&)> eval;
};

inline ZooEntry zoo_additive(std::vector<double> c) {
  ZooEntry z;
  z.n = static_cast<int>(c.size());
  z.exactly_additive = true;
  std::ostringstream os;
  os << "additive(";
  for (std::size_t i = 0; i < c.size(); ++i) os << (i ? "," : "") << c[i];
  os << ")";
  z.descriptor = os.str();
  z.eval = [c = std::move(c)](const RVec& x) {
    double s = 0;
    for (std::size_t i = 0; i < c.size(); ++i) s += c[i] * x[i];
    return s;
  };
  return z;
}

inline ZooEntry zoo_affine(std::vector<double> c, double b) {
  ZooEntry z = zoo_additive(std::move(c));
  z.exactly_additive = (b == 0.0);
  std::ostringstream os;
  os << "affine(b=" << b << ")";
  z.descriptor = os.str();
  auto base = std::move(z.eval);
  z.eval = [base = std::move(base), b](const RVec& x) { return base(x) + b; };
  return z;
}

/// Additive base plus a jump of height h on the halfspace x_1 > z. Under
/// the sampling distribution the jump region carries the instance's
/// distance from additivity.
inline ZooEntry zoo_bump(std::vector<double> c, double h, double threshold) {
  ZooEntry z = zoo_additive(std::move(c));
  z.exactly_additive = false;
  std::ostringstream os;
  os << "bump(h=" << h << ",z=" << threshold << ")";
  z.descriptor = os.str();
  auto base = std::move(z.eval);
  z.eval = [base = std::move(base), h, threshold](const RVec& x) {
    return base(x) + (x[0] > threshold ? h : 0.0);
  };
  return z;
}

struct Monomial {
  double coef = 0.0;
  std::vector<int> exps;  // one exponent per variable
};

inline ZooEntry zoo_poly(int n, std::vector<Monomial> terms) {
  ZooEntry z;
  z.n = n;
  z.exactly_additive = false;
  z.descriptor = "poly";
  z.eval = [terms = std::move(terms)](const RVec& x) {
    double s = 0;
    for (const auto& m : terms) {
      double t = m.coef;
      for (std::size_t i = 0; i < m.exps.size(); ++i) {
        for (int e = 0; e < m.exps[i]; ++e) t *= x[i];
      }
      s += t;
    }
    return s;
  };
  return z;
}

/// All exponent vectors over n variables with total degree <= d, with
/// coefficients uniform in [-1,1]. The workhorse instance family for the
/// degree-d tester.
inline ZooEntry zoo_random_poly(int n, int d, Rng& rng) {
  std::vector<Monomial> terms;
  std::vector<int> exps(static_cast<std::size_t>(n), 0);
  // odometer over exponent vectors, keeping those with sum <= d
  while (true) {
    int total = 0;
    for (int e : exps) total += e;
    if (total <= d) terms.push_back({2.0 * rng.next_double() - 1.0, exps});
    int i = 0;
    while (i < n) {
      if (++exps[static_cast<std::size_t>(i)] <= d) break;
      exps[static_cast<std::size_t>(i)] = 0;
      ++i;
    }
    if (i == n) break;
  }
  ZooEntry z = zoo_poly(n, std::move(terms));
  std::ostringstream os;
  os << "random-poly(n=" << n << ",d=" << d << ")";
  z.descriptor = os.str();
  return z;
}

/// Degree-d polynomial plus a jump of height h on x_1 > threshold; far
/// from every degree-d polynomial by the mass of the jump region.
inline ZooEntry zoo_poly_bump(ZooEntry poly, double h, double threshold) {
  ZooEntry z = std::move(poly);
  std::ostringstream os;
  os << z.descriptor << "+bump(h=" << h << ",z=" << threshold << ")";
  z.descriptor = os.str();
  auto base = std::move(z.eval);
  z.eval = [base = std::move(base), h, threshold](const RVec& x) {
    return base(x) + (x[0] > threshold ? h : 0.0);
  };
  return z;
}

/// Upper-tail threshold z with Pr[N(0,1) > z] = mass, via bisection on erfc.
inline double gaussian_upper_quantile(double mass) {
  if (!(mass > 0.0 && mass < 1.0))
    throw std::invalid_argument("gaussian_upper_quantile: mass out of (0,1)");
  auto tail = [](double z) { return 0.5 * std::erfc(z / std::sqrt(2.0)); };
  double lo = -40, hi = 40;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (tail(mid) > mass)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace linten
