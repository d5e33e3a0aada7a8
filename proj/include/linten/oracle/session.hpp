#pragma once

#include <cmath>
#include <cstdint>
#include <memory>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <unordered_map>
#include <vector>

#include "linten/f2/bool_fn.hpp"
#include "linten/f2/point.hpp"
#include "linten/rng.hpp"

namespace linten {

/// The oracle's reply to a single query: a bit, or the erased marker.
struct OracleAnswer {
  // 0, 1, or kErased
  static constexpr int kErased = 2;
  int v = 0;

  static OracleAnswer value(int bit) { return OracleAnswer{bit}; }
  static OracleAnswer erased() { return OracleAnswer{kErased}; }

  bool is_erased() const { return v == kErased; }
  int bit() const {
    if (is_erased()) throw std::logic_error("OracleAnswer: bit() on erased cell");
    return v;
  }
  int sign() const { return 1 - 2 * bit(); }

  friend bool operator==(const OracleAnswer& a, const OracleAnswer& b) { return a.v == b.v; }
};

enum class ManipulationKind { Erasure, Corruption };
enum class BudgetRate { FixedRate, BudgetManaging };

struct AdversaryConfig {
  ManipulationKind kind = ManipulationKind::Erasure;
  BudgetRate rate = BudgetRate::BudgetManaging;
  double t = 0.0;  // manipulations per answered query

  AdversaryConfig() = default;
  AdversaryConfig(ManipulationKind k, BudgetRate r, double t_) : kind(k), rate(r), t(t_) {
    if (!(t >= 0.0)) throw std::invalid_argument("AdversaryConfig: t must be >= 0");
  }
};

/// Raised when a strategy tries something the game rules forbid. This is a
/// bug trap, not a game outcome: strategies are expected to stay in budget.
class ProtocolViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

template <typename Point>
struct Manipulation {
  Point target;
  OracleAnswer value;
};

/// Quota information handed to a strategy right after a query is answered.
struct StepBudget {
  ManipulationKind kind;
  BudgetRate rate;
  std::int64_t changes_allowed = 0;  // table cells this step may newly change
};

/// Explicit-table domain: base function is a 2^n truth table, n <= 30.
class TableDomain {
 public:
  using Point = PointF2;
  using Key = std::uint32_t;
  struct KeyHash {
    std::size_t operator()(Key k) const { return std::hash<std::uint32_t>{}(k); }
  };

  // the table is shared, not copied: sessions clone their domain per trial
  // and a 2^n table would dominate the runtime otherwise
  explicit TableDomain(BoolFn base)
      : base_(std::make_shared<const BoolFn>(std::move(base))) {}

  int dimension() const { return base_->n(); }
  int base_bit(const Point& p) const { return base_->eval(p); }
  Point sample(Rng& rng) const { return random_point(base_->n(), rng); }
  static Key key(const Point& p) { return p.bits; }
  static std::string hex(const Point& p) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%x", p.bits);
    return buf;
  }

  const BoolFn& base() const { return *base_; }

 private:
  std::shared_ptr<const BoolFn> base_;
};

/// Implicit linear domain for large n: the base function is evaluated from
/// a coefficient vector, so no truth table ever exists. Manipulated cells
/// live in a hash map.
class ImplicitLinearDomain {
 public:
  using Point = WidePoint;
  using Key = WidePoint;
  using KeyHash = WidePointHash;

  explicit ImplicitLinearDomain(WidePoint coeffs) : coeffs_(std::move(coeffs)) {}

  int dimension() const { return coeffs_.n; }
  int base_bit(const Point& p) const { return coeffs_.dot(p); }
  Point sample(Rng& rng) const { return random_wide_point(coeffs_.n, rng); }
  static const Key& key(const Point& p) { return p; }
  static std::string hex(const Point& p) { return p.hex(); }

  const WidePoint& coeffs() const { return coeffs_; }

 private:
  WidePoint coeffs_;
};

template <typename Domain>
class Session;

/// Policy invoked after each answered query. The session enforces kind and
/// budget on whatever the strategy returns.
template <typename Domain>
class AdversaryStrategy {
 public:
  virtual ~AdversaryStrategy() = default;
  virtual std::vector<Manipulation<typename Domain::Point>> step(
      const Session<Domain>& session, const StepBudget& budget) = 0;
};

template <typename Domain>
class NullAdversary final : public AdversaryStrategy<Domain> {
 public:
  std::vector<Manipulation<typename Domain::Point>> step(const Session<Domain>&,
                                                         const StepBudget&) override {
    return {};
  }
};

/// The online game state: answers queries from the (possibly manipulated)
/// table, caches first answers, and lets the strategy move after each
/// answer within the configured budget discipline.
template <typename Domain>
class Session {
 public:
  using Point = typename Domain::Point;
  using Key = typename Domain::Key;
  using KeyHash = typename Domain::KeyHash;

  struct Event {
    char kind;  // 'Q' or 'M'
    Point point;
    OracleAnswer answer;
  };

  Session(Domain domain, AdversaryConfig config,
          std::unique_ptr<AdversaryStrategy<Domain>> strategy, std::uint64_t seed)
      : domain_(std::move(domain)),
        config_(config),
        strategy_(std::move(strategy)),
        rng_(seed) {
    if (!strategy_) strategy_ = std::make_unique<NullAdversary<Domain>>();
  }

  const Domain& domain() const { return domain_; }
  const AdversaryConfig& config() const { return config_; }
  Rng& rng() { return rng_; }
  int dimension() const { return domain_.dimension(); }

  std::int64_t queries_answered() const { return queries_answered_; }
  std::int64_t manipulations_applied() const { return manipulations_applied_; }
  /// Hamming distance between the current table and the base function.
  std::int64_t dist_from_base() const { return static_cast<std::int64_t>(overrides_.size()); }
  std::int64_t erased_cells() const { return erased_count_; }
  /// Queries whose cell had been manipulated before the query arrived.
  std::int64_t manipulated_hits() const { return manipulated_hits_; }

  const std::vector<std::pair<Point, OracleAnswer>>& transcript() const { return transcript_; }

  bool was_queried(const Point& p) const {
    return first_answer_.find(Domain::key(p)) != first_answer_.end();
  }
  bool is_erased(const Point& p) const {
    auto it = overrides_.find(Domain::key(p));
    return it != overrides_.end() && it->second.is_erased();
  }
  /// Current table cell, manipulations included.
  OracleAnswer current(const Point& p) const {
    auto it = overrides_.find(Domain::key(p));
    if (it != overrides_.end()) return it->second;
    return OracleAnswer::value(domain_.base_bit(p));
  }

  OracleAnswer query(const Point& p) {
    if (p.n != domain_.dimension())
      throw std::invalid_argument("Session: query dimension mismatch");
    auto it = first_answer_.find(Domain::key(p));
    if (it != first_answer_.end()) return it->second;  // repeats get the cached answer

    const OracleAnswer a = current(p);
    if (overrides_.find(Domain::key(p)) != overrides_.end()) ++manipulated_hits_;
    first_answer_.emplace(Domain::key(p), a);
    transcript_.emplace_back(p, a);
    events_.push_back(Event{'Q', p, a});
    ++queries_answered_;
    run_adversary_step();
    return a;
  }

  std::pair<Point, OracleAnswer> sample_uniform() {
    Point p = domain_.sample(rng_);
    OracleAnswer a = query(p);
    return {p, a};
  }

  void dump_transcript(std::ostream& os) const {
    for (const auto& e : events_) {
      os << e.kind << ' ' << Domain::hex(e.point) << ' ';
      if (e.answer.is_erased())
        os << "⊥";
      else
        os << e.answer.bit();
      os << '\n';
    }
  }

 private:
  static std::int64_t floor_budget(double x) {
    // tolerate roundoff in i*t for fractional t
    return static_cast<std::int64_t>(std::floor(x + 1e-9));
  }

  std::int64_t step_quota() const {
    const double t = config_.t;
    const std::int64_t k = queries_answered_;
    if (config_.rate == BudgetRate::FixedRate) {
      return floor_budget(static_cast<double>(k) * t) -
             floor_budget(static_cast<double>(k - 1) * t);
    }
    const std::int64_t cap = floor_budget(static_cast<double>(k) * t);
    const std::int64_t used = dist_from_base();
    return cap > used ? cap - used : 0;
  }

  void run_adversary_step() {
    StepBudget budget{config_.kind, config_.rate, step_quota()};
    auto manips = strategy_->step(*this, budget);
    std::int64_t changed = 0;
    for (const auto& m : manips) {
      changed += apply_one(m);
    }
    manipulations_applied_ += changed;
    // exact budget discipline, re-checked every step
    if (config_.rate == BudgetRate::FixedRate) {
      const std::int64_t quota = budget.changes_allowed;
      if (changed > quota)
        throw ProtocolViolation("adversary exceeded fixed-rate per-step quota");
    } else {
      const double cap = static_cast<double>(queries_answered_) * config_.t;
      if (static_cast<double>(dist_from_base()) > cap + 1e-9)
        throw ProtocolViolation("adversary exceeded budget-managing total budget");
    }
  }

  // Returns 1 if the cell actually changed, 0 for a no-op.
  int apply_one(const Manipulation<Point>& m) {
    if (m.target.n != domain_.dimension())
      throw ProtocolViolation("manipulation target dimension mismatch");
    const Key k = Domain::key(m.target);
    const OracleAnswer old = current(m.target);
    if (config_.kind == ManipulationKind::Erasure) {
      if (!m.value.is_erased())
        throw ProtocolViolation("erasure adversary produced a value");
      if (old.is_erased()) return 0;  // already erased, no-op
    } else {
      if (m.value.is_erased())
        throw ProtocolViolation("corruption adversary produced an erasure");
    }
    if (old == m.value) return 0;
    if (old.is_erased())
      throw ProtocolViolation("attempt to overwrite an erased cell");

    const int base_bit = domain_.base_bit(m.target);
    if (!m.value.is_erased() && m.value.bit() == base_bit) {
      overrides_.erase(k);  // reverted to the original value
    } else {
      overrides_[k] = m.value;
      if (m.value.is_erased()) ++erased_count_;
    }
    events_.push_back(Event{'M', m.target, m.value});
    return 1;
  }

  Domain domain_;
  AdversaryConfig config_;
  std::unique_ptr<AdversaryStrategy<Domain>> strategy_;
  Rng rng_;

  std::unordered_map<Key, OracleAnswer, KeyHash> overrides_;
  std::unordered_map<Key, OracleAnswer, KeyHash> first_answer_;
  std::vector<std::pair<Point, OracleAnswer>> transcript_;
  std::vector<Event> events_;
  std::int64_t queries_answered_ = 0;
  std::int64_t manipulations_applied_ = 0;
  std::int64_t erased_count_ = 0;
  std::int64_t manipulated_hits_ = 0;
};

using TableSession = Session<TableDomain>;
using ImplicitSession = Session<ImplicitLinearDomain>;

}  // namespace linten
