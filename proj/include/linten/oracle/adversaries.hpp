#pragma once

#include <cstdint>
#include <memory>
#include <stdexcept>
#include <vector>

#include "linten/oracle/session.hpp"

namespace linten {

template <typename Domain>
std::unique_ptr<AdversaryStrategy<Domain>> adversary_null() {
  return std::make_unique<NullAdversary<Domain>>();
}

/// After each answered query, erases x^y for every pair of distinct
/// transcript points whose XOR is not yet erased or queried, newest pairs
/// first, up to quota. The pending-pair set is held as one cursor per
/// transcript entry rather than materialized, so a trial costs O(queries +
/// manipulations) instead of O(queries^2).
template <typename Domain>
class PairEraser final : public AdversaryStrategy<Domain> {
 public:
  using Point = typename Domain::Point;

  std::vector<Manipulation<Point>> step(const Session<Domain>& s,
                                        const StepBudget& budget) override {
    std::vector<Manipulation<Point>> out;
    const auto& tr = s.transcript();
    // entry i contributes pairs (i, i-1), (i, i-2), ..., (i, 0); stacking
    // the cursors puts the newest entry's pairs first
    while (processed_ < tr.size()) {
      if (processed_ >= 1) pending_.push_back({processed_, processed_});
      ++processed_;
    }
    std::int64_t quota = budget.changes_allowed;
    while (quota > 0 && !pending_.empty()) {
      auto& seg = pending_.back();
      --seg.next;
      Point y = tr[seg.i].first ^ tr[seg.next].first;
      if (seg.next == 0) pending_.pop_back();
      if (s.was_queried(y) || s.is_erased(y)) continue;
      out.push_back({std::move(y), OracleAnswer::erased()});
      --quota;
    }
    return out;
  }

 private:
  struct Segment {
    std::size_t i;     // the newer transcript index of the pair
    std::size_t next;  // pairs (i, next-1), ..., (i, 0) still pending
  };

  std::size_t processed_ = 0;
  std::vector<Segment> pending_;
};

template <typename Domain>
std::unique_ptr<AdversaryStrategy<Domain>> adversary_pair_eraser() {
  return std::make_unique<PairEraser<Domain>>();
}

/// Treats every `period` consecutive queried points as opening a batch of
/// the first `batch_size` of them, and once a batch is complete erases its
/// size-(batch_size/2) subset-XORs in lexicographic subset order, as many
/// per step as quota allows. `period` defaults to batch_size; a tester
/// that interleaves one extra query per round is matched by period =
/// batch_size + 1.
template <typename Domain>
class SubsetEraser final : public AdversaryStrategy<Domain> {
 public:
  using Point = typename Domain::Point;

  explicit SubsetEraser(int batch_size, int period = 0)
      : batch_size_(batch_size), period_(period > 0 ? period : batch_size) {
    if (batch_size_ < 2 || batch_size_ % 2 != 0)
      throw std::invalid_argument("SubsetEraser: batch_size must be even and >= 2");
    if (period_ < batch_size_)
      throw std::invalid_argument("SubsetEraser: period < batch_size");
  }

  std::vector<Manipulation<Point>> step(const Session<Domain>& s,
                                        const StepBudget& budget) override {
    std::vector<Manipulation<Point>> out;
    sync(s);
    std::int64_t quota = budget.changes_allowed;
    while (quota > 0 && active_) {
      Point y = cur_;
      if (!advance_comb()) active_ = false;
      if (s.was_queried(y) || s.is_erased(y)) continue;
      out.push_back({std::move(y), OracleAnswer::erased()});
      --quota;
    }
    return out;
  }

 private:
  void sync(const Session<Domain>& s) {
    const auto& tr = s.transcript();
    while (tr.size() >= next_batch_start_ + static_cast<std::size_t>(batch_size_)) {
      batch_.clear();
      for (int i = 0; i < batch_size_; ++i)
        batch_.push_back(tr[next_batch_start_ + static_cast<std::size_t>(i)].first);
      comb_.resize(static_cast<std::size_t>(batch_size_ / 2));
      for (int i = 0; i < batch_size_ / 2; ++i) comb_[static_cast<std::size_t>(i)] = i;
      cur_ = xor_subset(batch_, comb_);
      active_ = true;
      next_batch_start_ += static_cast<std::size_t>(period_);
    }
  }

  // Lexicographically next size-(m/2) combination of {0..m-1}, keeping
  // cur_ in sync by xoring only the suffix that changes. The suffix is
  // almost always one element, so a manipulation costs O(1) xors amortized
  // instead of O(batch_size).
  bool advance_comb() {
    const int k = batch_size_ / 2;
    int i = k - 1;
    while (i >= 0 && comb_[static_cast<std::size_t>(i)] == batch_size_ - k + i) --i;
    if (i < 0) return false;
    for (int j = i; j < k; ++j)
      cur_ = cur_ ^ batch_[static_cast<std::size_t>(comb_[static_cast<std::size_t>(j)])];
    ++comb_[static_cast<std::size_t>(i)];
    for (int j = i + 1; j < k; ++j)
      comb_[static_cast<std::size_t>(j)] = comb_[static_cast<std::size_t>(j - 1)] + 1;
    for (int j = i; j < k; ++j)
      cur_ = cur_ ^ batch_[static_cast<std::size_t>(comb_[static_cast<std::size_t>(j)])];
    return true;
  }

  int batch_size_;
  int period_;
  std::size_t next_batch_start_ = 0;
  std::vector<Point> batch_;
  std::vector<int> comb_;
  Point cur_{};
  bool active_ = false;
};

template <typename Domain>
std::unique_ptr<AdversaryStrategy<Domain>> adversary_subset_eraser(int batch_size,
                                                                   int period = 0) {
  return std::make_unique<SubsetEraser<Domain>>(batch_size, period);
}

/// Works through a fixed list of target cells, erasing them (or fixing
/// them to the values of a reference function), as many per step as quota
/// allows, until exhausted. Deterministic; needs no knowledge beyond the
/// target list.
template <typename Domain>
class TargetListManipulator final : public AdversaryStrategy<Domain> {
 public:
  using Point = typename Domain::Point;

  /// Erasure mode: `values` ignored (pass empty). Corruption mode:
  /// `values[i]` is the bit the i-th target gets pinned to.
  TargetListManipulator(std::vector<Point> targets, ManipulationKind mode,
                        std::vector<std::uint8_t> values = {})
      : targets_(std::move(targets)), mode_(mode), values_(std::move(values)) {
    if (targets_.empty())
      throw std::invalid_argument("TargetListManipulator: empty target list");
    if (mode_ == ManipulationKind::Corruption && values_.size() != targets_.size())
      throw std::invalid_argument("TargetListManipulator: values/targets size mismatch");
  }

  std::vector<Manipulation<Point>> step(const Session<Domain>&,
                                        const StepBudget& budget) override {
    std::vector<Manipulation<Point>> out;
    std::int64_t quota = budget.changes_allowed;
    while (quota > 0 && next_ < targets_.size()) {
      OracleAnswer v = mode_ == ManipulationKind::Erasure
                           ? OracleAnswer::erased()
                           : OracleAnswer::value(values_[next_]);
      out.push_back({targets_[next_], v});
      ++next_;
      --quota;
    }
    return out;
  }

  bool exhausted() const { return next_ == targets_.size(); }

 private:
  std::vector<Point> targets_;
  ManipulationKind mode_;
  std::vector<std::uint8_t> values_;
  std::size_t next_ = 0;
};

template <typename Domain>
std::unique_ptr<AdversaryStrategy<Domain>> adversary_dprime(
    std::vector<typename Domain::Point> targets, ManipulationKind mode,
    std::vector<std::uint8_t> values = {}) {
  return std::make_unique<TargetListManipulator<Domain>>(std::move(targets), mode,
                                                         std::move(values));
}

}  // namespace linten
