#pragma once

#include <cstddef>
#include <array>
#include <cstdint>
#include <vector>

#include "pmm/model.hpp"

namespace pmm {

// Complete binary tree of partial sums over a fixed number of non-negative
// weights. Internal nodes are always recomputed as left + right, so a tree
// updated entry by entry is bit-identical to one rebuilt from the same leaves.
class PartialSumTree {
 public:
  PartialSumTree() = default;
  explicit PartialSumTree(std::size_t size);

  std::size_t size() const { return size_; }
  double total() const { return nodes_.empty() ? 0.0 : nodes_[1]; }
  double get(std::size_t i) const { return nodes_[capacity_ + i]; }

  void set(std::size_t i, double weight);
  // Writes every leaf, then recomputes all internal nodes once.
  void assign(const std::vector<double>& weights);
  void rebuild();

  // Index i with prefix(i) <= u < prefix(i) + w_i. Never returns a zero-weight
  // entry when total() > 0, even if rounding pushes u to the edge.
  std::size_t find(double u) const;

 private:
  std::size_t size_ = 0;
  std::size_t capacity_ = 0;  // power of two >= size_
  std::vector<double> nodes_;  // 1-based heap layout, leaves at [capacity_, 2*capacity_)
};

// Constant-time selection index. A bulk bond whose constraint only reads
// bulk sites has rate n^2 (c + n^{a-2}) with an integer c in 0..3, so it is
// filed in class c; picking a class with probability count * rate / total and
// then a uniform member is exactly proportional selection. The few entries
// that read the reservoir values (flips and the bonds next to them) are kept
// as individual weights. The total is recomputed from the integer counts, so
// it carries no accumulated rounding.
class ClassIndex {
 public:
  static constexpr int kClasses = 4;
  static constexpr std::uint8_t kNone = 0xff;

  ClassIndex() = default;
  ClassIndex(std::size_t size, const std::array<double, kClasses>& class_rates,
             std::vector<std::size_t> edge_entries);

  double total() const {
    double t = edge_total_;
    for (std::size_t k = 0; k < kClasses; ++k) t += rate_[k] * static_cast<double>(members_[k].size());
    return t;
  }
  // Recomputes the cached sum of the individually weighted entries.
  void edges_changed(const std::vector<double>& rates);
  std::size_t find(double u, const std::vector<double>& rates) const;
  // Files a bulk entry under class k (kNone to unschedule it).
  void move(std::size_t entry, std::uint8_t k);
  std::uint8_t owner(std::size_t entry) const { return owner_[entry]; }
  double class_rate(int k) const { return rate_[static_cast<std::size_t>(k)]; }
  std::size_t count(int k) const { return members_[static_cast<std::size_t>(k)].size(); }

 private:
  std::array<double, kClasses> rate_{};
  std::array<std::vector<std::uint32_t>, kClasses> members_;
  std::vector<std::uint8_t> owner_;
  std::vector<std::uint32_t> slot_;
  std::vector<std::size_t> edges_;
  double edge_total_ = 0.0;
};

enum class SelectionIndex { RateClasses, PartialSumTree };

// Rates of every possible transition of the speeded-up process n^2 L_n.
//
// Entry layout: 0 = flip at site 1, 1 = flip at site n-1, 1 + x = exchange on
// bond {x, x+1} for x = 1..n-2. Exchange entries are n^2 (pmm + n^{a-2} ssep),
// flip entries are n^2 * boundary rate.
class EventSchedule {
 public:
  EventSchedule() = default;
  EventSchedule(const ModelParams& params, Dynamics dynamics,
                SelectionIndex index = SelectionIndex::RateClasses);

  // Recomputes every entry from scratch.
  static EventSchedule rebuild(const Configuration& config, const ModelParams& params,
                               Dynamics dynamics = Dynamics::Full,
                               SelectionIndex index = SelectionIndex::RateClasses);

  std::size_t size() const { return rates_.size(); }
  double total() const {
    return index_ == SelectionIndex::RateClasses ? classes_.total() : tree_.total();
  }
  double rate(std::size_t entry) const { return rates_[entry]; }
  const std::vector<double>& entries() const { return rates_; }
  SelectionIndex index() const { return index_; }

  Transition event(std::size_t entry) const;
  std::size_t entry_of(const Transition& t) const;

  // Index of the entry selected by u in [0, total()).
  std::size_t select(double u) const {
    return index_ == SelectionIndex::RateClasses ? classes_.find(u, rates_) : tree_.find(u);
  }

  // Recompute the entries whose rate can depend on the changed sites.
  // Returns the number of entries whose stored value changed.
  int refresh_after_exchange(const Configuration& config, int bond);
  int refresh_after_flip(const Configuration& config, int site);
  void refresh_all(const Configuration& config);

  // Scaled rate of a single entry computed from the configuration.
  double compute(const Configuration& config, std::size_t entry) const;

  Dynamics dynamics() const { return dynamics_; }

 private:
  int refresh_bonds(const Configuration& config, int lo, int hi);
  int refresh_entry(const Configuration& config, std::size_t entry);
  int refresh_bulk(const Configuration& config, int bond);
  void store(std::size_t entry, double rate);
  bool is_bulk_bond(int x) const { return x >= bulk_lo_ && x <= bulk_hi_; }

  int n_ = 0;
  int big_m_ = 2;
  Dynamics dynamics_ = Dynamics::Full;
  SelectionIndex index_ = SelectionIndex::RateClasses;
  double n2_ = 0.0;         // n^2
  double ssep_rate_ = 0.0;  // n^2 * n^{a-2}
  double flip_left_in_ = 0.0, flip_left_out_ = 0.0;
  double flip_right_in_ = 0.0, flip_right_out_ = 0.0;
  int bulk_lo_ = 0, bulk_hi_ = -1;  // bonds whose rate reads bulk sites only
  std::vector<double> rates_;
  PartialSumTree tree_;
  ClassIndex classes_;
};

}  // namespace pmm
