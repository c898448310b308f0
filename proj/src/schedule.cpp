#include "pmm/schedule.hpp"

#include <algorithm>
#include <cmath>

#include "pmm/errors.hpp"

namespace pmm {

PartialSumTree::PartialSumTree(std::size_t size) : size_(size), capacity_(1) {
  while (capacity_ < size_) capacity_ <<= 1;
  nodes_.assign(2 * capacity_, 0.0);
}

void PartialSumTree::set(std::size_t i, double weight) {
  std::size_t node = capacity_ + i;
  nodes_[node] = weight;
  for (node >>= 1; node >= 1; node >>= 1) nodes_[node] = nodes_[2 * node] + nodes_[2 * node + 1];
}

void PartialSumTree::assign(const std::vector<double>& weights) {
  if (weights.size() != size_) throw ContractViolation("weight count mismatch");
  std::copy(weights.begin(), weights.end(), nodes_.begin() + static_cast<long>(capacity_));
  rebuild();
}

void PartialSumTree::rebuild() {
  for (std::size_t node = capacity_ - 1; node >= 1; --node)
    nodes_[node] = nodes_[2 * node] + nodes_[2 * node + 1];
}

std::size_t PartialSumTree::find(double u) const {
  std::size_t node = 1;
  while (node < capacity_) {
    const double left = nodes_[2 * node];
    const double right = nodes_[2 * node + 1];
    if (u < left || right <= 0.0) {
      node = 2 * node;
    } else {
      u -= left;
      node = 2 * node + 1;
    }
  }
  return node - capacity_;
}

ClassIndex::ClassIndex(std::size_t size, const std::array<double, kClasses>& class_rates,
                       std::vector<std::size_t> edge_entries)
    : rate_(class_rates), owner_(size, kNone), slot_(size, 0), edges_(std::move(edge_entries)) {}

void ClassIndex::edges_changed(const std::vector<double>& rates) {
  edge_total_ = 0.0;
  for (std::size_t e : edges_) edge_total_ += rates[e];
}

std::size_t ClassIndex::find(double u, const std::vector<double>& rates) const {
  std::size_t last = rates.size();
  for (std::size_t k = 0; k < kClasses; ++k) {
    const auto& m = members_[k];
    if (m.empty()) continue;
    const double weight = rate_[k] * static_cast<double>(m.size());
    if (u < weight) return m[std::min(static_cast<std::size_t>(u / rate_[k]), m.size() - 1)];
    u -= weight;
    last = m.back();
  }
  for (std::size_t e : edges_) {
    if (rates[e] <= 0.0) continue;
    if (u < rates[e]) return e;
    u -= rates[e];
    last = e;
  }
  // Rounding pushed u past the end: the last positive entry.
  if (last == rates.size()) throw ContractViolation("selection from an empty schedule");
  return last;
}

void ClassIndex::move(std::size_t entry, std::uint8_t k) {
  const std::uint8_t old = owner_[entry];
  if (old == k) return;
  if (old != kNone) {
    auto& m = members_[old];
    const std::uint32_t moved = m.back();
    m[slot_[entry]] = moved;
    slot_[moved] = slot_[entry];
    m.pop_back();
  }
  owner_[entry] = k;
  if (k != kNone) {
    slot_[entry] = static_cast<std::uint32_t>(members_[k].size());
    members_[k].push_back(static_cast<std::uint32_t>(entry));
  }
}

EventSchedule::EventSchedule(const ModelParams& params, Dynamics dynamics, SelectionIndex index)
    : n_(params.n), big_m_(params.big_m), dynamics_(dynamics), index_(index),
      rates_(static_cast<std::size_t>(params.n), 0.0) {
  n2_ = static_cast<double>(params.n) * static_cast<double>(params.n);
  if (dynamics == Dynamics::Full) {
    ssep_rate_ = n2_ * params.ssep_scale();
    const double boundary = n2_ * params.reservoir_scale();
    flip_left_in_ = boundary * params.alpha;
    flip_left_out_ = boundary * (1.0 - params.alpha);
    flip_right_in_ = boundary * params.beta;
    flip_right_out_ = boundary * (1.0 - params.beta);
  }
  const int reach = big_m_ == 3 ? 2 : 1;  // sites read to the left of the bond
  bulk_lo_ = 1 + reach;
  bulk_hi_ = n_ - 2 - reach;
  if (index_ == SelectionIndex::PartialSumTree) {
    tree_ = PartialSumTree(rates_.size());
    return;
  }
  std::array<double, ClassIndex::kClasses> class_rates{};
  for (int c = 0; c < ClassIndex::kClasses; ++c)
    class_rates[static_cast<std::size_t>(c)] = n2_ * c + ssep_rate_;
  std::vector<std::size_t> edges = {0, 1};
  for (int x = 1; x <= n_ - 2; ++x)
    if (!is_bulk_bond(x)) edges.push_back(static_cast<std::size_t>(x) + 1);
  classes_ = ClassIndex(rates_.size(), class_rates, std::move(edges));
}

EventSchedule EventSchedule::rebuild(const Configuration& config, const ModelParams& params,
                                     Dynamics dynamics, SelectionIndex index) {
  if (config.n() != params.n) throw ContractViolation("configuration size does not match n");
  EventSchedule s(params, dynamics, index);
  s.refresh_all(config);
  return s;
}

void EventSchedule::refresh_all(const Configuration& config) {
  if (index_ == SelectionIndex::PartialSumTree) {
    for (std::size_t e = 0; e < rates_.size(); ++e) rates_[e] = compute(config, e);
    tree_.assign(rates_);
    return;
  }
  for (std::size_t e = 0; e < rates_.size(); ++e) refresh_entry(config, e);
}

void EventSchedule::store(std::size_t entry, double rate) {
  rates_[entry] = rate;
  if (index_ == SelectionIndex::PartialSumTree)
    tree_.set(entry, rate);
  else
    classes_.edges_changed(rates_);
}

double EventSchedule::compute(const Configuration& eta, std::size_t entry) const {
  if (entry == 0) return eta[1] != 0.0 ? flip_left_out_ : flip_left_in_;
  if (entry == 1) return eta[n_ - 1] != 0.0 ? flip_right_out_ : flip_right_in_;
  const int x = static_cast<int>(entry) - 1;
  if (eta[x] == eta[x + 1]) return 0.0;
  return n2_ * pmm_constraint(eta, x, big_m_) + ssep_rate_;
}

Transition EventSchedule::event(std::size_t entry) const {
  if (entry >= size()) throw ContractViolation("schedule entry out of range");
  if (entry == 0) return {Transition::Kind::Flip, 1, rates_[0]};
  if (entry == 1) return {Transition::Kind::Flip, n_ - 1, rates_[1]};
  return {Transition::Kind::Exchange, static_cast<int>(entry) - 1, rates_[entry]};
}

std::size_t EventSchedule::entry_of(const Transition& t) const {
  if (t.kind == Transition::Kind::Flip) {
    if (t.site == 1) return 0;
    if (t.site == n_ - 1) return 1;
    throw ContractViolation("flip site is not a boundary site");
  }
  if (t.site < 1 || t.site > n_ - 2) throw ContractViolation("bond index out of range");
  return static_cast<std::size_t>(t.site) + 1;
}

// Class-index fast path for a bulk bond: the class is the integer constraint.
int EventSchedule::refresh_bulk(const Configuration& eta, int x) {
  const auto entry = static_cast<std::size_t>(x) + 1;
  const double* c = eta.cells().data();
  std::uint8_t k = ClassIndex::kNone;
  if (c[x] != c[x + 1]) {
    const double constraint = big_m_ == 2 ? c[x - 1] + c[x + 2]
                                          : c[x - 2] * c[x - 1] + c[x - 1] * c[x + 2] +
                                                c[x + 2] * c[x + 3];
    k = static_cast<std::uint8_t>(constraint);
    if (classes_.class_rate(k) <= 0.0) k = ClassIndex::kNone;
  }
  if (k == classes_.owner(entry)) return 0;
  classes_.move(entry, k);
  rates_[entry] = k == ClassIndex::kNone ? 0.0 : classes_.class_rate(k);
  return 1;
}

int EventSchedule::refresh_entry(const Configuration& config, std::size_t entry) {
  if (index_ == SelectionIndex::RateClasses && entry >= 2 &&
      is_bulk_bond(static_cast<int>(entry) - 1))
    return refresh_bulk(config, static_cast<int>(entry) - 1);
  const double r = compute(config, entry);
  if (r == rates_[entry]) return 0;
  store(entry, r);
  return 1;
}

int EventSchedule::refresh_bonds(const Configuration& config, int lo, int hi) {
  lo = std::max(lo, 1);
  hi = std::min(hi, n_ - 2);
  int changed = 0;
  for (int y = lo; y <= hi; ++y)
    changed += index_ == SelectionIndex::RateClasses && is_bulk_bond(y)
                   ? refresh_bulk(config, y)
                   : refresh_entry(config, static_cast<std::size_t>(y) + 1);
  return changed;
}

// Bond y reads sites y-1..y+2 (M = 2) or y-2..y+3 (M = 3), so a change at
// site s affects bonds s-2..s+1 or s-3..s+2. The exchanged bond itself keeps
// its rate: its constraint sites are untouched and the exclusion factor is
// symmetric under the swap.
int EventSchedule::refresh_after_exchange(const Configuration& config, int bond) {
  const int reach = big_m_ == 3 ? 3 : 2;
  int changed = refresh_bonds(config, bond - reach, bond - 1) +
                refresh_bonds(config, bond + 1, bond + reach);
  if (bond == 1) changed += refresh_entry(config, 0);
  if (bond + 1 == n_ - 1) changed += refresh_entry(config, 1);
  return changed;
}

int EventSchedule::refresh_after_flip(const Configuration& config, int site) {
  const int reach = big_m_ == 3 ? 3 : 2;
  int changed = refresh_bonds(config, site - reach, site + reach - 1);
  if (site == 1) changed += refresh_entry(config, 0);
  if (site == n_ - 1) changed += refresh_entry(config, 1);
  return changed;
}

}  // namespace pmm
