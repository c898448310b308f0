#include "pmm/mobility.hpp"

#include <algorithm>
#include <cstdlib>
#include <limits>

#include "pmm/errors.hpp"

namespace pmm {

const char* to_string(MovePhase phase) {
  switch (phase) {
    case MovePhase::SsepAssemble: return "ssep-assemble";
    case MovePhase::PmmTransport: return "pmm-transport";
    case MovePhase::SsepRestore: return "ssep-restore";
  }
  return "?";
}

int MovePlan::ssep_moves() const {
  return static_cast<int>(std::count_if(moves.begin(), moves.end(), [](const Move& m) {
    return m.phase != MovePhase::PmmTransport;
  }));
}

int MovePlan::pmm_moves() const {
  return static_cast<int>(moves.size()) - ssep_moves();
}

namespace {

using Occ = std::vector<int>;  // index x = site x, entries 0 and n unused

struct RawMove {
  int bond;
  MovePhase phase;
};

// Plans on a left-to-right problem (source < target). All geometry lives in
// "background" terms: the background is the current configuration without
// the cluster particles, E lists its empty sites in order, and a cluster of k
// particles always sits on k consecutive entries of E. Every site strictly
// between two consecutive entries is a background particle, so the stretch
// from E[g] up to E[g+k] - 1 is one solid block of particles.
class Planner {
 public:
  explicit Planner(Occ occ) : occ_(std::move(occ)) {}

  const Occ& occ() const { return occ_; }
  std::vector<RawMove>& moves() { return moves_; }

  void swap(int x, MovePhase phase) {
    if (occ_[x] == occ_[x + 1]) throw ContractViolation("planner produced a null exchange");
    std::swap(occ_[x], occ_[x + 1]);
    moves_.push_back({x, phase});
  }

  // Moves the k-cluster at E-index g to E-index to. A forward step lets the
  // hole at E[g+k] travel left through the block; every exchange then has an
  // occupied site at distance two behind or ahead of the jumping particle.
  void move_cluster(const std::vector<int>& E, int& g, int k, int to) {
    while (g < to) {
      const int hole = E[g + k];
      for (int x = hole - 1; x >= E[g]; --x) swap(x, MovePhase::PmmTransport);
      ++g;
    }
    while (g > to) {
      const int hole = E[g - 1];
      for (int x = hole; x < E[g + k - 1]; ++x) swap(x, MovePhase::PmmTransport);
      --g;
    }
  }

  // SSEP moves turning the current occupation into `want` (same particle
  // count). Particles are matched in order; right movers go first from the
  // right, then left movers from the left, so each path is clear.
  void ssep_transform(const Occ& want, MovePhase phase) {
    const auto from = positions(occ_);
    const auto to = positions(want);
    if (from.size() != to.size()) throw ContractViolation("SSEP transform changes particle count");
    for (std::size_t i = from.size(); i-- > 0;)
      for (int x = from[i]; x < to[i]; ++x) swap(x, phase);
    for (std::size_t i = 0; i < from.size(); ++i)
      for (int x = from[i]; x > to[i]; --x) swap(x - 1, phase);
    if (occ_ != want) throw ContractViolation("SSEP transform did not reach its target");
  }

  static std::vector<int> positions(const Occ& o) {
    std::vector<int> p;
    for (int x = 1; x + 1 < static_cast<int>(o.size()); ++x)
      if (o[x]) p.push_back(x);
    return p;
  }

  static long transport_cost(const Occ& a, const Occ& b) {
    const auto pa = positions(a);
    const auto pb = positions(b);
    long cost = 0;
    for (std::size_t i = 0; i < pa.size(); ++i) cost += std::labs(pa[i] - pb[i]);
    return cost;
  }

 private:
  Occ occ_;
  std::vector<RawMove> moves_;
};

std::vector<int> empty_sites(const Occ& background) {
  std::vector<int> E;
  for (int x = 1; x + 1 < static_cast<int>(background.size()); ++x)
    if (!background[x]) E.push_back(x);
  return E;
}

int index_of(const std::vector<int>& E, int site) {
  const auto it = std::lower_bound(E.begin(), E.end(), site);
  if (it == E.end() || *it != site) throw ContractViolation("site is not a background hole");
  return static_cast<int>(it - E.begin());
}

// E-index of a consecutive parking pair inside [lo, hi] minimizing the SSEP
// cost of turning `from` into background + pair.
int choose_parking(const Occ& from, const Occ& background, const std::vector<int>& E, int lo,
                   int hi, int anchor, int preferred_site) {
  int best = -1;
  long best_cost = std::numeric_limits<long>::max();
  long best_tie = std::numeric_limits<long>::max();
  for (int j = 0; j + 1 < static_cast<int>(E.size()); ++j) {
    if (E[j] < lo || E[j + 1] > hi) continue;
    Occ want = background;
    want[E[j]] = want[E[j + 1]] = 1;
    const long cost = Planner::transport_cost(from, want);
    const long tie = E[j] == preferred_site ? -1 : std::labs(E[j] + E[j + 1] - 2L * anchor);
    if (cost < best_cost || (cost == best_cost && tie < best_tie)) {
      best = j;
      best_cost = cost;
      best_tie = tie;
    }
  }
  if (best < 0) throw InsufficientDensity("no room to park the helper pair near the window");
  return best;
}

int closest_in_range(int current, int lo, int hi) { return std::clamp(current, lo, hi); }

struct Geometry {
  int source, target;
  int win_first, win_last;
  int h0, h1;  // helper sites, h0 < h1
};

std::vector<RawMove> plan_rightward(const Occ& start, const Geometry& geo) {
  const int s = geo.source;
  const int t = geo.target;
  Planner p(start);

  // Assemble: helpers onto two consecutive background holes near the window.
  Occ bg0 = start;
  bg0[geo.h0] = bg0[geo.h1] = 0;
  const std::vector<int> E0 = empty_sites(bg0);
  const int lo = std::min(geo.win_first, s);
  const int hi = std::max(geo.win_last, s);
  const int park0 = choose_parking(start, bg0, E0, lo, hi, s, -1);
  {
    Occ want = bg0;
    want[E0[park0]] = want[E0[park0 + 1]] = 1;
    p.ssep_transform(want, MovePhase::SsepAssemble);
  }
  const int park_site = E0[park0];

  // Bring the pair next to the source so that pair + source are consecutive
  // once the source site joins the background holes.
  int g = park0;
  const int ins = static_cast<int>(std::lower_bound(E0.begin(), E0.end(), s) - E0.begin());
  const int max_pair = static_cast<int>(E0.size()) - 2;
  p.move_cluster(E0, g, 2, closest_in_range(g, std::max(ins - 2, 0), std::min(ins, max_pair)));

  // Absorb the source; the triple keeps E-index g.
  std::vector<int> E1 = E0;
  E1.insert(E1.begin() + ins, s);
  const int it = index_of(E1, t);
  const int max_triple = static_cast<int>(E1.size()) - 3;
  p.move_cluster(E1, g, 3, closest_in_range(g, std::max(it - 2, 0), std::min(it, max_triple)));

  // Release at the target; the remaining pair keeps E-index g.
  std::vector<int> E2 = E1;
  E2.erase(E2.begin() + it);

  Occ final_want = start;
  final_want[s] = 0;
  final_want[t] = 1;
  Occ bg2 = final_want;
  bg2[geo.h0] = bg2[geo.h1] = 0;
  const int park2 = choose_parking(final_want, bg2, E2, lo, std::max(hi, t), s, park_site);
  p.move_cluster(E2, g, 2, park2);

  p.ssep_transform(final_want, MovePhase::SsepRestore);
  return std::move(p.moves());
}

// Consecutive exchanges on the same bond undo each other.
std::vector<RawMove> cancel_backtracks(const std::vector<RawMove>& in) {
  std::vector<RawMove> out;
  for (const RawMove& m : in) {
    if (!out.empty() && out.back().bond == m.bond)
      out.pop_back();
    else
      out.push_back(m);
  }
  return out;
}

double certificate_for(const Configuration& c, const Move& m, const ModelParams& params) {
  if (m.phase == MovePhase::PmmTransport) return pmm_exchange_rate(c, m.bond, params);
  return params.ssep_scale() * ssep_exchange_rate(c, m.bond);
}

}  // namespace

MovePlan mobile_cluster_path(const Configuration& config, int source, int target,
                             const BoxSpec& window, const ModelParams& params) {
  const int n = config.n();
  if (params.big_m != 2) throw InputError("mobile cluster paths are built for M = 2 only");
  if (params.n != n) throw InputError("configuration size does not match n");
  window.validate(n);
  if (source < 1 || source > n - 1 || target < 1 || target > n - 1)
    throw InputError("source and target must be bulk sites");
  if (source == target) throw InputError("source and target coincide");
  if (config.occ(source) != 1) throw InputError("source site is empty");
  if (config.occ(target) != 0) throw InputError("target site is occupied");

  std::vector<int> candidates;
  for (int y = window.first(); y <= window.last(); ++y)
    if (y != source && config.occ(y) == 1) candidates.push_back(y);
  if (candidates.size() < 2)
    throw InsufficientDensity("window holds fewer than two helper particles");
  std::stable_sort(candidates.begin(), candidates.end(), [&](int a, int b) {
    const int da = std::abs(a - source), db = std::abs(b - source);
    return da != db ? da < db : a < b;
  });

  MovePlan plan;
  plan.initial = config;
  plan.source = source;
  plan.target = target;
  plan.window = window;
  plan.helpers = {std::min(candidates[0], candidates[1]), std::max(candidates[0], candidates[1])};
  int gap = 0;
  if (source < window.first()) gap = window.first() - source - 1;
  if (source > window.last()) gap = source - window.last() - 1;
  plan.distance = std::abs(target - source) + gap;

  // Neighbouring target already reachable by a constrained jump.
  const int direct = std::min(source, target);
  if (std::abs(target - source) == 1 && pmm_exchange_rate(config, direct, params) > 0.0) {
    plan.moves.push_back({direct, MovePhase::PmmTransport, pmm_exchange_rate(config, direct, params)});
    plan.final_config = apply_exchange(config, direct);
    return plan;
  }

  // Left-going transfers are planned on the mirror image x -> n - x.
  const bool mirror = target < source;
  auto map_site = [&](int x) { return mirror ? n - x : x; };
  Occ occ(static_cast<std::size_t>(n + 1), 0);
  for (int x = 1; x < n; ++x) occ[static_cast<std::size_t>(map_site(x))] = config.occ(x);
  Geometry geo{map_site(source), map_site(target),
               std::min(map_site(window.first()), map_site(window.last())),
               std::max(map_site(window.first()), map_site(window.last())),
               std::min(map_site(plan.helpers[0]), map_site(plan.helpers[1])),
               std::max(map_site(plan.helpers[0]), map_site(plan.helpers[1]))};

  const std::vector<RawMove> raw = cancel_backtracks(plan_rightward(occ, geo));

  Configuration c = config;
  for (const RawMove& r : raw) {
    Move m{mirror ? n - 1 - r.bond : r.bond, r.phase, 0.0};
    m.certificate = certificate_for(c, m, params);
    c.swap_sites(m.bond, m.bond + 1);
    plan.moves.push_back(m);
  }
  plan.final_config = c;
  return plan;
}

PlanCheck verify_plan(const MovePlan& plan, const ModelParams& params) {
  PlanCheck check;
  Configuration c = plan.initial;
  for (std::size_t i = 0; i < plan.moves.size(); ++i) {
    const Move& m = plan.moves[i];
    if (m.bond < 1 || m.bond > c.n() - 2) {
      check.failure = "move " + std::to_string(i) + " uses an invalid bond";
      return check;
    }
    const double rate = certificate_for(c, m, params);
    if (!(rate > 0.0) || rate != m.certificate) {
      check.failure = "move " + std::to_string(i) + " (" + to_string(m.phase) + ", bond " +
                      std::to_string(m.bond) + ") has rate " + std::to_string(rate);
      return check;
    }
    c = apply_exchange(std::move(c), m.bond);
  }
  Configuration expected = plan.initial;
  expected.set(plan.source, plan.initial.occ(plan.target));
  expected.set(plan.target, plan.initial.occ(plan.source));
  check.final_config = c;
  if (!(c == expected) || !(c == plan.final_config)) {
    check.failure = "replay does not end in the intended transfer";
    return check;
  }
  check.ok = true;
  return check;
}

}  // namespace pmm
