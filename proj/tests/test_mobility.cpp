#include <random>

#include "doctest.h"
#include "pmm/errors.hpp"
#include "pmm/mobility.hpp"

using namespace pmm;

namespace {

ModelParams params_n(int n) {
  ModelParams p;
  p.n = n;
  p.alpha = 0.3;
  p.beta = 0.6;
  return p;
}

void check_plan(const MovePlan& plan, const ModelParams& p) {
  const PlanCheck check = verify_plan(plan, p);
  INFO(check.failure);
  REQUIRE(check.ok);
  for (const Move& m : plan.moves) CHECK(m.certificate > 0.0);
  CHECK(plan.ssep_moves() <= plan.ssep_budget());
  CHECK(plan.pmm_moves() <= plan.pmm_budget());
  Configuration replay = plan.initial;
  for (const Move& m : plan.moves) replay = apply_exchange(replay, m.bond);
  CHECK(replay == plan.final_config);
  for (int x = 1; x < p.n; ++x) {
    if (x == plan.source)
      CHECK(replay.occ(x) == 0);
    else if (x == plan.target)
      CHECK(replay.occ(x) == 1);
    else
      CHECK(replay.occ(x) == plan.initial.occ(x));
  }
}

}  // namespace

TEST_CASE("neighbouring target with a positive constrained rate is a single move") {
  const ModelParams p = params_n(12);
  const Configuration c = Configuration::from_string("00111000000", p.alpha, p.beta);
  const MovePlan plan = mobile_cluster_path(c, 5, 6, {3, 2, BoxSide::Right}, p);
  REQUIRE(plan.moves.size() == 1);
  CHECK(plan.moves[0].bond == 5);
  CHECK(plan.moves[0].phase == MovePhase::PmmTransport);
  CHECK(plan.moves[0].certificate == 1.0);
  check_plan(plan, p);
}

TEST_CASE("a pair next to a hole shifts with a positive rate") {
  const ModelParams p = params_n(12);
  // sites x-1, x, x+1 = 1,1,0 with x = 5
  const Configuration c = Configuration::from_string("00011000000", p.alpha, p.beta);
  CHECK(pmm_exchange_rate(c, 5, p) >= 1.0);
}

TEST_CASE("transfers in both directions replay exactly") {
  const ModelParams p = params_n(20);
  const Configuration c = Configuration::from_string("0100011100010001000", p.alpha, p.beta);
  check_plan(mobile_cluster_path(c, 12, 17, {6, 4, BoxSide::Right}, p), p);
  check_plan(mobile_cluster_path(c, 12, 3, {6, 4, BoxSide::Right}, p), p);
  check_plan(mobile_cluster_path(c, 2, 19, {8, 4, BoxSide::Left}, p), p);
}

TEST_CASE("plan preconditions") {
  const ModelParams p = params_n(12);
  const Configuration c = Configuration::from_string("01001000100", p.alpha, p.beta);
  CHECK_THROWS_AS(mobile_cluster_path(c, 5, 7, {6, 3, BoxSide::Right}, p), InsufficientDensity);
  CHECK_THROWS_AS(mobile_cluster_path(c, 3, 7, {1, 3, BoxSide::Right}, p), InputError);  // source empty
  CHECK_THROWS_AS(mobile_cluster_path(c, 5, 9, {1, 3, BoxSide::Right}, p), InputError);  // target occupied
  CHECK_THROWS_AS(mobile_cluster_path(c, 5, 7, {10, 4, BoxSide::Right}, p), InputError);  // window out
  ModelParams q = p;
  q.big_m = 3;
  CHECK_THROWS_AS(mobile_cluster_path(c, 2, 7, {4, 6, BoxSide::Right}, q), InputError);
}

TEST_CASE("helpers are the window particles nearest the source") {
  const ModelParams p = params_n(16);
  const Configuration c = Configuration::from_string("110101100000000", p.alpha, p.beta);
  // source 7, window 1..6 holds 1,2,4,6: nearest are 6 and 4
  const MovePlan plan = mobile_cluster_path(c, 7, 12, {1, 6, BoxSide::Right}, p);
  CHECK(plan.helpers == std::array<int, 2>{4, 6});
  CHECK(plan.distance == 5);
  check_plan(plan, p);
  // tie between 5 and 9 around source 7 goes to the smaller site
  const Configuration d = Configuration::from_string("000010101000000", p.alpha, p.beta);
  const MovePlan tie = mobile_cluster_path(d, 7, 13, {3, 9, BoxSide::Right}, p);
  CHECK(tie.helpers[0] == 5);
  check_plan(tie, p);
}

TEST_CASE("random feasible instances replay within budget") {
  std::mt19937_64 gen(42);
  int built = 0;
  while (built < 1000) {
    const int n = 8 + static_cast<int>(gen() % 23);
    ModelParams p = params_n(n);
    std::bernoulli_distribution b(0.15 + 0.6 * (gen() % 100) / 100.0);
    Configuration c = Configuration::empty(p);
    for (int x = 1; x < n; ++x) c.set(x, b(gen));
    const int s = 1 + static_cast<int>(gen() % (n - 1));
    const int t = 1 + static_cast<int>(gen() % (n - 1));
    if (s == t || c.occ(s) != 1 || c.occ(t) != 0) continue;
    const int ell = 1 + static_cast<int>(gen() % std::max(1, n / 3));
    const BoxSide side = (gen() & 1) ? BoxSide::Left : BoxSide::Right;
    const int x = 1 + static_cast<int>(gen() % (n - 1));
    const BoxSpec box{x, ell, side};
    if (box.first() < 1 || box.last() > n - 1) continue;
    int helpers = 0;
    for (int y = box.first(); y <= box.last(); ++y) helpers += y != s && c.occ(y);
    if (helpers < 2) {
      CHECK_THROWS_AS(mobile_cluster_path(c, s, t, box, p), InsufficientDensity);
      continue;
    }
    CAPTURE(c.to_string());
    CAPTURE(s);
    CAPTURE(t);
    CAPTURE(x);
    CAPTURE(ell);
    check_plan(mobile_cluster_path(c, s, t, box, p), p);
    ++built;
  }
}
