#include <cmath>
#include <random>

#include "doctest.h"
#include "pmm/analysis.hpp"
#include "pmm/errors.hpp"
#include "pmm/model.hpp"

using namespace pmm;

namespace {

ModelParams params_n(int n) {
  ModelParams p;
  p.n = n;
  return p;
}

// Site values for sites 1..n-1 given as a string, reservoirs from params.
Configuration conf(const std::string& bits, const ModelParams& p) {
  return Configuration::from_string(bits, p.alpha, p.beta);
}

Configuration toggled(Configuration c, int y) {
  c.set(y, 1 - c.occ(y));
  return c;
}

double reverse_rate(const Configuration& to, const Transition& t, const ModelParams& p) {
  for (const Transition& r : transitions(to, p))
    if (r.kind == t.kind && r.site == t.site) return r.rate;
  return 0.0;
}

}  // namespace

TEST_CASE("params validation names the offending field") {
  ModelParams p;
  CHECK_NOTHROW(p.validate());
  p.n = 3;
  CHECK_THROWS_AS(p.validate(), InputError);
  p = ModelParams{};
  p.alpha = 1.2;
  CHECK_THROWS_WITH_AS(p.validate(), doctest::Contains("alpha"), InputError);
  p = ModelParams{};
  p.a = 2.0;
  CHECK_THROWS_AS(p.validate(), InputError);
  p = ModelParams{};
  p.big_m = 4;
  CHECK_THROWS_AS(p.validate(), InputError);
}

TEST_CASE("virtual cells read the reservoir densities") {
  ModelParams p = params_n(5);
  p.alpha = 0.3;
  p.beta = 0.7;
  const Configuration c = conf("1010", p);
  CHECK(c[0] == 0.3);
  CHECK(c[-1] == 0.3);
  CHECK(c[5] == 0.7);
  CHECK(c[6] == 0.7);
  CHECK(c[1] == 1.0);
  CHECK(c.particle_count() == 2);
  CHECK(c.to_string() == "1010");
  CHECK_THROWS_AS(c.occ(0), ContractViolation);
}

TEST_CASE("pmm exchange rate examples") {
  ModelParams p = params_n(10);
  // eta(x-1) = 1, eta(x) = 1, eta(x+1) = 0, eta(x+2) = 1 at x = 3
  CHECK(pmm_exchange_rate(conf("011010000", p), 3, p) == 2.0);
  // empty constraint
  CHECK(pmm_exchange_rate(conf("001000000", p), 3, p) == 0.0);
  // x = 1 reads eta(0) = alpha
  p.alpha = 0.3;
  CHECK(pmm_exchange_rate(conf("100000000", p), 1, p) == doctest::Approx(0.3).epsilon(1e-15));
  CHECK_THROWS_AS(pmm_exchange_rate(conf("100000000", p), 0, p), ContractViolation);
  CHECK_THROWS_AS(pmm_exchange_rate(conf("100000000", p), 9, p), ContractViolation);
}

TEST_CASE("M = 3 constraint counts adjacent occupied pairs") {
  ModelParams p = params_n(12);
  p.big_m = 3;
  // bond 5: sites 3,4 | 5,6 | 7,8
  CHECK(pmm_exchange_rate(conf("00111010000", p), 5, p) == 2.0);  // (3,4) (4,7)
  CHECK(pmm_exchange_rate(conf("00111011000", p), 5, p) == 3.0);  // (3,4) (4,7) (7,8)
  CHECK(pmm_exchange_rate(conf("00011000000", p), 5, p) == 0.0);  // no exclusion factor
  CHECK(pmm_constraint(conf("01011010000", p), 5, 3) == 1.0);  // (4,7)
  CHECK(pmm_constraint(conf("01001010000", p), 5, 3) == 0.0);
  // bond 1 reads eta(-1) = eta(0) = alpha: alpha^2 + alpha eta(3) + eta(3) eta(4)
  p.alpha = 0.5;
  CHECK(pmm_constraint(conf("00100000000", p), 1, 3) == 0.75);
  CHECK(pmm_constraint(conf("00000000000", p), 1, 3) == 0.25);
}

TEST_CASE("ssep exchange rate examples") {
  ModelParams p = params_n(6);
  CHECK(ssep_exchange_rate(conf("01000", p), 2) == 1);
  CHECK(ssep_exchange_rate(conf("01100", p), 2) == 0);
  CHECK(ssep_exchange_rate(conf("00000", p), 2) == 0);
  CHECK_THROWS_AS(ssep_exchange_rate(conf("00000", p), 5), ContractViolation);
}

TEST_CASE("boundary flip rate examples") {
  ModelParams p = params_n(100);
  p.alpha = 0.3;
  const std::string empty(99, '0');
  std::string first = empty;
  first[0] = '1';
  CHECK(boundary_flip_rate(conf(empty, p), 1, p) == doctest::Approx(0.3));
  CHECK(boundary_flip_rate(conf(first, p), 1, p) == doctest::Approx(0.7));
  p.beta = 0.5;
  p.m = 2.0;
  p.theta = 1.0;
  std::string last = empty;
  last[98] = '1';
  CHECK(boundary_flip_rate(conf(last, p), 99, p) == doctest::Approx(0.01).epsilon(1e-14));
  CHECK_THROWS_AS(boundary_flip_rate(conf(empty, p), 50, p), ContractViolation);
}

TEST_CASE("exchange and flip are involutions") {
  ModelParams p = params_n(30);
  std::mt19937_64 gen(7);
  for (int trial = 0; trial < 200; ++trial) {
    std::string bits;
    for (int x = 1; x < p.n; ++x) bits += (gen() & 1) ? '1' : '0';
    const Configuration c = conf(bits, p);
    const int x = 1 + static_cast<int>(gen() % (p.n - 2));
    CHECK(apply_exchange(apply_exchange(c, x), x) == c);
    const Configuration s = apply_exchange(c, x);
    CHECK(s.occ(x) == c.occ(x + 1));
    CHECK(s.occ(x + 1) == c.occ(x));
    for (int z : {1, p.n - 1}) {
      CHECK(apply_flip(apply_flip(c, z), z) == c);
      CHECK(apply_flip(c, z).occ(z) == 1 - c.occ(z));
    }
  }
  CHECK(apply_exchange(conf("0110", params_n(5)), 2) == conf("0110", params_n(5)));
  CHECK_THROWS_AS(apply_flip(conf("0110", params_n(5)), 2), ContractViolation);
  CHECK_THROWS_AS(apply_exchange(conf("0110", params_n(5)), 4), ContractViolation);
}

TEST_CASE("rates are nonnegative and local") {
  std::mt19937_64 gen(11);
  for (int big_m : {2, 3}) {
    ModelParams p = params_n(20);
    p.big_m = big_m;
    const int reach = big_m == 2 ? 1 : 2;
    for (int trial = 0; trial < 300; ++trial) {
      std::string bits;
      for (int x = 1; x < p.n; ++x) bits += (gen() % 3 == 0) ? '0' : '1';
      const Configuration c = conf(bits, p);
      for (const Transition& t : transitions(c, p)) CHECK(t.rate > 0.0);
      const int x = 1 + static_cast<int>(gen() % (p.n - 2));
      const double r = pmm_exchange_rate(c, x, p);
      CHECK(r >= 0.0);
      for (int y = 1; y < p.n; ++y) {
        if (y >= x - reach && y <= x + 1 + reach) continue;
        CHECK(pmm_exchange_rate(toggled(c, y), x, p) == r);
      }
    }
  }
}

TEST_CASE("generator examples") {
  ModelParams p = params_n(5);
  p.alpha = 0.4;
  const Configuration empty = conf("0000", p);
  CHECK(generator_apply(empty, [](const Configuration&) { return 3.0; }, p) == 0.0);
  const double l = generator_apply(empty, [](const Configuration& c) { return c[1]; }, p);
  CHECK(l == doctest::Approx(0.4).epsilon(1e-15));

  ModelParams q = params_n(8);
  const Configuration blocked = Configuration::from_string("0100100", 0.0, 0.0);
  CHECK(transitions(blocked, q, Dynamics::PurePorous).empty());
  CHECK(generator_apply(blocked, [](const Configuration& c) { return c[2] * 7.0 + c[3]; }, q,
                        Dynamics::PurePorous) == 0.0);
}

TEST_CASE("generator agrees with a brute-force transition sum") {
  ModelParams p = params_n(7);
  p.alpha = 0.35;
  p.beta = 0.6;
  p.theta = 0.5;
  const auto f = [](const Configuration& c) {
    double s = 0.0;
    for (int x = 1; x < c.n(); ++x) s += c[x] * x * x;
    return s;
  };
  for (const Configuration& c : all_configurations(p.n, p.alpha, p.beta)) {
    double want = 0.0;
    for (int x = 1; x <= p.n - 2; ++x) {
      const double r = pmm_exchange_rate(c, x, p) + p.ssep_scale() * ssep_exchange_rate(c, x);
      want += r * (f(apply_exchange(c, x)) - f(c));
    }
    for (int z : {1, p.n - 1}) want += boundary_flip_rate(c, z, p) * (f(apply_flip(c, z)) - f(c));
    CHECK(generator_apply(c, f, p) == doctest::Approx(want).epsilon(1e-13));
  }
}

TEST_CASE("detailed balance at equilibrium, exhaustive for n <= 10") {
  for (int n = 4; n <= 10; ++n) {
    for (int big_m : {2, 3}) {
      ModelParams p = params_n(n);
      p.big_m = big_m;
      p.theta = 0.7;
      p.m = 1.3;
      for (double rho : {0.5, 0.3}) {
        p.alpha = p.beta = rho;
        for (const Configuration& c : all_configurations(n, rho, rho)) {
          const int k = c.particle_count();
          const double w = std::pow(rho, k) * std::pow(1.0 - rho, n - 1 - k);
          for (const Transition& t : transitions(c, p)) {
            const Configuration d = apply(c, t);
            const int k2 = d.particle_count();
            const double w2 = std::pow(rho, k2) * std::pow(1.0 - rho, n - 1 - k2);
            const double back = reverse_rate(d, t, p);
            if (rho == 0.5 || t.kind == Transition::Kind::Exchange)
              CHECK(w * t.rate == w2 * back);
            else
              CHECK(w * t.rate == doctest::Approx(w2 * back).epsilon(1e-14));
          }
        }
      }
    }
  }
}

TEST_CASE("all_configurations enumerates the state space") {
  const auto all = all_configurations(5, 0.5, 0.5);
  CHECK(all.size() == 16);
  CHECK(all[0].to_string() == "0000");
  CHECK(all[1].to_string() == "1000");
  CHECK(all[15].to_string() == "1111");
  CHECK_THROWS_AS(all_configurations(30, 0.5, 0.5), InputError);
}
