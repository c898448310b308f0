#pragma once

// Exact continuous-time simulation of the speeded-up process driven by
// n^2 L_n (direct method: exponential clock on the total rate, proportional
// selection through the partial-sum tree). Recorded times are macroscopic.

#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <vector>

#include "pmm/analysis.hpp"
#include "pmm/model.hpp"
#include "pmm/schedule.hpp"

namespace pmm {

// Pseudorandom stream identified by (seed, stream): xoshiro256** (Blackman
// and Vigna) whose 256-bit state is filled by SplitMix64 from a key that mixes
// seed and stream. Both algorithms are fixed integer recurrences, so records
// reproduce across platforms. Uniform variates take the top 53 bits.
class Rng {
 public:
  Rng(std::uint64_t seed, std::uint64_t stream = 0);

  std::uint64_t next() {
    const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
  // Exponential variate with the given rate (> 0).
  double exponential(double rate);
  bool bernoulli(double p) { return uniform() < p; }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
  std::uint64_t s_[4];
};

using Profile = std::function<double(double)>;

// Each site x independently occupied with probability g(x/n).
Configuration sample_initial(const Profile& g, const ModelParams& params, Rng& rng,
                             Dynamics dynamics = Dynamics::Full);

struct BoundaryCounters {
  std::int64_t left_in = 0;
  std::int64_t left_out = 0;
  std::int64_t right_in = 0;
  std::int64_t right_out = 0;

  std::int64_t net() const { return left_in - left_out + right_in - right_out; }
  friend bool operator==(const BoundaryCounters&, const BoundaryCounters&) = default;
};

enum class StepStatus { Moved, Horizon, Absorbed };

struct StepResult {
  StepStatus status = StepStatus::Moved;
  double elapsed = 0.0;
  Transition transition;
};

class SimState {
 public:
  // Events between exact schedule rebuilds.
  static constexpr std::int64_t kRebuildInterval = std::int64_t{1} << 20;

  SimState(const ModelParams& params, Configuration initial, std::uint64_t seed,
           std::uint64_t stream = 0, Dynamics dynamics = Dynamics::Full,
           SelectionIndex index = SelectionIndex::RateClasses);
  SimState(const ModelParams& params, Configuration initial, Rng rng,
           Dynamics dynamics = Dynamics::Full,
           SelectionIndex index = SelectionIndex::RateClasses);

  // One transition of the speeded-up chain. Absorbed (nothing applied) when
  // the total rate is zero.
  StepResult step() { return advance(std::numeric_limits<double>::infinity()); }

  // Like step(), but if the next event would fall after `horizon` the clock
  // stops at `horizon` and no transition is applied (status Horizon). The
  // exponential clock is memoryless, so resuming later is exact.
  StepResult advance(double horizon);

  const Configuration& config() const { return config_; }
  const EventSchedule& schedule() const { return schedule_; }
  const ModelParams& params() const { return params_; }
  Dynamics dynamics() const { return dynamics_; }
  double time() const { return time_; }
  std::int64_t events() const { return events_; }
  const BoundaryCounters& flips() const { return flips_; }

 private:
  void apply(const Transition& t);

  ModelParams params_;
  Dynamics dynamics_;
  Configuration config_;
  EventSchedule schedule_;
  Rng rng_;
  double time_ = 0.0;
  std::int64_t events_ = 0;
  BoundaryCounters flips_;
};

struct ObserverSpec {
  std::vector<double> sample_times;
  bool profile = true;               // full site occupations
  std::vector<int> box_widths;       // coarse-grained box averages per width
  bool boundary = true;              // boundary occupations, flips, currents
  std::vector<SpatialFunction> dynkin;  // time-independent test functions
  // When set, the exact time average of every site occupation over
  // [time_average_from, last sample time] is recorded.
  std::optional<double> time_average_from;

  // sample_times non-empty, strictly increasing, >= 0.
  void validate() const;
  double horizon() const { return sample_times.empty() ? 0.0 : sample_times.back(); }
};

struct Sample {
  double time = 0.0;
  int particles = 0;
  std::vector<std::uint8_t> profile;
  std::vector<std::vector<double>> boxes;  // one vector per requested width
  int left_occ = 0;
  int right_occ = 0;
  BoundaryCounters flips;  // cumulative since t = 0
  // int_0^t n^2 j_{0,1} ds and int_0^t n^2 j_{n-1,n} ds (particles per unit
  // macroscopic time, time-integrated).
  double left_current = 0.0;
  double right_current = 0.0;
  std::vector<double> pairing;           // <pi_t, G> per Dynkin test function
  std::vector<DynkinTerms> compensator;  // cumulative integrals per test function
};

struct ObservationRecord {
  ModelParams params;
  Dynamics dynamics = Dynamics::Full;
  std::uint64_t seed = 0;
  std::uint64_t replica = 0;
  std::vector<int> box_widths;
  std::vector<Sample> samples;
  bool absorbed = false;
  double absorbed_time = 0.0;
  std::int64_t events = 0;
  std::vector<double> time_average;  // sites 1..n-1, empty unless requested
  double time_average_from = 0.0;
  double time_average_to = 0.0;

  // Event-exact Dynkin record for test function k.
  DynkinRecord dynkin(std::size_t k) const;
};

// Runs from a configuration drawn from g until the last sample time. Replica r
// of seed s uses Rng(s, r) for both the initial draw and the dynamics.
ObservationRecord simulate(const ModelParams& params, const Profile& g, const ObserverSpec& spec,
                           std::uint64_t seed, std::uint64_t replica = 0,
                           Dynamics dynamics = Dynamics::Full);

ObservationRecord simulate_from(const ModelParams& params, const Configuration& initial,
                                const ObserverSpec& spec, std::uint64_t seed,
                                std::uint64_t replica = 0, Dynamics dynamics = Dynamics::Full);

// Runs fn(r) for r in [0, count) on up to `threads` workers (0 = hardware
// concurrency). fn must only write to per-replica storage.
void for_each_replica(std::size_t count, const std::function<void(std::size_t)>& fn,
                      unsigned threads = 0);

}  // namespace pmm
