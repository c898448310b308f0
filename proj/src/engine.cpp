#include "pmm/engine.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

#include "pmm/errors.hpp"

namespace pmm {

namespace {

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

}  // namespace

Rng::Rng(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t a = seed;
  std::uint64_t b = ~stream;
  std::uint64_t key = splitmix64(a) ^ (splitmix64(b) * 0xd1342543de82ef95ull);
  for (auto& word : s_) word = splitmix64(key);
}

double Rng::exponential(double rate) { return -std::log1p(-uniform()) / rate; }

Configuration sample_initial(const Profile& g, const ModelParams& params, Rng& rng,
                             Dynamics dynamics) {
  Configuration c = Configuration::empty(params, dynamics);
  for (int x = 1; x < params.n; ++x) {
    const double p = g(static_cast<double>(x) / params.n);
    if (!(p >= 0.0 && p <= 1.0))
      throw InputError("initial profile value " + std::to_string(p) + " at u=" +
                       std::to_string(static_cast<double>(x) / params.n) + " outside [0,1]");
    // Always consume one variate per site so the stream layout is fixed.
    c.set(x, rng.uniform() < p ? 1 : 0);
  }
  return c;
}

SimState::SimState(const ModelParams& params, Configuration initial, std::uint64_t seed,
                   std::uint64_t stream, Dynamics dynamics, SelectionIndex index)
    : SimState(params, std::move(initial), Rng(seed, stream), dynamics, index) {}

SimState::SimState(const ModelParams& params, Configuration initial, Rng rng, Dynamics dynamics,
                   SelectionIndex index)
    : params_(params), dynamics_(dynamics), config_(std::move(initial)), rng_(std::move(rng)) {
  params_.validate();
  if (config_.n() != params_.n) throw InputError("initial configuration size does not match n");
  schedule_ = EventSchedule::rebuild(config_, params_, dynamics_, index);
}

StepResult SimState::advance(double horizon) {
  const double total = schedule_.total();
  if (!(total > 0.0)) return {StepStatus::Absorbed, 0.0, {}};
  const double wait = rng_.exponential(total);
  if (time_ + wait > horizon) {
    const double elapsed = horizon - time_;
    time_ = horizon;
    return {StepStatus::Horizon, elapsed, {}};
  }
  time_ += wait;
  const std::size_t entry = schedule_.select(rng_.uniform() * total);
  const Transition t = schedule_.event(entry);
  apply(t);
  return {StepStatus::Moved, wait, t};
}

void SimState::apply(const Transition& t) {
  if (t.kind == Transition::Kind::Exchange) {
    config_.swap_sites(t.site, t.site + 1);
    schedule_.refresh_after_exchange(config_, t.site);
  } else {
    config_.toggle(t.site);
    const bool now_occupied = config_[t.site] != 0.0;
    if (t.site == 1)
      (now_occupied ? flips_.left_in : flips_.left_out)++;
    else
      (now_occupied ? flips_.right_in : flips_.right_out)++;
    schedule_.refresh_after_flip(config_, t.site);
  }
  if (++events_ % kRebuildInterval == 0) schedule_.refresh_all(config_);
}

void ObserverSpec::validate() const {
  if (sample_times.empty()) throw InputError("sample_times must not be empty");
  if (sample_times.front() < 0.0) throw InputError("sample_times must be >= 0");
  for (std::size_t k = 1; k < sample_times.size(); ++k)
    if (!(sample_times[k] > sample_times[k - 1]))
      throw InputError("sample_times must be strictly increasing");
  for (int w : box_widths)
    if (w < 1) throw InputError("box widths must be >= 1");
  if (time_average_from && !(*time_average_from >= 0.0 && *time_average_from < horizon()))
    throw InputError("time_average_from must lie in [0, last sample time)");
}

DynkinRecord ObservationRecord::dynkin(std::size_t k) const {
  DynkinRecord rec;
  rec.mode = QuadratureMode::EventExact;
  rec.source = dynamics == Dynamics::Full ? DynkinSource::Decomposition : DynkinSource::Generator;
  for (const Sample& s : samples) {
    if (k >= s.pairing.size()) throw InputError("no Dynkin test function with that index");
    rec.times.push_back(s.time);
    rec.pairing.push_back(s.pairing[k]);
    rec.integral.push_back(s.compensator[k]);
  }
  return rec;
}

namespace {

class Recorder {
 public:
  Recorder(const ObserverSpec& spec, const ModelParams& params, Dynamics dynamics)
      : spec_(spec), params_(params) {
    for (const auto& G : spec.dynkin) integrators_.emplace_back(params, G, dynamics);
    totals_.resize(integrators_.size());
    boundary_scale_ = params.n * static_cast<double>(params.n) * params.reservoir_scale();
  }

  // Caches the integrands of the configuration that is about to be held.
  void prepare(const Configuration& c) {
    pending_.clear();
    for (const auto& integ : integrators_) pending_.push_back(integ.integrand(c));
    left_cell_ = c[1];
    right_cell_ = c[params_.n - 1];
  }

  // The prepared configuration was held for dt units of macroscopic time.
  void commit(double dt) {
    if (dt <= 0.0) return;
    for (std::size_t k = 0; k < integrators_.size(); ++k) totals_[k] += pending_[k].scaled(dt);
    if (spec_.boundary) {
      left_current_ += boundary_scale_ * (params_.alpha - left_cell_) * dt;
      right_current_ += boundary_scale_ * (right_cell_ - params_.beta) * dt;
    }
  }

  // Exact occupation-time integrals: a site's value is constant between the
  // events that touch it.
  void start_occupation(const Configuration& c, double from) {
    occ_from_ = from;
    occ_integral_.assign(static_cast<std::size_t>(c.n()), 0.0);
    occ_since_.assign(static_cast<std::size_t>(c.n()), 0.0);
    tracking_ = true;
  }

  void on_event(const Configuration& c, const Transition& t, double time) {
    if (!tracking_) return;
    touch(c, t.site, time);
    if (t.kind == Transition::Kind::Exchange) touch(c, t.site + 1, time);
  }

  std::vector<double> finish_occupation(const Configuration& c, double to) {
    std::vector<double> avg;
    if (!tracking_) return avg;
    avg.reserve(static_cast<std::size_t>(c.bulk_size()));
    const double span = to - occ_from_;
    for (int x = 1; x < c.n(); ++x) {
      const auto i = static_cast<std::size_t>(x);
      const double start = std::max(occ_since_[i], occ_from_);
      const double total = occ_integral_[i] + (to > start ? c[x] * (to - start) : 0.0);
      avg.push_back(total / span);
    }
    return avg;
  }

  Sample snapshot(const SimState& s) const {
    const Configuration& c = s.config();
    Sample out;
    out.time = s.time();
    out.particles = c.particle_count();
    if (spec_.profile) {
      out.profile.reserve(static_cast<std::size_t>(c.bulk_size()));
      for (int x = 1; x < c.n(); ++x) out.profile.push_back(c[x] != 0.0);
    }
    for (int w : spec_.box_widths) out.boxes.push_back(coarse_profile(c, w));
    if (spec_.boundary) {
      out.left_occ = c[1] != 0.0;
      out.right_occ = c[c.n() - 1] != 0.0;
      out.flips = s.flips();
      out.left_current = left_current_;
      out.right_current = right_current_;
    }
    for (std::size_t k = 0; k < integrators_.size(); ++k) {
      out.pairing.push_back(empirical_pairing(c, integrators_[k].test_function()));
      out.compensator.push_back(totals_[k]);
    }
    return out;
  }

 private:
  const ObserverSpec& spec_;
  ModelParams params_;
  std::vector<DynkinIntegrator> integrators_;
  std::vector<DynkinTerms> totals_;
  std::vector<DynkinTerms> pending_;
  double left_cell_ = 0.0;
  double right_cell_ = 0.0;
  double boundary_scale_ = 0.0;
  double left_current_ = 0.0;
  double right_current_ = 0.0;
  bool tracking_ = false;
  double occ_from_ = 0.0;
  std::vector<double> occ_integral_;
  std::vector<double> occ_since_;

  // Site x has just changed at `time`, so it held 1 - c[x] since occ_since_.
  void touch(const Configuration& c, int x, double time) {
    const auto i = static_cast<std::size_t>(x);
    const double start = std::max(occ_since_[i], occ_from_);
    if (time > start) occ_integral_[i] += (1.0 - c[x]) * (time - start);
    occ_since_[i] = time;
  }
};

ObservationRecord run_record(const ModelParams& params, SimState state, const ObserverSpec& spec,
                             std::uint64_t seed, std::uint64_t replica, Dynamics dynamics) {
  ObservationRecord rec;
  rec.params = params;
  rec.dynamics = dynamics;
  rec.seed = seed;
  rec.replica = replica;
  rec.box_widths = spec.box_widths;

  Recorder recorder(spec, params, dynamics);
  if (spec.time_average_from) recorder.start_occupation(state.config(), *spec.time_average_from);
  for (double target : spec.sample_times) {
    while (!rec.absorbed && state.time() < target) {
      recorder.prepare(state.config());
      const double t0 = state.time();
      const StepResult r = state.advance(target);
      if (r.status == StepStatus::Absorbed) {
        rec.absorbed = true;
        rec.absorbed_time = t0;
        break;
      }
      recorder.commit(state.time() - t0);
      if (r.status == StepStatus::Moved) recorder.on_event(state.config(), r.transition, state.time());
    }
    if (rec.absorbed) {
      // Absorbing state: nothing moves and every integrand is zero.
      Sample s = recorder.snapshot(state);
      s.time = target;
      rec.samples.push_back(std::move(s));
      continue;
    }
    rec.samples.push_back(recorder.snapshot(state));
  }
  rec.events = state.events();
  if (spec.time_average_from) {
    rec.time_average_from = *spec.time_average_from;
    rec.time_average_to = spec.horizon();
    rec.time_average = recorder.finish_occupation(state.config(), spec.horizon());
  }
  return rec;
}

}  // namespace

ObservationRecord simulate(const ModelParams& params, const Profile& g, const ObserverSpec& spec,
                           std::uint64_t seed, std::uint64_t replica, Dynamics dynamics) {
  params.validate();
  spec.validate();
  Rng rng(seed, replica);
  Configuration initial = sample_initial(g, params, rng, dynamics);
  return run_record(params, SimState(params, std::move(initial), std::move(rng), dynamics), spec,
                    seed, replica, dynamics);
}

ObservationRecord simulate_from(const ModelParams& params, const Configuration& initial,
                                const ObserverSpec& spec, std::uint64_t seed,
                                std::uint64_t replica, Dynamics dynamics) {
  params.validate();
  spec.validate();
  return run_record(params, SimState(params, initial, seed, replica, dynamics), spec, seed,
                    replica, dynamics);
}

void for_each_replica(std::size_t count, const std::function<void(std::size_t)>& fn,
                      unsigned threads) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, count));
  if (threads <= 1) {
    for (std::size_t r = 0; r < count; ++r) fn(r);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < threads; ++w) {
    pool.emplace_back([&] {
      for (std::size_t r; (r = next.fetch_add(1)) < count;) {
        try {
          fn(r);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace pmm
