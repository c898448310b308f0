#pragma once

// Microscopic observables: empirical pairings, box averages, the local
// function tau_x h whose discrete gradient is the bulk current, boundary
// currents, Dynkin martingale bookkeeping and blocked-configuration checks.

#include <functional>
#include <vector>

#include "pmm/model.hpp"

namespace pmm {

using SpatialFunction = std::function<double(double)>;

// <pi^n, G> = (1/n) sum_{x=1}^{n-1} G(x/n) eta(x).
double empirical_pairing(const Configuration& config, const SpatialFunction& G);

enum class BoxSide { Left, Right };

// Left box {x-ell+1,...,x} or right box {x,...,x+ell-1}.
struct BoxSpec {
  int x = 1;
  int ell = 1;
  BoxSide side = BoxSide::Right;

  int first() const { return side == BoxSide::Left ? x - ell + 1 : x; }
  int last() const { return side == BoxSide::Left ? x : x + ell - 1; }
  bool contains(int y) const { return y >= first() && y <= last(); }
  // Throws InputError unless the box lies inside {1,...,n-1}.
  void validate(int n) const;
};

double box_average(const Configuration& config, const BoxSpec& box);

// Coarse-grained profile: averages over consecutive right boxes of width w
// starting at site 1. Only complete boxes are reported.
std::vector<double> coarse_profile(const Configuration& config, int width);
// Macroscopic centre of coarse box k for lattice size n.
double coarse_center(int n, int width, int k);

// floor(n^{a-1-delta}), the mesoscopic box size used by the bulk replacement.
int mesoscopic_box_size(int n, double a, double delta);

// Sites {1 + floor(eps n), ..., n - 1 - floor(eps n)}, returned as [first, last].
struct SiteRange {
  int first = 1;
  int last = 0;
  bool empty() const { return last < first; }
};
SiteRange restricted_bulk(int n, double eps);

// tau_x h = eta(x-1)eta(x) + eta(x)eta(x+1) - eta(x-1)eta(x+1) + n^{a-2} eta(x).
double tau_h(const Configuration& config, int x, const ModelParams& params);

// j_{0,1}, j_{x,x+1} (x = 1..n-2) and j_{n-1,n} for bond in 0..n-1.
double instantaneous_current(const Configuration& config, int bond, const ModelParams& params);

// Expected current across a bulk bond computed directly from the exchange
// rates: (rate of x -> x+1 jumps) - (rate of x+1 -> x jumps). Independent of
// tau_h; used to check the gradient identity.
double bond_current_from_rates(const Configuration& config, int x, const ModelParams& params);

// Integrand terms of n^2 L_n <pi^n, G> for time-independent G, split the way
// the Dynkin martingale is usually written:
//   bulk      (1/n) sum_x Delta_n G(x/n) tau_x h
//   left      grad^+_n G(0) tau_1 h
//   right     grad^-_n G(1) tau_{n-1} h
//   reservoir m n^{1-theta} {G(1/n)(alpha - eta(1)) + G((n-1)/n)(beta - eta(n-1))}
// so that n^2 L_n <pi, G> = bulk + left - right + reservoir.
struct DynkinTerms {
  double bulk = 0.0;
  double left = 0.0;
  double right = 0.0;
  double reservoir = 0.0;

  double compensator() const { return bulk + left - right + reservoir; }
  DynkinTerms& operator+=(const DynkinTerms& o);
  DynkinTerms scaled(double s) const;
};

enum class DynkinSource {
  Decomposition,  // tau_h based split above (full dynamics only)
  Generator       // n^2 times the generator applied to the pairing
};

// Piecewise-constant accumulation of the compensator along a trajectory.
class DynkinIntegrator {
 public:
  DynkinIntegrator(const ModelParams& params, SpatialFunction G,
                   Dynamics dynamics = Dynamics::Full);

  DynkinTerms integrand(const Configuration& config) const;
  // Adds integrand(config) * dt to the running integral.
  void accumulate(const Configuration& config, double dt);
  const DynkinTerms& integral() const { return integral_; }
  DynkinSource source() const { return source_; }
  const SpatialFunction& test_function() const { return G_; }

 private:
  ModelParams params_;
  SpatialFunction G_;
  Dynamics dynamics_;
  DynkinSource source_;
  std::vector<double> g_;    // G(x/n), x = 0..n
  std::vector<double> lap_;  // Delta_n G(x/n), x = 1..n-1
  DynkinTerms integral_;
};

// n^2 (L_n <pi^n, G>)(eta) by summing over transitions, independent of the
// tau_h decomposition.
double pairing_drift_from_generator(const Configuration& config, const SpatialFunction& G,
                                    const ModelParams& params,
                                    Dynamics dynamics = Dynamics::Full);

enum class QuadratureMode { EventExact, SampledTrapezoid };

// Per-sample record of one trajectory: pairing values and cumulative
// compensator terms at the sample times.
struct DynkinRecord {
  std::vector<double> times;
  std::vector<double> pairing;
  std::vector<DynkinTerms> integral;  // cumulative from time 0
  QuadratureMode mode = QuadratureMode::EventExact;
  DynkinSource source = DynkinSource::Decomposition;
};

// M_t^n(G) = <pi_t,G> - <pi_0,G> - int_0^t n^2 L_n <pi_s,G> ds.
// t must be one of the recorded times (InputError otherwise).
double dynkin_residual(const DynkinRecord& record, double t);

// Builds a record in SampledTrapezoid mode from pairings and instantaneous
// integrands observed at the sample times only.
DynkinRecord dynkin_record_from_samples(const std::vector<double>& times,
                                        const std::vector<double>& pairing,
                                        const std::vector<DynkinTerms>& integrand);

// True iff no bond has a positive constrained-exchange rate. Only meaningful
// for pure porous dynamics: throws ContractViolation for Dynamics::Full, where
// the SSEP and reservoir terms make every configuration mobile.
bool detect_blocked(const Configuration& config, int big_m = 2,
                    Dynamics dynamics = Dynamics::PurePorous);

}  // namespace pmm
