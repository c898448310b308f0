#pragma once

// Microscopic porous medium model: lattice {1,...,n-1}, constrained exchanges
// (PMM), a weak symmetric-exclusion perturbation (SSEP, scaled by n^{a-2}) and
// slow boundary reservoirs at sites 1 and n-1 (scaled by m / n^theta).
//
// All rates here are unscaled. The diffusive n^2 speed-up is applied once, by
// the event schedule in the simulation engine.

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace pmm {

// Which generator terms are active. PurePorous switches off SSEP and the
// reservoirs and makes the virtual cells read 0; it exists for the blocked
// configuration analysis only.
enum class Dynamics { Full, PurePorous };

struct ModelParams {
  int n = 100;
  double theta = 0.0;
  double m = 1.0;
  double a = 1.5;
  double alpha = 0.5;
  double beta = 0.5;
  int big_m = 2;  // PME exponent, selects the constraint family (2 or 3)

  // Throws InputError naming the first offending field.
  void validate() const;

  double ssep_scale() const;       // n^{a-2}
  double reservoir_scale() const;  // m / n^theta

  friend bool operator==(const ModelParams&, const ModelParams&) = default;
};

// Occupation variables on {1,...,n-1}. Reads outside the bulk return the
// virtual reservoir values: eta(x) = left for x <= 0, eta(x) = right for
// x >= n. Only sites 0 and n are used by the M = 2 rates; the M = 3 rates also
// touch -1 and n+1, which read the same reservoir values.
class Configuration {
 public:
  Configuration() = default;
  Configuration(int n, double virtual_left, double virtual_right);

  // occ[i] is the occupation of site i + 1; occ.size() must be n - 1.
  static Configuration from_occupancy(std::span<const int> occ, double virtual_left,
                                      double virtual_right);
  // Parses a string of '0'/'1' characters for sites 1..n-1.
  static Configuration from_string(const std::string& bits, double virtual_left,
                                   double virtual_right);

  // Configuration with reservoir cells set for the given dynamics
  // (alpha/beta for Full, 0 for PurePorous).
  static Configuration empty(const ModelParams& params, Dynamics dynamics = Dynamics::Full);

  int n() const { return n_; }
  int bulk_size() const { return n_ - 1; }

  // Convention-aware read, valid for every integer x.
  double operator[](int x) const {
    if (x <= 0) return virtual_left_;
    if (x >= n_) return virtual_right_;
    return cells_[static_cast<std::size_t>(x)];
  }

  // Occupation of a bulk site; throws ContractViolation outside 1..n-1.
  int occ(int x) const;
  void set(int x, int value);

  double virtual_left() const { return virtual_left_; }
  double virtual_right() const { return virtual_right_; }

  int particle_count() const;
  std::vector<int> occupancy() const;
  std::string to_string() const;

  // Raw bulk cells, index x holds site x (index 0 and n are unused padding).
  std::span<const double> cells() const { return cells_; }

  void swap_sites(int x, int y) { std::swap(cells_[x], cells_[y]); }
  void toggle(int x) { cells_[x] = 1.0 - cells_[x]; }

  friend bool operator==(const Configuration&, const Configuration&) = default;

 private:
  int n_ = 0;
  double virtual_left_ = 0.0;
  double virtual_right_ = 0.0;
  std::vector<double> cells_;
};

struct Transition {
  enum class Kind { Exchange, Flip };
  Kind kind = Kind::Exchange;
  int site = 0;  // bond x (swap x, x+1) for Exchange, boundary site for Flip
  double rate = 0.0;

  friend bool operator==(const Transition&, const Transition&) = default;
};

// c_{x,x+1}(eta) * {a_{x,x+1}(eta) + a_{x+1,x}(eta)}, bonds 1..n-2.
double pmm_exchange_rate(const Configuration& config, int x, const ModelParams& params);

// 1 iff exactly one of x, x+1 is occupied.
int ssep_exchange_rate(const Configuration& config, int x);

// (m / n^theta) * I_z^b(eta), b = alpha at z = 1 and beta at z = n-1.
double boundary_flip_rate(const Configuration& config, int z, const ModelParams& params);

// Constraint factor c_{x,x+1} alone (no exclusion factor).
double pmm_constraint(const Configuration& config, int x, int big_m);

Configuration apply_exchange(Configuration config, int x);
Configuration apply_flip(Configuration config, int z);
Configuration apply(Configuration config, const Transition& t);

// Every transition with positive unscaled rate, exchanges first (bond order),
// then flips at 1 and n-1.
std::vector<Transition> transitions(const Configuration& config, const ModelParams& params,
                                    Dynamics dynamics = Dynamics::Full);

using Observable = std::function<double(const Configuration&)>;

// (L_n f)(eta) = sum over transitions of rate * (f(eta') - f(eta)).
double generator_apply(const Configuration& config, const Observable& f,
                       const ModelParams& params, Dynamics dynamics = Dynamics::Full);

// Enumerates every configuration of {0,1}^{n-1} in lexicographic order of
// the bit pattern (site 1 is the least significant bit).
std::vector<Configuration> all_configurations(int n, double virtual_left, double virtual_right);

}  // namespace pmm
