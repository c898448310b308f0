#include "pmm/model.hpp"

#include <cmath>
#include <string>

#include "pmm/errors.hpp"

namespace pmm {

namespace {

void require_bond(const Configuration& config, int x) {
  if (x < 1 || x > config.n() - 2)
    throw ContractViolation("bond index " + std::to_string(x) + " outside 1.." +
                            std::to_string(config.n() - 2));
}

void require_boundary(const Configuration& config, int z) {
  if (z != 1 && z != config.n() - 1)
    throw ContractViolation("site " + std::to_string(z) + " is not a boundary site");
}

}  // namespace

void ModelParams::validate() const {
  if (n < 4) throw InputError("n: must be at least 4");
  if (!(theta >= 0.0)) throw InputError("theta: must be >= 0");
  if (!(m > 0.0)) throw InputError("m: must be > 0");
  if (!(a > 1.0 && a < 2.0)) throw InputError("a: must lie in (1,2)");
  if (!(alpha > 0.0 && alpha < 1.0)) throw InputError("alpha: must lie in (0,1)");
  if (!(beta > 0.0 && beta < 1.0)) throw InputError("beta: must lie in (0,1)");
  if (big_m != 2 && big_m != 3) throw InputError("big_m: only 2 and 3 are supported");
}

double ModelParams::ssep_scale() const { return std::pow(static_cast<double>(n), a - 2.0); }

double ModelParams::reservoir_scale() const {
  return m / std::pow(static_cast<double>(n), theta);
}

Configuration::Configuration(int n, double virtual_left, double virtual_right)
    : n_(n),
      virtual_left_(virtual_left),
      virtual_right_(virtual_right),
      cells_(static_cast<std::size_t>(n + 1), 0.0) {
  if (n < 2) throw InputError("configuration needs n >= 2");
}

Configuration Configuration::from_occupancy(std::span<const int> occ, double virtual_left,
                                            double virtual_right) {
  Configuration c(static_cast<int>(occ.size()) + 1, virtual_left, virtual_right);
  for (std::size_t i = 0; i < occ.size(); ++i) c.set(static_cast<int>(i) + 1, occ[i]);
  return c;
}

Configuration Configuration::from_string(const std::string& bits, double virtual_left,
                                         double virtual_right) {
  Configuration c(static_cast<int>(bits.size()) + 1, virtual_left, virtual_right);
  for (std::size_t i = 0; i < bits.size(); ++i) {
    if (bits[i] != '0' && bits[i] != '1')
      throw InputError("configuration string must contain only '0' and '1'");
    c.set(static_cast<int>(i) + 1, bits[i] == '1');
  }
  return c;
}

Configuration Configuration::empty(const ModelParams& params, Dynamics dynamics) {
  if (dynamics == Dynamics::PurePorous) return Configuration(params.n, 0.0, 0.0);
  return Configuration(params.n, params.alpha, params.beta);
}

int Configuration::occ(int x) const {
  if (x < 1 || x > n_ - 1)
    throw ContractViolation("site " + std::to_string(x) + " outside the bulk");
  return cells_[static_cast<std::size_t>(x)] != 0.0;
}

void Configuration::set(int x, int value) {
  if (x < 1 || x > n_ - 1)
    throw ContractViolation("site " + std::to_string(x) + " outside the bulk");
  if (value != 0 && value != 1) throw InputError("occupation must be 0 or 1");
  cells_[static_cast<std::size_t>(x)] = value;
}

int Configuration::particle_count() const {
  int k = 0;
  for (int x = 1; x < n_; ++x) k += cells_[x] != 0.0;
  return k;
}

std::vector<int> Configuration::occupancy() const {
  std::vector<int> out;
  out.reserve(static_cast<std::size_t>(n_ - 1));
  for (int x = 1; x < n_; ++x) out.push_back(cells_[x] != 0.0);
  return out;
}

std::string Configuration::to_string() const {
  std::string s;
  s.reserve(static_cast<std::size_t>(n_ - 1));
  for (int x = 1; x < n_; ++x) s.push_back(cells_[x] != 0.0 ? '1' : '0');
  return s;
}

double pmm_constraint(const Configuration& eta, int x, int big_m) {
  if (big_m == 3)
    return eta[x - 2] * eta[x - 1] + eta[x - 1] * eta[x + 2] + eta[x + 2] * eta[x + 3];
  return eta[x - 1] + eta[x + 2];
}

double pmm_exchange_rate(const Configuration& config, int x, const ModelParams& params) {
  require_bond(config, x);
  const int exclusion = ssep_exchange_rate(config, x);
  if (exclusion == 0) return 0.0;
  return pmm_constraint(config, x, params.big_m);
}

int ssep_exchange_rate(const Configuration& config, int x) {
  require_bond(config, x);
  return config[x] != config[x + 1] ? 1 : 0;
}

double boundary_flip_rate(const Configuration& config, int z, const ModelParams& params) {
  require_boundary(config, z);
  const double b = z == 1 ? params.alpha : params.beta;
  const double indicator = config[z] != 0.0 ? 1.0 - b : b;
  return params.reservoir_scale() * indicator;
}

Configuration apply_exchange(Configuration config, int x) {
  require_bond(config, x);
  config.swap_sites(x, x + 1);
  return config;
}

Configuration apply_flip(Configuration config, int z) {
  require_boundary(config, z);
  config.toggle(z);
  return config;
}

Configuration apply(Configuration config, const Transition& t) {
  if (t.kind == Transition::Kind::Exchange) return apply_exchange(std::move(config), t.site);
  return apply_flip(std::move(config), t.site);
}

std::vector<Transition> transitions(const Configuration& config, const ModelParams& params,
                                    Dynamics dynamics) {
  std::vector<Transition> out;
  const double eps = params.ssep_scale();
  for (int x = 1; x <= config.n() - 2; ++x) {
    double r = pmm_exchange_rate(config, x, params);
    if (dynamics == Dynamics::Full) r += eps * ssep_exchange_rate(config, x);
    if (r > 0.0) out.push_back({Transition::Kind::Exchange, x, r});
  }
  if (dynamics == Dynamics::Full) {
    for (int z : {1, config.n() - 1}) {
      const double r = boundary_flip_rate(config, z, params);
      if (r > 0.0) out.push_back({Transition::Kind::Flip, z, r});
    }
  }
  return out;
}

double generator_apply(const Configuration& config, const Observable& f,
                       const ModelParams& params, Dynamics dynamics) {
  const double base = f(config);
  double sum = 0.0;
  for (const Transition& t : transitions(config, params, dynamics))
    sum += t.rate * (f(apply(config, t)) - base);
  return sum;
}

std::vector<Configuration> all_configurations(int n, double virtual_left, double virtual_right) {
  if (n < 2 || n > 25) throw InputError("exhaustive enumeration supports 2 <= n <= 25");
  const int sites = n - 1;
  std::vector<Configuration> out;
  out.reserve(std::size_t{1} << sites);
  for (std::uint32_t mask = 0; mask < (std::uint32_t{1} << sites); ++mask) {
    Configuration c(n, virtual_left, virtual_right);
    for (int x = 1; x <= sites; ++x) c.set(x, (mask >> (x - 1)) & 1u);
    out.push_back(std::move(c));
  }
  return out;
}

}  // namespace pmm
