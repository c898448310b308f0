#include "pmm/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "pmm/errors.hpp"

namespace pmm {

double empirical_pairing(const Configuration& config, const SpatialFunction& G) {
  const int n = config.n();
  double sum = 0.0;
  for (int x = 1; x < n; ++x)
    if (config[x] != 0.0) sum += G(static_cast<double>(x) / n);
  return sum / n;
}

void BoxSpec::validate(int n) const {
  if (ell < 1) throw InputError("box width must be >= 1");
  if (first() < 1 || last() > n - 1)
    throw InputError("box [" + std::to_string(first()) + "," + std::to_string(last()) +
                     "] leaves the bulk 1.." + std::to_string(n - 1));
}

double box_average(const Configuration& config, const BoxSpec& box) {
  box.validate(config.n());
  int count = 0;
  for (int y = box.first(); y <= box.last(); ++y) count += config[y] != 0.0;
  return static_cast<double>(count) / box.ell;
}

std::vector<double> coarse_profile(const Configuration& config, int width) {
  if (width < 1) throw InputError("coarse width must be >= 1");
  const int boxes = config.bulk_size() / width;
  std::vector<double> out(static_cast<std::size_t>(boxes));
  for (int k = 0; k < boxes; ++k) {
    int count = 0;
    for (int y = 1 + k * width; y <= (k + 1) * width; ++y) count += config[y] != 0.0;
    out[static_cast<std::size_t>(k)] = static_cast<double>(count) / width;
  }
  return out;
}

double coarse_center(int n, int width, int k) {
  return (1.0 + k * width + 0.5 * (width - 1)) / n;
}

int mesoscopic_box_size(int n, double a, double delta) {
  if (delta <= 0.0 || a - 1.0 - delta < 0.0)
    throw InputError("delta must satisfy 0 < delta <= a - 1");
  return std::max(1, static_cast<int>(std::floor(std::pow(static_cast<double>(n), a - 1.0 - delta))));
}

SiteRange restricted_bulk(int n, double eps) {
  if (eps < 0.0) throw InputError("eps must be >= 0");
  const int k = static_cast<int>(std::floor(eps * n));
  return {1 + k, n - 1 - k};
}

double tau_h(const Configuration& eta, int x, const ModelParams& params) {
  if (x < 1 || x > eta.n() - 1) throw ContractViolation("tau_h site outside the bulk");
  return eta[x - 1] * eta[x] + eta[x] * eta[x + 1] - eta[x - 1] * eta[x + 1] +
         params.ssep_scale() * eta[x];
}

double instantaneous_current(const Configuration& eta, int bond, const ModelParams& params) {
  const int n = eta.n();
  if (bond < 0 || bond > n - 1) throw ContractViolation("current bond outside 0..n-1");
  if (bond == 0) return params.reservoir_scale() * (params.alpha - eta[1]);
  if (bond == n - 1) return params.reservoir_scale() * (eta[n - 1] - params.beta);
  return tau_h(eta, bond, params) - tau_h(eta, bond + 1, params);
}

double bond_current_from_rates(const Configuration& eta, int x, const ModelParams& params) {
  const double rate = pmm_exchange_rate(eta, x, params) +
                      params.ssep_scale() * ssep_exchange_rate(eta, x);
  // A jump across the bond moves one particle from the occupied side.
  return rate * (eta[x] - eta[x + 1]);
}

DynkinTerms& DynkinTerms::operator+=(const DynkinTerms& o) {
  bulk += o.bulk;
  left += o.left;
  right += o.right;
  reservoir += o.reservoir;
  return *this;
}

DynkinTerms DynkinTerms::scaled(double s) const {
  return {bulk * s, left * s, right * s, reservoir * s};
}

DynkinIntegrator::DynkinIntegrator(const ModelParams& params, SpatialFunction G,
                                   Dynamics dynamics)
    : params_(params),
      G_(std::move(G)),
      dynamics_(dynamics),
      source_(dynamics == Dynamics::Full ? DynkinSource::Decomposition
                                         : DynkinSource::Generator) {
  const int n = params_.n;
  const double nn = static_cast<double>(n);
  g_.resize(static_cast<std::size_t>(n + 1));
  for (int x = 0; x <= n; ++x) g_[static_cast<std::size_t>(x)] = G_(x / nn);
  lap_.assign(static_cast<std::size_t>(n + 1), 0.0);
  for (int x = 1; x < n; ++x)
    lap_[static_cast<std::size_t>(x)] = nn * nn * (g_[x - 1] - 2.0 * g_[x] + g_[x + 1]);
}

DynkinTerms DynkinIntegrator::integrand(const Configuration& eta) const {
  if (source_ == DynkinSource::Generator)
    return {pairing_drift_from_generator(eta, G_, params_, dynamics_), 0.0, 0.0, 0.0};

  const int n = params_.n;
  const double nn = static_cast<double>(n);
  const double eps = params_.ssep_scale();
  auto th = [&](int x) {
    return eta[x - 1] * eta[x] + eta[x] * eta[x + 1] - eta[x - 1] * eta[x + 1] + eps * eta[x];
  };
  DynkinTerms t;
  double bulk = 0.0;
  for (int x = 1; x < n; ++x) bulk += lap_[static_cast<std::size_t>(x)] * th(x);
  t.bulk = bulk / nn;
  t.left = nn * (g_[1] - g_[0]) * th(1);
  t.right = nn * (g_[n] - g_[n - 1]) * th(n - 1);
  const double boundary = params_.m * nn / std::pow(nn, params_.theta);
  t.reservoir = boundary * (g_[1] * (params_.alpha - eta[1]) +
                            g_[n - 1] * (params_.beta - eta[n - 1]));
  return t;
}

void DynkinIntegrator::accumulate(const Configuration& config, double dt) {
  if (dt <= 0.0) return;
  integral_ += integrand(config).scaled(dt);
}

double pairing_drift_from_generator(const Configuration& eta, const SpatialFunction& G,
                                    const ModelParams& params, Dynamics dynamics) {
  const double nn = static_cast<double>(eta.n());
  double drift = 0.0;
  for (const Transition& t : transitions(eta, params, dynamics)) {
    double delta;
    if (t.kind == Transition::Kind::Exchange) {
      const int x = t.site;
      delta = (G((x + 1) / nn) - G(x / nn)) * (eta[x] - eta[x + 1]);
    } else {
      delta = G(t.site / nn) * (1.0 - 2.0 * eta[t.site]);
    }
    drift += t.rate * delta / nn;
  }
  return nn * nn * drift;
}

double dynkin_residual(const DynkinRecord& record, double t) {
  if (record.times.empty() || record.pairing.size() != record.times.size() ||
      record.integral.size() != record.times.size())
    throw InputError("Dynkin record is empty or inconsistent");
  const auto it = std::find(record.times.begin(), record.times.end(), t);
  if (it == record.times.end()) throw InputError("Dynkin record has no sample at the requested time");
  const auto k = static_cast<std::size_t>(it - record.times.begin());
  return record.pairing[k] - record.pairing[0] -
         (record.integral[k].compensator() - record.integral[0].compensator());
}

DynkinRecord dynkin_record_from_samples(const std::vector<double>& times,
                                        const std::vector<double>& pairing,
                                        const std::vector<DynkinTerms>& integrand) {
  if (times.size() != pairing.size() || times.size() != integrand.size() || times.empty())
    throw InputError("sample arrays must be non-empty and of equal length");
  for (std::size_t k = 1; k < times.size(); ++k)
    if (!(times[k] > times[k - 1])) throw InputError("sample times must be strictly increasing");
  DynkinRecord rec;
  rec.mode = QuadratureMode::SampledTrapezoid;
  rec.times = times;
  rec.pairing = pairing;
  rec.integral.resize(times.size());
  for (std::size_t k = 1; k < times.size(); ++k) {
    DynkinTerms step = integrand[k - 1];
    step += integrand[k];
    rec.integral[k] = rec.integral[k - 1];
    rec.integral[k] += step.scaled(0.5 * (times[k] - times[k - 1]));
  }
  return rec;
}

bool detect_blocked(const Configuration& eta, int big_m, Dynamics dynamics) {
  if (dynamics != Dynamics::PurePorous)
    throw ContractViolation("blocked detection is defined for pure porous dynamics only");
  const int n = eta.n();
  auto at = [&](int y) { return (y >= 1 && y <= n - 1) ? eta[y] : 0.0; };
  for (int x = 1; x <= n - 2; ++x) {
    if (at(x) == at(x + 1)) continue;
    const double c = big_m == 3 ? at(x - 2) * at(x - 1) + at(x - 1) * at(x + 2) + at(x + 2) * at(x + 3)
                                : at(x - 1) + at(x + 2);
    if (c > 0.0) return false;
  }
  return true;
}

}  // namespace pmm
