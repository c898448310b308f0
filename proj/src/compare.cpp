#include <chrono>
#include <cmath>
#include <stdexcept>

#include "pmm/errors.hpp"
#include "pmm/io.hpp"

namespace pmm {

namespace {

struct MeanSe {
  double mean = 0.0;
  double se = 0.0;
};

// Replica mean and its standard error (0 for a single replica).
MeanSe mean_se(const std::vector<double>& v) {
  MeanSe out;
  for (double x : v) out.mean += x;
  out.mean /= static_cast<double>(v.size());
  if (v.size() > 1) {
    double ss = 0.0;
    for (double x : v) ss += (x - out.mean) * (x - out.mean);
    out.se = std::sqrt(ss / static_cast<double>(v.size() - 1) / static_cast<double>(v.size()));
  }
  return out;
}

// Average of f over the sites of box k, f evaluated at y / n.
template <typename F>
double box_of(int n, int width, int k, const F& f) {
  double sum = 0.0;
  for (int y = 1 + k * width; y <= (k + 1) * width; ++y) sum += f(static_cast<double>(y) / n);
  return sum / width;
}

LadderEntry compare_one(const RunConfig& c, int n, const ProfileFn& g, const Field& field) {
  ModelParams p = c.model;
  p.n = n;
  const int w = c.coarse_width(n);
  const std::vector<double> times = c.times();

  ObserverSpec spec;
  spec.sample_times = times;
  spec.profile = false;
  spec.box_widths = {w};
  spec.boundary = true;
  spec.time_average_from = c.stationary_from();

  const auto R = static_cast<std::size_t>(c.replicas);
  std::vector<ObservationRecord> recs(R);
  for_each_replica(R, [&](std::size_t r) {
    recs[r] = simulate(p, g, spec, c.seed, c.replica_offset + r, c.dynamics);
  }, static_cast<unsigned>(c.threads));
  for (const auto& rec : recs)
    if (rec.absorbed)
      throw AbsorbedState("replica " + std::to_string(rec.replica) + " at n=" + std::to_string(n) +
                          " was absorbed at t=" + std::to_string(rec.absorbed_time));

  LadderEntry e;
  e.n = n;
  e.width = w;
  const int boxes = (n - 1) / w;
  for (int k = 0; k < boxes; ++k) e.centers.push_back(coarse_center(n, w, k));

  std::vector<double> per(R);
  for (std::size_t ti = 0; ti < times.size(); ++ti) {
    const DensityGrid& grid = field.samples[ti];
    ComparisonRow row;
    row.t = times[ti];
    std::vector<double> emp, pde;
    for (int k = 0; k < boxes; ++k) {
      for (std::size_t r = 0; r < R; ++r) per[r] = recs[r].samples[ti].boxes[0][static_cast<std::size_t>(k)];
      const MeanSe ms = mean_se(per);
      const double rho = box_of(n, w, k, [&](double u) { return grid.at(u); });
      const double d = std::abs(ms.mean - rho);
      row.l1 += d;
      row.linf = std::max(row.linf, d);
      row.se_mean += ms.se;
      row.se_max = std::max(row.se_max, ms.se);
      emp.push_back(ms.mean);
      pde.push_back(rho);
    }
    row.l1 /= boxes;
    row.se_mean /= boxes;
    e.rows.push_back(row);
    e.empirical.push_back(std::move(emp));
    e.pde.push_back(std::move(pde));
    e.mean_l1 += row.l1;
  }
  e.mean_l1 /= static_cast<double>(e.rows.size());

  for (int k = 0; k < boxes; ++k) {
    double avg = 0.0;
    for (const auto& rec : recs) {
      double s = 0.0;
      for (int y = 1 + k * w; y <= (k + 1) * w; ++y) s += rec.time_average[static_cast<std::size_t>(y - 1)];
      avg += s / w;
    }
    avg /= static_cast<double>(R);
    const double bar = box_of(n, w, k, [&](double u) { return stationary_profile(field.bc, u); });
    e.time_average.push_back(avg);
    e.stationary.push_back(bar);
    const double d = std::abs(avg - bar);
    e.stationary_l1 += d;
    e.stationary_linf = std::max(e.stationary_linf, d);
  }
  e.stationary_l1 /= boxes;

  const double horizon = times.back();
  std::vector<double> flux(R);
  double flips = 0.0;
  for (std::size_t r = 0; r < R; ++r) {
    const Sample& last = recs[r].samples.back();
    flux[r] = (last.left_current - last.right_current) / (n * horizon);
    flips += static_cast<double>(last.flips.net()) / (n * horizon);
    e.events += recs[r].events;
  }
  const MeanSe fl = mean_se(flux);
  e.flux_current = fl.mean;
  e.flux_current_se = fl.se;
  e.flux_flips = flips / static_cast<double>(R);
  return e;
}

}  // namespace

ComparisonReport compare(const RunConfig& config) {
  config.validate();
  const auto start = std::chrono::steady_clock::now();
  ComparisonReport rep;
  rep.config = config;
  rep.bc = config.bc();
  const ProfileFn g = parse_profile(config.initial, rep.bc);
  const Field field = solve(g, rep.bc, config.times().back(), config.J, config.times());
  rep.pde_dt = field.dt;
  for (int n : config.ladder()) rep.ladder.push_back(compare_one(config, n, g, field));
  for (std::size_t i = 1; i < rep.ladder.size(); ++i)
    if (rep.ladder[i].mean_l1 > rep.ladder[i - 1].mean_l1) rep.l1_nonincreasing = false;
  rep.runtime_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return rep;
}

}  // namespace pmm
