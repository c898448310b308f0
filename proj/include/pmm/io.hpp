#pragma once

// Run configuration (key=value text), result files and the command-line
// entry point shared by the pmm executable and the tests.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "pmm/analysis.hpp"
#include "pmm/engine.hpp"
#include "pmm/mobility.hpp"
#include "pmm/model.hpp"
#include "pmm/pme.hpp"

namespace pmm {

enum class Mode { Simulate, Solve, Stationary, Compare, Diagnose };

const char* to_string(Mode mode);
Mode parse_mode(const std::string& name);  // UsageError on unknown names

struct RunConfig {
  Mode mode = Mode::Simulate;
  ModelParams model;
  // Explicit Robin coefficient. When absent the boundary condition follows
  // the regime of theta (see regime_bc).
  std::optional<double> kappa;
  int J = 256;
  double T = 1.0;
  int sample_count = 10;            // uniform sample times when sample_times is empty
  std::vector<double> sample_times;
  int replicas = 1;
  std::uint64_t seed = 1;
  std::uint64_t replica_offset = 0;  // replica r draws from stream replica_offset + r
  int width = 0;                     // coarse width; 0 means max(floor(n/50), 1)
  std::vector<int> n_ladder;         // empty means {model.n}
  std::string initial = "const:0.5";
  std::optional<double> average_from;  // start of the stationary time average
  Dynamics dynamics = Dynamics::Full;
  int threads = 0;  // replica workers, 0 = hardware concurrency; never changes results
  // diagnose
  std::string configuration;  // explicit '0'/'1' occupations; empty = draw from initial
  int source = 0;
  int target = 0;
  int window_x = 0;
  int window_ell = 0;
  BoxSide window_side = BoxSide::Right;
  std::string out = ".";

  // Throws UsageError naming the first invalid key.
  void validate() const;
  BoundaryCondition bc() const;
  std::vector<double> times() const;
  int coarse_width(int n) const;
  std::vector<int> ladder() const;
  double stationary_from() const { return average_from ? *average_from : 0.5 * T; }

  friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

// theta < 1 -> Dirichlet(alpha, beta); theta = 1 -> Robin(kappa = m);
// theta > 1 -> Robin(kappa = 0). An explicit kappa selects Robin(kappa).
BoundaryCondition regime_bc(const ModelParams& params, std::optional<double> kappa = {});

// Whitespace-separated key=value pairs, '#' starts a comment. Unknown keys,
// malformed values and constraint violations throw UsageError.
RunConfig parse_config(const std::string& text);
// One key per line, every key present, doubles in shortest round-trip form.
std::string emit_config(const RunConfig& config);

// Initial profile specs: const:c, linear:a:b, step:u0:a:b, sine:c:amp,
// stationary (the closed-form stationary profile of bc).
ProfileFn parse_profile(const std::string& spec, const BoundaryCondition& bc);

struct ComparisonRow {
  double t = 0.0;
  double l1 = 0.0;    // mean over boxes of |empirical - pde|
  double linf = 0.0;  // max over boxes
  double se_mean = 0.0;  // Monte Carlo standard error, averaged over boxes
  double se_max = 0.0;
};

struct LadderEntry {
  int n = 0;
  int width = 0;
  std::vector<double> centers;                 // macroscopic box centres
  std::vector<ComparisonRow> rows;             // one per sample time
  std::vector<std::vector<double>> empirical;  // replica mean, per time and box
  std::vector<std::vector<double>> pde;        // PDE box average, per time and box
  std::vector<double> time_average;            // replica mean of time-averaged boxes
  std::vector<double> stationary;              // closed form, box averaged
  double stationary_l1 = 0.0;
  double stationary_linf = 0.0;
  // Net inflow j_{0,1} - j_{n-1,n} in mass units per unit macroscopic time,
  // from the integrated instantaneous currents and from counted flips.
  double flux_current = 0.0;
  double flux_flips = 0.0;
  double flux_current_se = 0.0;
  double mean_l1 = 0.0;  // average of rows[k].l1
  std::int64_t events = 0;
};

struct ComparisonReport {
  RunConfig config;
  BoundaryCondition bc;
  double pde_dt = 0.0;
  std::vector<LadderEntry> ladder;
  bool l1_nonincreasing = true;  // along the ladder; reported, never enforced
  double runtime_seconds = 0.0;
};

// Replica-averaged simulation against the PDE of the regime's boundary
// condition, for each n of the ladder.
ComparisonReport compare(const RunConfig& config);

// JSON document of a move plan (moves, phases, certificates, budgets).
std::string to_json(const MovePlan& plan);

// Dispatches config.mode, writes artifacts into config.out and returns the
// exit status: 0 success, 1 runtime failure, 2 usage error. Failures also
// write error.json into config.out (when it exists) and to stderr.
int run(const RunConfig& config);
// Same, reporting a usage error found before a RunConfig exists.
int report_failure(const std::string& out_dir, const std::exception& error);

}  // namespace pmm
