#pragma once

// Mobile-cluster transport: an explicit sequence of positive-rate exchanges
// that moves one particle from `source` to `target` and leaves every other
// site as it was. Two helper particles taken from a window are brought
// together with SSEP jumps, the resulting cluster carries the particle with
// constrained (PMM) jumps only, and the helpers are put back with SSEP jumps.

#include <array>
#include <string>
#include <vector>

#include "pmm/analysis.hpp"
#include "pmm/model.hpp"

namespace pmm {

enum class MovePhase { SsepAssemble, PmmTransport, SsepRestore };

const char* to_string(MovePhase phase);

struct Move {
  int bond = 0;  // exchange of sites bond, bond+1
  MovePhase phase = MovePhase::PmmTransport;
  // Rate of the generator component the move relies on, evaluated on the
  // configuration just before the move: n^{a-2} * ssep for SSEP phases and
  // the constrained exchange rate for PMM transport. Always > 0.
  double certificate = 0.0;
};

struct MovePlan {
  Configuration initial;
  Configuration final_config;
  int source = 0;
  int target = 0;
  BoxSpec window;
  std::array<int, 2> helpers{};
  std::vector<Move> moves;
  // |target - source| plus the number of sites strictly between the source
  // and the window (0 when the window touches or contains the source).
  int distance = 0;

  int ssep_moves() const;
  int pmm_moves() const;
  int ssep_budget() const { return 4 * window.ell; }
  int pmm_budget() const { return 6 * (window.ell + distance); }
};

// Builds the plan for the M = 2 constraint. Preconditions: source occupied,
// target empty, window inside the bulk. Helpers are the two window particles
// (other than the source) nearest to the source, ties toward the smaller
// site. Throws InsufficientDensity with fewer than two helpers and InputError
// for the other precondition failures.
MovePlan mobile_cluster_path(const Configuration& config, int source, int target,
                             const BoxSpec& window, const ModelParams& params);

struct PlanCheck {
  bool ok = false;
  std::string failure;
  Configuration final_config;
};

// Replays the plan from its initial configuration, recomputing every
// certificate and checking that the end state is the initial configuration
// with source and target exchanged.
PlanCheck verify_plan(const MovePlan& plan, const ModelParams& params);

}  // namespace pmm
