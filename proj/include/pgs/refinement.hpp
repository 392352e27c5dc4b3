#pragma once

#include <iosfwd>
#include <vector>

#include "pgs/encoding.hpp"

namespace pgs {

enum class AnalysisStatus { kFeasible, kInfeasible, kInconclusive };

struct RoundRecord {
  int round = 0;              // 1-based
  double objective = 0.0;     // 0 for pure feasibility rounds
  std::vector<double> delta;  // per-contact active sector angle, 0 if none
  int total_edges = 0;        // across all cones after this round's solve
  long nodes = 0;
  double ms = 0.0;
};

struct RefinementOutcome {
  AnalysisStatus status = AnalysisStatus::kInconclusive;
  int infeasible_round = -1;  // round that proved infeasibility; no finer
                              // encoding was attempted past it
  EquilibriumSolution solution;          // valid when feasible
  std::vector<FrictionCone> final_cones;  // cones of the last solved round
  double objective = 0.0;                // final-round objective
  VecX assignment;                       // raw final assignment
  std::vector<RoundRecord> rounds;

  bool feasible() const { return status == AnalysisStatus::kFeasible; }
};

struct AnalyzeOptions {
  double gamma = 1.5707963267948966;  // pi/2
  int q_max = 9;
  BnbOptions bnb;
  std::ostream* trace = nullptr;  // "round,objective,max_delta_deg,nodes,ms"
  // When set, skip the successive loop and solve one encoding whose cones
  // are uniformly refined to this depth. Used for baseline comparisons.
  int uniform_depth = 0;
};

// Successive relaxation: solve the current encoding, locate the active
// sector at every contact, bisect the sectors that are still wider than
// gamma / 2^q_max, and repeat. Stops at the first infeasible round (the
// relaxation only ever shrinks, so the exact problem is infeasible too) or
// when no contact needs refinement. Solver caps surface as kInconclusive,
// never as a verdict.
RefinementOutcome analyze(const GraspModel& grasp, const QueryConfig& config,
                          const AnalyzeOptions& options = {});

}  // namespace pgs
