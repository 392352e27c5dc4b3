#include "pgs/refinement.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>

namespace pgs {

namespace {

struct SectorTag {
  double midpoint;  // angular midpoint, identifies the sector across edits
  double angle;     // sector angle when tagged
};

// Angular midpoint of a sector (handles the wrap-around sector).
double sector_midpoint(const FrictionCone& cone, int s) {
  const double a = cone.edge_angle(s);
  return a + 0.5 * cone.sector_angle(s);
}

}  // namespace

RefinementOutcome analyze(const GraspModel& grasp, const QueryConfig& config,
                          const AnalyzeOptions& options) {
  RefinementOutcome outcome;
  const int m = grasp.num_contacts();
  const double min_angle = options.gamma / std::exp2(options.q_max);

  std::vector<FrictionCone> cones;
  cones.reserve(m);
  for (int i = 0; i < m; ++i) {
    cones.push_back(options.uniform_depth > 0
                        ? FrictionCone::uniform(options.gamma, options.q_max,
                                                options.uniform_depth)
                        : FrictionCone::initial(options.gamma, options.q_max));
  }

  // Hard backstop: every round that continues bisects at least one concrete
  // sector interval, and each interval splits at most once.
  const long k0 = std::llround(2.0 * std::numbers::pi / options.gamma);
  const long max_rounds =
      options.uniform_depth > 0
          ? 1
          : 2 + static_cast<long>(m) * k0 *
                    ((1L << options.q_max) - 1);

  for (long round = 1; round <= max_rounds; ++round) {
    EncodedProgram program = encode(grasp, cones, config);
    if (config.torque_mode == TorqueMode::kVariable) {
      encode_minmax_torque(program);
    }
    const SolveOutcome solve = solve_mip(program.mip, options.bnb);

    RoundRecord record;
    record.round = static_cast<int>(round);
    record.nodes = solve.node_count;
    record.ms = solve.wall_ms;
    record.delta.assign(m, 0.0);
    for (const auto& cone : cones) record.total_edges += cone.edge_count();

    if (solve.status == MipStatus::kInfeasible) {
      outcome.rounds.push_back(record);
      if (options.trace) {
        (*options.trace) << round << ",infeasible,0," << solve.node_count
                         << "," << solve.wall_ms << "\n";
      }
      outcome.status = AnalysisStatus::kInfeasible;
      outcome.infeasible_round = static_cast<int>(round);
      outcome.final_cones = std::move(cones);
      return outcome;
    }
    if (solve.status != MipStatus::kOptimal) {
      outcome.rounds.push_back(record);
      outcome.status = AnalysisStatus::kInconclusive;
      outcome.final_cones = std::move(cones);
      return outcome;
    }

    record.objective = solve.objective;
    EquilibriumSolution solution =
        extract_solution(grasp, program, solve.assignment);

    // Locate the active sector(s) at every contact; both the force and the
    // motion weights drive refinement (their sectors can differ when one of
    // them is zero). A contact with zero friction force satisfies the
    // dissipation constraint exactly at any sector width, so its motion
    // weights alone do not trigger refinement unless the worst-case-normal
    // correction (eta > 0) depends on them.
    bool refinement_needed = false;
    std::vector<std::vector<SectorTag>> pending(m);
    double max_delta = 0.0;
    for (int i = 0; i < m; ++i) {
      const FrictionCone& cone = cones[i];
      const bool force_active =
          solution.friction_weights[i].cwiseAbs().maxCoeff() > 1e-9;
      std::vector<const VecX*> weight_sets = {&solution.friction_weights[i]};
      if (!solution.motion_weights.empty() &&
          (force_active || config.eta > 0.0)) {
        weight_sets.push_back(&solution.motion_weights[i]);
      }
      double delta_i = 0.0;
      for (const VecX* weights : weight_sets) {
        for (const ActiveSector& active : refinement_sectors(cone, *weights)) {
          delta_i = std::max(delta_i, active.delta);
          if (active.delta > min_angle * (1.0 + 1e-12)) {
            pending[i].push_back(SectorTag{
                sector_midpoint(cone, active.sector), active.delta});
          }
        }
      }
      record.delta[i] = delta_i;
      max_delta = std::max(max_delta, delta_i);
    }

    for (int i = 0; i < m; ++i) {
      for (const SectorTag& tag : pending[i]) {
        // Bisections for the other weight set may already have split this
        // sector; re-locate it and descend toward the target depth.
        const int target = target_depth(tag.angle, options.gamma);
        while (true) {
          const int s = cones[i].sector_containing(tag.midpoint);
          if (cones[i].sector_depth(s) >= target) break;
          if (cones[i].refine_sector(s) ==
              FrictionCone::RefineStatus::kAtMaxDepth) {
            break;
          }
          refinement_needed = true;
        }
      }
    }

    outcome.rounds.push_back(record);
    if (options.trace) {
      (*options.trace) << round << "," << record.objective << ","
                       << max_delta * 180.0 / std::numbers::pi << ","
                       << solve.node_count << "," << solve.wall_ms << "\n";
    }

    if (!refinement_needed) {
      outcome.status = AnalysisStatus::kFeasible;
      outcome.solution = std::move(solution);
      outcome.objective = solve.objective;
      outcome.assignment = solve.assignment;
      outcome.final_cones = std::move(cones);
      return outcome;
    }
  }

  outcome.status = AnalysisStatus::kInconclusive;
  outcome.final_cones = std::move(cones);
  return outcome;
}

}  // namespace pgs
