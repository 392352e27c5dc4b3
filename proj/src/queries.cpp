#include "pgs/queries.hpp"

#include <atomic>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace pgs {

namespace {

AnalyzeOptions to_analyze_options(const QueryOptions& q) {
  AnalyzeOptions a;
  a.gamma = q.gamma;
  a.q_max = q.q_max;
  a.bnb = q.bnb;
  a.trace = q.trace;
  return a;
}

const char* status_word(MaxDisturbanceStatus s) {
  switch (s) {
    case MaxDisturbanceStatus::kMaximum: return "ok";
    case MaxDisturbanceStatus::kExceedsCap: return "exceeds_cap";
    case MaxDisturbanceStatus::kUnstableAtRest: return "unstable_at_rest";
    default: return "inconclusive";
  }
}

}  // namespace

GraspModel with_torques(const GraspModel& grasp, const VecX& commanded) {
  return GraspModel::create(grasp.contacts, grasp.jacobian, commanded,
                            grasp.wrench);
}

Vec6 normalize_direction(const Vec6& direction, double characteristic_length) {
  Vec6 scaled = direction;
  scaled.tail<3>() /= characteristic_length;
  const double n = scaled.norm();
  if (!(n > 0.0)) throw std::invalid_argument("zero disturbance direction");
  return direction / n;
}

StabilityResult check_stability(const GraspModel& grasp,
                                const VecX& commanded_torques,
                                const Vec6& wrench,
                                const QueryOptions& options,
                                bool mdp_enabled) {
  const GraspModel g = with_torques(grasp, commanded_torques);
  QueryConfig config = QueryConfig::fixed_wrench(
      wrench, mdp_enabled ? options.eta : 0.0, mdp_enabled);
  StabilityResult result;
  result.detail = analyze(g, config, to_analyze_options(options));
  switch (result.detail.status) {
    case AnalysisStatus::kFeasible: result.verdict = Verdict::kStable; break;
    case AnalysisStatus::kInfeasible:
      result.verdict = Verdict::kUnstable;
      break;
    default: result.verdict = Verdict::kInconclusive; break;
  }
  return result;
}

MaxDisturbanceResult max_disturbance(const GraspModel& grasp,
                                     const VecX& commanded_torques,
                                     const Vec6& direction,
                                     const QueryOptions& options) {
  const GraspModel g = with_torques(grasp, commanded_torques);
  QueryConfig config = QueryConfig::scaled_wrench(
      normalize_direction(direction), options.s_cap, options.eta);
  MaxDisturbanceResult result;
  result.detail = analyze(g, config, to_analyze_options(options));
  switch (result.detail.status) {
    case AnalysisStatus::kFeasible: {
      result.s_star = result.detail.objective;
      const bool capped =
          result.s_star >= options.s_cap * (1.0 - 1e-9) - 1e-12;
      result.status = capped ? MaxDisturbanceStatus::kExceedsCap
                             : MaxDisturbanceStatus::kMaximum;
      break;
    }
    case AnalysisStatus::kInfeasible:
      // Not even the unloaded grasp admits an equilibrium.
      result.status = MaxDisturbanceStatus::kUnstableAtRest;
      result.s_star = 0.0;
      break;
    default:
      result.status = MaxDisturbanceStatus::kInconclusive;
      break;
  }
  return result;
}

OptimalTorquesResult optimal_torques(const GraspModel& grasp,
                                     const Vec6& wrench,
                                     const QueryOptions& options) {
  QueryConfig config = QueryConfig::fixed_wrench(wrench, options.eta, true);
  config.torque_mode = TorqueMode::kVariable;
  OptimalTorquesResult result;
  result.detail = analyze(grasp, config, to_analyze_options(options));
  switch (result.detail.status) {
    case AnalysisStatus::kFeasible: {
      result.verdict = Verdict::kStable;
      const VariableLayout probe_layout = [&] {
        // Layout indices are deterministic for a given cone set; rebuild
        // the final-round encoding to read the torque variables back.
        EncodedProgram ep = encode(grasp, result.detail.final_cones, config);
        return ep.layout;
      }();
      result.torques.resize(grasp.num_joints);
      for (int j = 0; j < grasp.num_joints; ++j) {
        result.torques[j] =
            std::max(0.0, result.detail.assignment[probe_layout.tau_c[j]]);
      }
      result.max_torque = result.detail.objective;
      break;
    }
    case AnalysisStatus::kInfeasible:
      result.verdict = Verdict::kUnstable;
      break;
    default:
      result.verdict = Verdict::kInconclusive;
      break;
  }
  return result;
}

std::string ForceMapResult::to_csv() const {
  std::ostringstream out;
  out << "theta_deg,s_star,status\n";
  for (const auto& e : entries) {
    char line[128];
    std::snprintf(line, sizeof line, "%.6g,%.6g,%s\n", e.theta_deg, e.s_star + 0.0,
                  status_word(e.status));
    out << line;
  }
  return out.str();
}

ForceMapResult force_map(const GraspModel& grasp,
                         const VecX& commanded_torques, const Vec6& plane_u,
                         const Vec6& plane_v, double resolution_deg,
                         const QueryOptions& options, int jobs) {
  if (!(resolution_deg > 0.0)) {
    throw std::invalid_argument("force_map: resolution must be positive");
  }
  const int count = static_cast<int>(std::llround(360.0 / resolution_deg));
  ForceMapResult map;
  map.entries.resize(count);

  QueryOptions per_direction = options;
  per_direction.trace = nullptr;  // per-direction traces would interleave

  const auto evaluate = [&](int t) {
    const double theta_deg = t * resolution_deg;
    const double theta = theta_deg * std::numbers::pi / 180.0;
    const Vec6 dir = std::cos(theta) * plane_u + std::sin(theta) * plane_v;
    const MaxDisturbanceResult r =
        max_disturbance(grasp, commanded_torques, dir, per_direction);
    map.entries[t] = ForceMapEntry{theta_deg, r.s_star, r.status};
  };

  if (jobs <= 1) {
    for (int t = 0; t < count; ++t) evaluate(t);
  } else {
    std::atomic<int> next{0};
    std::vector<std::thread> workers;
    const int n_workers = std::min(jobs, count);
    workers.reserve(n_workers);
    for (int wk = 0; wk < n_workers; ++wk) {
      workers.emplace_back([&] {
        for (int t = next.fetch_add(1); t < count; t = next.fetch_add(1)) {
          evaluate(t);
        }
      });
    }
    for (auto& th : workers) th.join();
  }
  return map;
}

AblationResult ablation_no_mdp(const GraspModel& grasp,
                               const VecX& commanded_torques,
                               const Vec6& wrench,
                               const QueryOptions& options) {
  const GraspModel g = with_torques(grasp, commanded_torques);
  const QueryConfig config =
      QueryConfig::fixed_wrench(wrench, 0.0, /*mdp=*/false);
  std::vector<FrictionCone> cones(
      g.num_contacts(), FrictionCone::initial(options.gamma, options.q_max));
  const EncodedProgram program = encode(g, cones, config);
  const SolveOutcome solve = solve_mip(program.mip, options.bnb);
  AblationResult result;
  result.nodes = solve.node_count;
  switch (solve.status) {
    case MipStatus::kOptimal:
      result.verdict = Verdict::kStable;
      result.witness = extract_solution(g, program, solve.assignment);
      result.has_witness = true;
      break;
    case MipStatus::kInfeasible:
      result.verdict = Verdict::kUnstable;
      break;
    default:
      result.verdict = Verdict::kInconclusive;
      break;
  }
  return result;
}

std::vector<ContactDiagnostic> diagnose(const GraspModel& grasp,
                                        const EquilibriumSolution& solution) {
  const VecX d = relative_contact_motion(solution.object_motion,
                                         solution.joint_motions,
                                         grasp.grasp_map, grasp.jacobian);
  std::vector<ContactDiagnostic> diags;
  for (int i = 0; i < grasp.num_contacts(); ++i) {
    ContactDiagnostic cd;
    cd.tangential_force = solution.contact_forces.segment<2>(3 * i);
    cd.normal_force = solution.contact_forces[3 * i + 2];
    cd.tangential_motion = d.segment<2>(3 * i);
    cd.normal_gap = d[3 * i + 2];
    cd.dissipation = -cd.tangential_force.dot(cd.tangential_motion);
    if (cd.tangential_motion.norm() > kMotionTol) {
      cd.state = ContactState::kSliding;
    } else if (cd.normal_force > kFeasTol) {
      cd.state = ContactState::kSticking;
    } else {
      cd.state = ContactState::kSeparated;
    }
    diags.push_back(cd);
  }
  return diags;
}

std::string describe_witness(const GraspModel& grasp,
                             const EquilibriumSolution& solution) {
  const auto diags = diagnose(grasp, solution);
  std::ostringstream out;
  out.precision(6);
  for (int i = 0; i < grasp.num_contacts(); ++i) {
    const auto& cd = diags[i];
    const char* state = cd.state == ContactState::kSliding    ? "sliding"
                        : cd.state == ContactState::kSticking ? "sticking"
                                                              : "separated";
    out << "contact " << i << ": " << state << " cn=" << cd.normal_force
        << " ct=(" << cd.tangential_force.x() << ","
        << cd.tangential_force.y() << ")"
        << " dissipation=" << cd.dissipation << "\n";
  }
  out << "joint q = [" << solution.joint_motions.transpose() << "]\n";
  out << "joint tau = [" << solution.joint_torques.transpose() << "]\n";
  out << "object motion = [" << solution.object_motion.transpose() << "]\n";
  return out.str();
}

}  // namespace pgs
