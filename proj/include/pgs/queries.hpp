#pragma once

#include <string>
#include <vector>

#include "pgs/refinement.hpp"

namespace pgs {

enum class Verdict { kStable, kUnstable, kInconclusive };

struct QueryOptions {
  double gamma = 1.5707963267948966;  // pi/2
  int q_max = 9;
  double eta = 0.0;     // contact-normal uncertainty, radians
  double s_cap = 100.0;
  BnbOptions bnb;
  std::ostream* trace = nullptr;
};

// Copy of the grasp with replacement commanded torques (validated >= 0).
GraspModel with_torques(const GraspModel& grasp, const VecX& commanded);

// Euclidean normalization of a mixed force/torque direction; torques are
// converted to force-equivalents by the characteristic length (meters)
// before taking the norm. Throws on a zero direction.
Vec6 normalize_direction(const Vec6& direction,
                         double characteristic_length = 1.0);

struct StabilityResult {
  Verdict verdict = Verdict::kInconclusive;
  RefinementOutcome detail;
};

// Can the grasp hold the given disturbance without changing its commands?
StabilityResult check_stability(const GraspModel& grasp,
                                const VecX& commanded_torques,
                                const Vec6& wrench,
                                const QueryOptions& options = {},
                                bool mdp_enabled = true);

enum class MaxDisturbanceStatus {
  kMaximum,         // s* attained below the cap
  kExceedsCap,      // stable all the way to s_cap
  kUnstableAtRest,  // no equilibrium even with zero disturbance
  kInconclusive,
};

struct MaxDisturbanceResult {
  MaxDisturbanceStatus status = MaxDisturbanceStatus::kInconclusive;
  double s_star = 0.0;
  RefinementOutcome detail;
};

// Largest scale s such that s * direction is passively resisted.
MaxDisturbanceResult max_disturbance(const GraspModel& grasp,
                                     const VecX& commanded_torques,
                                     const Vec6& direction,
                                     const QueryOptions& options = {});

struct OptimalTorquesResult {
  Verdict verdict = Verdict::kInconclusive;  // kUnstable: no torques work
  VecX torques;
  double max_torque = 0.0;
  RefinementOutcome detail;
};

// Commanded torques minimizing the largest single actuator command subject
// to stability under the given wrench.
OptimalTorquesResult optimal_torques(const GraspModel& grasp,
                                     const Vec6& wrench,
                                     const QueryOptions& options = {});

struct ForceMapEntry {
  double theta_deg = 0.0;
  double s_star = 0.0;
  MaxDisturbanceStatus status = MaxDisturbanceStatus::kInconclusive;
};

struct ForceMapResult {
  std::vector<ForceMapEntry> entries;  // ordered by theta
  std::string to_csv() const;          // header: theta_deg,s_star,status
};

// Maximum resistible disturbance along cos(theta) u + sin(theta) v for
// theta over a full turn at the given resolution. Directions are evaluated
// independently; `jobs` > 1 distributes them across threads with the output
// order fixed by theta.
ForceMapResult force_map(const GraspModel& grasp, const VecX& commanded_torques,
                         const Vec6& plane_u, const Vec6& plane_v,
                         double resolution_deg,
                         const QueryOptions& options = {}, int jobs = 1);

struct AblationResult {
  Verdict verdict = Verdict::kInconclusive;
  bool has_witness = false;
  EquilibriumSolution witness;
  long nodes = 0;
};

// Stability check with the friction-direction (maximum dissipation)
// machinery removed: friction magnitude stays bounded by the cone but its
// direction is unconstrained. One solve at the coarse cone; no refinement
// loop is needed because no sector ever becomes active.
AblationResult ablation_no_mdp(const GraspModel& grasp,
                               const VecX& commanded_torques,
                               const Vec6& wrench,
                               const QueryOptions& options = {});

enum class ContactState { kSeparated, kSticking, kSliding };

struct ContactDiagnostic {
  ContactState state = ContactState::kSeparated;
  double normal_force = 0.0;
  double normal_gap = 0.0;
  Eigen::Vector2d tangential_force = Eigen::Vector2d::Zero();
  Eigen::Vector2d tangential_motion = Eigen::Vector2d::Zero();
  double dissipation = 0.0;  // -c_t . d_t, negative means energy is created
};

// Per-contact classification of a witness, with the frictional dissipation.
std::vector<ContactDiagnostic> diagnose(const GraspModel& grasp,
                                        const EquilibriumSolution& solution);

// Key-value witness dump used by the CLI result output.
std::string describe_witness(const GraspModel& grasp,
                             const EquilibriumSolution& solution);

}  // namespace pgs
