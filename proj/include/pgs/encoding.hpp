#pragma once

#include <vector>

#include "pgs/friction_cone.hpp"
#include "pgs/grasp_model.hpp"
#include "pgs/mip.hpp"

namespace pgs {

enum class WrenchMode { kFixed, kScaled };
enum class TorqueMode { kFixed, kVariable };

// What to solve for: a fixed disturbance or a scaled one along a direction,
// with commanded torques either given or left as decision variables.
struct QueryConfig {
  WrenchMode wrench_mode = WrenchMode::kFixed;
  Vec6 wrench = Vec6::Zero();      // fixed mode
  Vec6 direction = Vec6::Zero();   // scaled mode, unit norm
  TorqueMode torque_mode = TorqueMode::kFixed;
  double eta = 0.0;                // contact-normal uncertainty, radians
  bool mdp_enabled = true;
  double s_cap = 100.0;            // ceiling on the disturbance scale

  static QueryConfig fixed_wrench(const Vec6& w, double eta = 0.0,
                                  bool mdp = true) {
    QueryConfig c;
    c.wrench = w;
    c.eta = eta;
    c.mdp_enabled = mdp;
    return c;
  }
  static QueryConfig scaled_wrench(const Vec6& direction, double s_cap,
                                   double eta = 0.0) {
    QueryConfig c;
    c.wrench_mode = WrenchMode::kScaled;
    c.direction = direction;
    c.s_cap = s_cap;
    c.eta = eta;
    return c;
  }
};

// Variable index bookkeeping for one encoded program.
struct VariableLayout {
  int m = 0;
  int l = 0;
  std::vector<int> c_t1, c_t2, c_n;  // per contact
  std::vector<int> d_t1, d_t2, d_n;
  std::vector<std::vector<int>> beta;   // per contact, per edge
  std::vector<std::vector<int>> alpha;  // empty when the MDP is disabled
  int r0 = -1;                       // six consecutive twist variables
  std::vector<int> q, tau;
  int s = -1;                        // scaled-wrench magnitude
  std::vector<int> tau_c;            // decision-variable torques
  int t_aux = -1;                    // min-max torque bound
};

struct EncodedProgram {
  MixedIntegerProgram mip;
  VariableLayout layout;
  std::vector<FrictionCone> cones;  // snapshot used by the encoding
  QueryConfig config;
};

// Builds the piecewise-convex program: equilibrium and motion equalities,
// cone representations with SOS2 coupling, and one disjunction per contact
// normal, per contact friction state and per joint. Throws on dimension
// mismatches or an eta > 0 request without the MDP machinery.
EncodedProgram encode(const GraspModel& grasp,
                      const std::vector<FrictionCone>& cones,
                      const QueryConfig& config);

// Adds the min-max commanded-torque objective: an auxiliary bound t with
// tau_c_j <= t for every joint and objective "minimize t". Requires a
// program encoded with TorqueMode::kVariable.
void encode_minmax_torque(EncodedProgram& program);

// Reads an accepted assignment back into named fields, recomputes the
// relative motion from the object/joint motions and verifies the
// equilibrium residuals and sign constraints. Throws std::runtime_error on
// internal inconsistency.
EquilibriumSolution extract_solution(const GraspModel& grasp,
                                     const EncodedProgram& program,
                                     const VecX& assignment,
                                     double feas_tol = kFeasTol);

}  // namespace pgs
