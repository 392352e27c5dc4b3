#include "pgs/encoding.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "pgs/robustness.hpp"

namespace pgs {

namespace {

std::string idx(const std::string& base, int i) {
  return base + "_" + std::to_string(i);
}
std::string idx2(const std::string& base, int i, int e) {
  return base + "_" + std::to_string(i) + "_" + std::to_string(e);
}

}  // namespace

EncodedProgram encode(const GraspModel& grasp,
                      const std::vector<FrictionCone>& cones,
                      const QueryConfig& config) {
  const int m = grasp.num_contacts();
  const int l = grasp.num_joints;
  if (static_cast<int>(cones.size()) != m) {
    throw std::invalid_argument("encode: one friction cone per contact required");
  }
  if (config.eta < 0.0 || config.eta >= M_PI / 2.0) {
    throw std::invalid_argument("encode: eta must lie in [0, pi/2)");
  }
  if (config.eta > 0.0 && !config.mdp_enabled) {
    throw std::invalid_argument(
        "encode: normal uncertainty requires the motion weights of the full "
        "friction model");
  }
  if (config.wrench_mode == WrenchMode::kScaled && !(config.s_cap > 0.0)) {
    throw std::invalid_argument("encode: s_cap must be positive");
  }

  EncodedProgram ep;
  ep.cones = cones;
  ep.config = config;
  VariableLayout& L = ep.layout;
  L.m = m;
  L.l = l;
  LinearProgram& lp = ep.mip.base;

  // Variables.
  for (int i = 0; i < m; ++i) {
    L.c_t1.push_back(lp.add_var(idx("ct1", i), -kInf, kInf));
    L.c_t2.push_back(lp.add_var(idx("ct2", i), -kInf, kInf));
    L.c_n.push_back(lp.add_var(idx("cn", i), 0.0, kInf));
    L.d_t1.push_back(lp.add_var(idx("dt1", i), -kInf, kInf));
    L.d_t2.push_back(lp.add_var(idx("dt2", i), -kInf, kInf));
    L.d_n.push_back(lp.add_var(idx("dn", i), -kInf, kInf));
    const int k = cones[i].edge_count();
    std::vector<int> beta_i, alpha_i;
    for (int e = 0; e < k; ++e) {
      beta_i.push_back(lp.add_var(idx2("beta", i, e), 0.0, kInf));
    }
    if (config.mdp_enabled) {
      for (int e = 0; e < k; ++e) {
        alpha_i.push_back(lp.add_var(idx2("alpha", i, e), 0.0, kInf));
      }
    }
    for (int e : beta_i) ep.mip.polish_vars.push_back(e);
    for (int e : alpha_i) ep.mip.polish_vars.push_back(e);
    L.beta.push_back(std::move(beta_i));
    if (config.mdp_enabled) L.alpha.push_back(std::move(alpha_i));
  }
  L.r0 = lp.add_var("r0", -kInf, kInf);
  for (int a = 1; a < 6; ++a) lp.add_var(idx("r", a), -kInf, kInf);
  for (int j = 0; j < l; ++j) {
    L.q.push_back(lp.add_var(idx("q", j), 0.0, kInf));
  }
  for (int j = 0; j < l; ++j) {
    L.tau.push_back(lp.add_var(idx("tau", j), -kInf, kInf));
  }
  if (config.wrench_mode == WrenchMode::kScaled) {
    L.s = lp.add_var("s", 0.0, config.s_cap);
  }
  if (config.torque_mode == TorqueMode::kVariable) {
    for (int j = 0; j < l; ++j) {
      L.tau_c.push_back(lp.add_var(idx("tauc", j), 0.0, kInf));
    }
  }

  const auto contact_force_term = [&](int i, int comp) {
    return comp == 0 ? L.c_t1[i] : comp == 1 ? L.c_t2[i] : L.c_n[i];
  };

  // Object equilibrium: G c + w = 0.
  for (int row = 0; row < 6; ++row) {
    LinearRow r;
    r.sense = RowSense::kEq;
    for (int i = 0; i < m; ++i) {
      for (int comp = 0; comp < 3; ++comp) {
        const double a = grasp.grasp_map(row, 3 * i + comp);
        if (a != 0.0) r.terms.emplace_back(contact_force_term(i, comp), a);
      }
    }
    if (config.wrench_mode == WrenchMode::kScaled) {
      if (config.direction[row] != 0.0) {
        r.terms.emplace_back(L.s, config.direction[row]);
      }
      r.rhs = 0.0;
    } else {
      r.rhs = -config.wrench[row];
    }
    lp.add_row(std::move(r));
  }

  // Joint equilibrium: the gearing delivers tau = J^T c at each joint.
  for (int j = 0; j < l; ++j) {
    LinearRow r;
    r.sense = RowSense::kEq;
    for (int i = 0; i < m; ++i) {
      for (int comp = 0; comp < 3; ++comp) {
        const double a = grasp.jacobian(3 * i + comp, j);
        if (a != 0.0) r.terms.emplace_back(contact_force_term(i, comp), a);
      }
    }
    r.terms.emplace_back(L.tau[j], -1.0);
    r.rhs = 0.0;
    lp.add_row(std::move(r));
  }

  // Relative contact motion: d = G^T r - J q.
  for (int i = 0; i < m; ++i) {
    const int d_vars[3] = {L.d_t1[i], L.d_t2[i], L.d_n[i]};
    for (int comp = 0; comp < 3; ++comp) {
      LinearRow r;
      r.sense = RowSense::kEq;
      for (int a = 0; a < 6; ++a) {
        const double g = grasp.grasp_map(a, 3 * i + comp);
        if (g != 0.0) r.terms.emplace_back(L.r0 + a, g);
      }
      for (int j = 0; j < l; ++j) {
        const double jac = grasp.jacobian(3 * i + comp, j);
        if (jac != 0.0) r.terms.emplace_back(L.q[j], -jac);
      }
      r.terms.emplace_back(d_vars[comp], -1.0);
      r.rhs = 0.0;
      lp.add_row(std::move(r));
    }
  }

  for (int i = 0; i < m; ++i) {
    const FrictionCone& cone = cones[i];
    const int k = cone.edge_count();
    const double mu = grasp.contacts[i].mu;

    // Friction force as a positive combination of length-scaled edges.
    for (int comp = 0; comp < 2; ++comp) {
      LinearRow r;
      r.sense = RowSense::kEq;
      for (int e = 0; e < k; ++e) {
        const double a = cone.edge_len(e) * cone.edge_direction(e)[comp];
        if (a != 0.0) r.terms.emplace_back(L.beta[i][e], a);
      }
      r.terms.emplace_back(comp == 0 ? L.c_t1[i] : L.c_t2[i], -1.0);
      lp.add_row(std::move(r));
    }

    // Negated tangential motion against unit edge directions.
    if (config.mdp_enabled) {
      for (int comp = 0; comp < 2; ++comp) {
        LinearRow r;
        r.sense = RowSense::kEq;
        for (int e = 0; e < k; ++e) {
          const double a = cone.edge_direction(e)[comp];
          if (a != 0.0) r.terms.emplace_back(L.alpha[i][e], a);
        }
        r.terms.emplace_back(comp == 0 ? L.d_t1[i] : L.d_t2[i], 1.0);
        lp.add_row(std::move(r));
      }
    }

    // Friction bound, valid in both sticking and sliding states.
    {
      LinearRow r;
      r.sense = RowSense::kLe;
      for (int e = 0; e < k; ++e) r.terms.emplace_back(L.beta[i][e], 1.0);
      r.terms.emplace_back(L.c_n[i], -mu);
      r.rhs = 0.0;
      lp.add_row(std::move(r));
    }

    // Worst-case normal gap expression (degenerates to d_n at eta = 0).
    const std::vector<int>& alpha_idx =
        config.mdp_enabled ? L.alpha[i] : std::vector<int>{};
    const auto gap = effective_normal_gap_terms(cone, L.d_n[i], alpha_idx,
                                                config.eta);

    // Valid for both normal-force branches: c_n >= -d_hat_n.
    {
      LinearRow r;
      r.sense = RowSense::kGe;
      r.terms.emplace_back(L.c_n[i], 1.0);
      for (const auto& t : gap) r.terms.push_back(t);
      r.rhs = 0.0;
      lp.add_row(std::move(r));
    }

    // Unilateral contact: either a loaded spring or a separated contact.
    {
      Disjunction dj;
      dj.label = idx("normal", i);
      LinearRow gap_le;
      gap_le.sense = RowSense::kLe;
      gap_le.terms = gap;
      gap_le.rhs = 0.0;
      LinearRow force_eq;
      force_eq.sense = RowSense::kEq;
      force_eq.terms.emplace_back(L.c_n[i], 1.0);
      for (const auto& t : gap) force_eq.terms.push_back(t);
      force_eq.rhs = 0.0;
      dj.branch_a = {gap_le, force_eq};
      LinearRow gap_ge;
      gap_ge.sense = RowSense::kGe;
      gap_ge.terms = gap;
      gap_ge.rhs = 0.0;
      LinearRow force_zero;
      force_zero.sense = RowSense::kEq;
      force_zero.terms.emplace_back(L.c_n[i], 1.0);
      force_zero.rhs = 0.0;
      dj.branch_b = {gap_ge, force_zero};
      ep.mip.disjunctions.push_back(std::move(dj));
    }

    // Sticking keeps the motion weights at zero; sliding pushes the
    // length-weighted combination out to the cone boundary.
    if (config.mdp_enabled) {
      Disjunction dj;
      dj.label = idx("friction", i);
      for (int e = 0; e < k; ++e) {
        LinearRow r;
        r.sense = RowSense::kEq;
        r.terms.emplace_back(L.alpha[i][e], 1.0);
        r.rhs = 0.0;
        dj.branch_a.push_back(std::move(r));
      }
      LinearRow slide;
      slide.sense = RowSense::kGe;
      for (int e = 0; e < k; ++e) {
        slide.terms.emplace_back(L.beta[i][e], cone.edge_len(e));
      }
      slide.terms.emplace_back(L.c_n[i], -mu);
      slide.rhs = 0.0;
      dj.branch_b = {std::move(slide)};
      ep.mip.disjunctions.push_back(std::move(dj));
    }

    // One shared ordered set per contact keeps force and motion in the same
    // cone sector. The set weights are realized directly by the force and
    // motion weights of each edge; no shadow variables are materialized.
    Sos2Group group;
    group.label = idx("sector", i);
    group.cyclic = true;
    group.witness_vars.resize(k);
    for (int e = 0; e < k; ++e) {
      group.witness_vars[e].push_back(L.beta[i][e]);
      if (config.mdp_enabled) group.witness_vars[e].push_back(L.alpha[i][e]);
    }
    ep.mip.sos2_groups.push_back(std::move(group));
  }

  // Nonbackdrivable joints.
  for (int j = 0; j < l; ++j) {
    const auto tau_c_term = [&](LinearRow& r, double tau_coeff) {
      r.terms.emplace_back(L.tau[j], tau_coeff);
      if (config.torque_mode == TorqueMode::kVariable) {
        r.terms.emplace_back(L.tau_c[j], -tau_coeff);
        r.rhs = 0.0;
      } else {
        r.rhs = tau_coeff * grasp.commanded_torques[j];
      }
    };

    // Valid in both states: the joint carries at least its command.
    {
      LinearRow r;
      r.sense = RowSense::kGe;
      tau_c_term(r, 1.0);
      lp.add_row(std::move(r));
    }

    Disjunction dj;
    dj.label = idx("joint", j);
    LinearRow locked_q;
    locked_q.sense = RowSense::kEq;
    locked_q.terms.emplace_back(L.q[j], 1.0);
    locked_q.rhs = 0.0;
    LinearRow locked_tau;
    locked_tau.sense = RowSense::kGe;
    tau_c_term(locked_tau, 1.0);
    dj.branch_a = {locked_q, locked_tau};
    LinearRow moving_q;
    moving_q.sense = RowSense::kGe;
    moving_q.terms.emplace_back(L.q[j], 1.0);
    moving_q.rhs = 0.0;
    LinearRow moving_tau;
    moving_tau.sense = RowSense::kEq;
    tau_c_term(moving_tau, 1.0);
    dj.branch_b = {moving_q, moving_tau};
    ep.mip.disjunctions.push_back(std::move(dj));
  }

  if (config.wrench_mode == WrenchMode::kScaled) {
    lp.objective = {{L.s, 1.0}};
    lp.sense = ObjectiveSense::kMaximize;
  }

  return ep;
}

void encode_minmax_torque(EncodedProgram& program) {
  VariableLayout& L = program.layout;
  if (L.tau_c.empty()) {
    throw std::logic_error(
        "encode_minmax_torque: program was encoded with fixed torques");
  }
  LinearProgram& lp = program.mip.base;
  L.t_aux = lp.add_var("t_max", 0.0, kInf);
  for (int j = 0; j < L.l; ++j) {
    lp.add_row({{L.tau_c[j], 1.0}, {L.t_aux, -1.0}}, RowSense::kLe, 0.0);
  }
  lp.objective = {{L.t_aux, 1.0}};
  lp.sense = ObjectiveSense::kMinimize;
}

EquilibriumSolution extract_solution(const GraspModel& grasp,
                                     const EncodedProgram& program,
                                     const VecX& assignment, double feas_tol) {
  const VariableLayout& L = program.layout;
  if (assignment.size() < program.mip.base.num_vars()) {
    throw std::runtime_error("extract_solution: assignment size mismatch");
  }
  EquilibriumSolution sol;
  sol.contact_forces.resize(3 * L.m);
  for (int i = 0; i < L.m; ++i) {
    sol.contact_forces[3 * i + 0] = assignment[L.c_t1[i]];
    sol.contact_forces[3 * i + 1] = assignment[L.c_t2[i]];
    sol.contact_forces[3 * i + 2] = assignment[L.c_n[i]];
  }
  for (int a = 0; a < 6; ++a) sol.object_motion[a] = assignment[L.r0 + a];
  sol.joint_motions.resize(L.l);
  sol.joint_torques.resize(L.l);
  for (int j = 0; j < L.l; ++j) {
    sol.joint_motions[j] = assignment[L.q[j]];
    sol.joint_torques[j] = assignment[L.tau[j]];
    if (sol.joint_motions[j] < -feas_tol) {
      throw std::runtime_error("extract_solution: negative joint motion");
    }
    sol.joint_motions[j] = std::max(sol.joint_motions[j], 0.0);
  }
  for (int i = 0; i < L.m; ++i) {
    const int k = static_cast<int>(L.beta[i].size());
    VecX beta(k);
    for (int e = 0; e < k; ++e) beta[e] = assignment[L.beta[i][e]];
    VecX alpha = VecX::Zero(k);
    if (!L.alpha.empty()) {
      for (int e = 0; e < k; ++e) alpha[e] = assignment[L.alpha[i][e]];
    }
    // The ordered-set weights are the realized per-edge support.
    sol.sos_weights.push_back(beta.cwiseMax(alpha));
    sol.friction_weights.push_back(std::move(beta));
    if (!L.alpha.empty()) sol.motion_weights.push_back(std::move(alpha));
  }

  // The wrench actually balanced by this assignment.
  const Vec6 w = L.s >= 0 ? Vec6(assignment[L.s] * program.config.direction)
                          : program.config.wrench;
  const Residuals res = residuals(sol.contact_forces, w, sol.joint_torques,
                                  grasp.grasp_map, grasp.jacobian);
  const double scale =
      std::max(1.0, sol.contact_forces.cwiseAbs().maxCoeff());
  if (res.max_norm() > feas_tol * scale) {
    throw std::runtime_error("extract_solution: equilibrium residual " +
                             std::to_string(res.max_norm()));
  }
  return sol;
}

}  // namespace pgs
