#include "pgs/oracle.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "pgs/linear_program.hpp"

namespace pgs {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

enum class ContactMode : int { kSeparated = 0, kSticking = 1, kSliding = 2 };

struct Instance {
  const GraspModel* grasp = nullptr;
  Vec6 wrench;
  VecX tau_c;
  OracleOptions opt;
  long lp_budget = 0;
  bool budget_hit = false;
};

// Tangent-plane unit vector at grid angle theta.
Eigen::Vector2d dir_of(double theta) {
  return {std::cos(theta), std::sin(theta)};
}

// Feasibility LP for a full mode assignment.
//
// Variables: c (3m), r (6), q (l), one slack magnitude per sliding contact.
// `inflate` widens the friction bound by the band and uses the outer disc
// polygon; otherwise the bound shrinks by the band and the polygon is
// inscribed, so a feasible point is feasible for the exact model.
bool mode_feasible(Instance& inst, const std::vector<ContactMode>& modes,
                   const std::vector<double>& slide_theta, int joint_mask,
                   bool inflate) {
  if (inst.lp_budget-- <= 0) {
    inst.budget_hit = true;
    return false;
  }
  const GraspModel& g = *inst.grasp;
  const int m = g.num_contacts();
  const int l = g.num_joints;
  const double band = inst.opt.band_tol;
  const double mu_scale = inflate ? 1.0 + band : 1.0 - band;

  LinearProgram lp;
  std::vector<int> c_idx(3 * m);
  for (int i = 0; i < 3 * m; ++i) c_idx[i] = lp.add_var("c", -kInf, kInf);
  for (int i = 0; i < m; ++i) lp.lower[c_idx[3 * i + 2]] = 0.0;  // c_n >= 0
  const int r0 = lp.add_var("r", -kInf, kInf);
  for (int a = 1; a < 6; ++a) lp.add_var("r", -kInf, kInf);
  std::vector<int> q_idx(l);
  for (int j = 0; j < l; ++j) q_idx[j] = lp.add_var("q", 0.0, kInf);

  // Object equilibrium.
  for (int row = 0; row < 6; ++row) {
    LinearRow r;
    r.sense = RowSense::kEq;
    for (int v = 0; v < 3 * m; ++v) {
      const double a = g.grasp_map(row, v);
      if (a != 0.0) r.terms.emplace_back(c_idx[v], a);
    }
    r.rhs = -inst.wrench[row];
    lp.add_row(std::move(r));
  }

  // Joint model on the delivered torque J^T c.
  for (int j = 0; j < l; ++j) {
    LinearRow r;
    for (int v = 0; v < 3 * m; ++v) {
      const double a = g.jacobian(v, j);
      if (a != 0.0) r.terms.emplace_back(c_idx[v], a);
    }
    r.rhs = inst.tau_c[j];
    const bool locked = (joint_mask >> j) & 1;
    if (locked) {
      lp.upper[q_idx[j]] = 0.0;
      r.sense = RowSense::kGe;
    } else {
      r.sense = RowSense::kEq;
    }
    lp.add_row(std::move(r));
  }

  // Relative motion terms d(v) = (G^T r - J q)(v), inlined into rows.
  const auto motion_row = [&](int v, double scale) {
    std::vector<std::pair<int, double>> terms;
    for (int a = 0; a < 6; ++a) {
      const double ga = g.grasp_map(a, v);
      if (ga != 0.0) terms.emplace_back(r0 + a, scale * ga);
    }
    for (int j = 0; j < l; ++j) {
      const double ja = g.jacobian(v, j);
      if (ja != 0.0) terms.emplace_back(q_idx[j], -scale * ja);
    }
    return terms;
  };

  int slide_no = 0;
  for (int i = 0; i < m; ++i) {
    const int vt1 = 3 * i;
    const int vt2 = 3 * i + 1;
    const int vn = 3 * i + 2;
    const double mu = g.contacts[i].mu * mu_scale;
    switch (modes[i]) {
      case ContactMode::kSeparated: {
        for (int c = 0; c < 3; ++c) {
          lp.lower[c_idx[3 * i + c]] = 0.0;
          lp.upper[c_idx[3 * i + c]] = 0.0;
        }
        LinearRow r;  // d_n >= 0
        r.terms = motion_row(vn, 1.0);
        r.sense = RowSense::kGe;
        r.rhs = 0.0;
        lp.add_row(std::move(r));
        break;
      }
      case ContactMode::kSticking: {
        for (int t = 0; t < 2; ++t) {  // d_t = 0
          LinearRow r;
          r.terms = motion_row(3 * i + t, 1.0);
          r.sense = RowSense::kEq;
          r.rhs = 0.0;
          lp.add_row(std::move(r));
        }
        {  // c_n = -d_n (spring), which also enforces d_n <= 0
          LinearRow r;
          r.terms = motion_row(vn, 1.0);
          r.terms.emplace_back(c_idx[vn], 1.0);
          r.sense = RowSense::kEq;
          r.rhs = 0.0;
          lp.add_row(std::move(r));
        }
        // Friction disc as half-planes: outer polygon when inflated,
        // inscribed polygon otherwise.
        const int planes = inst.opt.disc_planes;
        const double shrink =
            inflate ? 1.0 : std::cos(std::numbers::pi / planes);
        for (int p = 0; p < planes; ++p) {
          const auto u = dir_of(kTwoPi * p / planes);
          LinearRow r;
          r.terms.emplace_back(c_idx[vt1], u.x());
          r.terms.emplace_back(c_idx[vt2], u.y());
          r.terms.emplace_back(c_idx[vn], -mu * shrink);
          r.sense = RowSense::kLe;
          r.rhs = 0.0;
          lp.add_row(std::move(r));
        }
        break;
      }
      case ContactMode::kSliding: {
        const auto u = dir_of(slide_theta[slide_no++]);
        // Friction force anti-parallel to the slide direction on the cone
        // boundary; the inflated pass allows a band of magnitudes.
        const int mag = lp.add_var("mag", 0.0, kInf);
        for (int t = 0; t < 2; ++t) {
          LinearRow r;
          r.terms.emplace_back(c_idx[3 * i + t], 1.0);
          r.terms.emplace_back(mag, u[t]);
          r.sense = RowSense::kEq;
          r.rhs = 0.0;
          lp.add_row(std::move(r));
        }
        if (inflate) {
          lp.add_row({{mag, 1.0}, {c_idx[vn], -mu}}, RowSense::kLe, 0.0);
          lp.add_row(
              {{mag, 1.0}, {c_idx[vn], -g.contacts[i].mu * (1.0 - band)}},
              RowSense::kGe, 0.0);
        } else {
          lp.add_row({{mag, 1.0}, {c_idx[vn], -g.contacts[i].mu}},
                     RowSense::kEq, 0.0);
        }
        // Slide motion along +u: d_t = rho u, rho >= 0.
        const int rho = lp.add_var("rho", 0.0, kInf);
        for (int t = 0; t < 2; ++t) {
          LinearRow r;
          r.terms = motion_row(3 * i + t, 1.0);
          r.terms.emplace_back(rho, -u[t]);
          r.sense = RowSense::kEq;
          r.rhs = 0.0;
          lp.add_row(std::move(r));
        }
        {  // c_n = -d_n
          LinearRow r;
          r.terms = motion_row(vn, 1.0);
          r.terms.emplace_back(c_idx[vn], 1.0);
          r.sense = RowSense::kEq;
          r.rhs = 0.0;
          lp.add_row(std::move(r));
        }
        break;
      }
    }
  }

  const LpResult res = solve_lp(lp);
  return res.status == LpStatus::kOptimal;
}

// Quick relaxation over contact forces only: equilibrium, J^T c >= tau_c
// (valid for locked and moving joints alike), assigned slide directions as
// rays, everything else inside the inflated outer polygon. Infeasibility
// here rules out every completion of the partial assignment.
bool force_screen(Instance& inst, const std::vector<ContactMode>& modes,
                  const std::vector<double>& slide_theta, int assigned) {
  if (inst.lp_budget-- <= 0) {
    inst.budget_hit = true;
    return true;  // cannot rule anything out once the budget is gone
  }
  const GraspModel& g = *inst.grasp;
  const int m = g.num_contacts();
  const int l = g.num_joints;
  const double mu_scale = 1.0 + inst.opt.band_tol;

  LinearProgram lp;
  std::vector<int> c_idx(3 * m);
  for (int i = 0; i < 3 * m; ++i) c_idx[i] = lp.add_var("c", -kInf, kInf);
  for (int i = 0; i < m; ++i) lp.lower[c_idx[3 * i + 2]] = 0.0;

  for (int row = 0; row < 6; ++row) {
    LinearRow r;
    r.sense = RowSense::kEq;
    for (int v = 0; v < 3 * m; ++v) {
      const double a = g.grasp_map(row, v);
      if (a != 0.0) r.terms.emplace_back(c_idx[v], a);
    }
    r.rhs = -inst.wrench[row];
    lp.add_row(std::move(r));
  }
  for (int j = 0; j < l; ++j) {
    LinearRow r;
    r.sense = RowSense::kGe;
    for (int v = 0; v < 3 * m; ++v) {
      const double a = g.jacobian(v, j);
      if (a != 0.0) r.terms.emplace_back(c_idx[v], a);
    }
    r.rhs = inst.tau_c[j];
    lp.add_row(std::move(r));
  }

  int slide_no = 0;
  for (int i = 0; i < m; ++i) {
    const double mu = g.contacts[i].mu * mu_scale;
    if (modes[i] == ContactMode::kSeparated) {
      for (int c = 0; c < 3; ++c) {
        lp.lower[c_idx[3 * i + c]] = 0.0;
        lp.upper[c_idx[3 * i + c]] = 0.0;
      }
      continue;
    }
    if (modes[i] == ContactMode::kSliding && slide_no < assigned) {
      const auto u = dir_of(slide_theta[slide_no++]);
      const int mag = lp.add_var("mag", 0.0, kInf);
      for (int t = 0; t < 2; ++t) {
        lp.add_row({{c_idx[3 * i + t], 1.0}, {mag, u[t]}}, RowSense::kEq, 0.0);
      }
      lp.add_row({{mag, 1.0}, {c_idx[3 * i + 2], -mu}}, RowSense::kLe, 0.0);
      continue;
    }
    if (modes[i] == ContactMode::kSliding) ++slide_no;
    const int planes = 16;  // coarse outer disc is enough for screening
    for (int p = 0; p < planes; ++p) {
      const auto u = dir_of(kTwoPi * p / planes);
      LinearRow r;
      r.terms.emplace_back(c_idx[3 * i], u.x());
      r.terms.emplace_back(c_idx[3 * i + 1], u.y());
      r.terms.emplace_back(c_idx[3 * i + 2], -mu);
      r.sense = RowSense::kLe;
      r.rhs = 0.0;
      lp.add_row(std::move(r));
    }
  }
  return solve_lp(lp).status == LpStatus::kOptimal;
}

struct SearchState {
  bool stable_found = false;
  bool inflated_feasible_found = false;
};

// Assigns slide directions for sliding contacts one by one over the grid,
// screening each partial assignment; at full assignments runs the exact
// joint-mode enumeration.
void enumerate_theta(Instance& inst, const std::vector<ContactMode>& modes,
                     std::vector<double>& theta, size_t level,
                     const std::vector<double>& grid, SearchState& state) {
  if (state.stable_found || inst.budget_hit) return;
  if (level == theta.size()) {
    const int l = inst.grasp->num_joints;
    for (int mask = 0; mask < (1 << l); ++mask) {
      if (mode_feasible(inst, modes, theta, mask, /*inflate=*/true)) {
        state.inflated_feasible_found = true;
        if (mode_feasible(inst, modes, theta, mask, /*inflate=*/false)) {
          state.stable_found = true;
          return;
        }
      }
      if (inst.budget_hit) return;
    }
    return;
  }
  for (double angle : grid) {
    theta[level] = angle;
    if (!force_screen(inst, modes, theta, static_cast<int>(level) + 1)) {
      continue;
    }
    enumerate_theta(inst, modes, theta, level + 1, grid, state);
    if (state.stable_found || inst.budget_hit) return;
  }
}

}  // namespace

OracleVerdict brute_force_stability(const GraspModel& grasp,
                                    const VecX& commanded_torques,
                                    const Vec6& wrench,
                                    const OracleOptions& options) {
  const int m = grasp.num_contacts();
  const int l = grasp.num_joints;
  if (m > 4 || l > 4) {
    throw std::invalid_argument(
        "brute_force_stability: enumeration guarded to m <= 4, l <= 4");
  }
  Instance inst;
  inst.grasp = &grasp;
  inst.wrench = wrench;
  inst.tau_c = commanded_torques;
  inst.opt = options;
  inst.lp_budget = options.max_lp_solves;

  // Dyadic base grid, locally refined toward the target resolution around
  // assignments that stay feasible under the inflated relaxation.
  const int base_divisions = 32;
  std::vector<double> base_grid(base_divisions);
  for (int t = 0; t < base_divisions; ++t) {
    base_grid[t] = kTwoPi * t / base_divisions;
  }

  SearchState state;
  std::vector<ContactMode> modes(m, ContactMode::kSeparated);
  std::vector<int> pattern(m, 0);
  const long n_patterns = static_cast<long>(std::pow(3.0, m));
  for (long code = 0; code < n_patterns && !state.stable_found; ++code) {
    long rest = code;
    int slides = 0;
    for (int i = 0; i < m; ++i) {
      pattern[i] = static_cast<int>(rest % 3);
      rest /= 3;
      modes[i] = static_cast<ContactMode>(pattern[i]);
      if (modes[i] == ContactMode::kSliding) ++slides;
    }
    std::vector<double> theta(slides, 0.0);
    if (!force_screen(inst, modes, theta, 0)) continue;
    enumerate_theta(inst, modes, theta, 0, base_grid, state);
    if (inst.budget_hit) break;
  }

  // Local grid refinement pass: when only the inflated relaxation accepted,
  // halve the grid around the whole circle down to the target resolution.
  // The base pass usually settles the verdict; this pass tightens stable
  // detections near sector boundaries.
  double step_deg = 360.0 / base_divisions;
  int divisions = base_divisions;
  while (!state.stable_found && state.inflated_feasible_found &&
         !inst.budget_hit && step_deg > options.angle_grid_deg) {
    divisions *= 2;
    step_deg *= 0.5;
    std::vector<double> grid(divisions);
    for (int t = 0; t < divisions; ++t) grid[t] = kTwoPi * t / divisions;
    for (long code = 0; code < n_patterns && !state.stable_found; ++code) {
      long rest = code;
      int slides = 0;
      for (int i = 0; i < m; ++i) {
        pattern[i] = static_cast<int>(rest % 3);
        rest /= 3;
        modes[i] = static_cast<ContactMode>(pattern[i]);
        if (modes[i] == ContactMode::kSliding) ++slides;
      }
      if (slides == 0) continue;  // already settled on the base pass
      std::vector<double> theta(slides, 0.0);
      if (!force_screen(inst, modes, theta, 0)) continue;
      enumerate_theta(inst, modes, theta, 0, grid, state);
      if (inst.budget_hit) break;
    }
  }

  if (state.stable_found) return OracleVerdict::kStable;
  if (state.inflated_feasible_found || inst.budget_hit) {
    return OracleVerdict::kBoundary;
  }
  return OracleVerdict::kUnstable;
}

}  // namespace pgs
