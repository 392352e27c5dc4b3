#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <sstream>
#include <cstdio>
#include <cstdlib>

#include "pgs/linear_program.hpp"

namespace pgs {

std::string LinearProgram::dump() const {
  std::ostringstream out;
  out.precision(12);
  const auto name = [&](int j) {
    return j < static_cast<int>(names.size()) && !names[j].empty()
               ? names[j]
               : "x" + std::to_string(j);
  };
  out << "vars " << num_vars() << "\n";
  for (int j = 0; j < num_vars(); ++j) {
    out << "  " << name(j) << " in [" << lower[j] << ", " << upper[j] << "]\n";
  }
  out << "rows " << rows.size() << "\n";
  for (const auto& row : rows) {
    out << "  ";
    bool first = true;
    for (const auto& [j, a] : row.terms) {
      out << (first ? "" : " + ") << a << "*" << name(j);
      first = false;
    }
    switch (row.sense) {
      case RowSense::kEq: out << " == "; break;
      case RowSense::kLe: out << " <= "; break;
      case RowSense::kGe: out << " >= "; break;
    }
    out << row.rhs << "\n";
  }
  if (!objective.empty()) {
    out << (sense == ObjectiveSense::kMinimize ? "minimize" : "maximize");
    for (const auto& [j, a] : objective) out << " + " << a << "*" << name(j);
    out << "\n";
  } else {
    out << "feasibility\n";
  }
  return out.str();
}

double row_violation(const LinearRow& row, const VecX& x) {
  double lhs = 0.0;
  double scale = std::abs(row.rhs);
  for (const auto& [j, a] : row.terms) {
    lhs += a * x[j];
    scale = std::max(scale, std::abs(a * x[j]));
  }
  const double diff = lhs - row.rhs;
  double v = 0.0;
  switch (row.sense) {
    case RowSense::kEq: v = std::abs(diff); break;
    case RowSense::kLe: v = std::max(0.0, diff); break;
    case RowSense::kGe: v = std::max(0.0, -diff); break;
  }
  return v / (1.0 + scale);
}

namespace {

enum class VarStatus : unsigned char { kAtLower, kAtUpper, kBasic, kFreeNB };

// Revised simplex over bounded variables. The basis is held as a reference
// LU factorization plus a short product-form eta file; FTRAN/BTRAN run
// through triangular solves, which keeps deep friction-cone bases (many
// near-parallel columns) numerically honest.
class Simplex {
 public:
  Simplex(const LinearProgram& lp, const SimplexOptions& opt)
      : opt_(opt),
        m_(static_cast<int>(lp.rows.size())),
        n_struct_(lp.num_vars()) {
    // Layout: structurals, one logical per row, one artificial per row.
    n_total_ = n_struct_ + m_ + m_;
    art_begin_ = n_struct_ + m_;
    A_.setZero(m_, n_total_);
    b_.setZero(m_);
    lb_.assign(n_total_, 0.0);
    ub_.assign(n_total_, 0.0);
    cost_.setZero(n_total_);

    for (int j = 0; j < n_struct_; ++j) {
      lb_[j] = lp.lower[j];
      ub_[j] = lp.upper[j];
    }
    for (int i = 0; i < m_; ++i) {
      const auto& row = lp.rows[i];
      for (const auto& [j, a] : row.terms) A_(i, j) += a;
      b_[i] = row.rhs;
      // Row equilibration: dividing a row by its largest coefficient leaves
      // the solution set untouched and tames the mixed scales of force and
      // virtual-motion rows.
      const double mag = A_.row(i).head(n_struct_).cwiseAbs().maxCoeff();
      if (mag > 0.0 && (mag > 16.0 || mag < 1.0 / 16.0)) {
        A_.row(i).head(n_struct_) /= mag;
        b_[i] /= mag;
      }
      const int s = n_struct_ + i;
      A_(i, s) = 1.0;
      switch (row.sense) {
        case RowSense::kEq: lb_[s] = ub_[s] = 0.0; break;
        case RowSense::kLe: lb_[s] = 0.0; ub_[s] = kInf; break;
        case RowSense::kGe: lb_[s] = -kInf; ub_[s] = 0.0; break;
      }
    }
    obj_sign_ = lp.sense == ObjectiveSense::kMaximize ? -1.0 : 1.0;
    for (const auto& [j, a] : lp.objective) cost_[j] += obj_sign_ * a;
  }

  LpResult run() {
    LpResult result;
    for (int j = 0; j < n_struct_; ++j) {
      if (lb_[j] > ub_[j]) {
        result.status = LpStatus::kInfeasible;
        return result;
      }
    }

    VecX phase1_cost = VecX::Zero(n_total_);
    const double scale = m_ > 0 ? 1.0 + b_.cwiseAbs().maxCoeff() : 1.0;

    // Attempt 0 runs with the normal refactorization cadence; later attempts
    // factorize at every step so numerical drift cannot recur. A verdict is
    // only ever returned off a freshly verified point.
    for (int attempt = 0; attempt < 3; ++attempt) {
      strict_ = attempt > 0;
      init_point();
      install_artificials();
      for (int j = art_begin_; j < n_total_; ++j) phase1_cost[j] = 1.0;

      Outcome p1 = optimize(phase1_cost, /*phase1=*/true);
      if (p1 == Outcome::kOptimal &&
          phase1_objective() > opt_.feas_tol * scale && !strict_) {
        // Re-verify a pending infeasibility claim against a fresh
        // factorization so drift can never produce a wrong verdict.
        if (!refactorize()) continue;
        p1 = optimize(phase1_cost, /*phase1=*/true);
      }
      if (p1 == Outcome::kIterLimit) break;
      if (p1 != Outcome::kOptimal) continue;
      if (phase1_objective() > opt_.feas_tol * scale) {
        result.status = LpStatus::kInfeasible;
        result.iterations = iterations_;
        return result;
      }
      pin_artificials();

      const Outcome p2 = optimize(cost_, /*phase1=*/false);
      result.iterations = iterations_;
      if (p2 == Outcome::kUnbounded) {
        result.status = LpStatus::kUnbounded;
        return result;
      }
      if (p2 == Outcome::kIterLimit) break;
      if (p2 != Outcome::kOptimal) continue;

      // Final gate: resync the point from a fresh factorization and check
      // primal feasibility of the basic values.
      if (!refactorize()) continue;
      double bound_violation = 0.0;
      for (int i = 0; i < m_; ++i) {
        const int bj = basis_[i];
        const double vscale = 1.0 + std::abs(x_[bj]);
        if (std::isfinite(lb_[bj])) {
          bound_violation =
              std::max(bound_violation, (lb_[bj] - x_[bj]) / vscale);
        }
        if (std::isfinite(ub_[bj])) {
          bound_violation =
              std::max(bound_violation, (x_[bj] - ub_[bj]) / vscale);
        }
      }
      if (bound_violation > opt_.feas_tol) continue;
      result.status = LpStatus::kOptimal;
      result.x = x_.head(n_struct_);
      result.objective = obj_sign_ * cost_.dot(x_);
      return result;
    }
    result.iterations = iterations_;
    result.status = LpStatus::kBreakdown;
    return result;
  }

 private:
  enum class Outcome { kOptimal, kUnbounded, kBreakdown, kIterLimit };

  struct Eta {
    int row;
    VecX w;  // the pivot column in the basis frame at update time
  };

  void init_point() {
    status_.assign(n_total_, VarStatus::kAtLower);
    x_.setZero(n_total_);
    for (int j = 0; j < n_total_; ++j) {
      if (std::isfinite(lb_[j])) {
        status_[j] = VarStatus::kAtLower;
        x_[j] = lb_[j];
      } else if (std::isfinite(ub_[j])) {
        status_[j] = VarStatus::kAtUpper;
        x_[j] = ub_[j];
      } else {
        status_[j] = VarStatus::kFreeNB;
        x_[j] = 0.0;
      }
    }
  }

  void install_artificials() {
    // The residual of the nonbasic starting point decides each artificial's
    // column sign, so all artificials start basic and nonnegative.
    VecX residual = b_;
    for (int j = 0; j < art_begin_; ++j) {
      if (x_[j] != 0.0) residual -= A_.col(j) * x_[j];
    }
    basis_.resize(m_);
    for (int i = 0; i < m_; ++i) {
      const int a = art_begin_ + i;
      A_(i, a) = residual[i] >= 0.0 ? 1.0 : -1.0;
      lb_[a] = 0.0;
      ub_[a] = kInf;
      basis_[i] = a;
      status_[a] = VarStatus::kBasic;
      x_[a] = std::abs(residual[i]);
    }
    refactorize();
  }

  double phase1_objective() const {
    double v = 0.0;
    for (int j = art_begin_; j < n_total_; ++j) v += x_[j];
    return v;
  }

  // x = B^-1 v through the reference LU and the eta file.
  VecX ftran(const VecX& v) const {
    VecX x = lu_.solve(v);
    for (const Eta& e : etas_) {
      const double xr = x[e.row] / e.w[e.row];
      x -= xr * e.w;
      x[e.row] = xr;
    }
    return x;
  }

  // y = B^-T v: etas transposed in reverse order, then the LU transpose.
  VecX btran(const VecX& v) const {
    VecX y = v;
    for (auto it = etas_.rbegin(); it != etas_.rend(); ++it) {
      double yr = y[it->row];
      yr -= it->w.dot(y) - it->w[it->row] * y[it->row];
      y[it->row] = yr / it->w[it->row];
    }
    return lu_.transpose().solve(y);
  }

  bool refactorize() {
    MatX basis_matrix(m_, m_);
    for (int i = 0; i < m_; ++i) basis_matrix.col(i) = A_.col(basis_[i]);
    lu_.compute(basis_matrix);
    const VecX diag = lu_.matrixLU().diagonal().cwiseAbs();
    const double dmax = diag.maxCoeff();
    if (!(dmax > 0.0) || diag.minCoeff() < 1e-13 * dmax) return false;
    etas_.clear();
    // Resync basic values from the nonbasic point to control drift.
    VecX rhs = b_;
    for (int j = 0; j < n_total_; ++j) {
      if (status_[j] != VarStatus::kBasic && x_[j] != 0.0) {
        rhs -= A_.col(j) * x_[j];
      }
    }
    const VecX xb = lu_.solve(rhs);
    if (!xb.allFinite()) return false;
    for (int i = 0; i < m_; ++i) x_[basis_[i]] = xb[i];
    return true;
  }

  void pin_artificials() {
    for (int j = art_begin_; j < n_total_; ++j) {
      ub_[j] = 0.0;
      if (status_[j] != VarStatus::kBasic) {
        status_[j] = VarStatus::kAtLower;
        x_[j] = 0.0;
      }
    }
    // Pivot leftover degenerate basic artificials onto the best usable
    // column; a row with none is redundant and keeps its artificial basic
    // at zero.
    for (int i = 0; i < m_; ++i) {
      if (basis_[i] < art_begin_) continue;
      const VecX row_i = btran(VecX::Unit(m_, i));
      int pick = -1;
      double best = 1e-7;
      for (int j = 0; j < art_begin_; ++j) {
        if (status_[j] == VarStatus::kBasic) continue;
        const double entry = std::abs(row_i.dot(A_.col(j)));
        if (entry > best) {
          best = entry;
          pick = j;
        }
      }
      if (pick < 0) continue;
      const VecX w = ftran(A_.col(pick));
      const int leaving = basis_[i];
      basis_[i] = pick;
      status_[pick] = VarStatus::kBasic;
      status_[leaving] = VarStatus::kAtLower;
      x_[leaving] = 0.0;
      etas_.push_back(Eta{i, w});
      // Zero-length exchange: values are unchanged.
    }
  }

  Outcome optimize(const VecX& cost, bool phase1) {
    int degenerate_streak = 0;
    bool bland = false;
    bool retried_unbounded = false;

    while (true) {
      if (iterations_ >= opt_.max_iterations) return Outcome::kIterLimit;
      ++iterations_;
      if (static_cast<int>(etas_.size()) >= (strict_ ? 1 : opt_.refactor_every)) {
        if (!refactorize()) {
          if (getenv("PGS_LP_DEBUG")) fprintf(stderr, "[lp] cadence refactor singular strict=%d iter=%d\n", (int)strict_, iterations_);
          return Outcome::kBreakdown;
        }
      }

      VecX cb(m_);
      for (int i = 0; i < m_; ++i) cb[i] = cost[basis_[i]];
      const VecX y = btran(cb);

      // Price all improving columns, best violation first (index breaks
      // ties). A column whose best blocking pivot is tiny gets skipped in
      // favor of the next candidate; tiny pivots are only accepted when no
      // candidate offers better.
      struct Candidate {
        int j;
        int dir;
        double viol;
      };
      std::vector<Candidate> candidates;
      for (int j = 0; j < n_total_; ++j) {
        const VarStatus st = status_[j];
        if (st == VarStatus::kBasic) continue;
        if (lb_[j] == ub_[j]) continue;  // fixed
        const double dot = A_.col(j).dot(y);
        const double d = cost[j] - dot;
        const double thr =
            opt_.opt_tol * (1.0 + std::abs(cost[j]) + std::abs(dot));
        int dir = 0;
        if (st == VarStatus::kAtLower && d < -thr) {
          dir = +1;
        } else if (st == VarStatus::kAtUpper && d > thr) {
          dir = -1;
        } else if (st == VarStatus::kFreeNB && std::abs(d) > thr) {
          dir = d < 0.0 ? +1 : -1;
        }
        if (dir == 0) continue;
        candidates.push_back(Candidate{j, dir, std::abs(d)});
        if (bland) break;  // smallest improving index, nothing else
      }
      if (candidates.empty()) return Outcome::kOptimal;
      if (!bland) {
        std::sort(candidates.begin(), candidates.end(),
                  [](const Candidate& a, const Candidate& b) {
                    if (a.viol != b.viol) return a.viol > b.viol;
                    return a.j < b.j;
                  });
        if (candidates.size() > 8) candidates.resize(8);
      }

      int entering = -1;
      int direction = 0;
      VecX w;
      double t_max = kInf;
      int leave_row = -1;
      bool leave_at_upper = false;
      bool entering_flip_blocks = false;

      int fb_entering = -1;
      int fb_direction = 0;
      VecX fb_w;
      double fb_t_max = kInf;
      int fb_leave_row = -1;
      bool fb_leave_at_upper = false;
      bool fb_flip_blocks = false;
      double fb_pivot = -1.0;

      for (const Candidate& cand : candidates) {
        const VecX wc = ftran(A_.col(cand.j));
        double tc = kInf;
        const bool flip_blocks =
            std::isfinite(ub_[cand.j]) && std::isfinite(lb_[cand.j]);
        if (flip_blocks) tc = ub_[cand.j] - lb_[cand.j];
        const auto row_limit = [&](int i, double* limit, bool* hits_upper) {
          if (std::abs(wc[i]) <= opt_.pivot_tol) return false;
          const double rate = -cand.dir * wc[i];
          const int bj = basis_[i];
          if (rate < 0.0 && std::isfinite(lb_[bj])) {
            *limit = std::max(0.0, (x_[bj] - lb_[bj]) / -rate);
            *hits_upper = false;
            return true;
          }
          if (rate > 0.0 && std::isfinite(ub_[bj])) {
            *limit = std::max(0.0, (ub_[bj] - x_[bj]) / rate);
            *hits_upper = true;
            return true;
          }
          return false;
        };
        for (int i = 0; i < m_; ++i) {
          double limit;
          bool hu;
          if (row_limit(i, &limit, &hu)) tc = std::min(tc, limit);
        }

        if (!std::isfinite(tc)) {
          // Unbounded ray on an improving column decides the whole LP (after
          // one fresh-factorization retry to rule out stale data).
          if (!retried_unbounded) {
            retried_unbounded = true;
            if (!refactorize()) return Outcome::kBreakdown;
            entering = -2;  // recompute everything
            break;
          }
          return phase1 ? Outcome::kBreakdown : Outcome::kUnbounded;
        }

        // Two-pass ratio test: among blocking rows within a band of the
        // tightest step pick the numerically largest pivot (pure
        // smallest-index under Bland's rule).
        int lr = -1;
        bool lau = false;
        const double band = tc + 1e-10 * (1.0 + tc);
        double best_pivot = 0.0;
        int best_index = -1;
        for (int i = 0; i < m_; ++i) {
          double limit;
          bool hu;
          if (!row_limit(i, &limit, &hu) || limit > band) continue;
          const double mag = std::abs(wc[i]);
          const bool take =
              bland ? (best_index < 0 || basis_[i] < best_index)
                    : (mag > best_pivot + 1e-12 ||
                       (mag > best_pivot - 1e-12 && best_index >= 0 &&
                        basis_[i] < best_index));
          if (take) {
            best_pivot = mag;
            best_index = basis_[i];
            lr = i;
            lau = hu;
          }
        }
        if (lr >= 0 && flip_blocks && ub_[cand.j] - lb_[cand.j] <= tc) {
          lr = -1;  // the bound flip is at least as tight
        }

        const bool good_pivot = lr < 0 || std::abs(wc[lr]) >= 1e-7;
        if (good_pivot || bland) {
          entering = cand.j;
          direction = cand.dir;
          w = wc;
          t_max = tc;
          leave_row = lr;
          leave_at_upper = lau;
          entering_flip_blocks = flip_blocks;
          break;
        }
        if (lr >= 0 && std::abs(wc[lr]) > fb_pivot) {
          fb_pivot = std::abs(wc[lr]);
          fb_entering = cand.j;
          fb_direction = cand.dir;
          fb_w = wc;
          fb_t_max = tc;
          fb_leave_row = lr;
          fb_leave_at_upper = lau;
          fb_flip_blocks = flip_blocks;
        }
      }
      if (entering == -2) continue;  // ray retry: reprice from fresh data
      if (entering < 0) {
        if (fb_entering < 0) return Outcome::kOptimal;
        // Only tiny pivots on offer. Make sure that conclusion was reached
        // on fresh data before committing to one.
        if (!etas_.empty()) {
          if (!refactorize()) return Outcome::kBreakdown;
          continue;
        }
        entering = fb_entering;
        direction = fb_direction;
        w = fb_w;
        t_max = fb_t_max;
        leave_row = fb_leave_row;
        leave_at_upper = fb_leave_at_upper;
        entering_flip_blocks = fb_flip_blocks;
      }

      retried_unbounded = false;

      degenerate_streak = t_max <= 1e-12 ? degenerate_streak + 1 : 0;
      if (degenerate_streak > 200) bland = true;
      if (t_max > 1e-12 && degenerate_streak == 0) bland = false;

      x_[entering] += direction * t_max;
      for (int i = 0; i < m_; ++i) {
        x_[basis_[i]] -= direction * t_max * w[i];
      }

      if (leave_row < 0) {
        // Bound flip: the entering variable ran to its opposite bound.
        status_[entering] =
            direction > 0 ? VarStatus::kAtUpper : VarStatus::kAtLower;
        x_[entering] = direction > 0 ? ub_[entering] : lb_[entering];
        continue;
      }

      const int leaving = basis_[leave_row];
      basis_[leave_row] = entering;
      status_[entering] = VarStatus::kBasic;
      if (leaving != entering) {
        status_[leaving] =
            leave_at_upper ? VarStatus::kAtUpper : VarStatus::kAtLower;
        x_[leaving] = leave_at_upper ? ub_[leaving] : lb_[leaving];
      }
      etas_.push_back(Eta{leave_row, w});
    }
  }

  SimplexOptions opt_;
  int m_ = 0;
  int n_struct_ = 0;
  int n_total_ = 0;
  int art_begin_ = 0;
  double obj_sign_ = 1.0;
  MatX A_;
  VecX b_;
  std::vector<double> lb_, ub_;
  VecX cost_;
  VecX x_;
  std::vector<int> basis_;
  std::vector<VarStatus> status_;
  Eigen::PartialPivLU<MatX> lu_;
  std::vector<Eta> etas_;
  int iterations_ = 0;
  bool strict_ = false;
};

}  // namespace

LpResult solve_lp(const LinearProgram& lp, const SimplexOptions& options) {
  if (lp.rows.empty()) {
    // Pure bound problem: every variable sits at its best bound.
    LpResult r;
    r.x = VecX::Zero(lp.num_vars());
    VecX c = VecX::Zero(lp.num_vars());
    const double sign = lp.sense == ObjectiveSense::kMaximize ? -1.0 : 1.0;
    for (const auto& [j, a] : lp.objective) c[j] += sign * a;
    for (int j = 0; j < lp.num_vars(); ++j) {
      if (lp.lower[j] > lp.upper[j]) {
        r.status = LpStatus::kInfeasible;
        return r;
      }
      if (c[j] > 0.0) {
        if (!std::isfinite(lp.lower[j])) {
          r.status = LpStatus::kUnbounded;
          return r;
        }
        r.x[j] = lp.lower[j];
      } else if (c[j] < 0.0) {
        if (!std::isfinite(lp.upper[j])) {
          r.status = LpStatus::kUnbounded;
          return r;
        }
        r.x[j] = lp.upper[j];
      } else {
        r.x[j] = std::isfinite(lp.lower[j])   ? lp.lower[j]
                 : std::isfinite(lp.upper[j]) ? lp.upper[j]
                                              : 0.0;
      }
    }
    r.status = LpStatus::kOptimal;
    r.objective = sign * c.dot(r.x);
    return r;
  }
  Simplex solver(lp, options);
  return solver.run();
}

}  // namespace pgs
