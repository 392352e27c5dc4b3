#pragma once

#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "pgs/types.hpp"

namespace pgs {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

enum class RowSense { kEq, kLe, kGe };

struct LinearRow {
  std::vector<std::pair<int, double>> terms;  // (variable index, coefficient)
  RowSense sense = RowSense::kEq;
  double rhs = 0.0;
};

enum class ObjectiveSense { kMinimize, kMaximize };

// Dense-friendly LP: named continuous variables with (possibly infinite)
// bounds, sparse linear rows, linear objective. An empty objective is a pure
// feasibility problem (min 0).
struct LinearProgram {
  std::vector<std::string> names;
  std::vector<double> lower;
  std::vector<double> upper;
  std::vector<LinearRow> rows;
  std::vector<std::pair<int, double>> objective;
  ObjectiveSense sense = ObjectiveSense::kMinimize;

  int num_vars() const { return static_cast<int>(lower.size()); }

  int add_var(std::string name, double lb, double ub) {
    names.push_back(std::move(name));
    lower.push_back(lb);
    upper.push_back(ub);
    return num_vars() - 1;
  }

  void add_row(LinearRow row) { rows.push_back(std::move(row)); }
  void add_row(std::vector<std::pair<int, double>> terms, RowSense sense,
               double rhs) {
    rows.push_back(LinearRow{std::move(terms), sense, rhs});
  }

  // Human-readable listing for solver-independent inspection.
  std::string dump() const;
};

// Signed violation of a row at a point (0 when satisfied within tol scaled
// by the row magnitude).
double row_violation(const LinearRow& row, const VecX& x);

enum class LpStatus { kOptimal, kInfeasible, kUnbounded, kBreakdown };

struct LpResult {
  LpStatus status = LpStatus::kBreakdown;
  VecX x;            // structural variables (valid when optimal)
  double objective = 0.0;
  int iterations = 0;
};

struct SimplexOptions {
  double feas_tol = 1e-7;
  double opt_tol = 1e-9;
  double pivot_tol = 1e-9;
  int refactor_every = 48;
  int max_iterations = 50000;
};

// Two-phase revised simplex over bounded variables with a Bland's-rule
// fallback for anti-cycling. Returns an optimal basic solution within
// feas_tol, a correct infeasible/unbounded verdict, or kBreakdown when the
// numerics give out (never a silently wrong status).
LpResult solve_lp(const LinearProgram& lp, const SimplexOptions& options = {});

}  // namespace pgs
