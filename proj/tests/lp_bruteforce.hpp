#pragma once

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "pgs/linear_program.hpp"

namespace pgs::testing {

// Brute-force LP oracle for small problems with x >= 0 variables and <=/=
// rows: converts to standard form with slacks and enumerates every basis
// subset, keeping the best feasible basic solution. Independent of the
// simplex implementation; only usable when the feasible set is bounded.
inline std::optional<double> brute_force_lp(const LinearProgram& lp) {
  const int n = lp.num_vars();
  const int m = static_cast<int>(lp.rows.size());
  for (int j = 0; j < n; ++j) {
    if (lp.lower[j] != 0.0 || std::isfinite(lp.upper[j])) {
      throw std::invalid_argument("oracle expects plain x >= 0 variables");
    }
  }
  // Standard form [A | S] x = b with one slack column per inequality.
  int n_slack = 0;
  for (const auto& row : lp.rows) {
    if (row.sense != RowSense::kEq) ++n_slack;
  }
  const int total = n + n_slack;
  MatX a = MatX::Zero(m, total);
  VecX b(m);
  VecX cost = VecX::Zero(total);
  const double sign = lp.sense == ObjectiveSense::kMaximize ? -1.0 : 1.0;
  for (const auto& [j, v] : lp.objective) cost[j] += sign * v;
  int slack = n;
  for (int i = 0; i < m; ++i) {
    for (const auto& [j, v] : lp.rows[i].terms) a(i, j) += v;
    b[i] = lp.rows[i].rhs;
    if (lp.rows[i].sense == RowSense::kLe) a(i, slack++) = 1.0;
    if (lp.rows[i].sense == RowSense::kGe) a(i, slack++) = -1.0;
  }

  if (total < m) {
    throw std::invalid_argument("oracle needs at least as many columns as rows");
  }
  std::optional<double> best;
  const auto evaluate = [&](const std::vector<int>& basis) {
    MatX basis_mat(m, m);
    for (int i = 0; i < m; ++i) basis_mat.col(i) = a.col(basis[i]);
    Eigen::FullPivLU<MatX> lu(basis_mat);
    if (!lu.isInvertible()) return;
    const VecX xb = lu.solve(b);
    for (int i = 0; i < m; ++i) {
      if (xb[i] < -1e-9) return;
    }
    double obj = 0.0;
    for (int i = 0; i < m; ++i) obj += cost[basis[i]] * xb[i];
    if (!best || obj < *best) best = obj;
  };
  // Enumerate all m-subsets of columns.
  std::vector<int> idx(m);
  for (int i = 0; i < m; ++i) idx[i] = i;
  while (true) {
    evaluate(idx);
    int pos = m - 1;
    while (pos >= 0 && idx[pos] == total - m + pos) --pos;
    if (pos < 0) break;
    ++idx[pos];
    for (int t = pos + 1; t < m; ++t) idx[t] = idx[t - 1] + 1;
  }
  if (best) return sign * *best;
  return std::nullopt;
}

}  // namespace pgs::testing
