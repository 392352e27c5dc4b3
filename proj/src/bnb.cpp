#include <algorithm>
#include <chrono>
#include <cmath>
#include <ostream>
#include <queue>
#include <sstream>

#include "pgs/mip.hpp"

namespace pgs {

std::string MixedIntegerProgram::dump() const {
  std::ostringstream out;
  out << base.dump();
  const auto name = [&](int j) {
    return j < static_cast<int>(base.names.size()) && !base.names[j].empty()
               ? base.names[j]
               : "x" + std::to_string(j);
  };
  const auto print_rows = [&](const std::vector<LinearRow>& rows) {
    for (const auto& row : rows) {
      out << "    ";
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
  };
  out << "disjunctions " << disjunctions.size() << "\n";
  for (const auto& d : disjunctions) {
    out << "  " << d.label << " branch A:\n";
    print_rows(d.branch_a);
    out << "  " << d.label << " branch B:\n";
    print_rows(d.branch_b);
  }
  out << "sos2 groups " << sos2_groups.size() << "\n";
  for (const auto& g : sos2_groups) {
    out << "  " << g.label << (g.cyclic ? " (cyclic):" : " (linear):");
    for (int t = 0; t < g.size(); ++t) {
      out << " {";
      for (size_t v = 0; v < g.witness_vars[t].size(); ++v) {
        out << (v ? "," : "") << name(g.witness_vars[t][v]);
      }
      out << "}";
    }
    out << "\n";
  }
  return out.str();
}

namespace {

enum class DisjState : unsigned char { kOpen, kA, kB };

// Allowed support of an SOS2 group: the run {start, ..., start+len-1} mod k.
// While `full` is set the run is the whole cycle and the wrap pair is still
// allowed; after the first cut the run is linear and only consecutive
// positions inside it form allowed pairs.
struct Arc {
  int start = 0;
  int len = 0;
  bool full = true;
};

struct Node {
  std::vector<DisjState> disj;
  std::vector<Arc> arcs;
  double bound = 0.0;
  int depth = 0;
  long seq = 0;
};

struct NodeOrder {
  double sign;  // +1 minimize, -1 maximize
  bool operator()(const Node& a, const Node& b) const {
    const double ka = sign * a.bound;
    const double kb = sign * b.bound;
    if (ka != kb) return ka > kb;                      // best bound first
    if (a.depth != b.depth) return a.depth < b.depth;  // then deepest
    return a.seq < b.seq;                              // then most recent
  }
};

class BranchAndBound {
 public:
  BranchAndBound(const MixedIntegerProgram& mip, const BnbOptions& opt)
      : mip_(mip), opt_(opt) {
    minimize_ = mip.base.sense == ObjectiveSense::kMinimize ||
                mip.base.objective.empty();
    feasibility_only_ = mip.base.objective.empty();
  }

  SolveOutcome run() {
    const auto t0 = std::chrono::steady_clock::now();
    SolveOutcome out;
    std::priority_queue<Node, std::vector<Node>, NodeOrder> pool(
        NodeOrder{minimize_ ? 1.0 : -1.0});

    Node root;
    root.disj.assign(mip_.disjunctions.size(), DisjState::kOpen);
    root.arcs.resize(mip_.sos2_groups.size());
    for (size_t g = 0; g < mip_.sos2_groups.size(); ++g) {
      root.arcs[g] = {0, mip_.sos2_groups[g].size(),
                      mip_.sos2_groups[g].cyclic};
    }
    root.bound = minimize_ ? -kInf : kInf;
    pool.push(root);

    bool have_incumbent = false;
    VecX incumbent;
    double incumbent_obj = 0.0;
    Node incumbent_node;
    bool capped = false;
    long seq = 0;

    while (!pool.empty()) {
      if (opt_.node_limit >= 0 && out.node_count >= opt_.node_limit) {
        capped = true;
        break;
      }
      if (opt_.time_limit_ms >= 0 &&
          elapsed_ms(t0) > opt_.time_limit_ms) {
        capped = true;
        break;
      }
      Node node = pool.top();
      pool.pop();
      ++out.node_count;

      if (have_incumbent && !improves(node.bound, incumbent_obj)) {
        log_node(node, "pruned");
        continue;
      }

      const LinearProgram lp = build_lp(node);
      const LpResult rel = solve_lp(lp, opt_.lp);
      if (rel.status == LpStatus::kBreakdown) {
        out.status = MipStatus::kBreakdown;
        out.wall_ms = elapsed_ms(t0);
        return out;
      }
      if (rel.status == LpStatus::kInfeasible) {
        log_node(node, "infeasible");
        continue;
      }
      if (rel.status == LpStatus::kUnbounded) {
        const int open_disj = first_open_disj(node);
        const int open_group = first_branchable_arc(node);
        if (open_disj < 0 && open_group < 0) {
          out.status = MipStatus::kUnbounded;
          out.wall_ms = elapsed_ms(t0);
          return out;
        }
        // The relaxation ray may die once branching resolves; split blindly.
        if (open_disj >= 0) {
          branch_disjunction(pool, node, open_disj, seq);
        } else {
          const Arc& arc = node.arcs[open_group];
          const int cut = std::clamp(arc.len / 2, 1, std::max(1, arc.len - 2));
          push_arc_children(pool, node, open_group,
                            arc.full ? 0 : arc.start, cut, seq);
        }
        log_node(node, "unbounded-relaxation");
        continue;
      }

      const double bound = rel.objective;
      if (have_incumbent && !improves(bound, incumbent_obj)) {
        log_node(node, "bounded-out");
        continue;
      }
      node.bound = bound;

      // Branch order: disjunctions first, then SOS2 groups; within each
      // kind most-violated-first with index tie-break.
      int pick_disj = -1;
      double worst = opt_.lp.feas_tol;
      for (size_t d = 0; d < mip_.disjunctions.size(); ++d) {
        if (node.disj[d] != DisjState::kOpen) continue;
        const double v = disjunction_violation(mip_.disjunctions[d], rel.x);
        if (v > worst) {
          worst = v;
          pick_disj = static_cast<int>(d);
        }
      }
      if (pick_disj >= 0) {
        branch_disjunction(pool, node, pick_disj, seq);
        log_node(node, "branch-disj");
        continue;
      }

      int pick_group = -1;
      double worst_g = kSupportTol;
      for (size_t g = 0; g < mip_.sos2_groups.size(); ++g) {
        const double v = sos2_violation(g, node.arcs[g], rel.x);
        if (v > worst_g) {
          worst_g = v;
          pick_group = static_cast<int>(g);
        }
      }
      if (pick_group >= 0) {
        branch_sos2(pool, node, pick_group, rel.x, seq);
        log_node(node, "branch-sos2");
        continue;
      }

      // Integer-feasible leaf.
      log_node(node, "leaf");
      if (!have_incumbent || improves(bound, incumbent_obj)) {
        have_incumbent = true;
        incumbent = canonicalize(rel.x);
        incumbent_obj = bound;
        incumbent_node = node;
      }
      if (feasibility_only_) break;  // first found leaf answers the query
    }

    out.wall_ms = elapsed_ms(t0);
    if (capped && !(feasibility_only_ && have_incumbent)) {
      out.status = MipStatus::kCapReached;
      return out;
    }
    if (have_incumbent) {
      out.status = MipStatus::kOptimal;
      out.assignment = polish(incumbent_node, incumbent, incumbent_obj);
      out.objective = incumbent_obj;
    } else {
      out.status = MipStatus::kInfeasible;
    }
    return out;
  }

  // Secondary objective pass on the winning leaf: keep the primary objective
  // at its optimum and minimize the designated weight mass. Falls back to
  // the unpolished assignment if the pass fails numerically.
  VecX polish(const Node& node, const VecX& found, double objective) const {
    if (mip_.polish_vars.empty()) return found;
    LinearProgram lp = build_lp(node);
    if (!mip_.base.objective.empty()) {
      LinearRow pin;
      pin.terms = mip_.base.objective;
      pin.sense = minimize_ ? RowSense::kLe : RowSense::kGe;
      pin.rhs = objective;
      lp.add_row(std::move(pin));
    }
    lp.objective.clear();
    for (int v : mip_.polish_vars) lp.objective.emplace_back(v, 1.0);
    lp.sense = ObjectiveSense::kMinimize;
    const LpResult res = solve_lp(lp, opt_.lp);
    if (res.status != LpStatus::kOptimal) return found;
    // The polished point must still satisfy the leaf's pattern.
    for (size_t g = 0; g < mip_.sos2_groups.size(); ++g) {
      if (sos2_violation(g, node.arcs[g], res.x) > kSupportTol) return found;
    }
    for (size_t d = 0; d < mip_.disjunctions.size(); ++d) {
      if (node.disj[d] != DisjState::kOpen) continue;
      if (disjunction_violation(mip_.disjunctions[d], res.x) >
          opt_.lp.feas_tol) {
        return found;
      }
    }
    return canonicalize(res.x);
  }

 private:
  static constexpr double kSupportTol = 1e-9;

  bool improves(double bound, double incumbent) const {
    return minimize_ ? bound < incumbent - 1e-9 : bound > incumbent + 1e-9;
  }

  static double elapsed_ms(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(
               std::chrono::steady_clock::now() - t0)
        .count();
  }

  void log_node(const Node& n, const char* what) const {
    if (!opt_.node_log) return;
    (*opt_.node_log) << n.depth << "," << n.bound << "," << what << "\n";
  }

  int first_open_disj(const Node& n) const {
    for (size_t d = 0; d < n.disj.size(); ++d) {
      if (n.disj[d] == DisjState::kOpen) return static_cast<int>(d);
    }
    return -1;
  }

  int first_branchable_arc(const Node& n) const {
    for (size_t g = 0; g < n.arcs.size(); ++g) {
      if (n.arcs[g].full || n.arcs[g].len > 2) return static_cast<int>(g);
    }
    return -1;
  }

  double disjunction_violation(const Disjunction& d, const VecX& x) const {
    const auto branch_viol = [&](const std::vector<LinearRow>& rows) {
      double v = 0.0;
      for (const auto& row : rows) v = std::max(v, row_violation(row, x));
      return v;
    };
    return std::min(branch_viol(d.branch_a), branch_viol(d.branch_b));
  }

  // Pins each shadow variable to its position weight so reported
  // assignments carry the realized SOS2 pattern.
  VecX canonicalize(const VecX& x) const {
    VecX out = x;
    for (const auto& g : mip_.sos2_groups) {
      for (int t = 0; t < g.size() && t < static_cast<int>(g.vars.size());
           ++t) {
        double v = 0.0;
        for (int wv : g.witness_vars[t]) v = std::max(v, std::abs(out[wv]));
        out[g.vars[t]] = v;
      }
    }
    return out;
  }

  // Realized support weight at each group position.
  VecX group_support(const Sos2Group& g, const VecX& x) const {
    VecX u = VecX::Zero(g.size());
    for (int t = 0; t < g.size(); ++t) {
      double v = 0.0;
      for (int wv : g.witness_vars[t]) v = std::max(v, std::abs(x[wv]));
      u[t] = v;
    }
    return u;
  }

  // Support mass outside the best arc-allowed adjacent pair, relative.
  double sos2_violation(size_t gi, const Arc& arc, const VecX& x) const {
    const Sos2Group& g = mip_.sos2_groups[gi];
    const int k = g.size();
    const VecX u = group_support(g, x);
    const double total = u.sum();
    if (total <= kSupportTol) return 0.0;
    double best = u.maxCoeff();  // singleton support is always a valid pattern
    if (arc.full) {
      for (int t = 0; t < k; ++t) {
        best = std::max(best, u[t] + u[(t + 1) % k]);
      }
    } else {
      for (int t = 0; t + 1 < arc.len; ++t) {
        const int a = (arc.start + t) % k;
        const int b = (arc.start + t + 1) % k;
        best = std::max(best, u[a] + u[b]);
      }
    }
    return std::max(0.0, total - best) / (1.0 + total);
  }

  LinearProgram build_lp(const Node& node) const {
    LinearProgram lp = mip_.base;
    for (size_t d = 0; d < node.disj.size(); ++d) {
      if (node.disj[d] == DisjState::kA) {
        for (const auto& row : mip_.disjunctions[d].branch_a) lp.add_row(row);
      } else if (node.disj[d] == DisjState::kB) {
        for (const auto& row : mip_.disjunctions[d].branch_b) lp.add_row(row);
      }
    }
    for (size_t g = 0; g < node.arcs.size(); ++g) {
      const Arc& arc = node.arcs[g];
      const Sos2Group& group = mip_.sos2_groups[g];
      const int k = group.size();
      if (arc.full || arc.len >= k) continue;
      std::vector<bool> allowed(k, false);
      for (int t = 0; t < arc.len; ++t) allowed[(arc.start + t) % k] = true;
      for (int t = 0; t < k; ++t) {
        if (allowed[t]) continue;
        for (int wv : group.witness_vars[t]) {
          lp.lower[wv] = 0.0;
          lp.upper[wv] = 0.0;
        }
        if (t < static_cast<int>(group.vars.size())) {
          lp.lower[group.vars[t]] = 0.0;
          lp.upper[group.vars[t]] = 0.0;
        }
      }
    }
    return lp;
  }

  void branch_disjunction(
      std::priority_queue<Node, std::vector<Node>, NodeOrder>& pool,
      const Node& parent, int d, long& seq) const {
    Node a = parent;
    a.disj[d] = DisjState::kA;
    a.depth = parent.depth + 1;
    a.seq = ++seq;
    Node b = parent;
    b.disj[d] = DisjState::kB;
    b.depth = parent.depth + 1;
    b.seq = ++seq;
    pool.push(std::move(a));
    pool.push(std::move(b));
  }

  // Splits the allowed run at offset `cut` from `start`. Children share only
  // the boundary position(s); their allowed pairs cover the parent's, and
  // each child allows strictly fewer pairs than the parent.
  void push_arc_children(
      std::priority_queue<Node, std::vector<Node>, NodeOrder>& pool,
      const Node& parent, int g, int start, int cut, long& seq) const {
    const int k = mip_.sos2_groups[g].size();
    const Arc& arc = parent.arcs[g];
    Node left = parent;
    Node right = parent;
    if (arc.full) {
      // First cut of a cyclic group: two runs sharing both endpoints.
      left.arcs[g] = {start, cut + 1, false};
      right.arcs[g] = {(start + cut) % k, k - cut + 1, false};
    } else {
      left.arcs[g] = {arc.start, cut + 1, false};
      right.arcs[g] = {(arc.start + cut) % k, arc.len - cut, false};
    }
    left.depth = right.depth = parent.depth + 1;
    left.seq = ++seq;
    right.seq = ++seq;
    pool.push(std::move(left));
    pool.push(std::move(right));
  }

  void branch_sos2(
      std::priority_queue<Node, std::vector<Node>, NodeOrder>& pool,
      const Node& parent, int g, const VecX& x, long& seq) const {
    const Sos2Group& group = mip_.sos2_groups[g];
    const int k = group.size();
    const Arc& arc = parent.arcs[g];
    const VecX u = group_support(group, x);

    int start;
    int len;
    if (arc.full) {
      // Cut the cycle where the support has its largest gap, so the split
      // separates the support mass.
      int gap_end = 0;
      int best_gap = -1;
      int prev = -1;
      int first = -1;
      for (int t = 0; t < k; ++t) {
        if (u[t] <= kSupportTol) continue;
        if (first < 0) first = t;
        if (prev >= 0 && t - prev > best_gap) {
          best_gap = t - prev;
          gap_end = t;
        }
        prev = t;
      }
      if (first >= 0 && prev >= 0 && first + k - prev > best_gap) {
        gap_end = first;
      }
      start = gap_end;
      len = k;
    } else {
      start = arc.start;
      len = arc.len;
    }

    // Weighted median offset; interior so both children shrink.
    double total = 0.0;
    for (int t = 0; t < len; ++t) total += u[(start + t) % k];
    int cut = len / 2;
    if (total > kSupportTol) {
      double acc = 0.0;
      for (int t = 0; t < len; ++t) {
        acc += u[(start + t) % k];
        if (acc >= 0.5 * total) {
          cut = t;
          break;
        }
      }
    }
    cut = std::clamp(cut, 1, std::max(1, len - 2));
    push_arc_children(pool, parent, g, start, cut, seq);
  }

  const MixedIntegerProgram& mip_;
  BnbOptions opt_;
  bool minimize_ = true;
  bool feasibility_only_ = false;
};

}  // namespace

SolveOutcome solve_mip(const MixedIntegerProgram& mip,
                       const BnbOptions& options) {
  BranchAndBound solver(mip, options);
  return solver.run();
}

}  // namespace pgs
