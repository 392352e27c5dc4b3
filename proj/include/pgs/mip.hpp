#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "pgs/linear_program.hpp"

namespace pgs {

// Either/or constraint pair: every solution must satisfy all rows of branch
// A or all rows of branch B. Resolved by branching, never by big-M rows.
struct Disjunction {
  std::vector<LinearRow> branch_a;
  std::vector<LinearRow> branch_b;
  std::string label;
};

// Ordered set of positions, in cone-edge order, of which at most two,
// cyclically (or linearly) adjacent, may carry nonzero weight. Each position
// lists the variables realizing its weight (the coupled force and motion
// weights of one friction edge); branching zeroes whole positions. `vars`
// may optionally name one shadow variable per position that mirrors the
// position weight in reported assignments.
struct Sos2Group {
  std::vector<std::vector<int>> witness_vars;  // per position
  std::vector<int> vars;                       // optional shadows, may be empty
  bool cyclic = true;
  std::string label;

  int size() const { return static_cast<int>(witness_vars.size()); }
};

struct MixedIntegerProgram {
  LinearProgram base;
  std::vector<Disjunction> disjunctions;
  std::vector<Sos2Group> sos2_groups;
  // Variables whose total is minimized among otherwise-optimal assignments
  // (secondary lexicographic objective). Keeps witnesses free of gratuitous
  // weight mass.
  std::vector<int> polish_vars;

  // Human-readable constraint listing for solver-independent inspection.
  std::string dump() const;
};

enum class MipStatus {
  kOptimal,
  kInfeasible,
  kUnbounded,
  kCapReached,  // node or time limit exhausted
  kBreakdown,
};

struct SolveOutcome {
  MipStatus status = MipStatus::kBreakdown;
  VecX assignment;      // valid when optimal
  double objective = 0.0;
  long node_count = 0;
  double wall_ms = 0.0;
};

struct BnbOptions {
  long node_limit = -1;       // < 0: unlimited
  double time_limit_ms = -1;  // < 0: unlimited
  std::ostream* node_log = nullptr;  // one line per node: depth, bound, status
  SimplexOptions lp;
};

// Exact branch and bound over LP relaxations. Returns the global optimum
// over all disjunction/SOS2 resolutions, a certified infeasible verdict, or
// a distinct cap/breakdown status. Deterministic for fixed inputs.
SolveOutcome solve_mip(const MixedIntegerProgram& mip,
                       const BnbOptions& options = {});

}  // namespace pgs
