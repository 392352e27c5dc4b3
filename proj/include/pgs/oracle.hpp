#pragma once

#include "pgs/grasp_model.hpp"

namespace pgs {

enum class OracleVerdict { kStable, kUnstable, kBoundary };

struct OracleOptions {
  // Target resolution of the slide-direction grid. Enumeration starts on a
  // coarse dyadic grid and locally halves toward this resolution around
  // promising assignments.
  double angle_grid_deg = 0.1;
  // Relative band on the friction bound: "stable" must survive with cones
  // shrunk by this factor, "unstable" must fail even with cones inflated by
  // it. Anything in between is "boundary".
  double band_tol = 0.02;
  // Half-planes used for the polygonal inner/outer friction disc.
  int disc_planes = 64;
  long max_lp_solves = 500000;
};

// Exhaustive verification of the exact quasi-static model on a small grasp:
// every contact is SEPARATED, STICKING or SLIDING along a gridded direction
// (friction exactly anti-parallel at the cone boundary), every joint LOCKED
// or MOVING, and each mode assignment is checked as a feasibility LP over
// contact forces and virtual motions. Stable iff some assignment passes with
// the shrunk cone; unstable iff none passes with the inflated cone.
//
// Guarded to at most 4 contacts and 4 joints. Independent of the
// encoding/refinement pipeline.
OracleVerdict brute_force_stability(const GraspModel& grasp,
                                    const VecX& commanded_torques,
                                    const Vec6& wrench,
                                    const OracleOptions& options = {});

}  // namespace pgs
