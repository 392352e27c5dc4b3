#pragma once

#include <utility>
#include <vector>

#include "pgs/friction_cone.hpp"
#include "pgs/types.hpp"

namespace pgs {

// Per-edge coefficient of the linear tangential-motion magnitude estimate
//
//   ||d_t||  ~=  sum_e  coef_e * alpha_e
//
// for motion weights alpha expressed against unit edge directions. With an
// active sector at depth p the coefficient is l_{p+1} / l_p = cos(gamma/2^p),
// which makes the estimate exact for motion at the sector midpoint and an
// underestimate everywhere else (worst case cos(delta/2) at an edge). The
// same estimate against length-l_p edges carries weights scaled by 1/l_p, so
// this is algebraically the length-scaled form with the sector scale folded
// into one coefficient per edge. Edges bordering sectors of unequal depth
// take the deeper sector's coefficient.
double motion_estimate_coefficient(const FrictionCone& cone, int edge);

// Linear expression for the relative contact motion along the worst-case
// contact normal, as (variable index, coefficient) terms:
//
//   d_hat_n = d_n cos(eta) + ||d_t|| sin(eta)
//
// with the magnitude replaced by the per-edge estimate above. The worst-case
// normal deviates from the nominal one by eta, tilted so that tangential
// sliding unloads the contact: the sliding motion acquires a separating
// component along the true normal, which strips normal force from sliding
// contacts and in particular starves wedging solutions. This expression
// substitutes for d_n in the normal-force complementarity; with eta = 0 it
// degenerates to d_n itself.
std::vector<std::pair<int, double>> effective_normal_gap_terms(
    const FrictionCone& cone, int d_n_index,
    const std::vector<int>& alpha_indices, double eta);

}  // namespace pgs
