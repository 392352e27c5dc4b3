#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "pgs/types.hpp"

namespace pgs {

// One generator of a polyhedral friction cone approximation.
struct FrictionEdge {
  double angle = 0.0;   // radians in [0, 2pi), within the tangent plane
  double length = 1.0;  // >= 1, shrinks toward 1 with depth
  int depth = 1;        // refinement level p >= 1
};

// Length l_p of a friction edge created at refinement depth p:
//   l_p = prod_{r=p}^{q_max+1} sec(gamma / 2^r)
// These lengths make the sticking polygon of every refinement level contain
// the closed unit disc, with the chord of each sector staying outside the
// unit circle. Throws std::out_of_range unless 1 <= p <= q_max + 1.
double edge_length(int depth, double gamma, int q_max);

// Per-contact friction cone approximation with non-uniform, hierarchically
// bisected sectors. Edge directions live on the exact dyadic grid
// gamma / 2^q_max, so sector identities and depths never drift.
//
// Sector s spans [edge s, edge s+1) cyclically; a sector of depth j has
// angle gamma / 2^(j-1). An edge's depth is the deeper of its two adjacent
// sectors, which fixes its length via edge_length.
class FrictionCone {
 public:
  // Uniform cone: 2pi/gamma edges, all sectors at depth 1. Requires gamma to
  // divide 2pi into at least three sectors and q_max >= 0.
  static FrictionCone initial(double gamma, int q_max);

  // Uniform cone with every sector already at `depth`. Used for
  // full-resolution baselines.
  static FrictionCone uniform(double gamma, int q_max, int depth);

  int edge_count() const { return static_cast<int>(edge_pos_.size()); }
  double gamma() const { return gamma_; }
  int q_max() const { return q_max_; }

  double edge_angle(int e) const;
  int edge_depth(int e) const;            // deeper of the adjacent sectors
  double edge_len(int e) const;           // edge_length(edge_depth(e), ...)
  Eigen::Vector2d edge_direction(int e) const;  // unit, (t1, t2) coordinates

  int sector_count() const { return edge_count(); }
  double sector_angle(int s) const;
  int sector_depth(int s) const;          // 1 + log2(gamma / angle)
  bool sector_at_max_depth(int s) const;

  FrictionEdge edge(int e) const {
    return FrictionEdge{edge_angle(e), edge_len(e), edge_depth(e)};
  }

  enum class RefineStatus { kRefined, kAtMaxDepth };

  // Bisects sector s, creating its midpoint edge. The sector's bounding and
  // bisecting edges take the child depth (subject to the deeper-neighbor
  // rule), superseded longer lengths disappear implicitly. Returns
  // kAtMaxDepth without changing anything if the sector cannot be split.
  RefineStatus refine_sector(int s);

  // Index of the sector whose half-open span [edge s, edge s+1) contains the
  // given tangent-plane angle.
  int sector_containing(double angle) const;

  // Debug dump: ordered "angle_deg,length,depth" lines, one per edge.
  std::string dump() const;

 private:
  double gamma_ = 0.0;
  int q_max_ = 0;
  std::int64_t grid_size_ = 0;             // (2pi/gamma) * 2^q_max
  std::vector<std::int64_t> edge_pos_;     // ascending, in [0, grid_size)

  std::int64_t sector_width(int s) const;  // integer grid units
};

// Where in the cone a solution's weights live.
struct ActiveSector {
  int sector = -1;
  double delta = 0.0;  // sector angle, radians
};

// Identifies the sector spanned by the nonzero entries of a weight vector
// (one entry per edge, in edge order). Returns nullopt when all weights are
// zero. A single nonzero entry on edge e selects the adjacent sector with
// the lower start angle. Throws std::invalid_argument when the support is
// not a cyclically adjacent pair.
std::optional<ActiveSector> active_sector(const FrictionCone& cone,
                                          const VecX& weights,
                                          double tol = 1e-9);

// Sectors that refinement must split for this support: the spanned sector
// for a two-edge support, both adjacent sectors when the support sits
// exactly on one edge (that edge only shortens once both neighbors deepen).
std::vector<ActiveSector> refinement_sectors(const FrictionCone& cone,
                                             const VecX& weights,
                                             double tol = 1e-9);

// Algorithm target depth for an active sector of angle delta:
//   p = log2(gamma / delta) + 2.
// Throws std::invalid_argument unless delta = gamma / 2^j for an integer j.
int target_depth(double delta, double gamma);

}  // namespace pgs
