#include "pgs/friction_cone.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace pgs {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

int int_log2(std::int64_t v) {
  int r = 0;
  while (v > 1) {
    v >>= 1;
    ++r;
  }
  return r;
}

}  // namespace

double edge_length(int depth, double gamma, int q_max) {
  if (depth < 1 || depth > q_max + 1) {
    throw std::out_of_range("edge_length: depth " + std::to_string(depth) +
                            " outside [1, " + std::to_string(q_max + 1) + "]");
  }
  double len = 1.0;
  for (int r = q_max + 1; r >= depth; --r) {
    len /= std::cos(gamma / std::exp2(r));
  }
  return len;
}

FrictionCone FrictionCone::initial(double gamma, int q_max) {
  return uniform(gamma, q_max, 1);
}

FrictionCone FrictionCone::uniform(double gamma, int q_max, int depth) {
  if (!(gamma > 0.0) || q_max < 0) {
    throw std::invalid_argument("friction cone: gamma must be positive, q_max >= 0");
  }
  const double ratio = kTwoPi / gamma;
  const auto k0 = static_cast<std::int64_t>(std::llround(ratio));
  if (std::abs(ratio - static_cast<double>(k0)) > 1e-9 || k0 < 3) {
    throw std::invalid_argument(
        "friction cone: gamma must divide 2pi into at least 3 sectors");
  }
  if (depth < 1 || depth > q_max + 1) {
    throw std::invalid_argument("friction cone: depth outside [1, q_max+1]");
  }
  FrictionCone cone;
  cone.gamma_ = gamma;
  cone.q_max_ = q_max;
  cone.grid_size_ = k0 << q_max;
  const std::int64_t step = std::int64_t{1} << (q_max - depth + 1);
  for (std::int64_t p = 0; p < cone.grid_size_; p += step) {
    cone.edge_pos_.push_back(p);
  }
  return cone;
}

double FrictionCone::edge_angle(int e) const {
  return kTwoPi * static_cast<double>(edge_pos_[e]) /
         static_cast<double>(grid_size_);
}

std::int64_t FrictionCone::sector_width(int s) const {
  const int k = edge_count();
  const std::int64_t a = edge_pos_[s];
  const std::int64_t b = edge_pos_[(s + 1) % k];
  return s + 1 == k ? grid_size_ - a + b : b - a;
}

double FrictionCone::sector_angle(int s) const {
  return kTwoPi * static_cast<double>(sector_width(s)) /
         static_cast<double>(grid_size_);
}

int FrictionCone::sector_depth(int s) const {
  // width = 2^(q_max - depth + 1) grid units
  return q_max_ + 1 - int_log2(sector_width(s));
}

bool FrictionCone::sector_at_max_depth(int s) const {
  return sector_width(s) == 1;
}

int FrictionCone::edge_depth(int e) const {
  // The shallower (longer) of the two adjacent sectors. A boundary edge
  // shared with a less refined sector keeps that sector's length: shortening
  // it would pull the neighbor's chord inside the unit circle and cut off
  // exact solutions. Keeping the longer length is equivalent to carrying
  // both lengths as separate columns.
  const int k = edge_count();
  return std::min(sector_depth((e + k - 1) % k), sector_depth(e));
}

double FrictionCone::edge_len(int e) const {
  return edge_length(edge_depth(e), gamma_, q_max_);
}

Eigen::Vector2d FrictionCone::edge_direction(int e) const {
  const double a = edge_angle(e);
  return {std::cos(a), std::sin(a)};
}

FrictionCone::RefineStatus FrictionCone::refine_sector(int s) {
  const std::int64_t width = sector_width(s);
  if (width == 1) return RefineStatus::kAtMaxDepth;
  const std::int64_t mid = (edge_pos_[s] + width / 2) % grid_size_;
  edge_pos_.insert(std::upper_bound(edge_pos_.begin(), edge_pos_.end(), mid),
                   mid);
  return RefineStatus::kRefined;
}

int FrictionCone::sector_containing(double angle) const {
  double a = std::fmod(angle, kTwoPi);
  if (a < 0.0) a += kTwoPi;
  const auto pos = static_cast<std::int64_t>(
      std::floor(a / kTwoPi * static_cast<double>(grid_size_)));
  const auto it =
      std::upper_bound(edge_pos_.begin(), edge_pos_.end(),
                       std::min(pos, grid_size_ - 1));
  const int idx = static_cast<int>(it - edge_pos_.begin()) - 1;
  return idx < 0 ? edge_count() - 1 : idx;
}

std::string FrictionCone::dump() const {
  std::ostringstream out;
  out.precision(12);
  for (int e = 0; e < edge_count(); ++e) {
    out << edge_angle(e) * 180.0 / std::numbers::pi << "," << edge_len(e)
        << "," << edge_depth(e) << "\n";
  }
  return out.str();
}

std::optional<ActiveSector> active_sector(const FrictionCone& cone,
                                          const VecX& weights, double tol) {
  const int k = cone.edge_count();
  if (static_cast<int>(weights.size()) != k) {
    throw std::invalid_argument("active_sector: weight count != edge count");
  }
  const double scale = std::max(1.0, weights.cwiseAbs().maxCoeff());
  std::vector<int> support;
  for (int e = 0; e < k; ++e) {
    if (std::abs(weights[e]) > tol * scale) support.push_back(e);
  }
  if (support.empty()) return std::nullopt;
  int sector;
  if (support.size() == 1) {
    const int e = support[0];
    sector = e == 0 ? 0 : e - 1;  // adjacent sector with the lower start angle
  } else if (support.size() == 2) {
    const int a = support[0];
    const int b = support[1];
    if (b == a + 1) {
      sector = a;
    } else if (a == 0 && b == k - 1) {
      sector = k - 1;
    } else {
      throw std::invalid_argument("active_sector: support is not adjacent");
    }
  } else {
    throw std::invalid_argument("active_sector: more than two nonzero weights");
  }
  return ActiveSector{sector, cone.sector_angle(sector)};
}

std::vector<ActiveSector> refinement_sectors(const FrictionCone& cone,
                                             const VecX& weights, double tol) {
  const int k = cone.edge_count();
  if (static_cast<int>(weights.size()) != k) {
    throw std::invalid_argument(
        "refinement_sectors: weight count != edge count");
  }
  const double scale = std::max(1.0, weights.cwiseAbs().maxCoeff());
  std::vector<int> support;
  for (int e = 0; e < k; ++e) {
    if (std::abs(weights[e]) > tol * scale) support.push_back(e);
  }
  std::vector<ActiveSector> out;
  if (support.empty()) return out;
  if (support.size() == 1) {
    const int e = support[0];
    const int below = (e + k - 1) % k;
    out.push_back(ActiveSector{below, cone.sector_angle(below)});
    out.push_back(ActiveSector{e, cone.sector_angle(e)});
    return out;
  }
  const auto spanned = active_sector(cone, weights, tol);
  if (spanned) out.push_back(*spanned);
  return out;
}

int target_depth(double delta, double gamma) {
  if (!(delta > 0.0)) throw std::invalid_argument("target_depth: delta <= 0");
  const double j = std::log2(gamma / delta);
  const double jr = std::round(j);
  if (std::abs(j - jr) > 1e-6) {
    throw std::invalid_argument("target_depth: delta is not gamma / 2^j");
  }
  return static_cast<int>(jr) + 2;
}

}  // namespace pgs
