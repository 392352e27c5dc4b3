#include "pgs/robustness.hpp"

#include <cmath>
#include <stdexcept>

namespace pgs {

double motion_estimate_coefficient(const FrictionCone& cone, int edge) {
  const int p = cone.edge_depth(edge);
  return std::cos(cone.gamma() / std::exp2(p));
}

std::vector<std::pair<int, double>> effective_normal_gap_terms(
    const FrictionCone& cone, int d_n_index,
    const std::vector<int>& alpha_indices, double eta) {
  if (eta < 0.0) throw std::invalid_argument("eta must be nonnegative");
  std::vector<std::pair<int, double>> terms;
  terms.reserve(1 + alpha_indices.size());
  terms.emplace_back(d_n_index, std::cos(eta));
  if (eta == 0.0) return terms;
  const double s = std::sin(eta);
  for (int e = 0; e < static_cast<int>(alpha_indices.size()); ++e) {
    terms.emplace_back(alpha_indices[e],
                       s * motion_estimate_coefficient(cone, e));
  }
  return terms;
}

}  // namespace pgs
