#pragma once

#include <Eigen/Core>

namespace pgs {

using Vec3 = Eigen::Vector3d;
using Vec6 = Eigen::Matrix<double, 6, 1>;
using VecX = Eigen::VectorXd;
using MatX = Eigen::MatrixXd;
using Mat63 = Eigen::Matrix<double, 6, 3>;

// Feasibility tolerance in problem units (N, N·m).
inline constexpr double kFeasTol = 1e-7;

// Virtual-motion magnitude below which a contact is classified as sticking
// in diagnostics. Never used inside constraints.
inline constexpr double kMotionTol = 1e-8;

}  // namespace pgs
