#pragma once

#include <Eigen/Dense>
#include <vector>

namespace bracketing {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using Index = Eigen::Index;

// Absolute tolerance for LP/QP solves and tightness/containment predicates.
inline constexpr double kGeomTol = 1e-9;

using IndexTuple = std::vector<int>;

}  // namespace bracketing
