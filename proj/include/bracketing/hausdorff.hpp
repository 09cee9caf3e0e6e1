#pragma once

#include "bracketing/polytope.hpp"

namespace bracketing {

// Euclidean projection of y onto a nonempty halfspace system, by exact active-set enumeration.
Vec project(const HalfspaceSystem& S, const Vec& y);
double distance(const HalfspaceSystem& S, const Vec& y);

double hausdorff(const HalfspaceSystem& P, const HalfspaceSystem& Q);
double hausdorff(const Polytope& P, const Polytope& Q);

}  // namespace bracketing
