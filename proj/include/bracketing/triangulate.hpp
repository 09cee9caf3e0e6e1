#pragma once

#include <vector>

#include "bracketing/polytope.hpp"

namespace bracketing {

// Pulling triangulation of the convex hull of `verts` (tight sets index the generating system),
// which must have affine dimension `dim`. Each simplex is a list of dim+1 indices into verts.
std::vector<std::vector<int>> pulling_triangulation(const std::vector<VertexInfo>& verts, int dim);

// Simplices as d x (d+1) vertex matrices; empty when S is empty or lower dimensional.
std::vector<Mat> triangulate(const HalfspaceSystem& S);
std::vector<Polytope> triangulate(const Polytope& P);

double simplex_volume(const Mat& simplex);
// Exact volume; 0 for empty or lower-dimensional systems.
double volume(const HalfspaceSystem& S);
double volume(const Polytope& P);

}  // namespace bracketing
