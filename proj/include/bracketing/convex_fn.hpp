#pragma once

#include <vector>

#include "bracketing/polytope.hpp"

namespace bracketing {

struct Box {
    Vec lo;
    Vec hi;
    Index dim() const { return lo.size(); }
};

// f(x) = clamp(max_j <g_j, x> + c_j, -B, B). Sampled functions keep the maximum within [-B, B]
// on the domain, so the clamp is inactive there.
struct ConvexFn {
    Mat slopes;      // m x d, row j is g_j
    Vec intercepts;  // m
    double B = 1.0;

    ConvexFn() = default;
    ConvexFn(Mat g, Vec c, double bound);

    Index dim() const { return slopes.cols(); }
    Index pieces() const { return slopes.rows(); }
    double raw(const Vec& x) const { return (slopes * x + intercepts).maxCoeff(); }
    double operator()(const Vec& x) const;

    // Pieces attaining the maximum on a full-dimensional part of D.
    std::vector<int> active_pieces(const Polytope& D) const;
    double min_over(const Polytope& D) const;
    double max_over(const Polytope& D) const;
    // max_j |<g_j, e>| over the active pieces.
    double lipschitz_along(const Polytope& D, const Vec& e) const;
};

ConvexFn constant_fn(int d, double value, double B);

// Affine change of variables mapping box_to onto box_from coordinatewise, values scaled by
// B_to / B_from: f~(t) = (B_to / B_from) f(lo_from + (t - lo_to) * (hi_from - lo_from) / (hi_to - lo_to)).
ConvexFn rescale_class(const ConvexFn& f, const Box& box_from, const Box& box_to, double B_from, double B_to);

// V_B(f) = {(x, t) : x in D, f(x) <= t <= B} as a system in R^{d+1}.
HalfspaceSystem epigraph(const ConvexFn& f, const Polytope& D);

struct EpigraphBound {
    double lhs = 0.0;        // sup |f - g|
    double hausdorff = 0.0;  // l_H(V_B(f), V_B(g))
    double rhs = 0.0;        // hausdorff * sqrt(1 + sum gamma^2)
    bool ok = true;
    bool exact_sup = false;  // lhs exact (d = 1) or a grid maximum
};

// Both functions must be Gamma-Lipschitz along the coordinate axes on D (certificate-error otherwise).
EpigraphBound epigraph_hausdorff_bound(const ConvexFn& f, const ConvexFn& g, const Polytope& D, const Vec& gamma,
                                       double slack = 1e-7, int grid_per_axis = 201);

}  // namespace bracketing
