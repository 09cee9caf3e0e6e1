#pragma once

#include <cmath>
#include <cstdint>
#include <utility>
#include <vector>

#include "bracketing/polytope.hpp"

namespace bracketing {

// Regular grid in the frame x = basis * y, nodes at y = lo + i * pitch, i in [0, nodes).
// Axes with one node carry no pitch. Flat indices are row-major (last axis fastest).
struct GridFrame {
    Mat basis;  // d x d, orthonormal columns
    Vec lo;
    Vec pitch;
    std::vector<int> nodes;

    Index dim() const { return basis.cols(); }
    std::int64_t node_count() const;
    std::int64_t flat(const std::vector<int>& idx) const;
    std::vector<int> unflat(std::int64_t flat) const;
    Vec node_local(const std::vector<int>& idx) const;
    Vec node_point(const std::vector<int>& idx) const { return basis * node_local(idx); }
    Vec local(const Vec& x) const { return basis.transpose() * x; }
};

struct StencilEntry {
    std::int64_t node;
    double weight;
};

// Piecewise-linear interpolation on the Kuhn triangulation of each grid cube; points outside the
// grid box are clamped to it. Returns up to d+1 nodes with nonnegative weights summing to 1.
std::vector<StencilEntry> kuhn_stencil(const GridFrame& g, const Vec& x);
double interpolate(const GridFrame& g, const std::vector<double>& values, const Vec& x);

// Integral over a d-simplex (d x (d+1) vertex matrix) of the affine function with the given vertex
// values raised to the power p (values >= 0). Exact for integer p, Gauss-Legendre otherwise.
double simplex_power_integral(const Mat& simplex, const Vec& values, double p);

// Integral of the grid interpolant of `values` to the power p over the grid box, or over its
// intersection with `clip` when given.
double grid_power_integral(const GridFrame& g, const std::vector<double>& values, double p,
                           const HalfspaceSystem* clip = nullptr);

inline constexpr int kGaussPoints = 20;

// Integral of fn^p over a union of simplices with a Duffy-mapped Gauss-Legendre product rule.
template <class Fn>
double integrate_power(const std::vector<Mat>& simplices, Fn&& fn, double p);

namespace detail {
// kGaussPoints nodes and weights on [0, 1].
const std::vector<std::pair<double, double>>& gauss_legendre_unit();
}

template <class Fn>
double integrate_power(const std::vector<Mat>& simplices, Fn&& fn, double p)
{
    const auto& rule = detail::gauss_legendre_unit();
    const int n = static_cast<int>(rule.size());
    double total = 0.0;
    for (const Mat& S : simplices) {
        const Index d = S.rows();
        Mat E(d, d);
        for (Index c = 0; c < d; ++c) E.col(c) = S.col(c + 1) - S.col(0);
        const double jac = std::abs(E.determinant());
        std::vector<int> idx(static_cast<size_t>(d), 0);
        double sum = 0.0;
        for (;;) {
            // Collapsed coordinates lambda_c = u_c * prod_{b<c}(1 - u_b); the Jacobian is the product
            // of those prefixes.
            double rest = 1.0, w = 1.0;
            Vec x = S.col(0);
            for (Index c = 0; c < d; ++c) {
                const auto& [u, wu] = rule[static_cast<size_t>(idx[static_cast<size_t>(c)])];
                w *= wu * rest;
                x += rest * u * E.col(c);
                rest *= 1.0 - u;
            }
            sum += w * std::pow(fn(x), p);
            Index c = 0;
            while (c < d && ++idx[static_cast<size_t>(c)] == n) idx[static_cast<size_t>(c++)] = 0;
            if (c == d) break;
        }
        total += sum * jac;
    }
    return total;
}

}  // namespace bracketing
