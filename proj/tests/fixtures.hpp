#pragma once

#include <cmath>
#include <random>

#include "bracketing/polytope.hpp"

namespace fixtures {

using bracketing::Mat;
using bracketing::Polytope;
using bracketing::Vec;

inline Vec vec(std::initializer_list<double> xs)
{
    Vec v(static_cast<Eigen::Index>(xs.size()));
    Eigen::Index i = 0;
    for (double x : xs) v(i++) = x;
    return v;
}

inline Polytope unit_box(int d) { return Polytope::box(Vec::Zero(d), Vec::Ones(d)); }

inline Polytope unit_triangle()
{
    Mat V(2, 3);
    V << 0, 1, 0, 0, 0, 1;
    return Polytope::simplex(V);
}

inline Polytope regular_polygon(int n, double radius, Vec center)
{
    Mat V(2, n);
    for (int i = 0; i < n; ++i) {
        const double t = M_PI / 2 + 2 * M_PI * i / n;
        V(0, i) = center(0) + radius * std::cos(t);
        V(1, i) = center(1) + radius * std::sin(t);
    }
    return Polytope::polygon(V);
}

inline Polytope unit_pentagon() { return regular_polygon(5, 0.5, vec({0.5, 0.5})); }

inline Polytope square_pyramid()
{
    Mat N(5, 3);
    N << 0, 0, 1,
         1, 0, -0.5,
         0, 1, -0.5,
         -1, 0, -0.5,
         0, -1, -0.5;
    Vec p(5);
    p << 0, 0, 0, -1, -1;
    return Polytope(N, p);
}

inline Polytope standard_simplex(int d)
{
    Mat V = Mat::Zero(d, d + 1);
    for (int i = 0; i < d; ++i) V(i, i + 1) = 1.0;
    return Polytope::simplex(V);
}

// Random bounded polytope containing the unit ball; redraws until bounded.
inline Polytope random_polytope(std::mt19937_64& rng, int d, int n)
{
    std::normal_distribution<double> g;
    std::uniform_real_distribution<double> u(0.0, 0.5);
    for (;;) {
        Mat N(n, d);
        Vec p(n);
        for (int i = 0; i < n; ++i) {
            for (int c = 0; c < d; ++c) N(i, c) = g(rng);
            N.row(i).normalize();
            p(i) = -1.0 - u(rng);
        }
        try {
            return Polytope(N, p);
        } catch (...) {
        }
    }
}

inline Vec random_unit(std::mt19937_64& rng, int d)
{
    std::normal_distribution<double> g;
    Vec v(d);
    for (int i = 0; i < d; ++i) v(i) = g(rng);
    return v.normalized();
}

}  // namespace fixtures
