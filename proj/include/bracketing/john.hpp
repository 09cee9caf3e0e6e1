#pragma once

#include <string>
#include <vector>

#include "bracketing/faces.hpp"

namespace bracketing {

// {center + axes * diag(radii) * w : |w| <= 1}; axes are orthonormal columns (d x m).
struct Ellipsoid {
    Vec center;
    Mat axes;
    Vec radii;

    int dim() const { return static_cast<int>(radii.size()); }
    Mat shape() const { return axes * radii.asDiagonal() * axes.transpose(); }
    // Gauge of x - center restricted to the ellipsoid's affine hull.
    double gauge(const Vec& x) const;
    double log_volume_ratio() const;  // sum log radii
};

struct JohnOptions {
    double rel_tol = 1e-8;  // relative change of log det between outer barrier rounds
    int max_outer = 60;
    int max_newton = 200;
};

// Maximum-volume inscribed ellipsoid of a nonempty full-dimensional system, in its own coordinates.
Ellipsoid john_ellipsoid(const HalfspaceSystem& S, const JohnOptions& opt = {});
Ellipsoid john_ellipsoid(const Polytope& P, const JohnOptions& opt = {});
// John ellipsoid of a face inside its affine hull, expressed in ambient coordinates.
Ellipsoid john_ellipsoid(const Polytope& P, const Face& face, const JohnOptions& opt = {});

struct JohnCheck {
    bool ok = true;
    bool inscribed = true;
    bool covering = true;
    double worst_inscribed = 0.0;  // largest constraint violation of E inside the face
    double worst_gauge = 0.0;      // largest vertex gauge
    std::vector<std::string> violations;
};

JohnCheck verify_john(const Polytope& P, const Face& face, const Ellipsoid& E, double factor, double tol = 1e-7);
JohnCheck verify_john(const Polytope& P, const Ellipsoid& E, double factor, double tol = 1e-7);

}  // namespace bracketing
