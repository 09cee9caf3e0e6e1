#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "bracketing/types.hpp"

namespace bracketing {

// {x : normals.row(i) * x >= offsets(i)}. Rows are not required to be unit length and the set
// may be empty or lower dimensional; Polytope adds the validity guarantees.
struct HalfspaceSystem {
    Mat normals;
    Vec offsets;

    HalfspaceSystem() = default;
    HalfspaceSystem(Mat n, Vec p);

    Index dim() const { return normals.cols(); }
    Index size() const { return normals.rows(); }
    Vec slacks(const Vec& x) const { return normals * x - offsets; }
    bool contains(const Vec& x, double tol = kGeomTol) const;
    void add(const Vec& normal, double offset);
};

struct Interval {
    double lo = 0.0;
    double hi = 0.0;
    double length() const { return hi - lo; }
};

struct VertexInfo {
    Vec point;
    std::vector<int> tight;  // constraint rows active at the point, increasing
};

struct ChebyshevBall {
    Vec center;
    double radius = 0.0;  // negative when the system is empty
};

// Bounded, full-dimensional polytope with unit inner normals.
class Polytope {
public:
    Polytope(const Mat& normals, const Vec& offsets);
    Polytope(const Mat& normals, const Vec& offsets, const std::vector<Interval>& bbox);

    static Polytope box(const Vec& lo, const Vec& hi);
    // Vertices as columns, counter-clockwise.
    static Polytope polygon(const Mat& vertices);
    // d x (d+1) vertex matrix.
    static Polytope simplex(const Mat& vertices);

    int dim() const { return static_cast<int>(system_.dim()); }
    int size() const { return static_cast<int>(system_.size()); }
    const HalfspaceSystem& system() const { return system_; }
    const Mat& normals() const { return system_.normals; }
    const Vec& offsets() const { return system_.offsets; }
    Vec normal(int j) const { return system_.normals.row(j).transpose(); }
    double offset(int j) const { return system_.offsets(j); }
    const std::vector<Interval>& bounding_box() const { return bbox_; }
    const std::vector<VertexInfo>& vertices() const { return vertices_; }
    const ChebyshevBall& chebyshev() const { return cheb_; }

    double slack(int j, const Vec& x) const { return normal(j).dot(x) - offset(j); }
    bool contains(const Vec& x, double tol = kGeomTol) const { return system_.contains(x, tol); }

    // Image under x -> M x + t (M invertible).
    Polytope transformed(const Mat& M, const Vec& t) const;
    Polytope scaled(double s) const;

private:
    void init(const std::optional<std::vector<Interval>>& given_bbox);

    HalfspaceSystem system_;
    std::vector<Interval> bbox_;
    std::vector<VertexInfo> vertices_;
    ChebyshevBall cheb_;
};

double support(const HalfspaceSystem& S, const Vec& x);
double support(const Polytope& P, const Vec& x);
double width(const HalfspaceSystem& S, const Vec& u);
double width(const Polytope& P, const Vec& u);
std::pair<double, Vec> max_width(const Polytope& P);

double directional_distance(const Vec& x, const Vec& normal, double offset, const Vec& v);

ChebyshevBall chebyshev_ball(const HalfspaceSystem& S);

// All vertices of S (d-tuples of independent rows whose solution is feasible), deduplicated.
std::vector<VertexInfo> enumerate_vertices(const HalfspaceSystem& S, double tol = kGeomTol);

// Affine dimension of a point set (columns or list), -1 for empty.
int affine_dimension(const std::vector<Vec>& pts, double tol = 1e-9);

// First nonzero coordinate made positive.
void canonical_sign(Vec& v);

}  // namespace bracketing
