#include "bracketing/polytope.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "bracketing/combinatorics.hpp"
#include "bracketing/error.hpp"
#include "bracketing/lp.hpp"

namespace bracketing {

HalfspaceSystem::HalfspaceSystem(Mat n, Vec p) : normals(std::move(n)), offsets(std::move(p))
{
    if (normals.rows() != offsets.size()) fail(ErrorKind::argument, "normals/offsets size mismatch");
}

bool HalfspaceSystem::contains(const Vec& x, double tol) const
{
    if (size() == 0) return true;
    return slacks(x).minCoeff() >= -tol;
}

void HalfspaceSystem::add(const Vec& normal, double offset)
{
    const Index n = size();
    normals.conservativeResize(n + 1, normal.size());
    offsets.conservativeResize(n + 1);
    normals.row(n) = normal.transpose();
    offsets(n) = offset;
}

double support(const HalfspaceSystem& S, const Vec& x)
{
    if (x.size() != S.dim()) fail(ErrorKind::domain, "support direction has wrong dimension");
    const LpResult r = maximize(x, -S.normals, -S.offsets);
    if (r.status == LpStatus::infeasible) fail(ErrorKind::domain, "support of an empty halfspace system");
    if (r.status == LpStatus::unbounded) fail(ErrorKind::boundedness, "halfspace system unbounded in probe direction");
    return r.value;
}

double support(const Polytope& P, const Vec& x) { return support(P.system(), x); }

double width(const HalfspaceSystem& S, const Vec& u) { return support(S, u) + support(S, Vec(-u)); }

double width(const Polytope& P, const Vec& u)
{
    if (std::abs(u.norm() - 1.0) > 1e-12) fail(ErrorKind::argument, "width direction must be a unit vector");
    return width(P.system(), u);
}

void canonical_sign(Vec& v)
{
    for (Index i = 0; i < v.size(); ++i) {
        if (std::abs(v(i)) > 1e-12) {
            if (v(i) < 0) v = -v;
            return;
        }
    }
}

std::pair<double, Vec> max_width(const Polytope& P)
{
    const auto& verts = P.vertices();
    double best = -1.0;
    Vec dir = Vec::Unit(P.dim(), 0);
    for (size_t a = 0; a < verts.size(); ++a) {
        for (size_t b = a + 1; b < verts.size(); ++b) {
            const Vec diff = verts[b].point - verts[a].point;
            const double len = diff.norm();
            if (len > best) {
                best = len;
                dir = diff / len;
            }
        }
    }
    canonical_sign(dir);
    return {best, dir};
}

double directional_distance(const Vec& x, const Vec& normal, double offset, const Vec& v)
{
    const double along = normal.dot(v);
    if (along == 0.0) return std::numeric_limits<double>::infinity();
    return std::abs(normal.dot(x) - offset) / std::abs(along);
}

ChebyshevBall chebyshev_ball(const HalfspaceSystem& S)
{
    const Index d = S.dim();
    const Index m = S.size();
    Mat A(m + 1, d + 1);
    Vec b(m + 1);
    for (Index i = 0; i < m; ++i) {
        A.row(i).head(d) = -S.normals.row(i);
        A(i, d) = S.normals.row(i).norm();
        b(i) = -S.offsets(i);
    }
    // Cap keeps the LP bounded for systems that contain arbitrarily large balls.
    A.row(m).setZero();
    A(m, d) = 1.0;
    b(m) = 1e6;
    Vec c = Vec::Zero(d + 1);
    c(d) = 1.0;
    const LpResult r = maximize(c, A, b);
    ChebyshevBall ball;
    if (r.status != LpStatus::optimal) {
        ball.center = Vec::Zero(d);
        ball.radius = -std::numeric_limits<double>::infinity();
        return ball;
    }
    ball.center = r.x.head(d);
    ball.radius = r.x(d);
    return ball;
}

int affine_dimension(const std::vector<Vec>& pts, double tol)
{
    if (pts.empty()) return -1;
    if (pts.size() == 1) return 0;
    const Index d = pts.front().size();
    Mat diffs(d, static_cast<Index>(pts.size()) - 1);
    for (size_t i = 1; i < pts.size(); ++i) diffs.col(static_cast<Index>(i) - 1) = pts[i] - pts[0];
    Eigen::JacobiSVD<Mat> svd(diffs);
    const Vec& sv = svd.singularValues();
    int rank = 0;
    for (Index i = 0; i < sv.size(); ++i)
        if (sv(i) > tol) ++rank;
    return rank;
}

std::vector<VertexInfo> enumerate_vertices(const HalfspaceSystem& S, double tol)
{
    const int d = static_cast<int>(S.dim());
    const int m = static_cast<int>(S.size());
    std::vector<VertexInfo> out;
    Mat M(d, d);
    Vec rhs(d);
    for_each_combination(m, d, [&](const std::vector<int>& rows) {
        for (int a = 0; a < d; ++a) {
            M.row(a) = S.normals.row(rows[static_cast<size_t>(a)]);
            rhs(a) = S.offsets(rows[static_cast<size_t>(a)]);
        }
        Eigen::FullPivLU<Mat> lu(M);
        lu.setThreshold(1e-10);
        if (!lu.isInvertible()) return;
        const Vec x = lu.solve(rhs);
        if (!x.allFinite()) return;
        const Vec s = S.slacks(x);
        if (s.minCoeff() < -tol) return;
        for (const auto& v : out)
            if ((v.point - x).norm() <= 1e-8) return;
        VertexInfo info;
        info.point = x;
        for (int i = 0; i < m; ++i)
            if (std::abs(s(i)) <= tol) info.tight.push_back(i);
        out.push_back(std::move(info));
    });
    return out;
}

Polytope::Polytope(const Mat& normals, const Vec& offsets) : system_(normals, offsets) { init(std::nullopt); }

Polytope::Polytope(const Mat& normals, const Vec& offsets, const std::vector<Interval>& bbox)
    : system_(normals, offsets)
{
    init(bbox);
}

void Polytope::init(const std::optional<std::vector<Interval>>& given_bbox)
{
    const Index d = system_.dim();
    if (d < 1) fail(ErrorKind::argument, "polytope dimension must be positive");
    if (!system_.normals.allFinite() || !system_.offsets.allFinite())
        fail(ErrorKind::argument, "non-finite halfspace data");
    for (Index i = 0; i < system_.size(); ++i) {
        const double len = system_.normals.row(i).norm();
        if (len < 1e-14) fail(ErrorKind::argument, "zero normal in halfspace " + std::to_string(i));
        system_.normals.row(i) /= len;
        system_.offsets(i) /= len;
    }
    bbox_.resize(static_cast<size_t>(d));
    for (Index i = 0; i < d; ++i) {
        const Vec e = Vec::Unit(d, i);
        bbox_[static_cast<size_t>(i)] = {-support(system_, Vec(-e)), support(system_, e)};
    }
    cheb_ = chebyshev_ball(system_);
    if (!(cheb_.radius > 1e-12)) fail(ErrorKind::domain, "polytope has empty interior");
    if (given_bbox) {
        if (given_bbox->size() != static_cast<size_t>(d)) fail(ErrorKind::argument, "bbox dimension mismatch");
        for (Index i = 0; i < d; ++i) {
            const Interval& g = (*given_bbox)[static_cast<size_t>(i)];
            const Interval& c = bbox_[static_cast<size_t>(i)];
            if (c.lo < g.lo - kGeomTol || c.hi > g.hi + kGeomTol)
                fail(ErrorKind::domain, "polytope not contained in its bounding box");
        }
        bbox_ = *given_bbox;
    }
    vertices_ = enumerate_vertices(system_);
}

Polytope Polytope::box(const Vec& lo, const Vec& hi)
{
    const Index d = lo.size();
    Mat N = Mat::Zero(2 * d, d);
    Vec p(2 * d);
    for (Index i = 0; i < d; ++i) {
        N(2 * i, i) = 1.0;
        p(2 * i) = lo(i);
        N(2 * i + 1, i) = -1.0;
        p(2 * i + 1) = -hi(i);
    }
    return Polytope(N, p);
}

Polytope Polytope::polygon(const Mat& vertices)
{
    if (vertices.rows() != 2 || vertices.cols() < 3) fail(ErrorKind::argument, "polygon needs >= 3 planar vertices");
    const Index n = vertices.cols();
    Mat N(n, 2);
    Vec p(n);
    for (Index i = 0; i < n; ++i) {
        const Vec a = vertices.col(i);
        const Vec e = vertices.col((i + 1) % n) - a;
        N(i, 0) = -e(1);
        N(i, 1) = e(0);
        p(i) = N.row(i).dot(a);
    }
    return Polytope(N, p);
}

Polytope Polytope::simplex(const Mat& vertices)
{
    const Index d = vertices.rows();
    if (vertices.cols() != d + 1) fail(ErrorKind::argument, "simplex needs d+1 vertices");
    Mat N(d + 1, d);
    Vec p(d + 1);
    for (Index i = 0; i <= d; ++i) {
        std::vector<Index> others;
        for (Index j = 0; j <= d; ++j)
            if (j != i) others.push_back(j);
        Mat diffs(d, d - 1);
        for (Index a = 1; a < d; ++a) diffs.col(a - 1) = vertices.col(others[static_cast<size_t>(a)]) - vertices.col(others[0]);
        Vec n;
        if (d == 1) {
            n = Vec::Ones(1);
        } else {
            Eigen::JacobiSVD<Mat> svd(diffs.transpose(), Eigen::ComputeFullV);
            n = svd.matrixV().col(d - 1);
        }
        const Vec base = vertices.col(others[0]);
        if (n.dot(vertices.col(i) - base) < 0) n = -n;
        N.row(i) = n.transpose();
        p(i) = n.dot(base);
    }
    return Polytope(N, p);
}

Polytope Polytope::transformed(const Mat& M, const Vec& t) const
{
    const Mat Minv = M.inverse();
    const Mat N = system_.normals * Minv;
    const Vec p = system_.offsets + N * t;
    return Polytope(N, p);
}

Polytope Polytope::scaled(double s) const
{
    return transformed(s * Mat::Identity(dim(), dim()), Vec::Zero(dim()));
}

}  // namespace bracketing
