#include "bracketing/hausdorff.hpp"

#include <limits>

#include "bracketing/combinatorics.hpp"
#include "bracketing/error.hpp"

namespace bracketing {

Vec project(const HalfspaceSystem& S, const Vec& y)
{
    if (S.contains(y)) return y;
    const int d = static_cast<int>(S.dim());
    const int m = static_cast<int>(S.size());
    double best = std::numeric_limits<double>::infinity();
    Vec best_x;
    // The projection lies in the relative interior of some face; it is then the projection
    // onto that face's affine hull, cut out by an independent subset of active rows.
    for (int size = 1; size <= std::min(d, m); ++size) {
        for_each_combination(m, size, [&](const std::vector<int>& rows) {
            Mat N(size, d);
            Vec p(size);
            for (int a = 0; a < size; ++a) {
                N.row(a) = S.normals.row(rows[static_cast<size_t>(a)]);
                p(a) = S.offsets(rows[static_cast<size_t>(a)]);
            }
            Eigen::LDLT<Mat> gram(N * N.transpose());
            if (gram.info() != Eigen::Success || gram.vectorD().cwiseAbs().minCoeff() < 1e-12) return;
            const Vec lambda = gram.solve(p - N * y);
            const Vec x = y + N.transpose() * lambda;
            if (!S.contains(x)) return;
            const double dist = (x - y).norm();
            if (dist < best) {
                best = dist;
                best_x = x;
            }
        });
    }
    if (best_x.size() == 0) fail(ErrorKind::domain, "projection onto an empty halfspace system");
    return best_x;
}

double distance(const HalfspaceSystem& S, const Vec& y) { return (project(S, y) - y).norm(); }

double hausdorff(const HalfspaceSystem& P, const HalfspaceSystem& Q)
{
    if (P.dim() != Q.dim()) fail(ErrorKind::domain, "hausdorff distance between different dimensions");
    double h = 0.0;
    for (const auto& v : enumerate_vertices(P)) h = std::max(h, distance(Q, v.point));
    for (const auto& v : enumerate_vertices(Q)) h = std::max(h, distance(P, v.point));
    return h;
}

double hausdorff(const Polytope& P, const Polytope& Q)
{
    if (P.dim() != Q.dim()) fail(ErrorKind::domain, "hausdorff distance between different dimensions");
    double h = 0.0;
    for (const auto& v : P.vertices()) h = std::max(h, distance(Q.system(), v.point));
    for (const auto& v : Q.vertices()) h = std::max(h, distance(P.system(), v.point));
    return h;
}

}  // namespace bracketing
