#include "bracketing/convex_fn.hpp"

#include <algorithm>
#include <cmath>

#include "bracketing/error.hpp"
#include "bracketing/hausdorff.hpp"
#include "bracketing/lp.hpp"

namespace bracketing {

ConvexFn::ConvexFn(Mat g, Vec c, double bound) : slopes(std::move(g)), intercepts(std::move(c)), B(bound)
{
    if (slopes.rows() < 1 || slopes.rows() != intercepts.size()) fail(ErrorKind::argument, "convex function needs matching pieces");
    if (!(B > 0)) fail(ErrorKind::argument, "bound B must be positive");
}

double ConvexFn::operator()(const Vec& x) const { return std::clamp(raw(x), -B, B); }

std::vector<int> ConvexFn::active_pieces(const Polytope& D) const
{
    // Piece j is active on an open set iff max r s.t. x in D, g_j x + c_j >= g_l x + c_l + r is positive.
    const Index d = dim(), m = pieces(), n = D.size();
    std::vector<int> out;
    for (Index j = 0; j < m; ++j) {
        Mat A = Mat::Zero(m - 1 + n, d + 1);
        Vec b(m - 1 + n);
        Index r = 0;
        for (Index l = 0; l < m; ++l) {
            if (l == j) continue;
            A.block(r, 0, 1, d) = slopes.row(l) - slopes.row(j);
            A(r, d) = 1.0;
            b(r++) = intercepts(j) - intercepts(l);
        }
        A.block(r, 0, n, d) = -D.normals();
        b.tail(n) = -D.offsets();
        Vec c = Vec::Zero(d + 1);
        c(d) = 1.0;
        Mat Ab(A.rows() + 1, d + 1);
        Ab << A, c.transpose();  // cap the margin so the LP stays bounded
        Vec bb(b.size() + 1);
        bb << b, 1.0;
        const LpResult res = maximize(c, Ab, bb);
        if (res.status == LpStatus::optimal && res.value > 1e-12) out.push_back(static_cast<int>(j));
    }
    return out;
}

double ConvexFn::min_over(const Polytope& D) const
{
    const Index d = dim(), m = pieces(), n = D.size();
    Mat A = Mat::Zero(m + n, d + 1);
    Vec b(m + n);
    A.block(0, 0, m, d) = slopes;
    A.block(0, d, m, 1).setConstant(-1.0);
    b.head(m) = -intercepts;
    A.block(m, 0, n, d) = -D.normals();
    b.tail(n) = -D.offsets();
    Vec c = Vec::Zero(d + 1);
    c(d) = -1.0;
    const LpResult res = maximize(c, A, b);
    if (res.status != LpStatus::optimal) fail(ErrorKind::domain, "minimum of convex function over D not found");
    return -res.value;
}

double ConvexFn::max_over(const Polytope& D) const
{
    double hi = -INFINITY;
    for (const VertexInfo& v : D.vertices()) hi = std::max(hi, raw(v.point));
    return hi;
}

double ConvexFn::lipschitz_along(const Polytope& D, const Vec& e) const
{
    double L = 0.0;
    for (int j : active_pieces(D)) L = std::max(L, std::abs(slopes.row(j).dot(e)));
    return L;
}

ConvexFn constant_fn(int d, double value, double B)
{
    return ConvexFn(Mat::Zero(1, d), Vec::Constant(1, value), B);
}

ConvexFn rescale_class(const ConvexFn& f, const Box& box_from, const Box& box_to, double B_from, double B_to)
{
    const Index d = f.dim();
    if (box_from.dim() != d || box_to.dim() != d) fail(ErrorKind::argument, "box dimension mismatch");
    if (!(B_from > 0) || !(B_to > 0)) fail(ErrorKind::argument, "bounds must be positive");
    const Vec span_from = box_from.hi - box_from.lo, span_to = box_to.hi - box_to.lo;
    if ((span_from.array() <= 0).any() || (span_to.array() <= 0).any()) fail(ErrorKind::argument, "degenerate box");
    // x = lo_from + S (t - lo_to), S = diag(span_from / span_to).
    const Vec s = span_from.cwiseQuotient(span_to);
    const double scale = B_to / B_from;
    Mat g = f.slopes * s.asDiagonal();
    Vec c = f.intercepts + f.slopes * (box_from.lo - s.cwiseProduct(box_to.lo));
    return ConvexFn(scale * g, scale * c, B_to);
}

HalfspaceSystem epigraph(const ConvexFn& f, const Polytope& D)
{
    const Index d = f.dim(), m = f.pieces(), n = D.size();
    Mat N = Mat::Zero(n + m + 1, d + 1);
    Vec p(n + m + 1);
    N.block(0, 0, n, d) = D.normals();
    p.head(n) = D.offsets();
    N.block(n, 0, m, d) = -f.slopes;
    N.block(n, d, m, 1).setOnes();
    p.segment(n, m) = f.intercepts;
    N(n + m, d) = -1.0;
    p(n + m) = -f.B;
    return HalfspaceSystem(N, p);
}

namespace {

// Exact sup |f - g| on an interval: f - g is affine between consecutive breakpoints.
double sup_gap_1d(const ConvexFn& f, const ConvexFn& g, double lo, double hi)
{
    std::vector<double> t = {lo, hi};
    auto kinks = [&](const ConvexFn& h) {
        for (Index a = 0; a < h.pieces(); ++a)
            for (Index b = a + 1; b < h.pieces(); ++b) {
                const double dg = h.slopes(a, 0) - h.slopes(b, 0);
                if (dg == 0.0) continue;
                const double x = (h.intercepts(b) - h.intercepts(a)) / dg;
                if (x > lo && x < hi) t.push_back(x);
            }
    };
    kinks(f);
    kinks(g);
    double best = 0.0;
    Vec x(1);
    for (double s : t) {
        x(0) = s;
        best = std::max(best, std::abs(f(x) - g(x)));
    }
    return best;
}

double sup_gap_grid(const ConvexFn& f, const ConvexFn& g, const Polytope& D, int n)
{
    const int d = D.dim();
    double best = 0.0;
    for (const VertexInfo& v : D.vertices()) best = std::max(best, std::abs(f(v.point) - g(v.point)));
    std::vector<int> idx(static_cast<size_t>(d), 0);
    Vec x(d);
    for (;;) {
        for (int a = 0; a < d; ++a) {
            const Interval& iv = D.bounding_box()[static_cast<size_t>(a)];
            x(a) = iv.lo + (iv.hi - iv.lo) * idx[static_cast<size_t>(a)] / (n - 1);
        }
        if (D.contains(x, 0.0)) best = std::max(best, std::abs(f(x) - g(x)));
        int a = 0;
        while (a < d && ++idx[static_cast<size_t>(a)] == n) idx[static_cast<size_t>(a++)] = 0;
        if (a == d) break;
    }
    return best;
}

}  // namespace

EpigraphBound epigraph_hausdorff_bound(const ConvexFn& f, const ConvexFn& g, const Polytope& D, const Vec& gamma,
                                       double slack, int grid_per_axis)
{
    const int d = D.dim();
    if (f.dim() != d || g.dim() != d || gamma.size() != d) fail(ErrorKind::argument, "dimension mismatch");
    for (const ConvexFn* h : {&f, &g})
        for (int a = 0; a < d; ++a)
            if (h->lipschitz_along(D, Vec::Unit(d, a)) > gamma(a) * (1 + 1e-12) + 1e-15)
                fail(ErrorKind::certificate, "function is not Gamma-Lipschitz along axis " + std::to_string(a));
    EpigraphBound out;
    if (d == 1) {
        out.lhs = sup_gap_1d(f, g, D.bounding_box()[0].lo, D.bounding_box()[0].hi);
        out.exact_sup = true;
    } else {
        out.lhs = sup_gap_grid(f, g, D, grid_per_axis);
    }
    out.hausdorff = hausdorff(epigraph(f, D), epigraph(g, D));
    out.rhs = out.hausdorff * std::sqrt(1.0 + gamma.squaredNorm());
    out.ok = out.lhs <= out.rhs + slack;
    return out;
}

}  // namespace bracketing
