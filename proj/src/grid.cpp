#include "bracketing/grid.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <boost/math/quadrature/gauss.hpp>

#include "bracketing/error.hpp"
#include "bracketing/triangulate.hpp"

namespace bracketing {

std::int64_t GridFrame::node_count() const
{
    double total = 1.0;
    std::int64_t n = 1;
    for (int k : nodes) {
        total *= k;
        n *= k;
    }
    if (total > 9.0e18) fail(ErrorKind::argument, "grid has too many nodes");
    return n;
}

std::int64_t GridFrame::flat(const std::vector<int>& idx) const
{
    std::int64_t f = 0;
    for (size_t a = 0; a < nodes.size(); ++a) f = f * nodes[a] + idx[a];
    return f;
}

std::vector<int> GridFrame::unflat(std::int64_t f) const
{
    std::vector<int> idx(nodes.size());
    for (size_t a = nodes.size(); a-- > 0;) {
        idx[a] = static_cast<int>(f % nodes[a]);
        f /= nodes[a];
    }
    return idx;
}

Vec GridFrame::node_local(const std::vector<int>& idx) const
{
    Vec y(dim());
    for (Index a = 0; a < dim(); ++a) y(a) = lo(a) + idx[static_cast<size_t>(a)] * pitch(a);
    return y;
}

std::vector<StencilEntry> kuhn_stencil(const GridFrame& g, const Vec& x)
{
    const Index d = g.dim();
    const Vec y = g.local(x);
    std::vector<int> base(static_cast<size_t>(d), 0);
    std::vector<double> frac(static_cast<size_t>(d), 0.0);
    for (Index a = 0; a < d; ++a) {
        const int n = g.nodes[static_cast<size_t>(a)];
        if (n < 2) continue;
        const double t = std::clamp((y(a) - g.lo(a)) / g.pitch(a), 0.0, static_cast<double>(n - 1));
        const int b = std::min(static_cast<int>(std::floor(t)), n - 2);
        base[static_cast<size_t>(a)] = b;
        frac[static_cast<size_t>(a)] = t - b;
    }
    std::vector<int> order(static_cast<size_t>(d));
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return frac[static_cast<size_t>(a)] > frac[static_cast<size_t>(b)]; });

    std::vector<StencilEntry> out;
    std::vector<int> idx = base;
    double prev = 1.0;
    for (Index k = 0; k <= d; ++k) {
        const double next = k < d ? frac[static_cast<size_t>(order[static_cast<size_t>(k)])] : 0.0;
        const double w = prev - next;
        if (w > 0.0) out.push_back({g.flat(idx), w});
        if (k < d) ++idx[static_cast<size_t>(order[static_cast<size_t>(k)])];
        prev = next;
    }
    if (out.empty()) out.push_back({g.flat(base), 1.0});
    return out;
}

double interpolate(const GridFrame& g, const std::vector<double>& values, const Vec& x)
{
    double v = 0.0;
    for (const StencilEntry& s : kuhn_stencil(g, x)) v += s.weight * values[static_cast<size_t>(s.node)];
    return v;
}

namespace detail {

const std::vector<std::pair<double, double>>& gauss_legendre_unit()
{
    static const std::vector<std::pair<double, double>> rule = [] {
        using Rule = boost::math::quadrature::gauss<double, kGaussPoints>;
        std::vector<std::pair<double, double>> r;
        const auto& x = Rule::abscissa();
        const auto& w = Rule::weights();
        // Boost stores the nonnegative half of the symmetric rule; map [-1, 1] to [0, 1].
        for (size_t i = 0; i < x.size(); ++i) {
            r.emplace_back(0.5 * (1.0 + x[i]), 0.5 * w[i]);
            if (x[i] != 0.0) r.emplace_back(0.5 * (1.0 - x[i]), 0.5 * w[i]);
        }
        return r;
    }();
    return rule;
}

}  // namespace detail

namespace {

// Complete homogeneous symmetric polynomial h_p of the values.
double complete_homogeneous(const Vec& values, int p)
{
    std::vector<double> h(static_cast<size_t>(p) + 1, 0.0);
    h[0] = 1.0;
    for (Index i = 0; i < values.size(); ++i)
        for (int j = 1; j <= p; ++j) h[static_cast<size_t>(j)] += values(i) * h[static_cast<size_t>(j) - 1];
    return h[static_cast<size_t>(p)];
}

}  // namespace

double simplex_power_integral(const Mat& simplex, const Vec& values, double p)
{
    const Index d = simplex.rows();
    if (!(p >= 0)) fail(ErrorKind::argument, "power must be nonnegative");
    const double vol = simplex_volume(simplex);
    if (vol == 0.0) return 0.0;
    if (p == std::floor(p) && p <= 64) {
        const int ip = static_cast<int>(p);
        // int_S g^p = vol * p! d! / (p+d)! * h_p(g_0, ..., g_d)
        double coef = 1.0;
        for (int i = 1; i <= ip; ++i) coef *= static_cast<double>(i) / static_cast<double>(d + i);
        return vol * coef * complete_homogeneous(values, ip);
    }
    // Affine interpolant through barycentric weights.
    Mat M(d + 1, d + 1);
    M.topRows(d) = simplex;
    M.row(d).setOnes();
    const Eigen::PartialPivLU<Mat> lu(M);
    auto fn = [&](const Vec& x) {
        Vec rhs(d + 1);
        rhs << x, 1.0;
        return std::max(0.0, values.dot(lu.solve(rhs)));
    };
    return integrate_power(std::vector<Mat>{simplex}, fn, p);
}

double grid_power_integral(const GridFrame& g, const std::vector<double>& values, double p, const HalfspaceSystem* clip)
{
    const Index d = g.dim();
    if (static_cast<std::int64_t>(values.size()) != g.node_count()) fail(ErrorKind::argument, "value array does not match the grid");
    for (int n : g.nodes)
        if (n < 2) fail(ErrorKind::argument, "integration needs at least two nodes per axis");
    std::vector<int> perm(static_cast<size_t>(d));
    std::vector<int> cube(static_cast<size_t>(d), 0);
    double total = 0.0;
    for (;;) {
        std::iota(perm.begin(), perm.end(), 0);
        do {
            Mat S(d, d + 1);
            Vec vals(d + 1);
            std::vector<int> idx = cube;
            S.col(0) = g.node_point(idx);
            vals(0) = values[static_cast<size_t>(g.flat(idx))];
            for (Index k = 0; k < d; ++k) {
                ++idx[static_cast<size_t>(perm[static_cast<size_t>(k)])];
                S.col(k + 1) = g.node_point(idx);
                vals(k + 1) = values[static_cast<size_t>(g.flat(idx))];
            }
            if (!clip) {
                total += simplex_power_integral(S, vals, p);
                continue;
            }
            const Mat slack = (clip->normals * S).colwise() - clip->offsets;
            if ((slack.rowwise().maxCoeff().array() < 0).any()) continue;
            if (slack.minCoeff() >= 0) {
                total += simplex_power_integral(S, vals, p);
                continue;
            }
            // Simplex in halfspace form, intersected with the clip system.
            Mat M(d + 1, d + 1);
            M.topRows(d) = S;
            M.row(d).setOnes();
            const Mat Minv = M.inverse();
            HalfspaceSystem piece = *clip;
            for (Index r = 0; r <= d; ++r) piece.add(Minv.row(r).head(d).transpose(), -Minv(r, d));
            for (const Mat& T : triangulate(piece)) {
                Vec tv(d + 1);
                for (Index c = 0; c <= d; ++c) {
                    Vec rhs(d + 1);
                    rhs << T.col(c), 1.0;
                    tv(c) = std::max(0.0, vals.dot(Minv * rhs));
                }
                total += simplex_power_integral(T, tv, p);
            }
        } while (std::next_permutation(perm.begin(), perm.end()));
        Index a = 0;
        while (a < d && ++cube[static_cast<size_t>(a)] == g.nodes[static_cast<size_t>(a)] - 1) cube[static_cast<size_t>(a++)] = 0;
        if (a == d) break;
    }
    return total;
}

}  // namespace bracketing
