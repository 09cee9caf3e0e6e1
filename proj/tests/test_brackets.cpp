#include <doctest.h>

#include <bit>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <random>
#include <set>

#include "bracketing/brackets.hpp"
#include "bracketing/error.hpp"
#include "bracketing/hausdorff.hpp"
#include "bracketing/lp.hpp"
#include "bracketing/triangulate.hpp"
#include "fixtures.hpp"

using namespace bracketing;
using fixtures::vec;

namespace {

GridFrame unit_grid(int d, int steps)
{
    GridFrame g;
    g.basis = Mat::Identity(d, d);
    g.lo = Vec::Zero(d);
    g.pitch = Vec::Constant(d, 1.0 / steps);
    g.nodes.assign(static_cast<size_t>(d), steps + 1);
    return g;
}

std::vector<double> node_values(const GridFrame& g, const std::function<double(const Vec&)>& fn)
{
    std::vector<double> v(static_cast<size_t>(g.node_count()));
    for (std::int64_t i = 0; i < g.node_count(); ++i) v[static_cast<size_t>(i)] = fn(g.node_point(g.unflat(i)));
    return v;
}

Mat rotation(double t)
{
    Mat R(2, 2);
    R << std::cos(t), -std::sin(t), std::sin(t), std::cos(t);
    return R;
}

// Random max-affine function with |<g_j, e_a>| <= gamma_a and values inside [-B, B] on the local box.
ConvexFn lipschitz_fn(std::mt19937_64& rng, const Mat& basis, const Box& box, const Vec& gamma, double B, int m)
{
    const Index d = basis.cols();
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    Mat g(m, d);
    Vec c(m);
    for (int j = 0; j < m; ++j) {
        Vec local(d);
        for (Index a = 0; a < d; ++a) local(a) = gamma(a) * U(rng);
        g.row(j) = (basis * local).transpose();
        c(j) = 0.3 * U(rng);
    }
    // Shift so the maximum over the box corners (the maximum over the box) sits just below B.
    double top = -INFINITY;
    for (int mask = 0; mask < (1 << d); ++mask) {
        Vec y(d);
        for (Index a = 0; a < d; ++a) y(a) = (mask >> a) & 1 ? box.hi(a) : box.lo(a);
        top = std::max(top, (g * (basis * y) + c).maxCoeff());
    }
    c.array() += B - 0.1 - top;
    return ConvexFn(g, c, B);
}

// Profiles y = floor(x) of convex x on W steps with |x_{i+1} - x_i| <= s and x in [lo, hi], by an LP
// feasibility check per candidate profile.
long brute_force_profiles(int W, double s, double lo, double hi)
{
    const int n = W + 1;
    const long y_lo = static_cast<long>(std::floor(lo)), y_hi = static_cast<long>(std::floor(hi));
    std::vector<long> y(static_cast<size_t>(n), y_lo);
    long count = 0;
    for (;;) {
        // Variables x_0..x_W, t; maximize t with y <= x, x + t <= y + 1.
        std::vector<std::pair<Vec, double>> rows;
        auto row = [&]() { return Vec::Zero(n + 1).eval(); };
        for (int i = 0; i < n; ++i) {
            Vec r = row();
            r(i) = -1;
            rows.push_back({r, -static_cast<double>(y[static_cast<size_t>(i)])});
            r = row();
            r(i) = 1;
            r(n) = 1;
            rows.push_back({r, static_cast<double>(y[static_cast<size_t>(i)]) + 1});
            r = row();
            r(i) = 1;
            rows.push_back({r, hi});
            r = row();
            r(i) = -1;
            rows.push_back({r, -lo});
        }
        for (int i = 0; i + 1 < n; ++i) {
            Vec r = row();
            r(i + 1) = 1;
            r(i) = -1;
            rows.push_back({r, s});
            rows.push_back({-r, s});
        }
        for (int i = 1; i + 1 < n; ++i) {
            Vec r = row();
            r(i - 1) = -1;
            r(i) = 2;
            r(i + 1) = -1;
            rows.push_back({r, 0.0});
        }
        Vec t = row();
        t(n) = 1;
        rows.push_back({t, 1.0});
        Mat A(static_cast<Index>(rows.size()), n + 1);
        Vec b(static_cast<Index>(rows.size()));
        for (size_t r = 0; r < rows.size(); ++r) {
            A.row(static_cast<Index>(r)) = rows[r].first.transpose();
            b(static_cast<Index>(r)) = rows[r].second;
        }
        const LpResult res = maximize(t, A, b);
        if (res.status == LpStatus::optimal && res.value > 1e-9) ++count;
        int i = 0;
        while (i < n && ++y[static_cast<size_t>(i)] > y_hi) y[static_cast<size_t>(i++)] = y_lo;
        if (i == n) break;
    }
    return count;
}

// Integer sequences over `levels` values with nondecreasing differences.
long brute_force_monotone(int W, long levels)
{
    std::vector<long> y(static_cast<size_t>(W) + 1, 0);
    long count = 0;
    for (;;) {
        bool ok = true;
        for (int i = 1; i < W && ok; ++i) ok = y[i + 1] - y[i] >= y[i] - y[i - 1];
        count += ok;
        int i = 0;
        while (i <= W && ++y[static_cast<size_t>(i)] == levels) y[static_cast<size_t>(i++)] = 0;
        if (i > W) break;
    }
    return count;
}

}  // namespace

TEST_CASE("kuhn interpolation reproduces affine functions")
{
    GridFrame g = unit_grid(3, 4);
    g.basis = Mat::Identity(3, 3);
    const Vec w = vec({0.3, -1.2, 2.0});
    const auto values = node_values(g, [&](const Vec& x) { return w.dot(x) + 0.7; });
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> U(0, 1);
    for (int t = 0; t < 200; ++t) {
        const Vec x = vec({U(rng), U(rng), U(rng)});
        const auto st = kuhn_stencil(g, x);
        CHECK(st.size() <= 4);
        double sum = 0.0;
        for (const auto& e : st) {
            CHECK(e.weight >= 0);
            sum += e.weight;
        }
        CHECK(sum == doctest::Approx(1.0));
        CHECK(interpolate(g, values, x) == doctest::Approx(w.dot(x) + 0.7));
    }
}

TEST_CASE("simplex power integrals")
{
    Mat T(2, 3);
    T << 0, 1, 0, 0, 0, 1;
    // x^2 over the unit triangle is 1/12.
    CHECK(simplex_power_integral(T, vec({0, 1, 0}), 2) == doctest::Approx(1.0 / 12));
    CHECK(simplex_power_integral(T, vec({1, 1, 1}), 3) == doctest::Approx(0.5));
    const double q = integrate_power(std::vector<Mat>{T}, [](const Vec& x) { return x(0); }, 2.0);
    CHECK(q == doctest::Approx(1.0 / 12).epsilon(1e-12));
    // int_T x^1.5 = 1/2.5 - 1/3.5; the rule loses accuracy to the x^1.5 kink at the edge.
    CHECK(simplex_power_integral(T, vec({0, 1, 0}), 1.5) == doctest::Approx(4.0 / 35).epsilon(1e-6));
}

TEST_CASE("grid power integral with clipping")
{
    const GridFrame g = unit_grid(2, 5);
    const auto x1 = node_values(g, [](const Vec& x) { return x(0); });
    CHECK(grid_power_integral(g, x1, 1) == doctest::Approx(0.5));
    CHECK(grid_power_integral(g, x1, 2) == doctest::Approx(1.0 / 3));
    const Polytope T = fixtures::unit_triangle();
    CHECK(grid_power_integral(g, x1, 1, &T.system()) == doctest::Approx(1.0 / 6));
    const auto one = node_values(g, [](const Vec&) { return 1.0; });
    CHECK(grid_power_integral(g, one, 1, &T.system()) == doctest::Approx(0.5));
}

TEST_CASE("lp_size examples")
{
    Bracket b;
    b.grid = unit_grid(2, 3);
    const auto n = static_cast<size_t>(b.grid.node_count());
    b.lower.assign(n, -0.2);
    b.upper.assign(n, 0.5);
    CHECK(lp_size(b, 2) == doctest::Approx(0.7));
    CHECK(lp_size(b, INFINITY) == doctest::Approx(0.7));
    b.lower.assign(n, 0.0);
    b.upper = node_values(b.grid, [](const Vec& x) { return x(0); });
    CHECK(lp_size(b, 1) == doctest::Approx(0.5));
    CHECK_THROWS_AS(lp_size(b, 0.5), Error);
}

TEST_CASE("one-dimensional family example")
{
    const LipschitzFamily fam(Mat::Identity(1, 1), Box{vec({0}), vec({1})}, vec({1}), 0.5, 1.0);
    CHECK(fam.grid().pitch(0) == doctest::Approx(1.0 / 8));
    CHECK(fam.quantum() == doctest::Approx(1.0 / 8));
    CHECK(fam.grid().nodes[0] == 9);
    const Bracket zero = fam.canonical_map(constant_fn(1, 0.0, 1.0));
    for (size_t i = 0; i < zero.key.size(); ++i) {
        CHECK(zero.key[i] == 0);
        CHECK(zero.lower[i] == doctest::Approx(-0.25));
        CHECK(zero.upper[i] == doctest::Approx(0.25));
    }
    const ConvexFn line(Mat::Ones(1, 1), Vec::Zero(1), 1.0);
    const Bracket b = fam.canonical_map(line);
    for (size_t i = 0; i < b.key.size(); ++i) CHECK(b.key[i] == static_cast<std::int64_t>(i));
    const auto pf = fam.prepare(line);
    for (int t = 0; t <= 1000; ++t) {
        const Vec x = vec({t / 1000.0});
        CHECK(fam.lower_at(pf, x) <= x(0));
        CHECK(fam.upper_at(pf, x) >= x(0));
    }
    CHECK_THROWS_AS(LipschitzFamily(Mat::Identity(1, 1), Box{vec({0}), vec({1})}, vec({1}), 0.0, 1.0), Error);
    const LipschitzFamily flat(Mat::Identity(1, 1), Box{vec({0}), vec({1})}, vec({0}), 0.5, 1.0);
    CHECK(flat.grid().nodes[0] == 1);
}

TEST_CASE("brackets contain Lipschitz functions on rotated rectangles")
{
    std::mt19937_64 rng(31);
    const Mat basis = rotation(0.4);
    const Box box{vec({-0.3, 0.1}), vec({0.7, 0.6})};
    const Vec gamma = vec({1.0, 0.5});
    const double eps = 0.1, B = 2.0;
    const LipschitzFamily fam(basis, box, gamma, eps, B);
    std::uniform_real_distribution<double> U(0, 1);
    long violations = 0;
    for (int t = 0; t < 100; ++t) {
        const ConvexFn f = lipschitz_fn(rng, basis, box, gamma, B, 6);
        const auto pf = fam.prepare(f);
        const Bracket b = fam.canonical_map(f);
        CHECK(lp_size(b, INFINITY) <= eps * (1 + 1e-12));
        for (int k = 0; k < 1000; ++k) {
            const Vec y = box.lo + (box.hi - box.lo).cwiseProduct(vec({U(rng), U(rng)}));
            const Vec x = basis * y;
            const double v = f(x);
            violations += fam.lower_at(pf, x) > v + 1e-12 || fam.upper_at(pf, x) < v - 1e-12;
            CHECK(interpolate(b.grid, b.lower, x) == doctest::Approx(fam.lower_at(pf, x)));
        }
    }
    CHECK(violations == 0);
}

TEST_CASE("pieces outside the certificate are dropped or rejected")
{
    const LipschitzFamily fam(Mat::Identity(1, 1), Box{vec({0}), vec({1})}, vec({1}), 0.25, 1.0);
    Mat g(2, 1);
    g << 0.5, 3.0;
    const ConvexFn f(g, vec({0.0, -5.0}), 1.0);
    CHECK(fam.prepare(f).alpha.size() == 1);
    const ConvexFn steep(Mat::Constant(1, 1, 3.0), vec({0.0}), 1.0);
    CHECK_THROWS_AS(fam.prepare(steep), Error);
}

TEST_CASE("floor-profile chain counts sandwich the exact count")
{
    for (double s : {0.5, 1.0, 1.7}) {
        for (int W : {1, 2, 3, 4}) {
            for (long levels : {2L, 4L, 5L}) {
                for (double frac : {0.0, 0.5}) {
                    const double hi = static_cast<double>(levels - 1) + frac;
                    const long exact = brute_force_profiles(W, s, 0.0, hi);
                    const ChainCount c = count_floor_profiles(W, s, levels);
                    INFO("s=" << s << " W=" << W << " levels=" << levels << " frac=" << frac);
                    CHECK(c.log_subset <= std::log(static_cast<double>(exact)) + 1e-9);
                    CHECK(c.log_superset >= std::log(static_cast<double>(exact)) - 1e-9);
                }
            }
        }
    }
}

TEST_CASE("monotone-difference count matches enumeration")
{
    for (int W : {1, 2, 3, 5})
        for (long levels : {1L, 3L, 4L})
            CHECK(std::exp(log_count_monotone_difference(W, levels)) ==
                  doctest::Approx(static_cast<double>(brute_force_monotone(W, levels))));
}

TEST_CASE("family count bound agrees with enumeration of canonical keys")
{
    // All canonical profiles reached by random convex functions must fit inside the superset count.
    const double eps = 0.5;
    const LipschitzFamily fam(Mat::Identity(1, 1), Box{vec({0}), vec({1})}, vec({1}), eps, 1.0);
    const CountBound cb = fam.count_bound();
    REQUIRE(cb.enumerated);
    CHECK(cb.log_subset <= cb.log_superset);
    std::set<std::vector<std::int64_t>> seen;
    std::mt19937_64 rng(17);
    for (int t = 0; t < 20000; ++t) {
        const ConvexFn f = lipschitz_fn(rng, Mat::Identity(1, 1), Box{vec({0}), vec({1})}, vec({1}), 1.0, 4);
        seen.insert(fam.key(f));
    }
    CHECK(std::log(static_cast<double>(seen.size())) <= cb.log_superset + 1e-12);
    const LipschitzFamily fine(Mat::Identity(1, 1), Box{vec({0}), vec({1})}, vec({1}), eps / 2, 1.0);
    CHECK(fine.count_bound().log_subset >= cb.log_subset);
    const LipschitzFamily plane(Mat::Identity(2, 2), Box{vec({0, 0}), vec({1, 1})}, vec({1, 1}), eps, 1.0);
    CHECK_FALSE(plane.count_bound().enumerated);
}

TEST_CASE("rescale_class examples")
{
    const Box unit{vec({0}), vec({1})};
    const ConvexFn f(Mat::Ones(1, 1), Vec::Zero(1), 1.0);
    const ConvexFn same = rescale_class(f, unit, unit, 1.0, 1.0);
    CHECK(same.slopes(0, 0) == doctest::Approx(1.0));
    CHECK(same.intercepts(0) == doctest::Approx(0.0));
    const ConvexFn doubled = rescale_class(f, Box{vec({0}), vec({2})}, unit, 1.0, 1.0);
    CHECK(doubled.slopes(0, 0) == doctest::Approx(2.0));
    CHECK(doubled.intercepts(0) == doctest::Approx(0.0));
    CHECK_THROWS_AS(rescale_class(f, Box{vec({1}), vec({1})}, unit, 1.0, 1.0), Error);

    // A normalized bracket on [0,1]^2 mapped back to [0,2]^2 with B = 3 grows by 3 * 2 * 2 in L_1.
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> U(0, 1);
    Bracket unit_b;
    unit_b.grid = unit_grid(2, 4);
    const auto n = static_cast<size_t>(unit_b.grid.node_count());
    unit_b.lower.assign(n, 0.0);
    unit_b.upper.resize(n);
    for (double& v : unit_b.upper) v = U(rng);
    Bracket orig = unit_b;
    orig.grid.pitch *= 2.0;
    for (double& v : orig.upper) v *= 3.0;
    CHECK(lp_size(orig, 1) / lp_size(unit_b, 1) == doctest::Approx(12.0));

    // Brackets for the rescaled function pull back to brackets for the original.
    const Mat g = (Mat(2, 2) << 0.4, -0.2, -0.3, 0.5).finished();
    const ConvexFn h(g, vec({0.1, 0.0}), 3.0);
    const Box big{vec({0, 0}), vec({2, 2})}, sq{vec({0, 0}), vec({1, 1})};
    const ConvexFn ht = rescale_class(h, big, sq, 3.0, 1.0);
    for (int t = 0; t < 50; ++t) {
        const Vec y = vec({U(rng), U(rng)});
        CHECK(ht(y) == doctest::Approx(h(2.0 * y) / 3.0));
    }
}

TEST_CASE("epigraph Hausdorff examples")
{
    const Polytope I = Polytope::box(vec({0}), vec({1}));
    const ConvexFn zero = constant_fn(1, 0.0, 1.0);
    const ConvexFn c = constant_fn(1, 0.3, 1.0);
    const EpigraphBound shift = epigraph_hausdorff_bound(zero, c, I, vec({0}));
    CHECK(shift.lhs == doctest::Approx(0.3));
    CHECK(shift.rhs == doctest::Approx(0.3));
    CHECK(shift.ok);
    const EpigraphBound same = epigraph_hausdorff_bound(c, c, I, vec({0}));
    CHECK(same.lhs == doctest::Approx(0.0));
    CHECK(same.rhs == doctest::Approx(0.0).epsilon(1e-9));
    const ConvexFn line(Mat::Ones(1, 1), vec({-0.5}), 1.0);
    const EpigraphBound tilt = epigraph_hausdorff_bound(zero, line, I, vec({1}));
    // The square [0,1]^2 against the quadrilateral (0,-1/2),(1,1/2),(1,1),(0,1): the corner (0,-1/2)
    // is 1/2 from the square and no point of the square is farther from the quadrilateral.
    CHECK(tilt.lhs == doctest::Approx(0.5));
    CHECK(tilt.hausdorff == doctest::Approx(0.5));
    CHECK(tilt.rhs == doctest::Approx(0.5 * std::sqrt(2.0)));
    CHECK(tilt.ok);
    CHECK_THROWS_AS(epigraph_hausdorff_bound(zero, line, I, vec({0.5})), Error);
}

TEST_CASE("global family sizes and direct integration")
{
    const Polytope P = fixtures::unit_box(2);
    for (double eps : {0.5, 0.05}) {
        const Partition part = build_partition(P, analyze_polytope(P, 1.0), eps);
        const GlobalFamily fam = combine_families(part, 1.0);
        const ConvexFn f = constant_fn(2, 0.1, 1.0);
        CHECK(assigned_lp_size(fam, f) == doctest::Approx(fam.lp_size()).epsilon(1e-9));
        if (eps == 0.5) {
            CHECK(part.cells.size() == 9);
            int trivial = 0;
            for (const auto& c : fam.cells) trivial += c.trivial;
            CHECK(trivial == 8);
        }
    }
    // Two cells of size eps with p = 1 add their volumes.
    const Polytope T = fixtures::unit_triangle();
    const Partition tp = build_partition(T, analyze_polytope(T, 2.0), 0.05);
    const GlobalFamily tf = combine_families(tp, 1.0);
    double sum = 0.0;
    for (const auto& c : tf.cells) sum += std::pow(c.a, 2) * c.volume;
    CHECK(tf.lp_size() == doctest::Approx(std::sqrt(sum)));
}

TEST_CASE("global brackets contain sampled functions on the square")
{
    const Polytope P = fixtures::unit_box(2);
    const Partition part = build_partition(P, analyze_polytope(P, 1.0), 0.05);
    const GlobalFamily fam = combine_families(part, 1.0);
    std::mt19937_64 rng(8);
    std::normal_distribution<double> N(0, 1);
    std::uniform_real_distribution<double> U(0, 1);
    long violations = 0;
    for (int t = 0; t < 40; ++t) {
        Mat g(5, 2);
        Vec c(5);
        for (int j = 0; j < 5; ++j) g.row(j) << N(rng), N(rng);
        c.setZero();
        ConvexFn f(g, c, 1.0);
        // Fit the maximum and minimum inside [-1, 1].
        const double hi = f.max_over(P), lo = f.min_over(P);
        const double scale = 1.8 / std::max(hi - lo, 1e-9);
        f = ConvexFn(g * scale, (c.array() * scale - lo * scale - 0.9).matrix(), 1.0);
        for (int k = 0; k < 500; ++k) {
            const Vec x = vec({U(rng), U(rng)});
            const double v = f(x);
            violations += fam.lower_at(f, x) > v + 1e-12 || fam.upper_at(f, x) < v - 1e-12;
        }
    }
    CHECK(violations == 0);
}

TEST_CASE("theoretical count")
{
    CHECK(C_d(2, 1) == doctest::Approx(2.0));
    CHECK(C_d(2, 2) == doctest::Approx(1.0));
    CHECK(C_d(1, 0) == doctest::Approx(2.0 * 1.0 / std::sqrt(M_PI) * std::tgamma(1.5)));
    for (const Polytope& P : {fixtures::unit_box(2), fixtures::unit_triangle()}) {
        const PolytopeConstants C = analyze_polytope(P, 2.0);
        for (double eps : {0.1, 0.01}) {
            const TheoreticalCount a = theoretical_count(P, 1.0, eps, 2.0, C);
            const TheoreticalCount b = theoretical_count(P, 1.0, 2 * eps, 2.0, C);
            CHECK(a.log_bound_gathered - b.log_bound_gathered == doctest::Approx(std::log(2.0)).epsilon(1e-12));
            CHECK(a.log_bound_card_sum <= a.log_bound_gathered + 1e-9);
            CHECK(a.c_d_normalized);
            CHECK(a.S_k[0] == doctest::Approx(volume(P)));
            const Partition part = build_partition(P, C, eps);
            const GlobalFamily fam = combine_families(part, 1.0);
            CHECK(fam.lp_size() <= a.size_certificate);
        }
    }
}

TEST_CASE("bracket binary dump")
{
    Bracket b;
    b.grid = unit_grid(1, 2);
    b.lower = {-1.0, 0.5, 0.25};
    b.upper = {1.0, 2.0, 3.0};
    const std::string path = "bracket_dump_test.bin";
    write_bracket_binary(b, path);
    std::ifstream in(path, std::ios::binary);
    std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)), {});
    REQUIRE(bytes.size() == 48);
    std::uint64_t bits = 0;
    for (int i = 7; i >= 0; --i) bits = (bits << 8) | bytes[static_cast<size_t>(8 + i)];
    CHECK(std::bit_cast<double>(bits) == 0.5);
    std::remove(path.c_str());
}
