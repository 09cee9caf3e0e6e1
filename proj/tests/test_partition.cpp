#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

#include "bracketing/error.hpp"
#include "bracketing/lp.hpp"
#include "bracketing/partition.hpp"
#include "bracketing/rng.hpp"
#include "fixtures.hpp"

using namespace bracketing;
using fixtures::vec;

namespace {

Partition make_partition(const Polytope& P, double eps, double p = 1.0)
{
    return build_partition(P, analyze_polytope(P, p), eps);
}

// Band index by a plain scan of the edge list.
int band_by_scan(const std::vector<double>& delta, int A, double s)
{
    for (int i = 0; i <= A; ++i)
        if (s >= delta[static_cast<size_t>(i)] && s < delta[static_cast<size_t>(i) + 1]) return i;
    return -1;
}

Vec point_in_cell(const Partition& part, const Cell& c, std::mt19937_64& rng)
{
    const auto& bb = part.domain.bounding_box();
    for (int tries = 0; tries < 200000; ++tries) {
        Vec x(part.domain.dim());
        for (int a = 0; a < x.size(); ++a) x(a) = std::uniform_real_distribution<double>(bb[a].lo, bb[a].hi)(rng);
        if (part.member(c, x)) return x;
    }
    return Vec();
}

}  // namespace

TEST_CASE("cell basis examples")
{
    const Polytope sq = fixtures::unit_box(2);
    const auto faces = enumerate_faces(sq, 2);
    const Face& corner = faces.front();
    const CellBasis b = cell_basis(sq, corner, {0, 1}, Mat(2, 0));
    CHECK((b.e.transpose() * b.e - Mat::Identity(2, 2)).norm() < 1e-12);
    for (int a = 0; a < 2; ++a)
        CHECK(b.e.col(a).dot(sq.normal(corner.j_tuple[static_cast<size_t>(a)])) == doctest::Approx(1.0));

    Mat N(2, 2);
    N << 1, 0, 1 / std::sqrt(2.0), 1 / std::sqrt(2.0);
    Mat V(2, 3);
    V << 0, 2, 0, 0, 0, 2;
    // Triangle with an edge normal along (1,1)/sqrt2 meeting x >= 0 at a vertex.
    Mat NN(3, 2);
    NN << 1, 0, 0, 1, -1 / std::sqrt(2.0), -1 / std::sqrt(2.0);
    const Polytope tri(NN, vec({0, 0, -std::sqrt(2.0)}));
    for (const Face& f : enumerate_faces(tri, 2)) {
        if (f.j_tuple != IndexTuple{0, 2}) continue;
        const CellBasis bb = cell_basis(tri, f, {0, 1}, Mat(2, 0));
        CHECK((bb.e.col(0) - vec({1, 0})).norm() < 1e-12);
        CHECK((bb.e.col(1) - vec({0, -1})).norm() < 1e-12);
        CHECK(bb.e.col(1).dot(tri.normal(2)) > 0);
    }

    // Interior cell: John axes of D.
    const Polytope rect = Polytope::box(vec({0, 0}), vec({2, 1}));
    const Partition part = make_partition(rect, 0.05);
    const Cell* interior = part.find({}, {});
    REQUIRE(interior != nullptr);
    CHECK(std::abs(interior->basis.e.col(0).dot(vec({1, 0}))) == doctest::Approx(1.0));
}

TEST_CASE("cell basis invariants on random polytopes")
{
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 6; ++trial) {
        const int d = 2 + trial % 2;
        Polytope P = fixtures::random_polytope(rng, d, d + 3);
        if (!check_simple(P).simple) continue;
        const Partition part = make_partition(P, 0.02);
        for (const Cell& c : part.cells) {
            const Mat& e = c.basis.e;
            CHECK((e.transpose() * e - Mat::Identity(d, d)).norm() < 1e-12);
            for (int a = 0; a < c.k; ++a) {
                const Vec v = P.normal(c.j_tuple[static_cast<size_t>(c.basis.order[static_cast<size_t>(a)])]);
                CHECK(e.col(a).dot(v) > 0);
                for (int b = a + 1; b < d; ++b) CHECK(std::abs(e.col(b).dot(v)) < 1e-12);
            }
        }
    }
}

TEST_CASE("square partition matches a grid classification")
{
    const Polytope sq = fixtures::unit_box(2);
    const Partition part = make_partition(sq, 0.05);
    REQUIRE(part.schedule.A == 2);
    std::set<std::pair<IndexTuple, IndexTuple>> seen;
    const int n = 200;
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) {
            const double x = (a + 0.5) / n, y = (b + 0.5) / n;
            const double s[4] = {x, 1 - x, y, 1 - y};
            IndexTuple j, i;
            for (int r = 0; r < 4; ++r) {
                const int bi = band_by_scan(part.schedule.delta, part.schedule.A, s[r]);
                if (bi >= 0) {
                    j.push_back(r);
                    i.push_back(bi);
                }
            }
            seen.insert({j, i});
            const int loc = part.locate(vec({x, y}));
            REQUIRE(loc >= 0);
            CHECK(part.cells[static_cast<size_t>(loc)].j_tuple == j);
            CHECK(part.cells[static_cast<size_t>(loc)].i_tuple == i);
        }
    CHECK(part.cells.size() == seen.size());
    // Interior, 3 bands on 4 edges, 3x3 band pairs in 4 corners.
    CHECK(part.cells.size() == 1 + 4 * 3 + 4 * 9);
}

TEST_CASE("cells of non-faces are never emitted")
{
    // Trapezoid: edges 1 and 3 are opposite and never meet.
    Mat V(2, 4);
    V << 0, 1, 0.8, 0.2, 0, 0, 1, 1;
    const Polytope Q = Polytope::polygon(V);
    const Partition part = make_partition(Q, 0.05);
    for (const Cell& c : part.cells) CHECK(part.face_index.count(c.j_tuple) == 1);
    const auto& faces = enumerate_faces(Q, 2);
    for (const Cell& c : part.cells)
        if (c.k == 2)
            CHECK(std::any_of(faces.begin(), faces.end(), [&](const Face& f) { return f.j_tuple == c.j_tuple; }));
}

TEST_CASE("lipschitz certificate")
{
    const Polytope sq = fixtures::unit_box(2);
    const Partition part = make_partition(sq, 0.05);
    const Cell* interior = part.find({}, {});
    REQUIRE(interior != nullptr);
    CHECK(part.u == doctest::Approx(0.25));
    const Vec g = lipschitz_certificate(*interior, 1.0, part.u);
    CHECK(g(0) == doctest::Approx(8.0));
    CHECK(g(1) == doctest::Approx(8.0));

    const Cell* edge = part.find({0}, {1});
    REQUIRE(edge != nullptr);
    CHECK(lipschitz_certificate(*edge, 1.0, part.u)(0) == doctest::Approx(2.0 / part.schedule.delta[1]));
    const Cell* touching = part.find({0}, {0});
    REQUIRE(touching != nullptr);
    CHECK_FALSE(touching->certified());
    try {
        lipschitz_certificate(*touching, 1.0, part.u);
        FAIL("expected no-certificate");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::no_certificate);
    }
}

TEST_CASE("certified cells bound finite differences of bounded convex functions")
{
    std::mt19937_64 rng(5);
    const std::vector<Polytope> domains = {fixtures::unit_box(2), fixtures::unit_triangle(), fixtures::unit_pentagon()};
    long violations = 0, checks = 0;
    for (const Polytope& D : domains) {
        const Partition part = make_partition(D, 0.02);
        for (int trial = 0; trial < 8; ++trial) {
            // Random max-of-affine, rescaled into [-1, 1] over D.
            const int m = 6;
            Mat G(m, 2);
            Vec c(m);
            for (int r = 0; r < m; ++r) {
                G.row(r) = 20.0 * fixtures::random_unit(rng, 2).transpose() * std::uniform_real_distribution<double>(0, 1)(rng);
                c(r) = std::normal_distribution<double>()(rng);
            }
            auto raw = [&](const Vec& x) { return (G * x + c).maxCoeff(); };
            double hi = -INFINITY;
            for (const auto& v : D.vertices()) hi = std::max(hi, raw(v.point));
            Mat A(m + D.size(), 3);
            Vec b(m + D.size());
            A.setZero();
            A.block(0, 0, m, 2) = G;
            A.block(0, 2, m, 1).setConstant(-1.0);
            b.head(m) = -c;
            A.block(m, 0, D.size(), 2) = -D.normals();
            b.tail(D.size()) = -D.offsets();
            const LpResult r = maximize(vec({0, 0, -1}), A, b);
            REQUIRE(r.status == LpStatus::optimal);
            const double lo = -r.value;
            auto f = [&](const Vec& x) { return (raw(x) - 0.5 * (hi + lo)) * 2.0 / (hi - lo); };
            for (const Cell& cell : part.cells) {
                if (!cell.certified()) continue;
                const Vec gamma = lipschitz_certificate(cell, 1.0, part.u);
                const Vec x = point_in_cell(part, cell, rng);
                if (x.size() == 0) continue;
                for (int a = 0; a < 2; ++a) {
                    const double h = 1e-4;
                    const Vec y = x + h * cell.basis.e.col(a);
                    if (!part.member(cell, y)) continue;
                    ++checks;
                    if (std::abs(f(y) - f(x)) / h > gamma(a) + 1e-9) ++violations;
                }
            }
        }
    }
    CHECK(checks > 100);
    CHECK(violations == 0);
}

TEST_CASE("parallelotope widths")
{
    const auto sq = parallelotope_width({vec({1, 0}), vec({0, 1})}, {1, 1}, vec({1, 1}) / std::sqrt(2.0));
    CHECK(sq.width == doctest::Approx(std::sqrt(2.0)));
    CHECK(sq.bound == doctest::Approx(2.0));
    CHECK(sq.ok);

    // Vertex sum by hand: f1 = (1,-1), f2 = (0, sqrt2). The j! max d bound does not hold here.
    const auto sk = parallelotope_width({vec({1, 0}), vec({1, 1}) / std::sqrt(2.0)}, {1, 1}, vec({0, 1}));
    CHECK(sk.width == doctest::Approx(1.0 + std::sqrt(2.0)));
    CHECK(sk.diameter == doctest::Approx(std::sqrt(1.0 + std::pow(1.0 + std::sqrt(2.0), 2))));
    CHECK_FALSE(sk.ok);
    CHECK(sk.vertex_bound == doctest::Approx(std::sqrt(2.0) + std::sqrt(2.0)));
    CHECK(sk.diameter <= sk.vertex_bound);

    const auto seg = parallelotope_width({vec({0, 1})}, {1}, vec({0, 1}));
    CHECK(seg.width == doctest::Approx(1.0));
    CHECK(seg.bound == doctest::Approx(1.0));

    CHECK_THROWS_AS(parallelotope_width({vec({1, 0}), vec({2, 0})}, {1, 1}, vec({1, 0})), Error);
}

TEST_CASE("parallelotope bound and vertex representation on random instances")
{
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 200; ++trial) {
        const int j = 1 + trial % 4;
        const int n = j + trial % 2;
        std::vector<Vec> v;
        std::vector<double> dl;
        for (int a = 0; a < j; ++a) {
            v.push_back(fixtures::random_unit(rng, n));
            dl.push_back(std::uniform_real_distribution<double>(0.1, 1.0)(rng));
        }
        Mat Vm(j, n);
        for (int a = 0; a < j; ++a) Vm.row(a) = v[static_cast<size_t>(a)].transpose();
        if (Eigen::JacobiSVD<Mat>(Vm).singularValues().minCoeff() < 0.05) continue;
        const auto pw = parallelotope_width(v, dl, fixtures::random_unit(rng, n));
        CHECK(pw.diameter <= pw.vertex_bound * (1 + 1e-12));
        CHECK(pw.width <= pw.diameter * (1 + 1e-12));
        // Each represented vertex satisfies every slab and is tight on all j of them.
        for (const Vec& x : pw.vertices) {
            for (int a = 0; a < j; ++a) {
                const double s = x.dot(v[static_cast<size_t>(a)]);
                CHECK(s >= -1e-9);
                CHECK(s <= dl[static_cast<size_t>(a)] + 1e-9);
                CHECK((std::abs(s) < 1e-9 || std::abs(s - dl[static_cast<size_t>(a)]) < 1e-9));
            }
            CHECK((Vm.transpose() * (Vm * Vm.transpose()).ldlt().solve(Vm * x) - x).norm() < 1e-9);
        }
        std::set<std::vector<long>> distinct;
        for (const Vec& x : pw.vertices) {
            std::vector<long> key;
            for (int a = 0; a < j; ++a) key.push_back(std::lround(x.dot(v[static_cast<size_t>(a)]) / dl[static_cast<size_t>(a)]));
            distinct.insert(key);
        }
        CHECK(distinct.size() == (size_t(1) << j));
    }
}

TEST_CASE("rectangle half-lengths")
{
    const Polytope sq = fixtures::unit_box(2);
    const Partition part = make_partition(sq, 0.05);
    const Cell* corner = part.find({0, 2}, {1, 2});
    REQUIRE(corner != nullptr);
    const double g1 = part.schedule.gap(1), g2 = part.schedule.gap(2);
    CHECK(corner->half_lengths(0) == doctest::Approx(g1));
    CHECK(corner->half_lengths(1) == doctest::Approx(2 * g2));
    const Cell* edge = part.find({0}, {1});
    REQUIRE(edge != nullptr);
    CHECK(edge->rho(0) == doctest::Approx(1.0));
    CHECK(edge->L_k1 == doctest::Approx(1.0));
    CHECK(edge->half_lengths(1) == doctest::Approx(2.0));
}

TEST_CASE("cell differences fit the exact widths")
{
    std::mt19937_64 rng(8);
    for (const Polytope& D : {fixtures::unit_box(2), fixtures::unit_triangle(), fixtures::unit_pentagon()}) {
        const Partition part = make_partition(D, 0.02);
        for (const Cell& c : part.cells) {
            Vec exact(2);
            for (int a = 0; a < 2; ++a) exact(a) = width(c.region, Vec(c.basis.e.col(a)));
            std::vector<Vec> pts;
            for (int t = 0; t < 20; ++t) {
                const Vec x = point_in_cell(part, c, rng);
                if (x.size()) pts.push_back(x);
            }
            for (const Vec& x : pts)
                for (const Vec& y : pts) {
                    const Vec coord = c.basis.e.transpose() * (y - x);
                    for (int a = 0; a < 2; ++a) CHECK(std::abs(coord(a)) <= exact(a) + 1e-12);
                    if (check_rectangle(part, c).ok)
                        for (int a = 0; a < 2; ++a) CHECK(std::abs(coord(a)) <= c.half_lengths(a) + 1e-12);
                }
        }
    }
}

TEST_CASE("basis width bound fails at an acute corner")
{
    const Polytope tri = fixtures::unit_triangle();
    const Partition part = make_partition(tri, 0.02);
    // Corner (1,0): facets y >= 0 and x + y <= 1, equal bands.
    int bottom = -1, hyp = -1;
    for (int j = 0; j < tri.size(); ++j) {
        if (std::abs(tri.normal(j).dot(vec({0, 1})) - 1) < 1e-12) bottom = j;
        if (tri.normal(j).sum() < -1) hyp = j;
    }
    REQUIRE(bottom >= 0);
    REQUIRE(hyp >= 0);
    IndexTuple j = {std::min(bottom, hyp), std::max(bottom, hyp)};
    const Cell* c = part.find(j, {1, 1});
    REQUIRE(c != nullptr);
    const double g = part.schedule.gap(1);
    CHECK(width(c->region, Vec(c->basis.e.col(1))) == doctest::Approx(g + std::sqrt(2.0) * g));
    CHECK_FALSE(check_basis_widths(part, *c).ok);
    CHECK(check_basis_widths(part, *c).worst_ratio == doctest::Approx((1 + std::sqrt(2.0)) / 2));

    const Partition sq = make_partition(fixtures::unit_box(2), 0.02);
    for (const Cell& cell : sq.cells) {
        CHECK(check_basis_widths(sq, cell).ok);
        CHECK(check_rectangle(sq, cell).ok);
    }
}

TEST_CASE("width and volume bounds on random simple polytopes")
{
    std::mt19937_64 rng(21);
    int tested = 0;
    for (int trial = 0; trial < 12; ++trial) {
        const int d = 2 + trial % 2;
        const Polytope P = fixtures::random_polytope(rng, d, d + 2 + trial % 3);
        if (!check_simple(P).simple) continue;
        const Partition part = make_partition(P, 0.02);
        ++tested;
        for (const Cell& c : part.cells) {
            CHECK(check_lateral_widths(part, c).ok);
            if (c.k >= 1) {
                const VolumeBound vb = verify_volume_bound(part, c);
                CHECK(vb.ok);
            }
        }
    }
    CHECK(tested >= 6);
}

TEST_CASE("volume bound examples")
{
    const Polytope sq = fixtures::unit_box(2);
    const Partition part = make_partition(sq, 0.05);
    const Cell* edge = part.find({0}, {1});
    REQUIRE(edge != nullptr);
    const VolumeBound e = verify_volume_bound(part, *edge);
    CHECK(e.lhs == doctest::Approx(part.schedule.gap(1) * (1 - 2 * part.u)));
    CHECK(e.rhs == doctest::Approx(2.0 * part.schedule.gap(1)));
    const Cell* corner = part.find({0, 2}, {1, 1});
    REQUIRE(corner != nullptr);
    const VolumeBound c = verify_volume_bound(part, *corner);
    CHECK(c.lhs == doctest::Approx(part.schedule.gap(1) * part.schedule.gap(1)));
    CHECK(c.rhs == doctest::Approx(c.lhs));
    CHECK(c.ok);
}

TEST_CASE("partition audit")
{
    for (const Polytope& D : {fixtures::unit_box(2), fixtures::unit_triangle(), fixtures::unit_pentagon(), fixtures::unit_box(3)}) {
        const Partition part = make_partition(D, 0.02);
        const AuditResult r = audit_partition(part, 20000, 4);
        CHECK(r.points == 20000);
        CHECK(r.exactly_one == r.points);
        CHECK(r.relative_volume_error < 1e-9);
    }
}

TEST_CASE("degenerate schedule has a boundary band and an interior")
{
    const Polytope sq = fixtures::unit_box(2);
    const Partition part = make_partition(sq, 0.5);
    CHECK(part.schedule.A == 0);
    CHECK(part.cells.size() == 1 + 4 + 4);
    CHECK(audit_partition(part, 5000, 1).exactly_one == 5000);
}

TEST_CASE("non-simple domain is rejected")
{
    try {
        make_partition(fixtures::square_pyramid(), 0.1);
        FAIL("expected assumption-error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::assumption);
    }
}

TEST_CASE("counter rng")
{
    CounterRng a(7, 1), b(7, 1), c(7, 2);
    CHECK(a.at(5) == b.at(5));
    CHECK(a.at(5) != c.at(5));
    double sum = 0, sq = 0;
    const int n = 100000;
    for (int i = 0; i < n; ++i) {
        const double u = a.uniform();
        CHECK((u >= 0 && u < 1));
        sum += u;
        sq += u * u;
    }
    CHECK(sum / n == doctest::Approx(0.5).epsilon(0.01));
    CHECK(sq / n - (sum / n) * (sum / n) == doctest::Approx(1.0 / 12).epsilon(0.02));
    double gs = 0, gq = 0;
    for (int i = 0; i < n; ++i) {
        const double z = b.normal();
        gs += z;
        gq += z * z;
    }
    CHECK(std::abs(gs / n) < 0.02);
    CHECK(gq / n == doctest::Approx(1.0).epsilon(0.02));
}
