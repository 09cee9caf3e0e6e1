#include <doctest.h>

#include <cmath>
#include <random>

#include "bracketing/john.hpp"
#include "bracketing/triangulate.hpp"
#include "fixtures.hpp"

using namespace bracketing;
using fixtures::vec;

namespace {

Mat gram(const Ellipsoid& E)
{
    const Mat S = E.shape();
    return S * S.transpose();
}

// Steiner inellipse: centroid and E E^T = (1/6) sum (v_i - g)(v_i - g)^T.
Mat steiner_gram(const Mat& V, Vec& centroid)
{
    centroid = V.rowwise().mean();
    Mat G = Mat::Zero(2, 2);
    for (int i = 0; i < 3; ++i) G += (V.col(i) - centroid) * (V.col(i) - centroid).transpose();
    return G / 6.0;
}

}  // namespace

TEST_CASE("john ellipsoid of axis-aligned boxes")
{
    const Ellipsoid sq = john_ellipsoid(fixtures::unit_box(2));
    CHECK((sq.center - vec({0.5, 0.5})).norm() <= 1e-7);
    CHECK(sq.radii(0) == doctest::Approx(0.5).epsilon(1e-7));
    CHECK(sq.radii(1) == doctest::Approx(0.5).epsilon(1e-7));
    CHECK((sq.axes - Mat::Identity(2, 2)).norm() <= 1e-9);

    const Ellipsoid box = john_ellipsoid(Polytope::box(vec({0, 0}), vec({2, 1})));
    CHECK((box.center - vec({1, 0.5})).norm() <= 1e-7);
    CHECK(box.radii(0) == doctest::Approx(1.0).epsilon(1e-7));
    CHECK(box.radii(1) == doctest::Approx(0.5).epsilon(1e-7));
    CHECK(std::abs(box.axes(0, 0)) == doctest::Approx(1.0));
}

TEST_CASE("john ellipsoid of triangles matches the Steiner inellipse")
{
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> u(-1, 1);
    Mat V(2, 3);
    V << 0, 1, 0, 0, 0, 1;
    for (int t = 0; t < 20; ++t) {
        if (t > 0) {
            for (int i = 0; i < 6; ++i) V(i % 2, i / 2) = u(rng);
            if (std::abs((V.col(1) - V.col(0)).x() * (V.col(2) - V.col(0)).y() -
                         (V.col(1) - V.col(0)).y() * (V.col(2) - V.col(0)).x()) < 0.1)
                continue;
        }
        const Polytope tri = Polytope::simplex(V);
        const Ellipsoid E = john_ellipsoid(tri);
        Vec g;
        const Mat G = steiner_gram(V, g);
        CHECK((E.center - g).norm() <= 1e-6);
        CHECK((gram(E) - G).norm() <= 1e-6);
        CHECK(verify_john(tri, E, 2.0).ok);
    }
}

TEST_CASE("john ellipsoid is affinely equivariant")
{
    std::mt19937_64 rng(29);
    std::normal_distribution<double> g;
    for (int t = 0; t < 10; ++t) {
        const int d = 2 + t % 2;
        const Polytope P = fixtures::random_polytope(rng, d, 6 + t % 3);
        Mat M(d, d);
        for (int i = 0; i < d * d; ++i) M(i % d, i / d) = g(rng);
        M += 2.0 * Mat::Identity(d, d);
        const Vec shift = fixtures::random_unit(rng, d);
        const Ellipsoid a = john_ellipsoid(P);
        const Ellipsoid b = john_ellipsoid(P.transformed(M, shift));
        CHECK((b.center - (M * a.center + shift)).norm() <= 1e-6 * (1 + b.center.norm()));
        const Mat expect = M * gram(a) * M.transpose();
        CHECK((gram(b) - expect).norm() <= 1e-6 * expect.norm());
    }
}

TEST_CASE("john ellipsoid scales linearly")
{
    const Polytope P = fixtures::unit_pentagon();
    const Ellipsoid base = john_ellipsoid(P);
    for (double s : {0.5, 2.0}) {
        const Ellipsoid e = john_ellipsoid(P.scaled(s));
        CHECK((e.center - s * base.center).norm() <= 1e-6);
        CHECK((e.radii - s * base.radii).norm() <= 1e-6);
    }
}

TEST_CASE("verify_john examples")
{
    const Polytope sq = fixtures::unit_box(2);
    CHECK(verify_john(sq, john_ellipsoid(sq), 2.0).ok);
    Ellipsoid big;
    big.center = vec({0.5, 0.5});
    big.axes = Mat::Identity(2, 2);
    big.radii = vec({0.6, 0.6});
    for (double f : {1.0, 2.0, 10.0}) {
        const JohnCheck c = verify_john(sq, big, f);
        CHECK_FALSE(c.ok);
        CHECK_FALSE(c.inscribed);
    }
    // Factor 1 cannot cover the square's corners with the inscribed disc.
    CHECK_FALSE(verify_john(sq, john_ellipsoid(sq), 1.0).covering);
}

TEST_CASE("john ellipsoids of faces live in the face")
{
    const Polytope cube = fixtures::unit_box(3);
    for (const Face& f : enumerate_faces(cube, 1)) {
        const Ellipsoid E = john_ellipsoid(cube, f);
        CHECK(E.dim() == 2);
        CHECK(E.radii(0) == doctest::Approx(0.5).epsilon(1e-7));
        CHECK(verify_john(cube, f, E, 3.0).ok);
    }
    for (const Face& f : enumerate_faces(cube, 2)) {
        const Ellipsoid E = john_ellipsoid(cube, f);
        CHECK(E.radii(0) == doctest::Approx(0.5).epsilon(1e-7));
        const JohnCheck c = verify_john(cube, f, E, 1.0);
        CHECK(c.worst_gauge == doctest::Approx(1.0).epsilon(1e-6));
    }
    const Face vertex = enumerate_faces(cube, 3).front();
    CHECK_THROWS(john_ellipsoid(cube, vertex));
}

TEST_CASE("john verification on random polytopes and their faces")
{
    std::mt19937_64 rng(41);
    for (int t = 0; t < 10; ++t) {
        const int d = 2 + t % 2;
        const Polytope P = fixtures::random_polytope(rng, d, 5 + t % 4);
        for (const Face& f : enumerate_all_faces(P)) {
            if (f.dim() == 0) continue;
            const Ellipsoid E = john_ellipsoid(P, f);
            const JohnCheck c = verify_john(P, f, E, static_cast<double>(d));
            CHECK(c.ok);
            CHECK(std::exp(E.log_volume_ratio()) > 0);
        }
    }
}

TEST_CASE("john is deterministic")
{
    const Polytope P = fixtures::unit_pentagon();
    const Ellipsoid a = john_ellipsoid(P), b = john_ellipsoid(P);
    CHECK((a.center - b.center).norm() == 0.0);
    CHECK((a.axes - b.axes).norm() == 0.0);
}
