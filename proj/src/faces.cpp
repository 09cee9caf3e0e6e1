#include "bracketing/faces.hpp"

#include <algorithm>
#include <sstream>

#include "bracketing/combinatorics.hpp"
#include "bracketing/error.hpp"
#include "bracketing/triangulate.hpp"

namespace bracketing {

std::string tuple_string(const IndexTuple& t)
{
    std::ostringstream os;
    os << '(';
    for (size_t i = 0; i < t.size(); ++i) os << (i ? "," : "") << t[i];
    os << ')';
    return os.str();
}

std::optional<Face> make_face(const Polytope& P, const IndexTuple& j_tuple)
{
    const int d = P.dim();
    const int k = static_cast<int>(j_tuple.size());
    if (k > d) return std::nullopt;
    Face face;
    face.j_tuple = j_tuple;
    face.k = k;

    if (k == 0) {
        face.origin = Vec::Zero(d);
        face.tangent_basis = Mat::Identity(d, d);
    } else {
        Mat Nj(k, d);
        Vec pj(k);
        for (int a = 0; a < k; ++a) {
            Nj.row(a) = P.normals().row(j_tuple[static_cast<size_t>(a)]);
            pj(a) = P.offset(j_tuple[static_cast<size_t>(a)]);
        }
        Eigen::JacobiSVD<Mat> svd(Nj, Eigen::ComputeFullU | Eigen::ComputeFullV);
        if (svd.singularValues()(k - 1) < 1e-10) return std::nullopt;
        face.origin = svd.solve(pj);
        face.tangent_basis = svd.matrixV().rightCols(d - k);
        for (int c = 0; c < d - k; ++c) {
            Vec col = face.tangent_basis.col(c);
            canonical_sign(col);
            face.tangent_basis.col(c) = col;
        }
    }

    const int m = d - k;
    face.local = HalfspaceSystem(Mat(0, m), Vec(0));
    for (int i = 0; i < P.size(); ++i) {
        if (std::find(j_tuple.begin(), j_tuple.end(), i) != j_tuple.end()) continue;
        const Vec a = face.tangent_basis.transpose() * P.normal(i);
        const double b = P.offset(i) - P.normal(i).dot(face.origin);
        const double len = a.norm();
        if (len < 1e-12) {
            if (b > kGeomTol) return std::nullopt;
            continue;
        }
        face.local.add(a / len, b / len);
        face.local_index.push_back(i);
    }

    if (m == 0) {
        face.affine_point = face.origin;
        return face;
    }
    const ChebyshevBall ball = chebyshev_ball(face.local);
    if (!(ball.radius > kGeomTol)) return std::nullopt;
    face.affine_point = face.to_ambient(ball.center);
    return face;
}

std::vector<Face> enumerate_faces(const Polytope& P, int k)
{
    if (k < 0 || k > P.dim()) fail(ErrorKind::argument, "face codimension out of range");
    std::vector<Face> out;
    for_each_combination(P.size(), k, [&](const std::vector<int>& j) {
        if (auto f = make_face(P, j)) out.push_back(std::move(*f));
    });
    return out;
}

std::vector<Face> enumerate_all_faces(const Polytope& P)
{
    std::vector<Face> out;
    for (int k = 0; k <= P.dim(); ++k) {
        auto fk = enumerate_faces(P, k);
        out.insert(out.end(), std::make_move_iterator(fk.begin()), std::make_move_iterator(fk.end()));
    }
    return out;
}

SimplicityReport check_simple(const Polytope& P)
{
    SimplicityReport report;
    for (int k = 1; k <= P.dim(); ++k) {
        for (const Face& f : enumerate_faces(P, k)) {
            int tight = 0;
            for (int i = 0; i < P.size(); ++i)
                if (std::abs(P.slack(i, f.affine_point)) <= kGeomTol) ++tight;
            if (tight != k) {
                report.simple = false;
                std::ostringstream os;
                os << "face " << tuple_string(f.j_tuple) << " has " << tight << " tight facets, expected " << k;
                report.violations.push_back(os.str());
            }
        }
    }
    return report;
}

std::vector<Vec> face_vertices(const Polytope& P, const Face& face)
{
    std::vector<Vec> out;
    for (const auto& v : P.vertices()) {
        const bool on_all = std::all_of(face.j_tuple.begin(), face.j_tuple.end(), [&](int j) {
            return std::binary_search(v.tight.begin(), v.tight.end(), j);
        });
        if (on_all) out.push_back(v.point);
    }
    return out;
}

double face_volume(const Polytope&, const Face& face)
{
    if (face.dim() == 0) return 1.0;
    return volume(face.local);
}

}  // namespace bracketing
