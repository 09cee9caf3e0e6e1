#include "bracketing/triangulate.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "bracketing/combinatorics.hpp"
#include "bracketing/error.hpp"

namespace bracketing {

namespace {

bool lex_less(const Vec& a, const Vec& b)
{
    for (Index i = 0; i < a.size(); ++i) {
        if (a(i) < b(i)) return true;
        if (a(i) > b(i)) return false;
    }
    return false;
}

void pull(const std::vector<VertexInfo>& verts, const std::vector<int>& ids, int m,
          std::vector<std::vector<int>>& out)
{
    if (static_cast<int>(ids.size()) == m + 1) {
        out.push_back(ids);
        return;
    }
    int apex = ids.front();
    for (int id : ids)
        if (lex_less(verts[static_cast<size_t>(id)].point, verts[static_cast<size_t>(apex)].point)) apex = id;

    std::set<int> rows;
    for (int id : ids) rows.insert(verts[static_cast<size_t>(id)].tight.begin(), verts[static_cast<size_t>(id)].tight.end());

    std::set<std::vector<int>> facets;
    for (int r : rows) {
        std::vector<int> sub;
        for (int id : ids) {
            const auto& t = verts[static_cast<size_t>(id)].tight;
            if (std::binary_search(t.begin(), t.end(), r)) sub.push_back(id);
        }
        if (sub.size() == ids.size() || static_cast<int>(sub.size()) < m) continue;
        if (std::find(sub.begin(), sub.end(), apex) != sub.end()) continue;
        std::vector<Vec> pts;
        for (int id : sub) pts.push_back(verts[static_cast<size_t>(id)].point);
        if (affine_dimension(pts) != m - 1) continue;
        facets.insert(sub);
    }
    for (const auto& f : facets) {
        std::vector<std::vector<int>> sub_out;
        pull(verts, f, m - 1, sub_out);
        for (auto& s : sub_out) {
            s.insert(s.begin(), apex);
            out.push_back(std::move(s));
        }
    }
}

}  // namespace

std::vector<std::vector<int>> pulling_triangulation(const std::vector<VertexInfo>& verts, int dim)
{
    std::vector<std::vector<int>> out;
    if (verts.empty()) return out;
    std::vector<int> ids(verts.size());
    for (size_t i = 0; i < verts.size(); ++i) ids[i] = static_cast<int>(i);
    pull(verts, ids, dim, out);
    return out;
}

namespace {

std::vector<Mat> simplices_of(const std::vector<VertexInfo>& verts, int d)
{
    std::vector<Mat> out;
    std::vector<Vec> pts;
    for (const auto& v : verts) pts.push_back(v.point);
    if (affine_dimension(pts) != d) return out;
    for (const auto& s : pulling_triangulation(verts, d)) {
        Mat S(d, d + 1);
        for (int c = 0; c <= d; ++c) S.col(c) = verts[static_cast<size_t>(s[static_cast<size_t>(c)])].point;
        out.push_back(std::move(S));
    }
    return out;
}

}  // namespace

std::vector<Mat> triangulate(const HalfspaceSystem& S)
{
    return simplices_of(enumerate_vertices(S), static_cast<int>(S.dim()));
}

std::vector<Polytope> triangulate(const Polytope& P)
{
    std::vector<Polytope> out;
    for (const Mat& s : simplices_of(P.vertices(), P.dim())) out.push_back(Polytope::simplex(s));
    if (out.empty()) fail(ErrorKind::domain, "cannot triangulate a lower-dimensional polytope");
    return out;
}

double simplex_volume(const Mat& simplex)
{
    const Index d = simplex.rows();
    Mat E(d, d);
    for (Index c = 0; c < d; ++c) E.col(c) = simplex.col(c + 1) - simplex.col(0);
    return std::abs(E.determinant()) / factorial(static_cast<int>(d));
}

double volume(const HalfspaceSystem& S)
{
    double v = 0.0;
    for (const Mat& s : triangulate(S)) v += simplex_volume(s);
    return v;
}

double volume(const Polytope& P)
{
    double v = 0.0;
    for (const Mat& s : simplices_of(P.vertices(), P.dim())) v += simplex_volume(s);
    return v;
}

}  // namespace bracketing
