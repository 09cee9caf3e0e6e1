#pragma once

#include <optional>
#include <string>
#include <vector>

#include "bracketing/polytope.hpp"

namespace bracketing {

// G_j: intersection of the hyperplanes indexed by j_tuple with the polytope.
// Local coordinates y parametrize the flat as x = origin + tangent_basis * y.
struct Face {
    IndexTuple j_tuple;
    int k = 0;
    Vec affine_point;
    Mat tangent_basis;  // d x (d - k)
    Vec origin;
    HalfspaceSystem local;  // remaining constraints in y, unit normals
    std::vector<int> local_index;  // polytope halfspace behind each local row

    int dim() const { return static_cast<int>(tangent_basis.cols()); }
    Vec to_ambient(const Vec& y) const { return origin + tangent_basis * y; }
    Vec to_local(const Vec& x) const { return tangent_basis.transpose() * (x - origin); }
};

// nullopt when the tuple is not in J_k^D (dependent normals or a lower-dimensional intersection).
std::optional<Face> make_face(const Polytope& P, const IndexTuple& j_tuple);
std::vector<Face> enumerate_faces(const Polytope& P, int k);
std::vector<Face> enumerate_all_faces(const Polytope& P);

struct SimplicityReport {
    bool simple = true;
    std::vector<std::string> violations;
};
SimplicityReport check_simple(const Polytope& P);

// Vertices of P lying on every hyperplane of the face.
std::vector<Vec> face_vertices(const Polytope& P, const Face& face);

// vol_{d-k} in tangent coordinates; 1 for vertices.
double face_volume(const Polytope& P, const Face& face);

std::string tuple_string(const IndexTuple& t);

}  // namespace bracketing
