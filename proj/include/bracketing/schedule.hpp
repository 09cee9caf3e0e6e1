#pragma once

#include <vector>

#include "bracketing/faces.hpp"
#include "bracketing/john.hpp"

namespace bracketing {

enum class UMode { theoretical, empirical };
const char* to_string(UMode mode);
UMode parse_umode(const std::string& s);

// Unit vectors f_a in span{v_{j_1..j_k}} with <f_a, v_{j_b}> = 0 for b != a and <f_a, v_{j_a}> > 0.
std::vector<Vec> f_tilde_vectors(const Mat& active_normals);  // k x d rows
std::vector<Vec> f_tilde_vectors(const Polytope& P, const Face& face);

struct LConstants {
    IndexTuple j_tuple;
    int k = 0;
    double L_k1 = 1.0;
    double L_k2 = 1.0;
    double L_j3 = 1.0;
    std::vector<Vec> f_tilde;
};

// lateral: orthonormal columns spanning the face directions (defaults to the tangent basis).
LConstants compute_L_constants(const Polytope& P, const Face& face);
LConstants compute_L_constants(const Polytope& P, const Face& face, const Mat& lateral);

double u_cap(double p);
double log_u_cap(double p);

struct FaceData {
    Face face;
    LConstants L;
    Ellipsoid john;  // absent (dim 0) for vertices
    double volume = 1.0;  // vol_{d-k}
    double john_exit = 0.0;  // distance from the John center to the face's relative boundary
    double inradius = 0.0;   // Chebyshev radius within the face
};

// Everything the partition needs about a simple polytope, for one p.
struct PolytopeConstants {
    int dim = 0;
    double p = 1.0;
    std::vector<FaceData> faces;  // every face, k = 0..d, in enumeration order
    std::vector<double> L_k1;     // per codimension, max over faces (index k)
    std::vector<double> L_k2;
    double cap = 0.0;
    double inner_theoretical = 0.0;
    double inner_empirical = 0.0;
    double separation = 0.0;  // largest u keeping non-face facet groups apart
    double u_theoretical = 0.0;
    double u_empirical = 0.0;

    double u(UMode mode) const { return mode == UMode::theoretical ? u_theoretical : u_empirical; }
    const FaceData* find(const IndexTuple& j) const;
};

PolytopeConstants analyze_polytope(const Polytope& P, double p, const JohnOptions& john = {});
double compute_u(const Polytope& P, double p, UMode mode);

// Smallest max-slack over D of a facet group: the group's slabs of width u share a point iff u > value.
double group_separation(const Polytope& P, const IndexTuple& group);

struct DeltaSchedule {
    double eps = 0.0;
    double log_eps = 0.0;
    double p = 1.0;
    double u = 0.0;
    double log_u = 0.0;
    int k = 1;
    int A = 0;
    UMode mode = UMode::empirical;
    std::vector<double> delta;      // delta_0..delta_{A+2}: 0, ..., u, +inf
    std::vector<double> log_delta;  // same indexing; -inf, ..., log u, +inf
    std::vector<double> log_a;      // a_1..a_A at positions 0..A-1
    std::vector<double> log_zeta;   // zeta_1..zeta_A at positions 0..A-1

    double a(int i) const;     // i in 1..A
    double zeta(int i) const;  // i in 1..A
    double gap(int i) const { return delta[static_cast<size_t>(i) + 1] - delta[static_cast<size_t>(i)]; }
    // Band index i with delta_i <= s < delta_{i+1}, for 0 <= s < u; -1 when s >= u.
    int band(double s) const;
};

DeltaSchedule build_schedule(double eps, double p, double u, int k, UMode mode = UMode::empirical);
// Log-space variant for parameters whose deltas underflow.
DeltaSchedule build_schedule_log(double log_eps, double p, double log_u, int k, UMode mode = UMode::theoretical);

struct InequalityCheck {
    double lhs = 0.0;
    double rhs = 0.0;
    bool ok = true;
    double log_lhs = 0.0;
    double log_rhs = 0.0;
};

// sum zeta^gamma <= 2 u^{gamma / (2 (p+1)^2)}
InequalityCheck zetasum_check(const DeltaSchedule& s, double gamma);
// A_u = 1 + sum zeta^2 <= 1 + 2 u^{1/(p+1)^2}
InequalityCheck au_check(const DeltaSchedule& s);
double A_u(const DeltaSchedule& s);

}  // namespace bracketing
