#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include <json.hpp>

#include "bracketing/schedule.hpp"

namespace bracketing {

struct CellBasis {
    Mat e;                   // d x d, columns e_1..e_d
    std::vector<int> order;  // order[a] = position in j_tuple of the normal behind e_{a+1}
};

// Gram-Schmidt over the active normals taken in delta_order, completed by the given lateral
// axes (John axes of the face, or of D for k = 0).
CellBasis cell_basis(const Polytope& P, const Face& face, const std::vector<int>& delta_order, const Mat& completion);

// Active positions sorted by increasing lower band edge, ties by position.
std::vector<int> delta_order(const IndexTuple& i_tuple, const DeltaSchedule& s);

struct Cell {
    IndexTuple j_tuple;
    IndexTuple i_tuple;
    int k = 0;
    int face = -1;  // index into PolytopeConstants::faces
    CellBasis basis;
    HalfspaceSystem region;  // closure of the cell
    double volume = 0.0;
    std::vector<double> lower;  // delta_{i} per sorted active direction
    std::vector<double> gaps;   // delta_{i+1} - delta_{i} per sorted active direction
    Vec rho;                    // w(G_j, e_a) for lateral directions
    Vec half_lengths;           // rectangle R_{i,j} per basis direction
    double L_k1 = 1.0;

    bool certified() const;
};

// Gamma per basis direction: 2B/delta for active directions, 2B/u laterally.
Vec lipschitz_certificate(const Cell& cell, double B, double u);

struct Partition {
    explicit Partition(Polytope d) : domain(std::move(d)) {}

    Polytope domain;
    PolytopeConstants constants;
    DeltaSchedule schedule;  // band edges (shared by every face)
    double eps = 0.0;
    double p = 1.0;
    double u = 0.0;
    double domain_volume = 0.0;
    std::vector<Cell> cells;
    int skipped_empty = 0;

    const Cell* find(const IndexTuple& j, const IndexTuple& i) const;
    // Cell index containing x under the half-open band rule, -1 if none.
    int locate(const Vec& x) const;
    bool member(const Cell& c, const Vec& x) const;
    int count_memberships(const Vec& x) const;

    std::map<std::pair<IndexTuple, IndexTuple>, int> index;
    std::map<IndexTuple, int> face_index;
};

Partition build_partition(const Polytope& P, const PolytopeConstants& C, double eps, UMode mode = UMode::empirical);

struct WidthCheck {
    double worst_ratio = 0.0;  // max width / bound over the checked directions
    bool ok = true;
};

// Widths along e_a for active directions against a! * gap.
WidthCheck check_basis_widths(const Partition& part, const Cell& c);
// Lateral widths against 2 L_{k,1} w(G_j, e_a), for 1 <= k <= d-1.
WidthCheck check_lateral_widths(const Partition& part, const Cell& c);
// Every width of the cell fits inside R_{i,j}.
WidthCheck check_rectangle(const Partition& part, const Cell& c);

struct VolumeBound {
    double lhs = 0.0;
    double rhs = 0.0;
    bool ok = true;
};
VolumeBound verify_volume_bound(const Partition& part, const Cell& c);

struct ParallelotopeWidth {
    double width = 0.0;
    double bound = 0.0;         // j! max d_i
    double vertex_bound = 0.0;  // sum d_b / <f~_b, v_b>, always an upper bound on the diameter
    double diameter = 0.0;
    bool ok = true;  // diameter <= bound
    std::vector<Vec> vertices;  // vertex representation sum of [0, f_b]
};
// {x in span(v) : 0 <= <x, v_i> <= d_i}.
ParallelotopeWidth parallelotope_width(const std::vector<Vec>& v_list, const std::vector<double>& d_list, const Vec& direction);

struct AuditResult {
    long points = 0;
    long exactly_one = 0;
    long none = 0;
    long multiple = 0;
    long boundary = 0;  // points within 1e-12 of a band edge
    double volume_sum = 0.0;
    double domain_volume = 0.0;
    double relative_volume_error = 0.0;
};
AuditResult audit_partition(const Partition& part, long n_points, std::uint64_t seed);

nlohmann::json partition_to_json(const Partition& part, double B);

}  // namespace bracketing
