#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include <json.hpp>

#include "bracketing/chain_count.hpp"
#include "bracketing/convex_fn.hpp"
#include "bracketing/grid.hpp"
#include "bracketing/partition.hpp"

namespace bracketing {

struct Bracket {
    GridFrame grid;
    std::vector<double> lower;
    std::vector<double> upper;
    std::vector<std::int64_t> key;
};

// L_p norm of upper - lower over the grid box (or its intersection with clip); p = inf gives
// the largest node gap.
double lp_size(const Bracket& b, double p, const HalfspaceSystem* clip = nullptr);

struct CountBound {
    bool enumerated = false;
    double log_superset = 0.0;  // upper bound on log |family image|
    double log_subset = 0.0;    // lower bound on log |family image|
    // Quantized profiles that are themselves convex (nondecreasing integer differences) over the same
    // grid and value range. Floors of convex functions need not be convex, so this is not a bound on
    // the family image.
    double log_convex_profiles = 0.0;
    std::string note;
};

// Grid-quantization family for convex functions Gamma-Lipschitz along the columns of `basis` on the
// box (in basis coordinates): pitch eps / (4 Gamma_a d), quantum eps / 4, canonical profile
// floor(f / q) at the nodes, bracket = interpolant -/+ eps / 2.
class LipschitzFamily {
public:
    LipschitzFamily(const Mat& basis, const Box& local_box, const Vec& gamma, double eps, double B);

    // f restricted to the pieces obeying the certificate, in grid coordinates:
    // value(idx) = clamp(max_j alpha_j + <beta_j, idx>, -B, B).
    struct Prepared {
        Mat beta;
        Vec alpha;
    };
    Prepared prepare(const ConvexFn& f) const;

    std::int64_t key_at(const Prepared& f, const std::vector<int>& idx) const;
    std::int64_t key_at(const Prepared& f, std::int64_t flat) const { return key_at(f, grid_.unflat(flat)); }
    // Bracket values at a point, evaluated lazily from the d+1 stencil nodes.
    double center_at(const Prepared& f, const Vec& x) const;
    double lower_at(const Prepared& f, const Vec& x) const { return center_at(f, x) - 0.5 * eps_; }
    double upper_at(const Prepared& f, const Vec& x) const { return center_at(f, x) + 0.5 * eps_; }

    Bracket canonical_map(const ConvexFn& f) const;
    std::vector<std::int64_t> key(const ConvexFn& f) const;
    CountBound count_bound() const;

    const GridFrame& grid() const { return grid_; }
    const Vec& gamma() const { return gamma_; }
    double eps() const { return eps_; }
    double quantum() const { return q_; }
    double B() const { return B_; }

private:
    GridFrame grid_;
    Vec gamma_;
    double eps_;
    double q_;
    double B_;
    double top_;  // upper clamp: B plus the Lipschitz rise over the grid's overshoot of the box
};

// Family sizes and generators for every cell of a partition.
struct CellFamily {
    int cell = -1;
    bool trivial = true;  // bracket [-B, B]
    double a = 0.0;       // L_inf size of the cell's brackets
    double volume = 0.0;
    std::unique_ptr<LipschitzFamily> family;
};

// a_{i,k} = eps * prod_beta delta_{i_beta}^{-1/(p+1)} for certified cells, eps for k = 0, capped by
// the trivial size 2B.
double cell_weight(const Partition& part, const Cell& c);

struct GlobalFamily {
    const Partition* partition = nullptr;
    double B = 1.0;
    double p = 1.0;
    double eps = 0.0;
    std::vector<CellFamily> cells;

    // (sum_cells a^p vol)^{1/p}
    double lp_size() const;
    double lower_at(const ConvexFn& f, const Vec& x) const;
    double upper_at(const ConvexFn& f, const Vec& x) const;
    std::vector<std::vector<std::int64_t>> key(const ConvexFn& f) const;
};

GlobalFamily combine_families(const Partition& part, double B);

// Direct L_p size of the brackets assigned to f: per-cell quadrature of (upper - lower)^p over a
// triangulation of each cell.
double assigned_lp_size(const GlobalFamily& fam, const ConvexFn& f);

struct FaceCount {
    IndexTuple j_tuple;
    int k = 0;
    double volume = 0.0;  // vol_{d-k}(G_j)
    double L_k1 = 1.0;
    double L_j3 = 1.0;
    double log_card_sum = 0.0;  // log of the per-face bound before gathering constants
    double log_gathered = 0.0;  // log of eps^{-d/2} c~_d (vol L^{d-k} / u^{d-k})^{d/2} u^{kd/(2(p+1)^2)}
};

struct TheoreticalCount {
    double eps = 0.0;
    double p = 1.0;
    double u = 0.0;
    double c_d = 1.0;  // non-constructive constant, normalized to 1
    bool c_d_normalized = true;
    double log_bound_card_sum = 0.0;
    double log_bound_gathered = 0.0;
    double A_u = 1.0;
    double B_u = 0.0;
    std::vector<double> S_k;  // S_k^D, k = 0..d
    double size_certificate = 0.0;  // eps (sum_k (2 L_{k,1})^{d-k} S_k A_u^k)^{1/p}
    std::vector<FaceCount> faces;
};

double C_d(int d, int k);
TheoreticalCount theoretical_count(const Polytope& P, double B, double eps, double p, const PolytopeConstants& C,
                                   UMode mode = UMode::empirical);

nlohmann::json family_manifest(const GlobalFamily& fam);
// Node values of a bracket as little-endian 64-bit floats, lower then upper, row-major over the grid.
void write_bracket_binary(const Bracket& b, const std::string& path);

}  // namespace bracketing
