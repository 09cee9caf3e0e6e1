#include "bracketing/brackets.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numbers>

#include "bracketing/error.hpp"
#include "bracketing/triangulate.hpp"

namespace bracketing {

double lp_size(const Bracket& b, double p, const HalfspaceSystem* clip)
{
    if (!(p >= 1)) fail(ErrorKind::argument, "L_p size needs p >= 1");
    if (b.lower.size() != b.upper.size()) fail(ErrorKind::argument, "bracket arrays differ in size");
    std::vector<double> gap(b.lower.size());
    for (size_t i = 0; i < gap.size(); ++i) gap[i] = std::max(0.0, b.upper[i] - b.lower[i]);
    if (std::isinf(p)) return gap.empty() ? 0.0 : *std::max_element(gap.begin(), gap.end());
    return std::pow(grid_power_integral(b.grid, gap, p, clip), 1.0 / p);
}

LipschitzFamily::LipschitzFamily(const Mat& basis, const Box& local_box, const Vec& gamma, double eps, double B)
    : gamma_(gamma), eps_(eps), q_(eps / 4.0), B_(B), top_(B)
{
    const Index d = basis.cols();
    if (!(eps > 0)) fail(ErrorKind::argument, "eps must be positive");
    if (!(B > 0)) fail(ErrorKind::argument, "B must be positive");
    if (gamma.size() != d || local_box.dim() != d) fail(ErrorKind::argument, "family dimension mismatch");
    grid_.basis = basis;
    grid_.lo = local_box.lo;
    grid_.pitch = Vec::Zero(d);
    grid_.nodes.assign(static_cast<size_t>(d), 1);
    for (Index a = 0; a < d; ++a) {
        if (!(gamma(a) >= 0) || !std::isfinite(gamma(a)))
            fail(ErrorKind::argument, "Lipschitz constants must be finite and nonnegative");
        const double len = local_box.hi(a) - local_box.lo(a);
        if (!(len >= 0)) fail(ErrorKind::argument, "box has negative extent");
        if (gamma(a) == 0.0 || len == 0.0) continue;
        const double h = eps / (4.0 * gamma(a) * static_cast<double>(d));
        const double steps = std::ceil(len / h - 1e-9);
        if (steps > 2.0e9) fail(ErrorKind::argument, "grid axis too fine");
        grid_.pitch(a) = h;
        grid_.nodes[static_cast<size_t>(a)] = static_cast<int>(steps) + 1;
        top_ += gamma(a) * std::max(0.0, steps * h - len);
    }
}

LipschitzFamily::Prepared LipschitzFamily::prepare(const ConvexFn& f) const
{
    const Index d = grid_.dim();
    if (f.dim() != d) fail(ErrorKind::argument, "function dimension does not match the family");
    const Vec origin = grid_.basis * grid_.lo;
    const Mat along = f.slopes * grid_.basis;  // <g_j, e_a>
    std::vector<Index> keep;
    for (Index j = 0; j < f.pieces(); ++j) {
        bool ok = true;
        for (Index a = 0; a < d && ok; ++a) ok = std::abs(along(j, a)) <= gamma_(a) * (1 + 1e-12) + 1e-15;
        if (ok) keep.push_back(j);
    }
    if (keep.empty()) fail(ErrorKind::certificate, "no affine piece satisfies the Lipschitz certificate");
    Prepared out;
    out.beta.resize(static_cast<Index>(keep.size()), d);
    out.alpha.resize(static_cast<Index>(keep.size()));
    for (size_t r = 0; r < keep.size(); ++r) {
        const Index j = keep[r];
        const auto row = static_cast<Index>(r);
        out.alpha(row) = f.slopes.row(j).dot(origin) + f.intercepts(j);
        out.beta.row(row) = along.row(j).cwiseProduct(grid_.pitch.transpose());
    }
    return out;
}

std::int64_t LipschitzFamily::key_at(const Prepared& f, const std::vector<int>& idx) const
{
    double v = -INFINITY;
    for (Index j = 0; j < f.alpha.size(); ++j) {
        double s = f.alpha(j);
        for (Index a = 0; a < f.beta.cols(); ++a) s += f.beta(j, a) * idx[static_cast<size_t>(a)];
        v = std::max(v, s);
    }
    // The lower clamp keeps profiles convex; the upper one never binds inside the certificate.
    v = std::clamp(v, -B_, top_);
    return static_cast<std::int64_t>(std::floor(v / q_));
}

double LipschitzFamily::center_at(const Prepared& f, const Vec& x) const
{
    double v = 0.0;
    for (const StencilEntry& s : kuhn_stencil(grid_, x)) v += s.weight * static_cast<double>(key_at(f, s.node));
    return v * q_;
}

Bracket LipschitzFamily::canonical_map(const ConvexFn& f) const
{
    const std::int64_t n = grid_.node_count();
    if (n > 50'000'000) fail(ErrorKind::argument, "grid too large to materialize");
    const Prepared pf = prepare(f);
    Bracket b;
    b.grid = grid_;
    b.key.resize(static_cast<size_t>(n));
    b.lower.resize(static_cast<size_t>(n));
    b.upper.resize(static_cast<size_t>(n));
    for (std::int64_t i = 0; i < n; ++i) {
        const auto u = static_cast<size_t>(i);
        b.key[u] = key_at(pf, i);
        b.lower[u] = static_cast<double>(b.key[u]) * q_ - 0.5 * eps_;
        b.upper[u] = static_cast<double>(b.key[u]) * q_ + 0.5 * eps_;
    }
    return b;
}

std::vector<std::int64_t> LipschitzFamily::key(const ConvexFn& f) const { return canonical_map(f).key; }

CountBound LipschitzFamily::count_bound() const
{
    CountBound out;
    if (grid_.dim() != 1) {
        out.note = "not enumerated";
        return out;
    }
    const int W = grid_.nodes[0] - 1;
    if (W > 4096) {
        out.note = "not enumerated: grid longer than 4096 steps";
        return out;
    }
    const double s = gamma_(0) * grid_.pitch(0) / q_;
    const long levels = static_cast<long>(std::floor(top_ / q_)) - static_cast<long>(std::floor(-B_ / q_)) + 1;
    const ChainCount c = count_floor_profiles(W, s, levels);
    if (!c.finite) {
        out.note = "not enumerated: count overflow";
        return out;
    }
    out.enumerated = true;
    out.log_superset = c.log_superset;
    out.log_subset = c.log_subset;
    out.log_convex_profiles = log_count_monotone_difference(W, levels);
    out.note = "lattice-chain enumeration";
    return out;
}

double cell_weight(const Partition& part, const Cell& c)
{
    if (c.k == 0) return std::min(part.eps, 2.0);
    if (!c.certified()) return 2.0;
    double log_a = std::log(part.eps);
    for (int i : c.i_tuple) log_a -= part.schedule.log_delta[static_cast<size_t>(i)] / (part.p + 1);
    return std::min(std::exp(log_a), 2.0);
}

GlobalFamily combine_families(const Partition& part, double B)
{
    if (!(B > 0)) fail(ErrorKind::argument, "B must be positive");
    GlobalFamily fam;
    fam.partition = &part;
    fam.B = B;
    fam.p = part.p;
    fam.eps = part.eps;
    const Index d = part.domain.dim();
    for (size_t ci = 0; ci < part.cells.size(); ++ci) {
        const Cell& c = part.cells[ci];
        CellFamily cf;
        cf.cell = static_cast<int>(ci);
        cf.volume = c.volume;
        cf.a = B * cell_weight(part, c);
        cf.trivial = !c.certified() || cf.a >= 2 * B;
        if (cf.trivial) {
            cf.a = 2 * B;
        } else {
            Box box{Vec(d), Vec(d)};
            for (Index a = 0; a < d; ++a) {
                const Vec e = c.basis.e.col(a);
                box.hi(a) = support(c.region, e);
                box.lo(a) = -support(c.region, Vec(-e));
            }
            const Vec gamma = lipschitz_certificate(c, B, part.u);
            cf.family = std::make_unique<LipschitzFamily>(c.basis.e, box, gamma, cf.a, B);
        }
        fam.cells.push_back(std::move(cf));
    }
    return fam;
}

double GlobalFamily::lp_size() const
{
    if (std::isinf(p)) {
        double m = 0.0;
        for (const CellFamily& c : cells) m = std::max(m, c.a);
        return m;
    }
    double sum = 0.0;
    for (const CellFamily& c : cells) sum += std::pow(c.a, p) * c.volume;
    return std::pow(sum, 1.0 / p);
}

namespace {

const CellFamily& cell_at(const GlobalFamily& fam, const Vec& x)
{
    const int ci = fam.partition->locate(x);
    if (ci < 0) fail(ErrorKind::domain, "point outside the domain");
    return fam.cells[static_cast<size_t>(ci)];
}

}  // namespace

double GlobalFamily::lower_at(const ConvexFn& f, const Vec& x) const
{
    const CellFamily& c = cell_at(*this, x);
    if (c.trivial) return -B;
    return c.family->lower_at(c.family->prepare(f), x);
}

double GlobalFamily::upper_at(const ConvexFn& f, const Vec& x) const
{
    const CellFamily& c = cell_at(*this, x);
    if (c.trivial) return B;
    return c.family->upper_at(c.family->prepare(f), x);
}

std::vector<std::vector<std::int64_t>> GlobalFamily::key(const ConvexFn& f) const
{
    std::vector<std::vector<std::int64_t>> out;
    out.reserve(cells.size());
    for (const CellFamily& c : cells) out.push_back(c.trivial ? std::vector<std::int64_t>{} : c.family->key(f));
    return out;
}

double assigned_lp_size(const GlobalFamily& fam, const ConvexFn& f)
{
    const Partition& part = *fam.partition;
    if (std::isinf(fam.p)) return fam.lp_size();
    double total = 0.0;
    for (const CellFamily& c : fam.cells) {
        const Cell& cell = part.cells[static_cast<size_t>(c.cell)];
        const std::vector<Mat> simplices = triangulate(cell.region);
        if (c.trivial) {
            double vol = 0.0;
            for (const Mat& S : simplices) vol += simplex_volume(S);
            total += std::pow(2 * fam.B, fam.p) * vol;
            continue;
        }
        const LipschitzFamily::Prepared pf = c.family->prepare(f);
        total += integrate_power(
            simplices, [&](const Vec& x) { return c.family->upper_at(pf, x) - c.family->lower_at(pf, x); }, fam.p);
    }
    return std::pow(total, 1.0 / fam.p);
}

double C_d(int d, int k)
{
    if (d < 1 || k < 0 || k > d) fail(ErrorKind::argument, "C_d needs 0 <= k <= d, d >= 1");
    const double m = d - k;
    return std::pow(2.0 * d, m) * std::tgamma(m / 2 + 1) / std::pow(std::numbers::pi, m / 2);
}

namespace {

double log_sum_exp(const std::vector<double>& v)
{
    if (v.empty()) return -INFINITY;
    const double m = *std::max_element(v.begin(), v.end());
    if (!std::isfinite(m)) return m;
    double s = 0.0;
    for (double x : v) s += std::exp(x - m);
    return m + std::log(s);
}

double log_factorial(int n) { return std::lgamma(n + 1.0); }

}  // namespace

TheoreticalCount theoretical_count(const Polytope& P, double B, double eps, double p, const PolytopeConstants& C,
                                   UMode mode)
{
    if (!(eps > 0 && eps < 1)) fail(ErrorKind::argument, "eps must lie in (0, 1)");
    if (!(B > 0)) fail(ErrorKind::argument, "B must be positive");
    const int d = P.dim();
    TheoreticalCount out;
    out.eps = eps;
    out.p = p;
    out.u = C.u(mode);
    const DeltaSchedule s = build_schedule_log(std::log(eps), p, std::log(out.u), 1, mode);
    out.A_u = A_u(s);
    std::vector<double> zd;
    for (double lz : s.log_zeta) zd.push_back(d * lz);
    const double log_Bu = log_sum_exp(zd);
    out.B_u = std::exp(log_Bu);
    out.S_k.assign(static_cast<size_t>(d) + 1, 0.0);

    const double half = d / 2.0;
    const double log_cd = std::log(out.c_d);
    std::vector<double> card_terms, gathered_terms;
    for (const FaceData& fd : C.faces) {
        const int k = fd.face.k;
        const int m = d - k;
        FaceCount fc;
        fc.j_tuple = fd.face.j_tuple;
        fc.k = k;
        fc.volume = fd.volume;
        fc.L_k1 = C.L_k1[static_cast<size_t>(k)];
        fc.L_j3 = k == 0 ? 1.0 : fd.L.L_j3;
        out.S_k[static_cast<size_t>(k)] += fc.volume * std::pow(fc.L_j3, k);

        const double log_base = log_cd + half * log_factorial(d) + k * half * std::log(2.0);
        const double log_X = m * (std::log(8.0) - std::log(out.u)) + std::log(C_d(d, k)) + std::log(fc.volume) +
                             m * std::log(fc.L_k1);
        const double log_one_plus_X = log_X > 0 ? log_X + std::log1p(std::exp(-log_X)) : std::log1p(std::exp(log_X));
        fc.log_card_sum = log_base + half * log_one_plus_X + k * log_Bu - half * std::log(eps);
        // 1 + X <= 2 max(1, X) and sum zeta^d <= 2 u^{d / (2 (p+1)^2)}.
        const double log_tilde = log_base + half * (std::log(2.0) + m * std::log(8.0) + std::log(C_d(d, k))) +
                                 k * std::log(2.0);
        const double log_geom = std::max(0.0, std::log(fc.volume) + m * std::log(fc.L_k1) - m * std::log(out.u));
        fc.log_gathered = -half * std::log(eps) + log_tilde + half * log_geom +
                          k * d * std::log(out.u) / (2 * (p + 1) * (p + 1));
        card_terms.push_back(fc.log_card_sum);
        gathered_terms.push_back(fc.log_gathered);
        out.faces.push_back(std::move(fc));
    }
    out.log_bound_card_sum = log_sum_exp(card_terms);
    out.log_bound_gathered = log_sum_exp(gathered_terms);

    double sum = 0.0;
    for (int k = 0; k <= d; ++k)
        sum += std::pow(2 * C.L_k1[static_cast<size_t>(k)], d - k) * out.S_k[static_cast<size_t>(k)] *
               std::pow(out.A_u, k);
    out.size_certificate = B * eps * std::pow(sum, 1.0 / p);
    return out;
}

nlohmann::json family_manifest(const GlobalFamily& fam)
{
    const Partition& part = *fam.partition;
    nlohmann::json cells = nlohmann::json::array();
    for (const CellFamily& c : fam.cells) {
        const Cell& cell = part.cells[static_cast<size_t>(c.cell)];
        nlohmann::json j{{"j_tuple", cell.j_tuple}, {"i_tuple", cell.i_tuple}, {"k", cell.k},
                         {"trivial", c.trivial},   {"a", c.a},                 {"volume", c.volume}};
        if (c.family) {
            const GridFrame& g = c.family->grid();
            j["gamma"] = std::vector<double>(c.family->gamma().data(), c.family->gamma().data() + g.dim());
            j["pitch"] = std::vector<double>(g.pitch.data(), g.pitch.data() + g.dim());
            j["nodes"] = g.nodes;
            j["quantum"] = c.family->quantum();
            const CountBound cb = c.family->count_bound();
            j["count"] = {{"enumerated", cb.enumerated}, {"note", cb.note}};
            if (cb.enumerated) {
                j["count"]["log_superset"] = cb.log_superset;
                j["count"]["log_subset"] = cb.log_subset;
                j["count"]["log_convex_profiles"] = cb.log_convex_profiles;
            }
        }
        cells.push_back(std::move(j));
    }
    return {{"eps", fam.eps}, {"p", fam.p}, {"B", fam.B}, {"u", part.u}, {"A", part.schedule.A},
            {"size", fam.lp_size()}, {"cells", std::move(cells)}};
}

void write_bracket_binary(const Bracket& b, const std::string& path)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) fail(ErrorKind::argument, "cannot open " + path);
    auto put = [&](double v) {
        const auto bits = std::bit_cast<std::uint64_t>(v);
        char bytes[8];
        for (int i = 0; i < 8; ++i) bytes[i] = static_cast<char>((bits >> (8 * i)) & 0xff);
        out.write(bytes, 8);
    };
    for (double v : b.lower) put(v);
    for (double v : b.upper) put(v);
    if (!out) fail(ErrorKind::argument, "write failed for " + path);
}

}  // namespace bracketing
