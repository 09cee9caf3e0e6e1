#include "bracketing/partition.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "bracketing/combinatorics.hpp"
#include "bracketing/error.hpp"
#include "bracketing/rng.hpp"
#include "bracketing/triangulate.hpp"

namespace bracketing {

std::vector<int> delta_order(const IndexTuple& i_tuple, const DeltaSchedule& s)
{
    std::vector<int> order(i_tuple.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        return s.delta[static_cast<size_t>(i_tuple[static_cast<size_t>(a)])] <
               s.delta[static_cast<size_t>(i_tuple[static_cast<size_t>(b)])];
    });
    return order;
}

CellBasis cell_basis(const Polytope& P, const Face& face, const std::vector<int>& order, const Mat& completion)
{
    const int d = P.dim();
    const int k = face.k;
    if (static_cast<int>(order.size()) != k) fail(ErrorKind::argument, "delta order does not match the face");
    CellBasis basis;
    basis.order = order;
    basis.e = Mat::Zero(d, d);
    int filled = 0;
    auto push = [&](Vec v, bool must) {
        for (int c = 0; c < filled; ++c) v -= basis.e.col(c).dot(v) * basis.e.col(c);
        // A second pass keeps the result orthogonal to 1e-16 after cancellation.
        for (int c = 0; c < filled; ++c) v -= basis.e.col(c).dot(v) * basis.e.col(c);
        const double len = v.norm();
        if (len < 1e-10) {
            if (must) fail(ErrorKind::degeneracy, "active normals of face " + tuple_string(face.j_tuple) + " are dependent");
            return;
        }
        basis.e.col(filled++) = v / len;
    };
    for (int a = 0; a < k; ++a) push(P.normal(face.j_tuple[static_cast<size_t>(order[static_cast<size_t>(a)])]), true);
    for (Index c = 0; c < completion.cols() && filled < d; ++c) push(completion.col(c), false);
    for (int c = 0; c < d && filled < d; ++c) push(Vec::Unit(d, c), false);
    return basis;
}

bool Cell::certified() const
{
    return std::all_of(i_tuple.begin(), i_tuple.end(), [](int i) { return i >= 1; });
}

Vec lipschitz_certificate(const Cell& cell, double B, double u)
{
    if (!cell.certified()) fail(ErrorKind::no_certificate, "cell touches a facet; use the trivial bracket");
    const Index d = cell.basis.e.cols();
    Vec gamma(d);
    for (Index a = 0; a < d; ++a) gamma(a) = a < cell.k ? 2.0 * B / cell.lower[static_cast<size_t>(a)] : 2.0 * B / u;
    return gamma;
}

const Cell* Partition::find(const IndexTuple& j, const IndexTuple& i) const
{
    const auto it = index.find({j, i});
    return it == index.end() ? nullptr : &cells[static_cast<size_t>(it->second)];
}

int Partition::locate(const Vec& x) const
{
    const Vec s = domain.system().slacks(x);
    if (s.minCoeff() < -kGeomTol) return -1;
    IndexTuple j;
    for (Index r = 0; r < s.size(); ++r)
        if (s(r) < u) j.push_back(static_cast<int>(r));
    IndexTuple i;
    for (int r : j) i.push_back(std::max(0, schedule.band(std::max(0.0, s(r)))));
    const auto it = index.find({j, i});
    return it == index.end() ? -1 : it->second;
}

namespace {

bool member_at(const Partition& part, const Cell& c, const Vec& s)
{
    if (s.minCoeff() < 0) return false;
    size_t a = 0;
    for (Index r = 0; r < s.size(); ++r) {
        if (a < c.j_tuple.size() && c.j_tuple[a] == r) {
            const int i = c.i_tuple[a++];
            const auto& delta = part.schedule.delta;
            if (!(s(r) >= delta[static_cast<size_t>(i)] && s(r) < delta[static_cast<size_t>(i) + 1])) return false;
        } else if (!(s(r) >= part.u)) {
            return false;
        }
    }
    return true;
}

}  // namespace

bool Partition::member(const Cell& c, const Vec& x) const { return member_at(*this, c, domain.system().slacks(x)); }

int Partition::count_memberships(const Vec& x) const
{
    const Vec s = domain.system().slacks(x);
    int n = 0;
    for (const Cell& c : cells) n += member_at(*this, c, s) ? 1 : 0;
    return n;
}

namespace {

double face_width(const Polytope& P, const Face& face, const Vec& e)
{
    if (face.k == 0) return width(P.system(), e);
    if (face.dim() == 0) return 0.0;
    return width(face.local, Vec(face.tangent_basis.transpose() * e));
}

}  // namespace

Partition build_partition(const Polytope& P, const PolytopeConstants& C, double eps, UMode mode)
{
    Partition part(P);
    part.constants = C;
    part.eps = eps;
    part.p = C.p;
    part.u = C.u(mode);
    part.schedule = build_schedule(eps, C.p, part.u, 1, mode);
    part.domain_volume = volume(P);
    const DeltaSchedule& s = part.schedule;
    const int d = P.dim();
    const int A = s.A;

    Mat john_D;
    for (size_t f = 0; f < C.faces.size(); ++f) {
        if (C.faces[f].face.k == 0) john_D = C.faces[f].john.axes;
        part.face_index[C.faces[f].face.j_tuple] = static_cast<int>(f);
    }

    for (size_t f = 0; f < C.faces.size(); ++f) {
        const FaceData& fd = C.faces[f];
        const Face& face = fd.face;
        const int k = face.k;
        const Mat completion = k == 0 ? john_D : (k < d ? fd.john.axes : Mat(d, 0));
        IndexTuple i_tuple(static_cast<size_t>(k), 0);
        for (;;) {
            Cell cell;
            cell.j_tuple = face.j_tuple;
            cell.i_tuple = i_tuple;
            cell.k = k;
            cell.face = static_cast<int>(f);
            cell.region = P.system();
            for (int a = 0; a < k; ++a) {
                const int j = face.j_tuple[static_cast<size_t>(a)];
                const int i = i_tuple[static_cast<size_t>(a)];
                cell.region.add(P.normal(j), P.offset(j) + s.delta[static_cast<size_t>(i)]);
                cell.region.add(-P.normal(j), -P.offset(j) - s.delta[static_cast<size_t>(i) + 1]);
            }
            for (int b = 0; b < P.size(); ++b)
                if (std::find(face.j_tuple.begin(), face.j_tuple.end(), b) == face.j_tuple.end())
                    cell.region.add(P.normal(b), P.offset(b) + part.u);

            if (chebyshev_ball(cell.region).radius > 1e-12) cell.volume = volume(cell.region);
            if (cell.volume > 0.0) {
                const std::vector<int> order = delta_order(i_tuple, s);
                cell.basis = cell_basis(P, face, order, completion);
                for (int a = 0; a < k; ++a) {
                    const int i = i_tuple[static_cast<size_t>(order[static_cast<size_t>(a)])];
                    cell.lower.push_back(s.delta[static_cast<size_t>(i)]);
                    cell.gaps.push_back(s.gap(i));
                }
                cell.L_k1 = C.L_k1[static_cast<size_t>(k)];
                cell.rho.resize(d - k);
                cell.half_lengths.resize(d);
                for (int a = 0; a < d; ++a) {
                    if (a < k) {
                        cell.half_lengths(a) = factorial(a + 1) * cell.gaps[static_cast<size_t>(a)];
                    } else {
                        cell.rho(a - k) = face_width(P, face, cell.basis.e.col(a));
                        cell.half_lengths(a) = 2.0 * cell.L_k1 * cell.rho(a - k);
                    }
                }
                part.cells.push_back(std::move(cell));
            } else {
                ++part.skipped_empty;
            }
            int pos = k - 1;
            while (pos >= 0 && i_tuple[static_cast<size_t>(pos)] == A) i_tuple[static_cast<size_t>(pos--)] = 0;
            if (pos < 0) break;
            ++i_tuple[static_cast<size_t>(pos)];
        }
    }

    std::sort(part.cells.begin(), part.cells.end(), [](const Cell& a, const Cell& b) {
        return std::tie(a.j_tuple, a.i_tuple) < std::tie(b.j_tuple, b.i_tuple);
    });
    for (size_t c = 0; c < part.cells.size(); ++c)
        part.index[{part.cells[c].j_tuple, part.cells[c].i_tuple}] = static_cast<int>(c);
    return part;
}

WidthCheck check_basis_widths(const Partition&, const Cell& c)
{
    WidthCheck w;
    for (int a = 0; a < c.k; ++a) {
        const double bound = factorial(a + 1) * c.gaps[static_cast<size_t>(a)];
        const double wid = width(c.region, Vec(c.basis.e.col(a)));
        w.worst_ratio = std::max(w.worst_ratio, wid / bound);
        if (wid > bound + kGeomTol) w.ok = false;
    }
    return w;
}

WidthCheck check_lateral_widths(const Partition& part, const Cell& c)
{
    WidthCheck w;
    const int d = part.domain.dim();
    if (c.k < 1 || c.k > d - 1) return w;
    for (int a = c.k; a < d; ++a) {
        const double bound = 2.0 * c.L_k1 * c.rho(a - c.k);
        const double wid = width(c.region, Vec(c.basis.e.col(a)));
        w.worst_ratio = std::max(w.worst_ratio, wid / bound);
        if (wid > bound + kGeomTol) w.ok = false;
    }
    return w;
}

WidthCheck check_rectangle(const Partition& part, const Cell& c)
{
    WidthCheck w;
    for (int a = 0; a < part.domain.dim(); ++a) {
        const double wid = width(c.region, Vec(c.basis.e.col(a)));
        w.worst_ratio = std::max(w.worst_ratio, wid / c.half_lengths(a));
        if (wid > c.half_lengths(a) + kGeomTol) w.ok = false;
    }
    return w;
}

VolumeBound verify_volume_bound(const Partition& part, const Cell& c)
{
    VolumeBound vb;
    vb.lhs = c.volume;
    if (c.k < 1) {
        vb.rhs = part.domain_volume;
        vb.ok = vb.lhs <= vb.rhs * (1 + 1e-3);
        return vb;
    }
    const FaceData& fd = part.constants.faces[static_cast<size_t>(c.face)];
    const Polytope& P = part.domain;
    const int d = P.dim();
    double rhs = std::pow(2.0 * c.L_k1, d - c.k) * fd.volume;
    for (int a = 0; a < c.k; ++a) {
        const int i = c.i_tuple[static_cast<size_t>(a)];
        const Vec& f = fd.L.f_tilde[static_cast<size_t>(a)];
        rhs *= part.schedule.gap(i) / f.dot(P.normal(c.j_tuple[static_cast<size_t>(a)]));
    }
    vb.rhs = rhs;
    vb.ok = vb.lhs <= vb.rhs * (1 + 1e-3);
    return vb;
}

ParallelotopeWidth parallelotope_width(const std::vector<Vec>& v_list, const std::vector<double>& d_list, const Vec& direction)
{
    const int j = static_cast<int>(v_list.size());
    if (j < 1 || d_list.size() != v_list.size()) fail(ErrorKind::argument, "parallelotope needs matching v and d lists");
    Mat V(j, v_list.front().size());
    for (int a = 0; a < j; ++a) {
        V.row(a) = v_list[static_cast<size_t>(a)].transpose();
        if (!(d_list[static_cast<size_t>(a)] > 0)) fail(ErrorKind::argument, "slab widths must be positive");
    }
    const std::vector<Vec> ft = f_tilde_vectors(V);
    std::vector<Vec> f(static_cast<size_t>(j));
    ParallelotopeWidth out;
    for (int a = 0; a < j; ++a) {
        const double along = d_list[static_cast<size_t>(a)] / ft[static_cast<size_t>(a)].dot(V.row(a));
        f[static_cast<size_t>(a)] = along * ft[static_cast<size_t>(a)];
        out.vertex_bound += along;
    }

    for (int mask = 0; mask < (1 << j); ++mask) {
        Vec x = Vec::Zero(V.cols());
        for (int a = 0; a < j; ++a)
            if (mask & (1 << a)) x += f[static_cast<size_t>(a)];
        out.vertices.push_back(x);
    }
    double lo = INFINITY, hi = -INFINITY;
    for (const Vec& x : out.vertices) {
        lo = std::min(lo, direction.dot(x));
        hi = std::max(hi, direction.dot(x));
        for (const Vec& y : out.vertices) out.diameter = std::max(out.diameter, (x - y).norm());
    }
    out.width = hi - lo;
    out.bound = factorial(j) * *std::max_element(d_list.begin(), d_list.end());
    out.ok = out.diameter <= out.bound * (1 + 1e-12);
    return out;
}

AuditResult audit_partition(const Partition& part, long n_points, std::uint64_t seed)
{
    AuditResult r;
    const Polytope& P = part.domain;
    const int d = P.dim();
    CounterRng rng(seed, 0x9a97);
    Vec x(d);
    const DeltaSchedule& s = part.schedule;
    while (r.points < n_points) {
        for (int c = 0; c < d; ++c) {
            const Interval& iv = P.bounding_box()[static_cast<size_t>(c)];
            x(c) = rng.uniform(iv.lo, iv.hi);
        }
        if (!P.contains(x, 0.0)) continue;
        ++r.points;
        const int n = part.count_memberships(x);
        const int loc = part.locate(x);
        if (n == 1 && loc >= 0 && part.member(part.cells[static_cast<size_t>(loc)], x))
            ++r.exactly_one;
        else if (n == 0)
            ++r.none;
        else
            ++r.multiple;
        const Vec sl = P.system().slacks(x);
        bool near = false;
        for (Index i = 0; i < sl.size() && !near; ++i)
            for (int b = 1; b <= s.A + 1; ++b)
                if (std::abs(sl(i) - s.delta[static_cast<size_t>(b)]) < 1e-12) near = true;
        if (near) ++r.boundary;
    }
    for (const Cell& c : part.cells) r.volume_sum += c.volume;
    r.domain_volume = part.domain_volume;
    r.relative_volume_error = std::abs(r.volume_sum - r.domain_volume) / r.domain_volume;
    return r;
}

nlohmann::json partition_to_json(const Partition& part, double B)
{
    nlohmann::json j;
    j["eps"] = part.eps;
    j["p"] = part.p;
    j["u"] = part.u;
    j["A"] = part.schedule.A;
    std::vector<double> edges(part.schedule.delta.begin(), part.schedule.delta.end() - 1);
    j["delta"] = edges;
    j["domain_volume"] = part.domain_volume;
    j["cells"] = nlohmann::json::array();
    for (const Cell& c : part.cells) {
        nlohmann::json jc;
        jc["j_tuple"] = c.j_tuple;
        jc["i_tuple"] = c.i_tuple;
        jc["k"] = c.k;
        nlohmann::json basis = nlohmann::json::array();
        for (Index a = 0; a < c.basis.e.cols(); ++a) {
            const Vec e = c.basis.e.col(a);
            basis.push_back(std::vector<double>(e.data(), e.data() + e.size()));
        }
        jc["basis"] = basis;
        jc["order"] = c.basis.order;
        if (c.certified()) {
            const Vec g = lipschitz_certificate(c, B, part.u);
            jc["gamma"] = std::vector<double>(g.data(), g.data() + g.size());
        } else {
            jc["gamma"] = nullptr;
        }
        jc["half_lengths"] = std::vector<double>(c.half_lengths.data(), c.half_lengths.data() + c.half_lengths.size());
        jc["volume"] = c.volume;
        j["cells"].push_back(jc);
    }
    return j;
}

}  // namespace bracketing
