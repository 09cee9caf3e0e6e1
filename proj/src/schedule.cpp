#include "bracketing/schedule.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "bracketing/combinatorics.hpp"
#include "bracketing/error.hpp"
#include "bracketing/lp.hpp"

namespace bracketing {

const char* to_string(UMode mode) { return mode == UMode::theoretical ? "theoretical" : "empirical"; }

UMode parse_umode(const std::string& s)
{
    if (s == "theoretical") return UMode::theoretical;
    if (s == "empirical") return UMode::empirical;
    fail(ErrorKind::argument, "mode must be theoretical or empirical, got " + s);
}

std::vector<Vec> f_tilde_vectors(const Mat& N)
{
    const Index k = N.rows();
    std::vector<Vec> out;
    if (k == 0) return out;
    Eigen::FullPivLU<Mat> lu(N * N.transpose());
    lu.setThreshold(1e-10);
    if (!lu.isInvertible()) fail(ErrorKind::degeneracy, "active normals are linearly dependent");
    const Mat Ginv = lu.inverse();
    for (Index a = 0; a < k; ++a) {
        Vec f = N.transpose() * Ginv.col(a);
        f.normalize();
        if (f.dot(N.row(a)) < 0) f = -f;
        out.push_back(f);
    }
    return out;
}

namespace {

Mat active_normals(const Polytope& P, const IndexTuple& j)
{
    Mat N(static_cast<Index>(j.size()), P.dim());
    for (size_t a = 0; a < j.size(); ++a) N.row(static_cast<Index>(a)) = P.normals().row(j[a]);
    return N;
}

bool in_tuple(const IndexTuple& j, int i) { return std::find(j.begin(), j.end(), i) != j.end(); }

}  // namespace

std::vector<Vec> f_tilde_vectors(const Polytope& P, const Face& face) { return f_tilde_vectors(active_normals(P, face.j_tuple)); }

LConstants compute_L_constants(const Polytope& P, const Face& face) { return compute_L_constants(P, face, face.tangent_basis); }

LConstants compute_L_constants(const Polytope& P, const Face& face, const Mat& lateral)
{
    LConstants L;
    L.j_tuple = face.j_tuple;
    L.k = face.k;
    if (face.k == 0) return L;
    L.f_tilde = f_tilde_vectors(P, face);

    double sum_max = -std::numeric_limits<double>::infinity();
    for (int b = 0; b < P.size(); ++b) {
        if (in_tuple(face.j_tuple, b)) continue;
        double sum = 0.0;
        for (int g = 0; g < face.k; ++g) {
            const Vec& f = L.f_tilde[static_cast<size_t>(g)];
            sum += f.dot(P.normal(b)) / f.dot(P.normal(face.j_tuple[static_cast<size_t>(g)]));
        }
        sum_max = std::max(sum_max, sum);
    }
    L.L_k2 = std::max(1.0, sum_max);

    if (lateral.cols() > 0) {
        double worst = 0.0;
        bool any = false;
        for (int b = 0; b < P.size(); ++b) {
            if (in_tuple(face.j_tuple, b)) continue;
            const double proj = (lateral.transpose() * P.normal(b)).norm();
            if (proj <= 1e-12) continue;
            any = true;
            worst = std::max(worst, 1.0 / proj);
        }
        if (!any) fail(ErrorKind::boundedness, "no facet bounds face " + tuple_string(face.j_tuple) + " laterally");
        L.L_k1 = std::max(1.0, worst);
    }

    double l3 = 1.0;
    for (int a = 0; a < face.k; ++a)
        l3 = std::max(l3, 1.0 / L.f_tilde[static_cast<size_t>(a)].dot(P.normal(face.j_tuple[static_cast<size_t>(a)])));
    L.L_j3 = l3;
    return L;
}

double log_u_cap(double p) { return -2.0 * (p + 1) * (p + 1) * (p + 2) * std::log(2.0); }
double u_cap(double p) { return std::exp(log_u_cap(p)); }

const FaceData* PolytopeConstants::find(const IndexTuple& j) const
{
    for (const auto& f : faces)
        if (f.face.j_tuple == j) return &f;
    return nullptr;
}

double group_separation(const Polytope& P, const IndexTuple& group)
{
    const int d = P.dim();
    const Index rows = static_cast<Index>(group.size()) + P.size();
    Mat A = Mat::Zero(rows, d + 1);
    Vec b(rows);
    Index r = 0;
    for (int i : group) {
        A.row(r).head(d) = P.normals().row(i);
        A(r, d) = -1.0;
        b(r++) = P.offset(i);
    }
    for (int i = 0; i < P.size(); ++i) {
        A.row(r).head(d) = -P.normals().row(i);
        b(r++) = -P.offset(i);
    }
    Vec c = Vec::Zero(d + 1);
    c(d) = -1.0;
    const LpResult res = maximize(c, A, b);
    if (res.status != LpStatus::optimal) fail(ErrorKind::domain, "separation LP failed");
    return -res.value;
}

PolytopeConstants analyze_polytope(const Polytope& P, double p, const JohnOptions& john)
{
    if (p < 1) fail(ErrorKind::argument, "p must be >= 1");
    const SimplicityReport simple = check_simple(P);
    if (!simple.simple) fail(ErrorKind::assumption, "polytope is not simple: " + simple.violations.front());

    PolytopeConstants C;
    C.dim = P.dim();
    C.p = p;
    const int d = P.dim();
    C.L_k1.assign(static_cast<size_t>(d) + 1, 1.0);
    C.L_k2.assign(static_cast<size_t>(d) + 1, 1.0);
    std::set<IndexTuple> face_set;
    for (Face& f : enumerate_all_faces(P)) {
        FaceData fd;
        fd.L = compute_L_constants(P, f);
        fd.volume = face_volume(P, f);
        if (f.dim() > 0) {
            fd.john = john_ellipsoid(P, f, john);
            fd.john_exit = f.local.slacks(f.to_local(fd.john.center)).minCoeff();
            fd.inradius = chebyshev_ball(f.local).radius;
        }
        C.L_k1[static_cast<size_t>(f.k)] = std::max(C.L_k1[static_cast<size_t>(f.k)], fd.L.L_k1);
        C.L_k2[static_cast<size_t>(f.k)] = std::max(C.L_k2[static_cast<size_t>(f.k)], fd.L.L_k2);
        face_set.insert(f.j_tuple);
        fd.face = std::move(f);
        C.faces.push_back(std::move(fd));
    }

    C.cap = u_cap(p);
    C.inner_theoretical = std::numeric_limits<double>::infinity();
    C.inner_empirical = std::numeric_limits<double>::infinity();
    for (const auto& fd : C.faces) {
        if (fd.face.k < 1 || fd.face.k > d - 1) continue;
        const double L2 = C.L_k2[static_cast<size_t>(fd.face.k)];
        C.inner_theoretical = std::min(C.inner_theoretical, fd.john_exit / L2);
        C.inner_empirical = std::min(C.inner_empirical, fd.inradius / L2);
    }

    C.separation = std::numeric_limits<double>::infinity();
    for (int size = 2; size <= std::min(P.size(), d + 1); ++size) {
        for_each_combination(P.size(), size, [&](const std::vector<int>& g) {
            if (face_set.count(g)) return;
            C.separation = std::min(C.separation, group_separation(P, g));
        });
    }
    if (!(C.separation > kGeomTol)) fail(ErrorKind::assumption, "non-face facet group touches the polytope");

    C.u_theoretical = std::min(C.cap, C.inner_theoretical);
    C.u_empirical = std::min({0.25, C.inner_empirical, C.separation});
    return C;
}

double compute_u(const Polytope& P, double p, UMode mode) { return analyze_polytope(P, p).u(mode); }

double DeltaSchedule::a(int i) const { return std::exp(log_a.at(static_cast<size_t>(i) - 1)); }
double DeltaSchedule::zeta(int i) const { return std::exp(log_zeta.at(static_cast<size_t>(i) - 1)); }

int DeltaSchedule::band(double s) const
{
    if (!(s < u)) return -1;
    // delta_0 = 0 <= s; find the last i in 0..A with delta_i <= s.
    const auto it = std::upper_bound(delta.begin(), delta.begin() + A + 1, s);
    return static_cast<int>(it - delta.begin()) - 1;
}

DeltaSchedule build_schedule_log(double log_eps, double p, double log_u, int k, UMode mode)
{
    if (!(log_eps < 0)) fail(ErrorKind::argument, "eps must lie in (0, 1)");
    if (!(p >= 1)) fail(ErrorKind::argument, "p must be >= 1");
    if (!(log_u < 0)) fail(ErrorKind::argument, "u must lie in (0, 1)");
    if (k < 1) fail(ErrorKind::argument, "k must be >= 1");

    DeltaSchedule s;
    s.log_eps = log_eps;
    s.eps = std::exp(log_eps);
    s.p = p;
    s.log_u = log_u;
    s.u = std::exp(log_u);
    s.k = k;
    s.mode = mode;
    const double ratio = (p + 1) / (p + 2);

    s.log_delta.push_back(-std::numeric_limits<double>::infinity());
    for (int i = 1;; ++i) {
        const double ld = p * std::pow(ratio, i - 1) * log_eps;
        if (!(ld < log_u)) break;
        s.log_delta.push_back(ld);
    }
    s.A = static_cast<int>(s.log_delta.size()) - 1;
    s.log_delta.push_back(log_u);
    s.log_delta.push_back(std::numeric_limits<double>::infinity());
    for (double ld : s.log_delta) s.delta.push_back(std::exp(ld));

    for (int i = 1; i <= s.A; ++i) {
        const double ld = s.log_delta[static_cast<size_t>(i)];
        const double la = log_eps / k - ld / (p + 1);
        s.log_a.push_back(la);
        s.log_zeta.push_back(0.5 * (log_eps / k + s.log_delta[static_cast<size_t>(i) + 1] - ld - la));
    }
    return s;
}

DeltaSchedule build_schedule(double eps, double p, double u, int k, UMode mode)
{
    if (!(eps > 0 && eps < 1)) fail(ErrorKind::argument, "eps must lie in (0, 1)");
    if (!(u > 0)) fail(ErrorKind::argument, "u must be positive");
    return build_schedule_log(std::log(eps), p, std::log(u), k, mode);
}

namespace {

double log_sum_exp(const std::vector<double>& xs)
{
    if (xs.empty()) return -std::numeric_limits<double>::infinity();
    const double m = *std::max_element(xs.begin(), xs.end());
    double s = 0.0;
    for (double x : xs) s += std::exp(x - m);
    return m + std::log(s);
}

}  // namespace

InequalityCheck zetasum_check(const DeltaSchedule& s, double gamma)
{
    std::vector<double> terms;
    for (double lz : s.log_zeta) terms.push_back(gamma * lz);
    InequalityCheck c;
    c.log_lhs = log_sum_exp(terms);
    c.log_rhs = std::log(2.0) + gamma * s.log_u / (2 * (s.p + 1) * (s.p + 1));
    c.lhs = std::exp(c.log_lhs);
    c.rhs = std::exp(c.log_rhs);
    c.ok = c.lhs <= c.rhs + 1e-12 || c.log_lhs <= c.log_rhs;
    return c;
}

double A_u(const DeltaSchedule& s)
{
    double sum = 1.0;
    for (double lz : s.log_zeta) sum += std::exp(2 * lz);
    return sum;
}

InequalityCheck au_check(const DeltaSchedule& s)
{
    InequalityCheck c;
    c.lhs = A_u(s);
    c.rhs = 1.0 + 2.0 * std::exp(s.log_u / ((s.p + 1) * (s.p + 1)));
    c.log_lhs = std::log(c.lhs);
    c.log_rhs = std::log(c.rhs);
    c.ok = c.lhs <= c.rhs + 1e-12;
    return c;
}

}  // namespace bracketing
