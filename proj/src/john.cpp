#include "bracketing/john.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "bracketing/error.hpp"

namespace bracketing {

double Ellipsoid::gauge(const Vec& x) const
{
    const Vec local = axes.transpose() * (x - center);
    return local.cwiseQuotient(radii).norm();
}

double Ellipsoid::log_volume_ratio() const { return radii.array().log().sum(); }

namespace {

// Log-barrier Newton method over (E symmetric, c) for
//   maximize log det E  s.t.  <a_i, c> - |E a_i| >= b_i.
class JohnSolver {
public:
    JohnSolver(const HalfspaceSystem& S, const JohnOptions& opt) : S_(S), opt_(opt), m_(static_cast<int>(S.dim()))
    {
        for (int i = 0; i < m_; ++i)
            for (int j = i; j < m_; ++j) sym_.push_back({i, j});
        ne_ = static_cast<int>(sym_.size());
        np_ = ne_ + m_;
    }

    std::pair<Mat, Vec> solve()
    {
        const ChebyshevBall ball = chebyshev_ball(S_);
        if (!(ball.radius > 0)) fail(ErrorKind::domain, "John ellipsoid of an empty or flat set");
        Vec theta = pack(0.5 * ball.radius * Mat::Identity(m_, m_), ball.center);
        const double n_con = static_cast<double>(S_.size());
        double t = 1.0;
        double prev = std::numeric_limits<double>::quiet_NaN();
        for (int outer = 0; outer < opt_.max_outer; ++outer) {
            center(theta, t);
            const double obj = log_det(theta);
            const bool settled = std::isfinite(prev) && std::abs(obj - prev) <= opt_.rel_tol * std::max(1.0, std::abs(obj));
            if (settled && n_con / t <= 1e-3 * opt_.rel_tol * std::max(1.0, std::abs(obj))) break;
            prev = obj;
            t *= 10.0;
        }
        return unpack(theta);
    }

private:
    Vec pack(const Mat& E, const Vec& c) const
    {
        Vec th(np_);
        for (int k = 0; k < ne_; ++k) th(k) = E(sym_[static_cast<size_t>(k)].first, sym_[static_cast<size_t>(k)].second);
        th.tail(m_) = c;
        return th;
    }

    std::pair<Mat, Vec> unpack(const Vec& th) const
    {
        Mat E(m_, m_);
        for (int k = 0; k < ne_; ++k) {
            const auto [i, j] = sym_[static_cast<size_t>(k)];
            E(i, j) = E(j, i) = th(k);
        }
        return {E, th.tail(m_)};
    }

    double log_det(const Vec& th) const
    {
        const auto [E, c] = unpack(th);
        Eigen::LLT<Mat> llt(E);
        return 2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
    }

    // Barrier value; +inf outside the domain.
    double value(const Vec& th, double t) const
    {
        const auto [E, c] = unpack(th);
        Eigen::LLT<Mat> llt(E);
        if (llt.info() != Eigen::Success) return std::numeric_limits<double>::infinity();
        const Vec diag = llt.matrixL().toDenseMatrix().diagonal();
        if (diag.minCoeff() <= 0) return std::numeric_limits<double>::infinity();
        double f = -t * 2.0 * diag.array().log().sum();
        for (Index i = 0; i < S_.size(); ++i) {
            const Vec a = S_.normals.row(i).transpose();
            const double s = a.dot(c) - S_.offsets(i) - (E * a).norm();
            if (!(s > 0)) return std::numeric_limits<double>::infinity();
            f -= std::log(s);
        }
        return f;
    }

    void derivatives(const Vec& th, double t, Vec& g, Mat& H) const
    {
        const auto [E, c] = unpack(th);
        const Mat Einv = E.inverse();
        g = Vec::Zero(np_);
        H = Mat::Zero(np_, np_);
        std::vector<Mat> W(static_cast<size_t>(ne_));
        for (int k = 0; k < ne_; ++k) W[static_cast<size_t>(k)] = Einv * basis(k);
        for (int k = 0; k < ne_; ++k) {
            g(k) = -t * W[static_cast<size_t>(k)].trace();
            for (int l = 0; l < ne_; ++l)
                H(k, l) = t * (W[static_cast<size_t>(k)] * W[static_cast<size_t>(l)]).trace();
        }
        Vec ds(np_);
        Mat d2s(np_, np_);
        Mat U(m_, ne_);
        for (Index i = 0; i < S_.size(); ++i) {
            const Vec a = S_.normals.row(i).transpose();
            const Vec w = E * a;
            const double n = w.norm();
            const double s = a.dot(c) - S_.offsets(i) - n;
            for (int k = 0; k < ne_; ++k) U.col(k) = basis(k) * a;
            const Vec wu = U.transpose() * w;
            ds.setZero();
            ds.head(ne_) = -wu / n;
            ds.tail(m_) = a;
            d2s.setZero();
            d2s.topLeftCorner(ne_, ne_) = -((U.transpose() * U) / n - (wu * wu.transpose()) / (n * n * n));
            g -= ds / s;
            H += (ds * ds.transpose()) / (s * s) - d2s / s;
        }
    }

    Mat basis(int k) const
    {
        Mat B = Mat::Zero(m_, m_);
        const auto [i, j] = sym_[static_cast<size_t>(k)];
        B(i, j) = 1.0;
        B(j, i) = 1.0;
        return B;
    }

    void center(Vec& th, double t) const
    {
        Vec g;
        Mat H;
        for (int it = 0; it < opt_.max_newton; ++it) {
            derivatives(th, t, g, H);
            const Vec step = H.ldlt().solve(-g);
            const double dec = -g.dot(step);
            if (!(dec > 1e-14)) return;
            const double f0 = value(th, t);
            double tau = 1.0;
            bool moved = false;
            for (int ls = 0; ls < 80; ++ls) {
                const Vec cand = th + tau * step;
                const double f = value(cand, t);
                if (f <= f0 - 0.25 * tau * dec) {
                    th = cand;
                    moved = true;
                    break;
                }
                tau *= 0.5;
            }
            if (!moved || dec < 1e-12) return;
        }
    }

    const HalfspaceSystem& S_;
    JohnOptions opt_;
    int m_;
    int ne_ = 0;
    int np_ = 0;
    std::vector<std::pair<int, int>> sym_;
};

bool lex_greater(const Vec& a, const Vec& b)
{
    for (Index i = 0; i < a.size(); ++i) {
        if (a(i) > b(i) + 1e-12) return true;
        if (a(i) < b(i) - 1e-12) return false;
    }
    return false;
}

// Eigen-decomposition of the local shape, with axes mapped through `frame` (d x m) into ambient
// coordinates. Repeated radii get axes fixed from the ambient coordinate directions.
Ellipsoid make_ellipsoid(const Mat& E, const Vec& center_ambient, const Mat& frame)
{
    Eigen::SelfAdjointEigenSolver<Mat> eig(E);
    const int m = static_cast<int>(E.rows());
    std::vector<int> order(static_cast<size_t>(m));
    std::iota(order.begin(), order.end(), 0);
    const Vec& ev = eig.eigenvalues();
    std::sort(order.begin(), order.end(), [&](int a, int b) { return ev(a) > ev(b); });

    Ellipsoid out;
    out.center = center_ambient;
    out.radii.resize(m);
    out.axes.resize(frame.rows(), m);
    const Mat ambient = frame * eig.eigenvectors();
    int start = 0;
    while (start < m) {
        int stop = start + 1;
        const double r0 = ev(order[static_cast<size_t>(start)]);
        while (stop < m && std::abs(ev(order[static_cast<size_t>(stop)]) - r0) <= 1e-6 * r0) ++stop;
        std::vector<Vec> cluster;
        for (int s = start; s < stop; ++s) cluster.push_back(ambient.col(order[static_cast<size_t>(s)]));
        if (cluster.size() > 1) {
            Mat C(frame.rows(), static_cast<Index>(cluster.size()));
            for (size_t s = 0; s < cluster.size(); ++s) C.col(static_cast<Index>(s)) = cluster[s];
            std::vector<Vec> fixed;
            for (Index e = 0; e < frame.rows() && fixed.size() < cluster.size(); ++e) {
                Vec v = C * (C.transpose() * Vec::Unit(frame.rows(), e));
                for (const auto& f : fixed) v -= f.dot(v) * f;
                if (v.norm() > 1e-6) fixed.push_back(v.normalized());
            }
            cluster = fixed;
        }
        for (auto& v : cluster) canonical_sign(v);
        std::sort(cluster.begin(), cluster.end(), lex_greater);
        for (int s = start; s < stop; ++s) {
            out.radii(s) = ev(order[static_cast<size_t>(s)]);
            out.axes.col(s) = cluster[static_cast<size_t>(s - start)];
        }
        start = stop;
    }
    return out;
}

}  // namespace

Ellipsoid john_ellipsoid(const HalfspaceSystem& S, const JohnOptions& opt)
{
    if (S.dim() < 1) fail(ErrorKind::domain, "John ellipsoid of a point");
    const auto [E, c] = JohnSolver(S, opt).solve();
    return make_ellipsoid(E, c, Mat::Identity(S.dim(), S.dim()));
}

Ellipsoid john_ellipsoid(const Polytope& P, const JohnOptions& opt) { return john_ellipsoid(P.system(), opt); }

Ellipsoid john_ellipsoid(const Polytope&, const Face& face, const JohnOptions& opt)
{
    if (face.dim() < 1) fail(ErrorKind::domain, "John ellipsoid of a vertex");
    const auto [E, c] = JohnSolver(face.local, opt).solve();
    return make_ellipsoid(E, face.to_ambient(c), face.tangent_basis);
}

JohnCheck verify_john(const Polytope& P, const Face& face, const Ellipsoid& E, double factor, double tol)
{
    JohnCheck check;
    auto report = [&](const std::string& msg) {
        check.violations.push_back(msg);
        check.ok = false;
    };
    const Mat scaled_axes = E.axes * E.radii.asDiagonal();
    for (int i = 0; i < P.size(); ++i) {
        const Vec v = P.normal(i);
        const double low = v.dot(E.center) - (scaled_axes.transpose() * v).norm();
        const double viol = P.offset(i) - low;
        check.worst_inscribed = std::max(check.worst_inscribed, viol);
        if (viol > tol) {
            check.inscribed = false;
            std::ostringstream os;
            os << "ellipsoid crosses halfspace " << i << " by " << viol;
            report(os.str());
        }
    }
    for (int j : face.j_tuple) {
        const double off = std::abs(P.slack(j, E.center)) + (E.axes.transpose() * P.normal(j)).norm();
        if (off > tol) {
            check.inscribed = false;
            report("ellipsoid leaves the hyperplane of facet " + std::to_string(j));
        }
    }
    for (const Vec& y : face_vertices(P, face)) {
        const Vec rel = y - E.center;
        const double off_flat = (rel - E.axes * (E.axes.transpose() * rel)).norm();
        const double g = E.gauge(y);
        check.worst_gauge = std::max(check.worst_gauge, g);
        if (off_flat > tol || g > factor + tol) {
            check.covering = false;
            std::ostringstream os;
            os << "vertex at gauge " << g << " (off-flat " << off_flat << ") exceeds factor " << factor;
            report(os.str());
        }
    }
    return check;
}

JohnCheck verify_john(const Polytope& P, const Ellipsoid& E, double factor, double tol)
{
    Face whole;
    whole.k = 0;
    return verify_john(P, whole, E, factor, tol);
}

}  // namespace bracketing
