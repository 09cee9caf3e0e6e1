#include "bracketing/lp.hpp"

#include <cmath>
#include <limits>

namespace bracketing {

namespace {

constexpr double kPivotTol = 1e-11;
constexpr double kCostTol = 1e-10;

class Tableau {
public:
    Tableau(Index rows, Index cols) : t_(Mat::Zero(rows + 1, cols + 1)), basis_(rows, -1), live_(rows, true) {}

    double& at(Index r, Index c) { return t_(r, c); }
    double rhs(Index r) const { return t_(r, t_.cols() - 1); }
    Index rows() const { return t_.rows() - 1; }
    Index cols() const { return t_.cols() - 1; }
    Index obj() const { return t_.rows() - 1; }

    std::vector<Index>& basis() { return basis_; }
    std::vector<bool>& live() { return live_; }

    void pivot(Index r, Index c)
    {
        t_.row(r) /= t_(r, c);
        for (Index i = 0; i < t_.rows(); ++i) {
            if (i == r) continue;
            const double f = t_(i, c);
            if (f != 0.0) t_.row(i) -= f * t_.row(r);
        }
        basis_[static_cast<size_t>(r)] = c;
    }

    // Loads reduced costs for objective coefficients `cost` given the current basis.
    void set_objective(const Vec& cost)
    {
        const Index o = obj();
        t_.row(o).setZero();
        t_.row(o).head(cols()) = cost.transpose();
        for (Index i = 0; i < rows(); ++i) {
            if (!live_[static_cast<size_t>(i)]) continue;
            const double cb = cost(basis_[static_cast<size_t>(i)]);
            if (cb != 0.0) t_.row(o) -= cb * t_.row(i);
        }
    }

    double objective_value() const { return -t_(obj(), t_.cols() - 1); }

    // Returns false when the problem is unbounded along an entering column.
    bool run(Index allowed_cols)
    {
        for (;;) {
            Index enter = -1;
            for (Index j = 0; j < allowed_cols; ++j) {
                if (t_(obj(), j) > kCostTol) {
                    enter = j;
                    break;
                }
            }
            if (enter < 0) return true;
            Index leave = -1;
            double best = std::numeric_limits<double>::infinity();
            for (Index i = 0; i < rows(); ++i) {
                if (!live_[static_cast<size_t>(i)]) continue;
                const double a = t_(i, enter);
                if (a <= kPivotTol) continue;
                const double ratio = rhs(i) / a;
                if (ratio < best - 1e-14 ||
                    (std::abs(ratio - best) <= 1e-14 && leave >= 0 &&
                     basis_[static_cast<size_t>(i)] < basis_[static_cast<size_t>(leave)])) {
                    best = ratio;
                    leave = i;
                }
            }
            if (leave < 0) return false;
            pivot(leave, enter);
        }
    }

private:
    Mat t_;
    std::vector<Index> basis_;
    std::vector<bool> live_;
};

}  // namespace

LpResult maximize(const Vec& c, const Mat& A, const Vec& b)
{
    const Index m = A.rows();
    const Index n = A.cols();
    LpResult result;

    Index n_art = 0;
    for (Index i = 0; i < m; ++i)
        if (b(i) < 0) ++n_art;

    const Index struct_cols = 2 * n + m;
    Tableau tab(m, struct_cols + n_art);
    Index art = struct_cols;
    for (Index i = 0; i < m; ++i) {
        const double sign = b(i) < 0 ? -1.0 : 1.0;
        for (Index j = 0; j < n; ++j) {
            tab.at(i, j) = sign * A(i, j);
            tab.at(i, n + j) = -sign * A(i, j);
        }
        tab.at(i, 2 * n + i) = sign;
        tab.at(i, struct_cols + n_art) = sign * b(i);
        if (b(i) < 0) {
            tab.at(i, art) = 1.0;
            tab.basis()[static_cast<size_t>(i)] = art++;
        } else {
            tab.basis()[static_cast<size_t>(i)] = 2 * n + i;
        }
    }

    if (n_art > 0) {
        Vec phase1 = Vec::Zero(struct_cols + n_art);
        phase1.tail(n_art).setConstant(-1.0);
        tab.set_objective(phase1);
        tab.run(struct_cols + n_art);
        const double scale = std::max(1.0, b.cwiseAbs().maxCoeff());
        if (tab.objective_value() < -1e-9 * scale) return result;
        // Drive remaining artificials out of the basis or retire their rows.
        for (Index i = 0; i < m; ++i) {
            if (tab.basis()[static_cast<size_t>(i)] < struct_cols) continue;
            Index col = -1;
            for (Index j = 0; j < struct_cols; ++j) {
                if (std::abs(tab.at(i, j)) > 1e-9) {
                    col = j;
                    break;
                }
            }
            if (col >= 0)
                tab.pivot(i, col);
            else
                tab.live()[static_cast<size_t>(i)] = false;
        }
    }

    Vec cost = Vec::Zero(struct_cols + n_art);
    cost.head(n) = c;
    cost.segment(n, n) = -c;
    tab.set_objective(cost);
    if (!tab.run(struct_cols)) {
        result.status = LpStatus::unbounded;
        return result;
    }

    Vec z = Vec::Zero(struct_cols + n_art);
    for (Index i = 0; i < m; ++i)
        if (tab.live()[static_cast<size_t>(i)]) z(tab.basis()[static_cast<size_t>(i)]) = tab.rhs(i);
    result.status = LpStatus::optimal;
    result.x = z.head(n) - z.segment(n, n);
    result.value = c.dot(result.x);
    return result;
}

}  // namespace bracketing
