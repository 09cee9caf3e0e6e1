#include "bracketing/chain_count.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "bracketing/error.hpp"

namespace bracketing {

namespace {

// table[n * (H + 1) + h]: chains of n steps and total drop h (strictly increasing negative slopes).
using Table = std::vector<double>;

Table descending_chains(int W, int H, double s, bool superset)
{
    const size_t stride = static_cast<size_t>(H) + 1;
    Table L(static_cast<size_t>(W + 1) * stride, 0.0);
    L[0] = 1.0;
    for (int b = 1; b <= W; ++b) {
        const int a_max = static_cast<int>(std::ceil(s * b + 1.0)) - 1;
        for (int a = 1; a <= std::min(a_max, H); ++a) {
            if (std::gcd(a, b) != 1) continue;
            const double excess = a - s * b;  // multiplicity m allowed iff m * excess < 1 (superset) or excess <= 0
            int m_max;
            if (excess <= 1e-12) {
                m_max = W;
            } else {
                if (!superset) continue;
                m_max = static_cast<int>(std::ceil(1.0 / excess)) - 1;
                if (m_max < 1) continue;
            }
            if (m_max >= W / b) {
                // Unbounded multiplicity: in-place forward update.
                for (int n = b; n <= W; ++n) {
                    const double* src = &L[static_cast<size_t>(n - b) * stride];
                    double* dst = &L[static_cast<size_t>(n) * stride];
                    const int h_hi = std::min(H, static_cast<int>(std::ceil(s * n)) + n);
                    for (int h = a; h <= h_hi; ++h) dst[h] += src[h - a];
                }
            } else {
                const Table old = L;
                for (int n = b; n <= W; ++n)
                    for (int h = a; h <= H; ++h) {
                        double add = 0.0;
                        for (int m = 1; m <= m_max && m * b <= n && m * a <= h; ++m)
                            add += old[static_cast<size_t>(n - m * b) * stride + static_cast<size_t>(h - m * a)];
                        L[static_cast<size_t>(n) * stride + static_cast<size_t>(h)] += add;
                    }
            }
        }
    }
    return L;
}

// Sum over (descending part, optional flat run, ascending part) of max(0, levels - max(h1, h2)).
double combine(const Table& L, int W, int H, long levels)
{
    const size_t stride = static_cast<size_t>(H) + 1;
    // P[n][h]: descending chain followed by a flat run, n steps in total.
    Table P(L.size(), 0.0);
    for (int n = 0; n <= W; ++n)
        for (int h = 0; h <= H; ++h) {
            double v = 0.0;
            for (int m = 0; m <= n; ++m) v += L[static_cast<size_t>(n - m) * stride + static_cast<size_t>(h)];
            P[static_cast<size_t>(n) * stride + static_cast<size_t>(h)] = v;
        }
    double total = 0.0;
    for (int n = 0; n <= W; ++n) {
        const double* left = &P[static_cast<size_t>(n) * stride];
        const double* right = &L[static_cast<size_t>(W - n) * stride];
        double cum_left = 0.0, cum_right = 0.0;
        for (int h = 0; h <= H; ++h) {
            // Pairs with max(h1, h2) = h.
            const double pairs = left[h] * (cum_right + right[h]) + right[h] * cum_left;
            cum_left += left[h];
            cum_right += right[h];
            const double place = static_cast<double>(levels - h);
            if (place > 0) total += pairs * place;
        }
    }
    return total;
}

}  // namespace

ChainCount count_floor_profiles(int W, double s, long levels)
{
    if (W < 0 || !(s >= 0) || levels < 1) fail(ErrorKind::argument, "invalid chain-count parameters");
    const int H = static_cast<int>(std::min<double>(static_cast<double>(levels), std::ceil(s * W) + W));
    ChainCount out;
    const double sup = combine(descending_chains(W, H, s, true), W, H, levels);
    const double sub = combine(descending_chains(W, H, s, false), W, H, levels - 1);
    out.finite = std::isfinite(sup) && std::isfinite(sub);
    out.log_superset = std::log(sup);
    out.log_subset = sub > 0 ? std::log(sub) : -INFINITY;
    return out;
}

double log_count_monotone_difference(int W, long levels)
{
    if (W < 0 || levels < 1) fail(ErrorKind::argument, "invalid chain-count parameters");
    const int H = static_cast<int>(levels);
    const size_t stride = static_cast<size_t>(H) + 1;
    // Descending parts are multisets of positive unit-step drops: partitions of h into exactly n parts.
    Table L(static_cast<size_t>(W + 1) * stride, 0.0);
    L[0] = 1.0;
    for (int n = 1; n <= W; ++n)
        for (int h = n; h <= H; ++h)
            L[static_cast<size_t>(n) * stride + static_cast<size_t>(h)] =
                L[static_cast<size_t>(n - 1) * stride + static_cast<size_t>(h - 1)] +
                L[static_cast<size_t>(n) * stride + static_cast<size_t>(h - n)];
    return std::log(combine(L, W, H, levels));
}

}  // namespace bracketing
