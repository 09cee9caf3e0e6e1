#pragma once

#include <vector>

namespace bracketing {

// Calls fn(const std::vector<int>&) for every strictly increasing k-subset of {0..n-1}, in
// lexicographic order. fn may return false to stop early.
template <class Fn>
void for_each_combination(int n, int k, Fn&& fn)
{
    if (k < 0 || k > n) return;
    std::vector<int> idx(static_cast<size_t>(k));
    for (int i = 0; i < k; ++i) idx[static_cast<size_t>(i)] = i;
    for (;;) {
        if constexpr (std::is_same_v<decltype(fn(idx)), bool>) {
            if (!fn(idx)) return;
        } else {
            fn(idx);
        }
        int i = k - 1;
        while (i >= 0 && idx[static_cast<size_t>(i)] == n - k + i) --i;
        if (i < 0) return;
        ++idx[static_cast<size_t>(i)];
        for (int j = i + 1; j < k; ++j) idx[static_cast<size_t>(j)] = idx[static_cast<size_t>(j - 1)] + 1;
    }
}

inline double factorial(int n)
{
    double f = 1.0;
    for (int i = 2; i <= n; ++i) f *= i;
    return f;
}

}  // namespace bracketing
