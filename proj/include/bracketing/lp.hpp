#pragma once

#include "bracketing/types.hpp"

namespace bracketing {

enum class LpStatus { optimal, infeasible, unbounded };

struct LpResult {
    LpStatus status = LpStatus::infeasible;
    Vec x;
    double value = 0.0;
};

// maximize <c, x> subject to A x <= b with x free.
// Dense two-phase tableau simplex with Bland's rule; sized for a few dozen rows.
LpResult maximize(const Vec& c, const Mat& A, const Vec& b);

}  // namespace bracketing
