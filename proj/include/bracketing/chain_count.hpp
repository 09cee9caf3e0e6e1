#pragma once

namespace bracketing {

// Floor profiles y_i = floor(x_i), i = 0..W, of convex sequences x with |x_{i+1} - x_i| <= s and
// x in [lo, hi] are in bijection with convex lattice chains C (y = ceil(C) - 1, C the lower hull
// of y + 1). Segments of b steps and integer rise a satisfy |a| < s b + 1 for every profile and
// |a| <= s b suffices for realizability, so the two chain counts sandwich the profile count.
struct ChainCount {
    double log_superset = 0.0;  // vertex levels in [floor(lo)+1, floor(hi)+1]
    double log_subset = 0.0;    // slope |a| <= s b, vertex levels in [floor(lo)+1, floor(hi)]
    bool finite = true;         // false when a count overflowed double range
};

// levels = floor(hi) - floor(lo) + 1, the number of attainable profile values.
ChainCount count_floor_profiles(int W, double s, long levels);

// Integer sequences of W steps with nondecreasing differences and values in `levels` consecutive
// integers; no slope bound.
double log_count_monotone_difference(int W, long levels);

}  // namespace bracketing
