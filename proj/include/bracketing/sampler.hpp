#pragma once

#include <cstdint>
#include <optional>

#include <json.hpp>

#include "bracketing/convex_fn.hpp"
#include "bracketing/rng.hpp"

namespace bracketing {

struct SamplerConfig {
    std::uint64_t seed = 0;
    int n_pieces = 5;
    double slope_scale = 1.0;
    double B = 1.0;
    // Lipschitz bounds along the columns of `axes` (orthonormal; identity when empty).
    std::optional<Vec> gamma;
    Mat axes;

    void validate(int d) const;
};

inline constexpr int kSamplingRetries = 100;

// Function `index` of the stream: slopes N(0, slope_scale^2 I), each piece's maximum over D placed
// uniformly in [-B, B], redrawn until the minimum over D is >= -B. Depends only on (seed, index).
ConvexFn sample_convex_fn(const SamplerConfig& cfg, const Polytope& D, std::uint64_t index);

// As above with every slope rejection-filtered to |<g, v_i>| <= Gamma_i; directions with Gamma_i = 0
// are projected out instead.
ConvexFn sample_lipschitz_convex(const SamplerConfig& cfg, const Polytope& D, std::uint64_t index);

// Random unit normals with offsets in [-1.502, -1.002], so the unit ball stays inside after jitter; draws with
// redundant facets are discarded and non-simple draws jittered.
Polytope sample_simple_polytope(std::uint64_t seed, int d, int n_facets);

// Offset jitter of size `jitter` until the polytope is simple; sampling-error after `tries`.
Polytope perturb_to_simple(const Polytope& P, CounterRng& rng, double jitter = 1e-3, int tries = 20);

// Uniform scaling and translation of P into [0, 1]^d, touching 0 along every axis.
Polytope fit_to_unit_box(const Polytope& P);

// Largest finite-difference slope of f along e over random chords in D.
double finite_difference_slope(const ConvexFn& f, const Polytope& D, const Vec& e, CounterRng& rng, int chords,
                               double step = 1e-3);

nlohmann::json sampler_manifest(const SamplerConfig& cfg, std::uint64_t count);

}  // namespace bracketing
