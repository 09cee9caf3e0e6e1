#include "bracketing/sampler.hpp"

#include <cmath>

#include "bracketing/error.hpp"
#include "bracketing/faces.hpp"

namespace bracketing {

namespace {

constexpr std::uint64_t kPolytopeStream = 0x5eed0001;

Vec gaussian(CounterRng& rng, Index d, double scale)
{
    Vec g(d);
    for (Index a = 0; a < d; ++a) g(a) = scale * rng.normal();
    return g;
}

// Intercepts placing each piece's maximum over D uniformly in [-B, B]; accepts when min f >= -B.
std::optional<ConvexFn> calibrate(const Mat& g, const Polytope& D, double B, CounterRng& rng)
{
    Vec c(g.rows());
    for (Index j = 0; j < g.rows(); ++j) c(j) = B - support(D.system(), Vec(g.row(j).transpose())) - rng.uniform(0, 2 * B);
    ConvexFn f(g, c, B);
    if (f.min_over(D) < -B) return std::nullopt;
    return f;
}

Mat axes_or_identity(const SamplerConfig& cfg, Index d) { return cfg.axes.size() ? cfg.axes : Mat::Identity(d, d); }

}  // namespace

void SamplerConfig::validate(int d) const
{
    if (n_pieces < 1) fail(ErrorKind::argument, "n_pieces must be >= 1");
    if (!(slope_scale > 0) || !std::isfinite(slope_scale)) fail(ErrorKind::argument, "slope_scale must be positive");
    if (!(B > 0) || !std::isfinite(B)) fail(ErrorKind::argument, "B must be positive");
    if (gamma) {
        if (gamma->size() != d) fail(ErrorKind::argument, "gamma has the wrong dimension");
        if (!gamma->allFinite() || (gamma->array() < 0).any())
            fail(ErrorKind::argument, "gamma must be finite and nonnegative");
    }
    if (axes.size()) {
        if (axes.rows() != d || axes.cols() != d) fail(ErrorKind::argument, "axes must be d x d");
        if (!(axes.transpose() * axes).isIdentity(1e-9)) fail(ErrorKind::argument, "axes must be orthonormal");
    }
}

ConvexFn sample_convex_fn(const SamplerConfig& cfg, const Polytope& D, std::uint64_t index)
{
    cfg.validate(D.dim());
    CounterRng rng(cfg.seed, index);
    for (int attempt = 0; attempt < kSamplingRetries; ++attempt) {
        Mat g(cfg.n_pieces, D.dim());
        for (int j = 0; j < cfg.n_pieces; ++j) g.row(j) = gaussian(rng, D.dim(), cfg.slope_scale).transpose();
        if (auto f = calibrate(g, D, cfg.B, rng)) return *f;
    }
    fail(ErrorKind::sampling, "no convex function within [-B, B] after " + std::to_string(kSamplingRetries) + " draws");
}

ConvexFn sample_lipschitz_convex(const SamplerConfig& cfg, const Polytope& D, std::uint64_t index)
{
    if (!cfg.gamma) fail(ErrorKind::argument, "Lipschitz sampling needs gamma");
    cfg.validate(D.dim());
    const Index d = D.dim();
    const Mat V = axes_or_identity(cfg, d);
    const Vec& gamma = *cfg.gamma;
    CounterRng rng(cfg.seed, index);
    for (int attempt = 0; attempt < kSamplingRetries; ++attempt) {
        Mat g(cfg.n_pieces, d);
        for (int j = 0; j < cfg.n_pieces; ++j) {
            bool accepted = false;
            for (int t = 0; t < kSamplingRetries && !accepted; ++t) {
                Vec s = gaussian(rng, d, cfg.slope_scale);
                for (Index a = 0; a < d; ++a)
                    if (gamma(a) == 0.0) s -= s.dot(V.col(a)) * V.col(a);
                accepted = true;
                for (Index a = 0; a < d && accepted; ++a)
                    accepted = gamma(a) == 0.0 ? std::abs(s.dot(V.col(a))) <= 1e-15 : std::abs(s.dot(V.col(a))) <= gamma(a);
                if (accepted) g.row(j) = s.transpose();
            }
            if (!accepted) fail(ErrorKind::sampling, "slope rejection budget exhausted");
        }
        if (auto f = calibrate(g, D, cfg.B, rng)) return *f;
    }
    fail(ErrorKind::sampling, "no Lipschitz convex function within [-B, B] after " +
                                  std::to_string(kSamplingRetries) + " draws");
}

namespace {

bool irredundant(const Polytope& P)
{
    for (int j = 0; j < P.size(); ++j)
        if (!make_face(P, {j})) return false;
    return true;
}

}  // namespace

Polytope perturb_to_simple(const Polytope& P, CounterRng& rng, double jitter, int tries)
{
    if (check_simple(P).simple) return P;
    for (int t = 0; t < tries; ++t) {
        Vec offsets = P.offsets();
        for (Index i = 0; i < offsets.size(); ++i) offsets(i) += rng.uniform(-jitter, jitter);
        try {
            Polytope Q(P.normals(), offsets);
            if (irredundant(Q) && check_simple(Q).simple) return Q;
        } catch (const Error&) {
        }
    }
    fail(ErrorKind::sampling, "offset jitter did not produce a simple polytope");
}

Polytope sample_simple_polytope(std::uint64_t seed, int d, int n_facets)
{
    if (d < 2 || d > 3) fail(ErrorKind::argument, "simple polytope sampling supports d = 2, 3");
    if (n_facets < d + 1) fail(ErrorKind::argument, "need at least d + 1 facets");
    CounterRng rng(seed, kPolytopeStream);
    for (int attempt = 0; attempt < kSamplingRetries; ++attempt) {
        Mat N(n_facets, d);
        Vec p(n_facets);
        for (int i = 0; i < n_facets; ++i) {
            Vec n = gaussian(rng, d, 1.0);
            N.row(i) = n.normalized().transpose();
            p(i) = -1.0 - 2e-3 - rng.uniform(0.0, 0.5);
        }
        try {
            Polytope P(N, p);
            if (!irredundant(P)) continue;
            return perturb_to_simple(P, rng);
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::boundedness && e.kind() != ErrorKind::sampling) throw;
        }
    }
    fail(ErrorKind::sampling, "no bounded irredundant simple polytope after " + std::to_string(kSamplingRetries) +
                                  " draws");
}

Polytope fit_to_unit_box(const Polytope& P)
{
    const int d = P.dim();
    Vec lo(d);
    double span = 0.0;
    for (int a = 0; a < d; ++a) {
        const Interval& iv = P.bounding_box()[static_cast<size_t>(a)];
        lo(a) = iv.lo;
        span = std::max(span, iv.length());
    }
    const double s = 1.0 / span;
    return P.transformed(s * Mat::Identity(d, d), -s * lo);
}

double finite_difference_slope(const ConvexFn& f, const Polytope& D, const Vec& e, CounterRng& rng, int chords,
                               double step)
{
    const int d = D.dim();
    double worst = 0.0;
    for (int t = 0; t < chords; ++t) {
        Vec x(d);
        do {
            for (int a = 0; a < d; ++a) {
                const Interval& iv = D.bounding_box()[static_cast<size_t>(a)];
                x(a) = rng.uniform(iv.lo, iv.hi);
            }
        } while (!D.contains(x, 0.0));
        const Vec y = x + step * e;
        if (!D.contains(y, 0.0)) continue;
        worst = std::max(worst, std::abs(f.raw(y) - f.raw(x)) / step);
    }
    return worst;
}

nlohmann::json sampler_manifest(const SamplerConfig& cfg, std::uint64_t count)
{
    nlohmann::json j{{"seed", cfg.seed},
                     {"n_pieces", cfg.n_pieces},
                     {"slope_scale", cfg.slope_scale},
                     {"B", cfg.B},
                     {"count", count},
                     {"rng", "counter-based SplitMix64 finalizer keyed by (seed, function index); Box-Muller normals"}};
    if (cfg.gamma) j["gamma"] = std::vector<double>(cfg.gamma->data(), cfg.gamma->data() + cfg.gamma->size());
    return j;
}

}  // namespace bracketing
