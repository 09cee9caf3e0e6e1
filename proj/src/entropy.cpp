#include "bracketing/entropy.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <exception>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <numeric>
#include <set>
#include <sstream>
#include <thread>

#include "bracketing/error.hpp"
#include "bracketing/polytope_io.hpp"

namespace bracketing {

namespace {

constexpr std::uint64_t kProbeStream = 0x9e3779b97f4a7c15ULL;
constexpr std::uint64_t kBootstrapStream = 0xb0075ULL;

// Runs fn(i) for i in [0, n) on `workers` threads with static chunks; rethrows the failure with
// the smallest index.
template <class Fn>
void parallel_for(std::size_t n, int workers, Fn&& fn)
{
    const std::size_t w = std::max<std::size_t>(1, std::min<std::size_t>(static_cast<std::size_t>(std::max(workers, 1)), n));
    std::vector<std::exception_ptr> errors(w);
    std::vector<std::size_t> failed_at(w, n);
    auto run = [&](std::size_t t) {
        const std::size_t lo = n * t / w, hi = n * (t + 1) / w;
        for (std::size_t i = lo; i < hi; ++i) {
            try {
                fn(i);
            } catch (...) {
                errors[t] = std::current_exception();
                failed_at[t] = i;
                return;
            }
        }
    };
    if (w == 1) {
        run(0);
    } else {
        std::vector<std::thread> threads;
        for (std::size_t t = 0; t < w; ++t) threads.emplace_back(run, t);
        for (auto& th : threads) th.join();
    }
    for (std::size_t t = 0; t < w; ++t)
        if (errors[t]) std::rethrow_exception(errors[t]);
}

// Per-axis node subsets of increasing density: level l keeps multiples of 2^(L_a - l) and the last node.
struct LevelPlan {
    std::vector<int> nodes;
    std::vector<int> top;  // L_a
    int levels = 1;

    explicit LevelPlan(const std::vector<int>& n) : nodes(n), top(n.size(), 0)
    {
        for (size_t a = 0; a < n.size(); ++a) {
            int L = 0;
            while (n[a] > 1 && (1L << L) < n[a] - 1) ++L;
            top[a] = L;
            levels = std::max(levels, L + 1);
        }
    }
    bool in_level(size_t a, int i, int level) const
    {
        if (level < 0) return false;
        const int shift = std::max(0, top[a] - level);
        return i % (1 << shift) == 0 || i == nodes[a] - 1;
    }
    // Nodes present at `level` but not before.
    std::vector<std::vector<int>> fresh(int level) const
    {
        std::vector<std::vector<int>> axis(nodes.size());
        for (size_t a = 0; a < nodes.size(); ++a)
            for (int i = 0; i < nodes[a]; ++i)
                if (in_level(a, i, level)) axis[a].push_back(i);
        std::vector<std::vector<int>> out;
        std::vector<size_t> pos(nodes.size(), 0);
        std::vector<int> idx(nodes.size());
        for (;;) {
            bool old = true;
            for (size_t a = 0; a < nodes.size(); ++a) {
                idx[a] = axis[a][pos[a]];
                old = old && in_level(a, idx[a], level - 1);
            }
            if (!old) out.push_back(idx);
            size_t a = 0;
            while (a < nodes.size() && ++pos[a] == axis[a].size()) pos[a++] = 0;
            if (a == nodes.size()) break;
        }
        return out;
    }
};

double quantile(std::vector<double> v, double q)
{
    std::sort(v.begin(), v.end());
    const double t = q * static_cast<double>(v.size() - 1);
    const auto i = static_cast<size_t>(std::floor(t));
    const size_t j = std::min(i + 1, v.size() - 1);
    return v[i] + (t - static_cast<double>(i)) * (v[j] - v[i]);
}

Error staged(const char* stage, const Error& e) { return Error(e.kind(), std::string(stage) + ": " + e.what()); }

}  // namespace

long count_cell_classes(const LipschitzFamily& fam, const std::vector<ConvexFn>& fns, std::vector<int>& class_of)
{
    std::vector<LipschitzFamily::Prepared> prepared;
    prepared.reserve(fns.size());
    for (const ConvexFn& f : fns) prepared.push_back(fam.prepare(f));
    const LevelPlan plan(fam.grid().nodes);

    std::vector<std::vector<int>> open{std::vector<int>(fns.size())};
    std::iota(open[0].begin(), open[0].end(), 0);
    std::vector<std::vector<int>> done;
    for (int level = 0; level < plan.levels && !open.empty(); ++level) {
        const auto nodes = plan.fresh(level);
        std::vector<std::vector<int>> next;
        for (auto& group : open) {
            if (group.size() < 2) {
                done.push_back(std::move(group));
                continue;
            }
            std::vector<std::pair<std::vector<std::int64_t>, int>> keyed;
            keyed.reserve(group.size());
            for (int f : group) {
                std::vector<std::int64_t> key;
                key.reserve(nodes.size());
                for (const auto& idx : nodes) key.push_back(fam.key_at(prepared[static_cast<size_t>(f)], idx));
                keyed.emplace_back(std::move(key), f);
            }
            std::sort(keyed.begin(), keyed.end());
            for (size_t a = 0; a < keyed.size();) {
                size_t b = a;
                std::vector<int> part;
                while (b < keyed.size() && keyed[b].first == keyed[a].first) part.push_back(keyed[b++].second);
                (part.size() < 2 ? done : next).push_back(std::move(part));
                a = b;
            }
        }
        open = std::move(next);
    }
    for (auto& g : open) done.push_back(std::move(g));
    // Class ids in order of each class's first function.
    for (auto& g : done) std::sort(g.begin(), g.end());
    std::sort(done.begin(), done.end(), [](const auto& x, const auto& y) { return x.front() < y.front(); });
    class_of.assign(fns.size(), -1);
    for (size_t c = 0; c < done.size(); ++c)
        for (int f : done[c]) class_of[static_cast<size_t>(f)] = static_cast<int>(c);
    return static_cast<long>(done.size());
}

EmpiricalCount empirical_count(const GlobalFamily& fam, const SamplerConfig& sampler, const CountOptions& opt)
{
    if (opt.n_samples < 1) fail(ErrorKind::argument, "need at least one sample");
    if (opt.batches < 1 || opt.batches > 64) fail(ErrorKind::argument, "batches must lie in [1, 64]");
    if (opt.probes_per_function < 0) fail(ErrorKind::argument, "probe count must be nonnegative");
    const Partition& part = *fam.partition;
    const Polytope& D = part.domain;
    const std::size_t n = opt.n_samples;

    std::vector<ConvexFn> fns(n);
    parallel_for(n, opt.workers, [&](std::size_t i) { fns[i] = sample_convex_fn(sampler, D, i); });

    // Coverage probes.
    std::vector<long> probes(n, 0);
    parallel_for(n, opt.workers, [&](std::size_t i) {
        CounterRng rng(sampler.seed ^ kProbeStream, i);
        const ConvexFn& f = fns[i];
        for (int t = 0; t < opt.probes_per_function; ++t) {
            Vec x(D.dim());
            do {
                for (int a = 0; a < D.dim(); ++a) {
                    const Interval& iv = D.bounding_box()[static_cast<size_t>(a)];
                    x(a) = rng.uniform(iv.lo, iv.hi);
                }
            } while (!D.contains(x, 0.0));
            const int ci = part.locate(x);
            if (ci < 0) fail(ErrorKind::coverage, "probe point lies in no cell");
            const CellFamily& c = fam.cells[static_cast<size_t>(ci)];
            const double v = f(x);
            double lo = -fam.B, hi = fam.B;
            if (!c.trivial) {
                const auto pf = c.family->prepare(f);
                lo = c.family->lower_at(pf, x);
                hi = c.family->upper_at(pf, x);
            }
            const double tol = 1e-12 * fam.B;
            if (v < lo - tol || v > hi + tol) {
                std::ostringstream os;
                os << "function " << i << " leaves its bracket in cell " << ci << ": " << lo << " <= " << v << " <= " << hi
                   << " fails";
                fail(ErrorKind::coverage, os.str());
            }
            ++probes[i];
        }
    });

    EmpiricalCount out;
    out.samples = n;
    out.batches = opt.batches;
    out.probes = std::accumulate(probes.begin(), probes.end(), 0L);
    std::vector<int> nontrivial;
    for (size_t c = 0; c < fam.cells.size(); ++c)
        if (!fam.cells[c].trivial) nontrivial.push_back(static_cast<int>(c));
    out.cells.resize(nontrivial.size());
    std::vector<std::vector<int>> class_of(nontrivial.size());
    parallel_for(nontrivial.size(), opt.workers, [&](std::size_t k) {
        const CellFamily& c = fam.cells[static_cast<size_t>(nontrivial[k])];
        CellCount& cc = out.cells[k];
        cc.cell = nontrivial[k];
        cc.distinct = count_cell_classes(*c.family, fns, class_of[k]);
        std::vector<std::uint64_t> masks(static_cast<size_t>(cc.distinct), 0);
        for (size_t f = 0; f < n; ++f) {
            const auto batch = static_cast<unsigned>(f * static_cast<size_t>(opt.batches) / n);
            masks[static_cast<size_t>(class_of[k][f])] |= std::uint64_t{1} << batch;
        }
        std::map<std::uint64_t, long> hist;
        for (std::uint64_t m : masks) ++hist[m];
        cc.batch_histogram.assign(hist.begin(), hist.end());
    });
    for (const CellCount& cc : out.cells) out.log_distinct_sum += std::log(static_cast<double>(cc.distinct));
    std::set<std::vector<int>> tuples;
    for (size_t f = 0; f < n; ++f) {
        std::vector<int> t(nontrivial.size());
        for (size_t k = 0; k < nontrivial.size(); ++k) t[k] = class_of[k][f];
        tuples.insert(std::move(t));
    }
    out.distinct_keys = static_cast<long>(tuples.size());
    out.coverage = 1.0;
    return out;
}

SlopeFit fit_log_slope(const std::vector<double>& eps, const std::vector<double>& log_counts)
{
    if (eps.size() != log_counts.size()) fail(ErrorKind::argument, "eps and counts differ in length");
    if (eps.size() < 4) fail(ErrorKind::insufficient_data, "slope fit needs at least four eps values");
    std::vector<double> x, y;
    for (size_t i = 0; i < eps.size(); ++i) {
        if (!(eps[i] > 0)) fail(ErrorKind::argument, "eps must be positive");
        if (!(log_counts[i] >= std::log(2.0) - 1e-12))
            fail(ErrorKind::insufficient_data, "count below 2 at eps = " + format_number(eps[i]));
        x.push_back(-std::log(eps[i]));
        y.push_back(std::log(log_counts[i]));
    }
    const double n = static_cast<double>(x.size());
    const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
    const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
    double sxx = 0.0, sxy = 0.0;
    for (size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    if (!(sxx > 0)) fail(ErrorKind::insufficient_data, "eps values must differ");
    SlopeFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    double ss = 0.0;
    for (size_t i = 0; i < x.size(); ++i) {
        const double r = y[i] - fit.intercept - fit.slope * x[i];
        ss += r * r;
    }
    fit.residual = std::sqrt(ss / n);
    fit.ci_lo = fit.ci_hi = fit.slope;
    return fit;
}

SlopeFit fit_slope(const std::vector<double>& eps, const std::vector<double>& counts)
{
    std::vector<double> logs;
    for (double c : counts) {
        if (!(c >= 2)) fail(ErrorKind::insufficient_data, "count below 2");
        logs.push_back(std::log(c));
    }
    return fit_log_slope(eps, logs);
}

void bootstrap_slope(SlopeFit& fit, const std::vector<double>& eps, const std::vector<EmpiricalCount>& counts,
                     int resamples, std::uint64_t seed)
{
    if (counts.empty() || resamples < 1) return;
    const int batches = counts.front().batches;
    std::vector<double> slopes;
    for (int r = 0; r < resamples; ++r) {
        CounterRng rng(seed ^ kBootstrapStream, static_cast<std::uint64_t>(r));
        std::uint64_t chosen = 0;
        for (int b = 0; b < batches; ++b) chosen |= std::uint64_t{1} << (rng.next() % static_cast<std::uint64_t>(batches));
        std::vector<double> logs;
        for (const EmpiricalCount& c : counts) {
            double s = 0.0;
            for (const CellCount& cc : c.cells) {
                long present = 0;
                for (const auto& [mask, k] : cc.batch_histogram)
                    if (mask & chosen) present += k;
                if (present > 0) s += std::log(static_cast<double>(present));
            }
            logs.push_back(s);
        }
        try {
            slopes.push_back(fit_log_slope(eps, logs).slope);
        } catch (const Error&) {
        }
    }
    if (slopes.empty()) return;
    fit.ci_lo = quantile(slopes, 0.025);
    fit.ci_hi = quantile(slopes, 0.975);
}

void RunConfig::validate() const
{
    if (!(B > 0) || !std::isfinite(B)) fail(ErrorKind::argument, "B must be positive");
    if (!(p >= 1)) fail(ErrorKind::argument, "p must be >= 1");
    if (!(eps_min > 0) || !(eps_min < eps_max) || !(eps_max < 1))
        fail(ErrorKind::argument, "need 0 < eps_min < eps_max < 1");
    if (eps_steps < 2) fail(ErrorKind::argument, "eps_steps must be >= 2");
    if (n_samples < 1) fail(ErrorKind::argument, "samples must be >= 1");
    if (workers < 1) fail(ErrorKind::argument, "workers must be >= 1");
    if (batches < 1 || batches > 64) fail(ErrorKind::argument, "batches must lie in [1, 64]");
    if (n_pieces < 1 || !(slope_scale > 0)) fail(ErrorKind::argument, "invalid sampler settings");
}

std::vector<double> RunConfig::eps_list() const
{
    const double hi = std::log2(eps_max), lo = std::log2(eps_min);
    const double m = eps_steps - 1;
    std::vector<double> out;
    for (int i = 0; i < eps_steps; ++i) out.push_back(std::exp2((hi * (m - i) + lo * i) / m));
    return out;
}

EntropyReport run_experiment(const RunConfig& cfg, const Polytope& P)
{
    cfg.validate();
    EntropyReport rep;
    rep.config = cfg;
    PolytopeConstants C;
    try {
        C = analyze_polytope(P, cfg.p);
    } catch (const Error& e) {
        throw staged("constants", e);
    }
    SamplerConfig sampler;
    sampler.seed = cfg.seed;
    sampler.n_pieces = cfg.n_pieces;
    sampler.slope_scale = cfg.slope_scale;
    sampler.B = cfg.B;
    CountOptions opt{cfg.n_samples, cfg.probes_per_function, cfg.batches, cfg.workers};

    std::vector<double> eps_values, log_sums, distinct, convex_profiles;
    std::vector<EmpiricalCount> counts;
    rep.has_enumerated = true;
    for (double eps : cfg.eps_list()) {
        const auto t0 = std::chrono::steady_clock::now();
        EpsRow row;
        row.eps = eps;
        std::optional<Partition> part;
        try {
            part.emplace(build_partition(P, C, eps, cfg.mode));
        } catch (const Error& e) {
            throw staged("partition", e);
        }
        GlobalFamily fam;
        try {
            fam = combine_families(*part, cfg.B);
        } catch (const Error& e) {
            throw staged("families", e);
        }
        row.cells = static_cast<int>(part->cells.size());
        row.family_size = fam.lp_size();
        try {
            row.count = empirical_count(fam, sampler, opt);
        } catch (const Error& e) {
            throw staged("count", e);
        }
        row.enumerated = true;
        for (const CellFamily& c : fam.cells) {
            if (c.trivial) continue;
            const CountBound cb = c.family->count_bound();
            if (!cb.enumerated) {
                row.enumerated = false;
                break;
            }
            row.enumerated_log_superset += cb.log_superset;
            row.enumerated_log_subset += cb.log_subset;
            row.enumerated_log_convex_profiles += cb.log_convex_profiles;
        }
        rep.has_enumerated = rep.has_enumerated && row.enumerated;
        const TheoreticalCount tc = theoretical_count(P, cfg.B, eps, cfg.p, C, cfg.mode);
        row.size_certificate = tc.size_certificate;
        row.theoretical_log_bound = tc.log_bound_gathered;
        row.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
        eps_values.push_back(eps);
        log_sums.push_back(row.count.log_distinct_sum);
        distinct.push_back(static_cast<double>(row.count.distinct_keys));
        convex_profiles.push_back(row.enumerated_log_convex_profiles);
        counts.push_back(row.count);
        rep.rows.push_back(std::move(row));
    }
    try {
        rep.fit = fit_log_slope(eps_values, log_sums);
        bootstrap_slope(rep.fit, eps_values, counts, cfg.bootstrap, cfg.seed);
        rep.fit_distinct = fit_slope(eps_values, distinct);
        if (rep.has_enumerated) rep.fit_enumerated = fit_log_slope(eps_values, convex_profiles);
    } catch (const Error& e) {
        throw staged("fit", e);
    }
    return rep;
}

EntropyReport run_experiment(const RunConfig& cfg)
{
    Polytope P = [&] {
        try {
            return load_polytope(cfg.polytope_path);
        } catch (const Error& e) {
            throw staged("load", e);
        }
    }();
    return run_experiment(cfg, P);
}

std::string format_number(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

namespace {

nlohmann::json fit_json(const SlopeFit& f)
{
    return {{"slope", f.slope}, {"intercept", f.intercept}, {"residual", f.residual}, {"ci", {f.ci_lo, f.ci_hi}}};
}

}  // namespace

nlohmann::json report_to_json(const EntropyReport& r)
{
    const RunConfig& c = r.config;
    nlohmann::json rows = nlohmann::json::array();
    for (const EpsRow& row : r.rows) {
        nlohmann::json j{{"eps", row.eps},
                         {"cells", row.cells},
                         {"samples", row.count.samples},
                         {"distinct_keys", row.count.distinct_keys},
                         {"log_distinct_sum", row.count.log_distinct_sum},
                         {"nontrivial_cells", row.count.cells.size()},
                         {"coverage", row.count.coverage},
                         {"probes", row.count.probes},
                         {"family_size", row.family_size},
                         {"size_certificate", row.size_certificate},
                         {"theoretical_log_bound", row.theoretical_log_bound}};
        if (row.enumerated)
            j["enumerated"] = {{"log_superset", row.enumerated_log_superset},
                               {"log_subset", row.enumerated_log_subset},
                               {"log_convex_profiles", row.enumerated_log_convex_profiles}};
        rows.push_back(std::move(j));
    }
    nlohmann::json out{
        {"config",
         {{"polytope", c.polytope_path}, {"B", c.B}, {"p", c.p}, {"eps_min", c.eps_min}, {"eps_max", c.eps_max},
          {"eps_steps", c.eps_steps}, {"mode", to_string(c.mode)}, {"seed", c.seed}, {"samples", c.n_samples},
          {"n_pieces", c.n_pieces}, {"slope_scale", c.slope_scale}, {"probes_per_function", c.probes_per_function},
          {"batches", c.batches}, {"bootstrap", c.bootstrap}}},
        {"rows", std::move(rows)},
        {"fit", fit_json(r.fit)},
        {"fit_distinct_tuples", fit_json(r.fit_distinct)},
        {"notes",
         {"distinct key counts are lower bounds on the family size",
          "the primary statistic is the sum over cells of log distinct keys, a lower bound on the log size of the "
          "product family",
          "theoretical bounds use the non-constructive constant c_d = 1"}}};
    if (r.has_enumerated) out["fit_enumerated"] = fit_json(r.fit_enumerated);
    return out;
}

std::string report_csv(const EntropyReport& r)
{
    std::ostringstream os;
    os << "eps,distinct_keys,log_distinct_sum,enumerated_log_total,coverage,cells\n";
    for (const EpsRow& row : r.rows) {
        os << format_number(row.eps) << ',' << row.count.distinct_keys << ',' << format_number(row.count.log_distinct_sum)
           << ',' << (row.enumerated ? format_number(row.enumerated_log_convex_profiles) : std::string()) << ','
           << format_number(row.count.coverage) << ',' << row.cells << '\n';
    }
    return os.str();
}

void write_report(const EntropyReport& r, const std::string& dir)
{
    namespace fs = std::filesystem;
    fs::create_directories(dir);
    auto write = [&](const std::string& name, const std::string& text) {
        std::ofstream out(fs::path(dir) / name, std::ios::binary);
        if (!out) fail(ErrorKind::argument, "cannot write " + name + " in " + dir);
        out << text;
    };
    write("report.json", report_to_json(r).dump(2) + "\n");
    write("report.csv", report_csv(r));
    std::ostringstream plot;
    plot << "log_inv_eps,log_log_distinct_sum,log_log_distinct_keys\n";
    for (const EpsRow& row : r.rows)
        plot << format_number(-std::log(row.eps)) << ',' << format_number(std::log(row.count.log_distinct_sum)) << ','
             << format_number(std::log(std::log(static_cast<double>(row.count.distinct_keys)))) << '\n';
    write("plot.csv", plot.str());
    SamplerConfig s;
    s.seed = r.config.seed;
    s.n_pieces = r.config.n_pieces;
    s.slope_scale = r.config.slope_scale;
    s.B = r.config.B;
    write("manifest.json", sampler_manifest(s, r.config.n_samples).dump(2) + "\n");
    nlohmann::json meta;
    meta["generated_at_unix"] = static_cast<std::int64_t>(std::time(nullptr));
    meta["workers"] = r.config.workers;
    nlohmann::json wall = nlohmann::json::array();
    for (const EpsRow& row : r.rows) wall.push_back({{"eps", row.eps}, {"wall_ms", row.wall_ms}});
    meta["wall_ms"] = std::move(wall);
    write("metadata.json", meta.dump(2) + "\n");
}

}  // namespace bracketing
