#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "bracketing/brackets.hpp"
#include "bracketing/sampler.hpp"

namespace bracketing {

struct CountOptions {
    std::uint64_t n_samples = 1000;
    int probes_per_function = 16;
    int batches = 20;  // bootstrap units, at most 64
    int workers = 1;
};

struct CellCount {
    int cell = -1;
    long distinct = 0;
    // Number of equivalence classes per bitmask of the batches hitting them.
    std::vector<std::pair<std::uint64_t, long>> batch_histogram;
};

struct EmpiricalCount {
    std::uint64_t samples = 0;
    long distinct_keys = 0;        // distinct global key tuples
    double log_distinct_sum = 0.0;  // sum over cells of log(distinct keys in the cell)
    double coverage = 1.0;
    long probes = 0;
    int batches = 0;
    std::vector<CellCount> cells;  // nontrivial cells only
};

// Samples functions by index from `sampler`, assigns each its canonical per-cell keys and checks
// lower <= f <= upper at random probe points. Distinct counts are lower bounds on the family size.
// Throws coverage-error on any probe outside its bracket or outside every cell.
EmpiricalCount empirical_count(const GlobalFamily& fam, const SamplerConfig& sampler, const CountOptions& opt);

// Distinct keys of one cell family over the given functions; class_of[f] receives the class id.
// Nodes are compared on successively finer sub-lattices, so groups split before full profiles
// are formed.
long count_cell_classes(const LipschitzFamily& fam, const std::vector<ConvexFn>& fns, std::vector<int>& class_of);

struct SlopeFit {
    double slope = 0.0;
    double intercept = 0.0;
    double residual = 0.0;  // root mean square
    double ci_lo = 0.0;
    double ci_hi = 0.0;
};

// Least squares of log(log N) on log(1/eps).
SlopeFit fit_slope(const std::vector<double>& eps, const std::vector<double>& counts);
SlopeFit fit_log_slope(const std::vector<double>& eps, const std::vector<double>& log_counts);

// Percentile interval of the slope over `resamples` draws of function batches with replacement.
void bootstrap_slope(SlopeFit& fit, const std::vector<double>& eps, const std::vector<EmpiricalCount>& counts,
                     int resamples, std::uint64_t seed);

struct RunConfig {
    std::string polytope_path;
    double B = 1.0;
    double p = 2.0;
    double eps_min = 1.0 / 32;
    double eps_max = 1.0 / 4;
    int eps_steps = 4;
    UMode mode = UMode::empirical;
    std::uint64_t seed = 1;
    std::uint64_t n_samples = 1000;
    std::string output_dir = "out";
    int workers = 1;
    int n_pieces = 5;
    double slope_scale = 1.0;
    int probes_per_function = 16;
    int batches = 20;
    int bootstrap = 200;

    void validate() const;
    std::vector<double> eps_list() const;  // geometric, largest first
};

struct EpsRow {
    double eps = 0.0;
    int cells = 0;
    EmpiricalCount count;
    bool enumerated = false;
    double enumerated_log_superset = 0.0;
    double enumerated_log_subset = 0.0;
    double enumerated_log_convex_profiles = 0.0;
    double family_size = 0.0;
    double size_certificate = 0.0;
    double theoretical_log_bound = 0.0;
    double wall_ms = 0.0;
};

struct EntropyReport {
    RunConfig config;
    std::vector<EpsRow> rows;
    SlopeFit fit;           // on sum of per-cell log distinct counts
    SlopeFit fit_distinct;  // on global distinct tuples
    bool has_enumerated = false;
    SlopeFit fit_enumerated;  // on enumerated convex-profile totals (d = 1)
};

EntropyReport run_experiment(const RunConfig& cfg, const Polytope& P);
EntropyReport run_experiment(const RunConfig& cfg);

nlohmann::json report_to_json(const EntropyReport& r);
std::string report_csv(const EntropyReport& r);
// Writes report.json, report.csv, plot.csv, manifest.json and metadata.json (timings only).
void write_report(const EntropyReport& r, const std::string& dir);

// Decimal with 17 significant digits.
std::string format_number(double v);

}  // namespace bracketing
