#include "bracketing/cli.hpp"

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "bracketing/brackets.hpp"
#include "bracketing/config.hpp"
#include "bracketing/entropy.hpp"
#include "bracketing/error.hpp"
#include "bracketing/polytope_io.hpp"

namespace bracketing {

namespace {

using nlohmann::json;

struct Options {
    std::string polytope;
    std::string config;
    std::string out;
    std::string mode = "empirical";
    std::string report_dir;
    double p = 1.0;
    double B = 1.0;
    double eps = 0.125;
    double eps_min = 0.0;
    double eps_max = 0.0;
    int eps_steps = 0;
    std::uint64_t samples = 0;
    std::uint64_t seed = 1;
    int workers = 0;
    long audit_points = 100000;
    bool as_json = false;
};

int default_workers() { return static_cast<int>(std::max(1u, std::thread::hardware_concurrency())); }

Polytope need_polytope(const Options& o)
{
    if (o.polytope.empty()) fail(ErrorKind::argument, "--polytope is required");
    return load_polytope(o.polytope);
}

std::vector<double> to_vector(const Vec& v) { return {v.data(), v.data() + v.size()}; }

json constants_json(const PolytopeConstants& C)
{
    json faces = json::array();
    for (const FaceData& fd : C.faces) {
        json f{{"j_tuple", fd.face.j_tuple}, {"k", fd.face.k},           {"volume", fd.volume},
               {"L_k1", fd.L.L_k1},          {"L_k2", fd.L.L_k2},         {"L_j3", fd.L.L_j3},
               {"inradius", fd.inradius},    {"john_exit", fd.john_exit}};
        if (fd.john.dim() > 0)
            f["john"] = {{"center", to_vector(fd.john.center)}, {"radii", to_vector(fd.john.radii)}};
        faces.push_back(std::move(f));
    }
    return {{"dim", C.dim},
            {"p", C.p},
            {"u_cap", C.cap},
            {"u_theoretical", C.u_theoretical},
            {"u_empirical", C.u_empirical},
            {"inner_theoretical", C.inner_theoretical},
            {"inner_empirical", C.inner_empirical},
            {"separation", C.separation},
            {"L_k1", C.L_k1},
            {"L_k2", C.L_k2},
            {"faces", std::move(faces)}};
}

void emit(std::ostream& out, const json& j, const std::string& path)
{
    if (path.empty()) {
        out << j.dump(2) << '\n';
        return;
    }
    std::ofstream f(path);
    if (!f) fail(ErrorKind::argument, "cannot write " + path);
    f << j.dump(2) << '\n';
}

int run_check(const Options& o, std::ostream& out)
{
    const Polytope P = need_polytope(o);
    const SimplicityReport r = check_simple(P);
    if (o.as_json) {
        out << json{{"simple", r.simple}, {"violations", r.violations}}.dump(2) << '\n';
    } else {
        out << "simple: " << (r.simple ? "true" : "false") << '\n';
        for (const auto& v : r.violations) out << "  " << v << '\n';
    }
    return r.simple ? 0 : 1;
}

int run_faces(const Options& o, std::ostream& out)
{
    const Polytope P = need_polytope(o);
    json faces = json::array();
    for (const Face& f : enumerate_all_faces(P))
        faces.push_back({{"j_tuple", f.j_tuple}, {"k", f.k}, {"volume", face_volume(P, f)}});
    if (o.as_json) {
        out << faces.dump(2) << '\n';
    } else {
        for (const auto& f : faces)
            out << "k=" << f["k"] << " j=" << f["j_tuple"].dump() << " volume=" << std::setprecision(17)
                << f["volume"].get<double>() << '\n';
    }
    return 0;
}

int run_constants(const Options& o, std::ostream& out)
{
    const Polytope P = need_polytope(o);
    emit(out, constants_json(analyze_polytope(P, o.p)), o.out);
    return 0;
}

int run_partition(const Options& o, std::ostream& out)
{
    const Polytope P = need_polytope(o);
    const Partition part = build_partition(P, analyze_polytope(P, o.p), o.eps, parse_umode(o.mode));
    json j = partition_to_json(part, o.B);
    const AuditResult a = audit_partition(part, o.audit_points, o.seed);
    j["audit"] = {{"points", a.points},          {"exactly_one", a.exactly_one}, {"none", a.none},
                  {"multiple", a.multiple},      {"boundary", a.boundary},       {"volume_sum", a.volume_sum},
                  {"domain_volume", a.domain_volume}, {"relative_volume_error", a.relative_volume_error}};
    emit(out, j, o.out);
    return 0;
}

int run_brackets(const Options& o, std::ostream& out)
{
    const Polytope P = need_polytope(o);
    const Partition part = build_partition(P, analyze_polytope(P, o.p), o.eps, parse_umode(o.mode));
    const GlobalFamily fam = combine_families(part, o.B);
    json manifest = family_manifest(fam);
    if (!o.out.empty()) {
        // Brackets of the first sampled function on every nontrivial cell small enough to materialize.
        std::filesystem::create_directories(o.out);
        SamplerConfig s;
        s.seed = o.seed;
        s.B = o.B;
        const ConvexFn f = sample_convex_fn(s, P, 0);
        json dumps = json::array();
        for (const CellFamily& c : fam.cells) {
            if (c.trivial || c.family->grid().node_count() > 1'000'000) continue;
            const std::string name = "bracket_cell" + std::to_string(c.cell) + ".bin";
            write_bracket_binary(c.family->canonical_map(f), (std::filesystem::path(o.out) / name).string());
            dumps.push_back({{"cell", c.cell}, {"file", name}, {"nodes", c.family->grid().nodes}});
        }
        manifest["dumps"] = std::move(dumps);
        manifest["sampler"] = sampler_manifest(s, 1);
        emit(out, manifest, (std::filesystem::path(o.out) / "manifest.json").string());
        out << "wrote " << o.out << '\n';
        return 0;
    }
    emit(out, manifest, "");
    return 0;
}

RunConfig entropy_config(const Options& o)
{
    RunConfig c = o.config.empty() ? RunConfig{} : load_run_config(o.config);
    if (!o.polytope.empty()) c.polytope_path = o.polytope;
    if (o.eps_min > 0) c.eps_min = o.eps_min;
    if (o.eps_max > 0) c.eps_max = o.eps_max;
    if (o.eps_steps > 0) c.eps_steps = o.eps_steps;
    if (o.samples > 0) c.n_samples = o.samples;
    if (!o.out.empty()) c.output_dir = o.out;
    if (o.workers > 0) c.workers = o.workers;
    return c;
}

int run_entropy(const Options& o, std::ostream& out, const CLI::App& sub)
{
    RunConfig c = entropy_config(o);
    if (sub.count("--p")) c.p = o.p;
    if (sub.count("--B")) c.B = o.B;
    if (sub.count("--seed")) c.seed = o.seed;
    if (sub.count("--mode")) c.mode = parse_umode(o.mode);
    if (o.config.empty() && o.workers == 0) c.workers = default_workers();
    if (c.polytope_path.empty()) fail(ErrorKind::argument, "no polytope given (--polytope or [run] polytope)");
    const EntropyReport r = run_experiment(c);
    write_report(r, c.output_dir);
    if (o.as_json) {
        out << report_to_json(r).dump(2) << '\n';
    } else {
        out << report_csv(r);
        out << "slope " << format_number(r.fit.slope) << " ci [" << format_number(r.fit.ci_lo) << ", "
            << format_number(r.fit.ci_hi) << "]\n";
        out << "wrote " << c.output_dir << '\n';
    }
    return 0;
}

int run_verify(const Options& o, std::ostream& out)
{
    const Polytope P = need_polytope(o);
    json j;
    bool ok = true;
    const SimplicityReport simple = check_simple(P);
    j["simple"] = simple.simple;
    if (!simple.simple) {
        if (o.as_json) out << j.dump(2) << '\n';
        else out << "simple: false\n";
        return 1;
    }
    const PolytopeConstants C = analyze_polytope(P, o.p);
    int john_failures = 0;
    for (const FaceData& fd : C.faces) {
        if (fd.face.dim() == 0) continue;
        if (!verify_john(P, fd.face, fd.john, fd.face.dim()).ok) ++john_failures;
    }
    j["john_failures"] = john_failures;
    ok = ok && john_failures == 0;
    const Partition part = build_partition(P, C, o.eps, parse_umode(o.mode));
    const AuditResult a = audit_partition(part, o.audit_points, o.seed);
    j["audit"] = {{"points", a.points}, {"none", a.none}, {"multiple", a.multiple}, {"boundary", a.boundary},
                  {"relative_volume_error", a.relative_volume_error}};
    const bool audit_ok = a.none + a.multiple <= a.boundary && a.relative_volume_error <= 1e-6;
    const GlobalFamily fam = combine_families(part, o.B);
    SamplerConfig s;
    s.seed = o.seed;
    s.B = o.B;
    CountOptions opt;
    opt.n_samples = o.samples > 0 ? o.samples : 1000;
    opt.workers = o.workers > 0 ? o.workers : default_workers();
    const EmpiricalCount count = empirical_count(fam, s, opt);  // throws coverage-error on a violation
    j["coverage"] = count.coverage;
    j["probes"] = count.probes;
    if (!audit_ok) fail(ErrorKind::coverage, "partition audit found unclassified or doubly classified points");
    if (o.as_json) {
        out << j.dump(2) << '\n';
    } else {
        out << "simple: true\njohn failures: " << john_failures << "\naudit: " << a.points << " points, " << a.none
            << " unclassified, " << a.multiple << " multiple, " << a.boundary << " near band edges\ncoverage: "
            << count.coverage << " over " << count.probes << " probes\n";
    }
    return ok ? 0 : 2;
}

int run_report(const Options& o, std::ostream& out)
{
    if (o.report_dir.empty()) fail(ErrorKind::argument, "--out (report directory) is required");
    std::ifstream in(std::filesystem::path(o.report_dir) / "report.json");
    if (!in) fail(ErrorKind::argument, "no report.json in " + o.report_dir);
    json r;
    try {
        in >> r;
    } catch (const json::exception& e) {
        fail(ErrorKind::argument, std::string("malformed report: ") + e.what());
    }
    if (o.as_json) {
        out << r.dump(2) << '\n';
        return 0;
    }
    out << "eps distinct_keys log_distinct_sum cells\n";
    for (const auto& row : r.at("rows"))
        out << format_number(row.at("eps").get<double>()) << ' ' << row.at("distinct_keys") << ' '
            << format_number(row.at("log_distinct_sum").get<double>()) << ' ' << row.at("cells") << '\n';
    const auto& fit = r.at("fit");
    out << "slope " << format_number(fit.at("slope").get<double>()) << " ci [" << format_number(fit.at("ci")[0].get<double>())
        << ", " << format_number(fit.at("ci")[1].get<double>()) << "]\n";
    return 0;
}

}  // namespace

int cli_dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Bracketing-entropy toolkit for convex functions on polytopes", "bracketctl"};
    app.require_subcommand(1);
    Options o;

    auto add_common = [&](CLI::App* s) {
        s->add_option("--polytope", o.polytope, "Polytope JSON file");
        s->add_flag("--json", o.as_json, "Machine-readable output");
    };
    auto add_geometry = [&](CLI::App* s) {
        s->add_option("--p", o.p, "Norm exponent p >= 1");
        s->add_option("--B", o.B, "Sup bound of the class");
        s->add_option("--eps", o.eps, "Accuracy");
        s->add_option("--mode", o.mode, "theoretical or empirical u");
        s->add_option("--seed", o.seed, "Seed");
    };

    auto* check = app.add_subcommand("check", "Check that a polytope is simple");
    add_common(check);
    auto* faces = app.add_subcommand("faces", "List the faces G_j");
    add_common(faces);
    auto* constants = app.add_subcommand("constants", "Face constants, John ellipsoids and u");
    add_common(constants);
    constants->add_option("--p", o.p, "Norm exponent p >= 1");
    constants->add_option("--out", o.out, "Output file");
    auto* partition = app.add_subcommand("partition", "Build and audit the cell partition");
    add_common(partition);
    add_geometry(partition);
    partition->add_option("--out", o.out, "Output file");
    partition->add_option("--audit-points", o.audit_points, "Points in the partition audit");
    auto* brackets = app.add_subcommand("brackets", "Bracket family manifest and dumps");
    add_common(brackets);
    add_geometry(brackets);
    brackets->add_option("--out", o.out, "Output directory");
    auto* entropy = app.add_subcommand("entropy", "Run an eps sweep and write reports");
    add_common(entropy);
    entropy->add_option("--config", o.config, "Run configuration file");
    entropy->add_option("--p", o.p, "Norm exponent p >= 1");
    entropy->add_option("--B", o.B, "Sup bound of the class");
    entropy->add_option("--eps-min", o.eps_min, "Smallest eps");
    entropy->add_option("--eps-max", o.eps_max, "Largest eps");
    entropy->add_option("--eps-steps", o.eps_steps, "Number of eps values");
    entropy->add_option("--samples", o.samples, "Functions per eps");
    entropy->add_option("--seed", o.seed, "Seed");
    entropy->add_option("--mode", o.mode, "theoretical or empirical u");
    entropy->add_option("--out", o.out, "Output directory");
    entropy->add_option("--workers", o.workers, "Worker threads");
    auto* verify = app.add_subcommand("verify", "John, partition and coverage checks");
    add_common(verify);
    add_geometry(verify);
    verify->add_option("--samples", o.samples, "Functions probed");
    verify->add_option("--workers", o.workers, "Worker threads");
    verify->add_option("--audit-points", o.audit_points, "Points in the partition audit");
    auto* report = app.add_subcommand("report", "Summarize a written report");
    report->add_option("--out", o.report_dir, "Report directory");
    report->add_flag("--json", o.as_json, "Machine-readable output");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        err << e.what() << '\n' << app.help();
        return 1;
    }

    try {
        if (check->parsed()) return run_check(o, out);
        if (faces->parsed()) return run_faces(o, out);
        if (constants->parsed()) return run_constants(o, out);
        if (partition->parsed()) return run_partition(o, out);
        if (brackets->parsed()) return run_brackets(o, out);
        if (entropy->parsed()) return run_entropy(o, out, *entropy);
        if (verify->parsed()) return run_verify(o, out);
        if (report->parsed()) return run_report(o, out);
    } catch (const Error& e) {
        err << "error (" << to_string(e.kind()) << "): " << e.what() << '\n';
        return e.is_invariant_violation() ? 2 : 1;
    } catch (const std::exception& e) {
        err << "internal error: " << e.what() << '\n';
        return 2;
    }
    err << app.help();
    return 1;
}

}  // namespace bracketing
