#include "bracketing/config.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "bracketing/error.hpp"

namespace bracketing {

namespace {

namespace pt = boost::property_tree;

std::string unquote(std::string s)
{
    if (s.size() >= 2 && (s.front() == '"' || s.front() == '\'') && s.back() == s.front()) s = s.substr(1, s.size() - 2);
    return s;
}

template <class T>
void read(const pt::ptree& tree, const std::string& key, T& field)
{
    const auto v = tree.get_optional<std::string>(key);
    if (!v) return;
    std::istringstream is(unquote(*v));
    T parsed{};
    is >> parsed;
    if (is.fail() || !(is >> std::ws).eof()) fail(ErrorKind::argument, "config key " + key + " has invalid value '" + *v + "'");
    field = parsed;
}

void read_string(const pt::ptree& tree, const std::string& key, std::string& field)
{
    if (const auto v = tree.get_optional<std::string>(key)) field = unquote(*v);
}

}  // namespace

RunConfig parse_run_config(const std::string& text, const std::string& base_dir)
{
    pt::ptree tree;
    std::istringstream in(text);
    try {
        pt::read_ini(in, tree);
    } catch (const pt::ini_parser_error& e) {
        fail(ErrorKind::argument, std::string("config parse error: ") + e.what());
    }
    RunConfig c;
    read_string(tree, "run.polytope", c.polytope_path);
    if (!c.polytope_path.empty() && std::filesystem::path(c.polytope_path).is_relative())
        c.polytope_path = (std::filesystem::path(base_dir) / c.polytope_path).lexically_normal().string();
    read(tree, "run.B", c.B);
    read(tree, "run.p", c.p);
    read(tree, "run.eps_min", c.eps_min);
    read(tree, "run.eps_max", c.eps_max);
    read(tree, "run.eps_steps", c.eps_steps);
    std::string mode = to_string(c.mode);
    read_string(tree, "run.mode", mode);
    c.mode = parse_umode(mode);
    read(tree, "run.seed", c.seed);
    read(tree, "run.samples", c.n_samples);
    read_string(tree, "run.out", c.output_dir);
    read(tree, "run.workers", c.workers);
    read(tree, "sampler.n_pieces", c.n_pieces);
    read(tree, "sampler.slope_scale", c.slope_scale);
    read(tree, "probe.per_function", c.probes_per_function);
    read(tree, "probe.batches", c.batches);
    read(tree, "probe.bootstrap", c.bootstrap);
    return c;
}

RunConfig load_run_config(const std::string& path)
{
    std::ifstream in(path);
    if (!in) fail(ErrorKind::argument, "cannot open config " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_run_config(ss.str(), std::filesystem::path(path).parent_path().string());
}

}  // namespace bracketing
