#include "bracketing/polytope_io.hpp"

#include <fstream>

#include "bracketing/error.hpp"

namespace bracketing {

Polytope polytope_from_json(const nlohmann::json& j)
{
    try {
        const int d = j.at("dim").get<int>();
        const auto& hs = j.at("halfspaces");
        if (d < 1 || !hs.is_array() || hs.empty()) fail(ErrorKind::argument, "polytope JSON needs dim >= 1 and halfspaces");
        Mat N(static_cast<Index>(hs.size()), d);
        Vec p(static_cast<Index>(hs.size()));
        for (size_t i = 0; i < hs.size(); ++i) {
            const auto normal = hs[i].at("normal").get<std::vector<double>>();
            if (static_cast<int>(normal.size()) != d) fail(ErrorKind::argument, "halfspace normal has wrong length");
            for (int c = 0; c < d; ++c) N(static_cast<Index>(i), c) = normal[static_cast<size_t>(c)];
            p(static_cast<Index>(i)) = hs[i].at("offset").get<double>();
        }
        if (j.contains("bbox")) {
            std::vector<Interval> box;
            for (const auto& iv : j.at("bbox")) box.push_back({iv.at(0).get<double>(), iv.at(1).get<double>()});
            return Polytope(N, p, box);
        }
        return Polytope(N, p);
    } catch (const nlohmann::json::exception& e) {
        fail(ErrorKind::argument, std::string("malformed polytope JSON: ") + e.what());
    }
}

nlohmann::json polytope_to_json(const Polytope& P)
{
    nlohmann::json j;
    j["dim"] = P.dim();
    j["halfspaces"] = nlohmann::json::array();
    for (int i = 0; i < P.size(); ++i) {
        const Vec n = P.normal(i);
        j["halfspaces"].push_back({{"normal", std::vector<double>(n.data(), n.data() + n.size())}, {"offset", P.offset(i)}});
    }
    j["bbox"] = nlohmann::json::array();
    for (const auto& iv : P.bounding_box()) j["bbox"].push_back({iv.lo, iv.hi});
    return j;
}

Polytope load_polytope(const std::string& path)
{
    std::ifstream in(path);
    if (!in) fail(ErrorKind::argument, "cannot open polytope file " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        fail(ErrorKind::argument, "cannot parse " + path + ": " + e.what());
    }
    return polytope_from_json(j);
}

void save_polytope(const Polytope& P, const std::string& path)
{
    std::ofstream out(path);
    if (!out) fail(ErrorKind::argument, "cannot write " + path);
    out << polytope_to_json(P).dump(2) << '\n';
}

}  // namespace bracketing
