#pragma once

#include <json.hpp>
#include <string>

#include "bracketing/polytope.hpp"

namespace bracketing {

// {"dim": d, "halfspaces": [{"normal": [...], "offset": p}, ...], "bbox": [[a, b], ...]}
Polytope polytope_from_json(const nlohmann::json& j);
nlohmann::json polytope_to_json(const Polytope& P);
Polytope load_polytope(const std::string& path);
void save_polytope(const Polytope& P, const std::string& path);

}  // namespace bracketing
