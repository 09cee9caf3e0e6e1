#pragma once

#include <string>

#include "bracketing/entropy.hpp"

namespace bracketing {

// Sectioned key = value file ([run], [sampler], [probe]); values may be quoted, so flat TOML files of
// this shape parse as well. A relative polytope path is resolved against the config's directory.
RunConfig load_run_config(const std::string& path);
RunConfig parse_run_config(const std::string& text, const std::string& base_dir = ".");

}  // namespace bracketing
