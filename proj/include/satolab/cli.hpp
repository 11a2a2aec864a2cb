#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "satolab/ensemble.hpp"

namespace satolab::cli {

/// Runs the command line; returns the process exit code (0 ok, 1 numerical
/// contract failure, 2 configuration error).
int run(int argc, char** argv);
/// Same, with the arguments after the program name.
int run(const std::vector<std::string>& args);

/// EnsembleConfig from its JSON form; unknown keys and bad values raise
/// ConfigError naming the key.
ensemble::EnsembleConfig ensemble_config_from_json(const nlohmann::ordered_json& j);
nlohmann::ordered_json ensemble_config_to_json(const ensemble::EnsembleConfig& cfg);

nlohmann::ordered_json report_to_json(const ensemble::MomentReport& rep);

}  // namespace satolab::cli
