#pragma once

// Line-oriented `key = value` configuration.
//
// Keys are dotted (section.name); '#' starts a comment. Unknown keys, duplicate
// keys and unparsable values raise ConfigError naming the key. Numbers are
// parsed locale-independently.

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "nsch/coupled.hpp"

namespace nsch {

struct Config {
    RunConfig run;
    ModelParams params;
    std::filesystem::path output_dir = "output";

    std::vector<int> k_list{4, 16, 64, 256};
    double obstacle_horizon = 0.5;

    std::vector<double> weakstrong_epsilon{0.02, 0.01};
    std::uint64_t weakstrong_seed = 7;

    std::filesystem::path stationary_snapshot;
    double stationary_tol = 1e-10;
};

/// Key/value pairs in file order.
using ConfigEntries = std::vector<std::pair<std::string, std::string>>;

ConfigEntries parse_entries(std::string_view text);
ConfigEntries read_entries(const std::filesystem::path& path);

/// Parses "key=value"; throws ConfigError on a missing '='.
std::pair<std::string, std::string> parse_override(std::string_view text);

/// Builds a Config; later entries override earlier ones only when passed as
/// overrides. `require_time` demands time.dt and time.t_end.
Config build_config(const ConfigEntries& entries, const ConfigEntries& overrides = {}, bool require_time = true);

/// Applies NSCH_OUTPUT_DIR if set.
void apply_environment(Config& cfg);

/// All recognised keys, for help output.
std::vector<std::string> known_keys();

}  // namespace nsch
