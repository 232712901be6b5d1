#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "reachguard/controller.hpp"
#include "reachguard/grid.hpp"
#include "reachguard/levelset.hpp"
#include "reachguard/types.hpp"

namespace reachguard {

// Raised for unreadable config files, unknown keys and unparsable values.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Everything a run needs, assembled from defaults, a config file and flag
// overrides (flags win). Trace paths listed here must resolve when the
// config is validated.
struct RunConfig {
    ControllerParams controller;
    VehicleModel vehicle;
    AccelBounds bounds;
    bool bounds_from_data = false;
    GridSpec grid;
    SafetyCriterion criterion;
    SolveOptions solver;
    double margin = 0.0;
    double sim_dt = 0.05;
    std::uint64_t seed = 0;
    std::vector<std::filesystem::path> traces;

    void validate() const;  // parameter invariants + path resolution
};

// Key-value text: one "key = value" per line, '#' comments. Unknown keys
// are errors. See README for the key list.
RunConfig parse_config_file(const std::filesystem::path& path);
void apply_config_line(RunConfig& cfg, const std::string& key, const std::string& value);

// Resolved configuration as ordered key-value pairs, echoed into every
// output artifact for provenance.
std::vector<std::pair<std::string, std::string>> config_echo(const RunConfig& cfg);

std::string format_double(double x);  // shortest exact round-trip form

}  // namespace reachguard
