#pragma once

#include "qndspin/protocol.hpp"
#include "qndspin/reservoir.hpp"
#include "qndspin/spin_system.hpp"

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

// Run configuration: a key-tree text format with sections [system],
// [rates.<label>], [protocol], [output] and optionally [sweep]. See
// README.md for the full key reference.

namespace qnd {

struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& path, const std::string& what)
        : std::runtime_error(path + ": " + what), key_path(path) {}
    std::string key_path;
};

struct SweepConfig {
    double b0_min = 0.0, b0_max = 0.0;
    int b0_steps = 0;
    double dxz_min = 0.0, dxz_max = 0.0;
    int dxz_steps = 0;
    double gamma_n = 0.0, gamma_e = 0.0; // Hz/T
};

struct OutputConfig {
    std::string dir = ".";
    std::string prefix = "run";
};

struct RunConfig {
    SpinSystemSpec system;
    std::map<std::string, RateSet> rates;              // by label
    std::map<std::string, std::string> rate_presets;   // label -> preset name
    std::map<std::string, double> preset_windows;      // label -> preset window, s
    ProtocolSpec protocol;
    std::string initial_side = "up"; // "up", "down" or "custom"
    OutputConfig output;
    std::optional<SweepConfig> sweep;
};

// Parses and validates; overrides are "section.key=value" paths applied on
// top of the file content (CLI --set flags).
RunConfig parse_config(const std::string& text,
                       const std::vector<std::string>& overrides = {});

RunConfig parse_config_file(const std::string& path,
                            const std::vector<std::string>& overrides = {});

} // namespace qnd
