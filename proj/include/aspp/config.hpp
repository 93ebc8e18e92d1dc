#pragma once

#include <filesystem>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "aspp/ensemble.hpp"

namespace aspp {

/// A simulation config plus the trait-correlation sweep it requests. A single
/// value is a one-element sweep; base.population.trait_correlation is set per
/// level when running.
struct SweepConfig {
    SimulationConfig base;
    std::vector<double> trait_correlations{0.0};
};

/// Parses the flat sectioned key/value format:
///
///   [population]
///   n_agents = 500
///   trait_correlation = -1, 0.5, 1   # list sweeps the correlation
///
///   [simulation]
///   rule = multiplicative
///   master_seed = 42
///
/// Unknown sections or keys are errors; `origin` names the source in messages.
SweepConfig parse_config_text(std::string_view text, std::string_view origin);

SweepConfig load_config_file(const std::filesystem::path& path);

/// Applies one "section.key=value" override on top of a parsed config.
void apply_override(SweepConfig& config, std::string_view key, std::string_view value);

/// Validates every sweep level; throws ConfigError with the field path.
void validate(const SweepConfig& config);

/// Full field-by-field snapshot, embedded in the run manifest.
nlohmann::json config_snapshot(const SweepConfig& config);

}  // namespace aspp
