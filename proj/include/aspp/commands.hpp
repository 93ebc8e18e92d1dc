#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace aspp {

/// Worker count for ensemble runs: the ASPP_WORKERS environment variable when
/// set, otherwise 0 (auto). The worker count never changes any output bytes.
unsigned workers_from_env();

std::vector<double> default_gamma_grid();  // 20, 40, ..., 220

using Overrides = std::vector<std::pair<std::string, std::string>>;

struct SimulateArgs {
    std::filesystem::path config_file;
    std::filesystem::path out_dir;
    Overrides overrides;
    unsigned workers = 0;  ///< 0 = env/auto
};

/// Runs the configured ensembles (one per trait-correlation level) and writes
/// price_stats[_r_*].csv, wealth_hist[_r_*].csv, trait_corr.csv, manifest.json.
void cmd_simulate(const SimulateArgs& args, std::ostream& warnings);

struct EstimateArgs {
    std::filesystem::path prices_csv;
    std::filesystem::path out_dir;
    std::vector<std::size_t> windows{7, 14, 21};
    std::vector<double> gamma_grid;  ///< empty = default grid
    std::optional<double> fixed_c0;
    std::string date_column = "Date";
    std::string close_column = "Close";
};

/// Runs the estimation pipeline over every (window, gamma) pair and writes
/// estimate.csv plus manifest.json. Failed grid points become flagged rows;
/// only a fully failed grid is an error.
void cmd_estimate(const EstimateArgs& args, std::ostream& warnings);

struct SimulateEstimateArgs {
    std::filesystem::path config_file;
    std::filesystem::path out_dir;
    Overrides overrides;
    std::vector<std::size_t> windows{21};
    std::vector<double> gamma_grid;  ///< empty = default grid
    std::optional<double> fixed_c0;
    unsigned workers = 0;
};

/// Simulates one representative path per correlation level, exports each price
/// series (sim_prices[_r_*].csv), estimates on them, and writes the comparison
/// table estimate_compare.csv plus ordering_check.csv and manifest.json.
void cmd_simulate_estimate(const SimulateEstimateArgs& args, std::ostream& warnings);

}  // namespace aspp
