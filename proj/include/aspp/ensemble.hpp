#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "aspp/market.hpp"
#include "aspp/population.hpp"

namespace aspp {

struct SimulationConfig {
    PopulationSpec population;
    InitSpec init;
    std::size_t active_per_session = 20;  ///< m, agents drawn per day
    std::size_t sessions = 1260;          ///< T, trading days (252 per year)
    UpdateRule rule;
    std::size_t n_paths = 500;
    std::uint64_t master_seed = 0;
    double risk_threshold = 0.5;  ///< cash/initial_cash cutoff of the risk proxy
    bool resample_traits_per_path = true;
    std::size_t wealth_bins = 40;
};

void validate(const SimulationConfig& config);

/// One simulated path. Day 0 is the initial state, so every per-day series has
/// sessions+1 entries and log_price telescopes log_return exactly.
struct PathStats {
    std::vector<double> log_price;   ///< ln P(t)/P(0)
    std::vector<double> log_return;  ///< ln R(t), zero at day 0
    std::vector<double> risk_proxy;  ///< fraction of agents with cash/initial < threshold
    std::vector<double> final_wealth;  ///< cash per agent at the horizon
    std::vector<Trait> traits;
};

struct HistogramBin {
    double lo = 0.0;
    double hi = 0.0;
    double fraction = 0.0;
};

struct EnsembleStats {
    std::vector<double> mean_log_price;
    std::vector<double> std_log_return;  ///< cross-path sample standard deviation per day
    std::vector<double> mean_risk_proxy;
    std::vector<double> predicted_log_price;  ///< homogeneous-population formula
    std::vector<HistogramBin> wealth_histogram;  ///< pooled final cash, last bin is overflow
    std::optional<double> corr_wealth_greed;
    std::optional<double> corr_wealth_fear;
    std::size_t completed_paths = 0;
    std::size_t aborted_paths = 0;
};

/// Simulates path `path_index`. The rng streams are pure functions of
/// (master_seed, path_index), so paths can run on any worker in any order.
PathStats run_path(const SimulationConfig& config, std::size_t path_index);

/// All paths, kept in memory; intended for analysis at moderate path counts.
std::vector<PathStats> run_paths(const SimulationConfig& config, unsigned n_workers = 0);

/// Aggregates n_paths independent paths with a fixed path-order reduction:
/// the result is bit-identical for any worker count. Aborted paths are counted
/// and excluded; only an ensemble with zero surviving paths is an error.
/// n_workers = 0 picks the hardware concurrency.
EnsembleStats run_ensemble(const SimulationConfig& config, unsigned n_workers = 0);

/// Predicted ln P(t) = (t/gamma)(ln greed - ln fear) with gamma = 2N/m, for
/// t = 0..horizon. Valid for greed, fear >= 1.
std::vector<double> homogeneous_prediction(double mean_greed, double mean_fear,
                                           std::size_t n_agents, std::size_t active_per_session,
                                           std::size_t horizon);

/// Pearson correlation of final cash against greed and against fear, computed
/// across agents per path and averaged over paths. Throws DegenerateTraitsError
/// when no path has trait variation to correlate against.
std::pair<double, double> wealth_trait_correlation(std::span<const PathStats> paths);

}  // namespace aspp
