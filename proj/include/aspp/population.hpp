#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "aspp/market.hpp"
#include "aspp/rng.hpp"

namespace aspp {

struct Trait {
    double greed = 1.0;  ///< alpha
    double fear = 1.0;   ///< beta
};

/// Truncated jointly-normal distribution of (ln greed, ln fear).
struct PopulationSpec {
    std::size_t n_agents = 500;
    double mean_ln_greed = 1.2;
    double mean_ln_fear = 1.04;
    double var_ln_greed = 1.7e-4;
    double var_ln_fear = 1.7e-4;
    double trait_correlation = 0.0;  ///< correlation r of (ln greed, ln fear), in [-1, 1]
};

/// Initial market: every agent starts with the same cash and target ratio and
/// a stock position worth cash*target plus a small uniform perturbation.
struct InitSpec {
    double initial_cash = 10.0;
    double initial_target_ratio = 1.0;
    double noise_amplitude = 0.1;  ///< dollars, must stay below initial_cash*target
    double initial_price = 1.0;
};

void validate(const PopulationSpec& spec);
void validate(const InitSpec& init);

/// Non-fatal configuration findings, e.g. a 3-sigma box that leaves the
/// ln-greed >= 0, ln-fear >= 0 region.
std::vector<std::string> population_warnings(const PopulationSpec& spec);

/// Draws n_agents (greed, fear) pairs with ln greed >= 0 and ln fear >= 0.
/// |r| < 1 samples the bivariate normal by rejection; |r| = 1 is degenerate and
/// built from a single normal deviate per agent (still rejected if outside the
/// region). Throws RejectionStallError after 10^6 consecutive rejections.
std::vector<Trait> sample_traits(const PopulationSpec& spec, Rng& rng);

/// Builds the perturbed-equilibrium market: cash = initial_cash, target = k,
/// shares = (initial_cash*k + u)/P0 with u uniform on +-noise_amplitude.
MarketState init_market(const PopulationSpec& spec, const InitSpec& init,
                        std::span<const Trait> traits, Rng& rng);

}  // namespace aspp
