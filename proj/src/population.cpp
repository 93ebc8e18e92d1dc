#include "aspp/population.hpp"

#include <cmath>

#include "aspp/errors.hpp"

namespace aspp {

namespace {

constexpr std::size_t kStallLimit = 1'000'000;

}  // namespace

void validate(const PopulationSpec& spec) {
    if (spec.n_agents == 0) throw ConfigError("population.n_agents: must be >= 1");
    if (spec.var_ln_greed < 0.0) throw ConfigError("population.var_ln_greed: must be >= 0");
    if (spec.var_ln_fear < 0.0) throw ConfigError("population.var_ln_fear: must be >= 0");
    if (!(spec.trait_correlation >= -1.0 && spec.trait_correlation <= 1.0))
        throw ConfigError("population.trait_correlation: must lie in [-1, 1]");
}

void validate(const InitSpec& init) {
    if (!(init.initial_cash > 0.0)) throw ConfigError("init.initial_cash: must be > 0");
    if (!(init.initial_target_ratio > 0.0))
        throw ConfigError("init.initial_target_ratio: must be > 0");
    if (init.noise_amplitude < 0.0) throw ConfigError("init.noise_amplitude: must be >= 0");
    if (!(init.noise_amplitude < init.initial_cash * init.initial_target_ratio))
        throw ConfigError(
            "init.noise_amplitude: must be smaller than initial_cash * initial_target_ratio");
    if (!(init.initial_price > 0.0)) throw ConfigError("init.initial_price: must be > 0");
}

std::vector<std::string> population_warnings(const PopulationSpec& spec) {
    std::vector<std::string> warnings;
    const double sd_greed = std::sqrt(spec.var_ln_greed);
    const double sd_fear = std::sqrt(spec.var_ln_fear);
    if (spec.mean_ln_greed - 3.0 * sd_greed < 0.0 || spec.mean_ln_fear - 3.0 * sd_fear < 0.0) {
        warnings.push_back(
            "population: the 3-sigma box around (mean_ln_greed, mean_ln_fear) leaves the "
            "ln-greed >= 0, ln-fear >= 0 region; sampling will truncate noticeably");
    }
    return warnings;
}

std::vector<Trait> sample_traits(const PopulationSpec& spec, Rng& rng) {
    validate(spec);
    const double sd_greed = std::sqrt(spec.var_ln_greed);
    const double sd_fear = std::sqrt(spec.var_ln_fear);
    const double r = spec.trait_correlation;
    const bool degenerate = std::abs(r) == 1.0;
    const double cross = degenerate ? 0.0 : std::sqrt(1.0 - r * r);

    std::vector<Trait> traits;
    traits.reserve(spec.n_agents);
    std::size_t consecutive_rejections = 0;
    for (std::size_t i = 0; i < spec.n_agents; ++i) {
        for (;;) {
            double ln_greed, ln_fear;
            if (degenerate) {
                // The bivariate density does not exist at |r| = 1; both traits
                // share one standard normal deviate.
                const double z = standard_normal(rng);
                ln_greed = spec.mean_ln_greed + sd_greed * z;
                ln_fear = spec.mean_ln_fear + (r > 0.0 ? sd_fear * z : -sd_fear * z);
            } else {
                const double z1 = standard_normal(rng);
                const double z2 = standard_normal(rng);
                ln_greed = spec.mean_ln_greed + sd_greed * z1;
                ln_fear = spec.mean_ln_fear + sd_fear * (r * z1 + cross * z2);
            }
            if (ln_greed >= 0.0 && ln_fear >= 0.0) {
                consecutive_rejections = 0;
                traits.push_back({std::exp(ln_greed), std::exp(ln_fear)});
                break;
            }
            if (++consecutive_rejections >= kStallLimit) {
                throw RejectionStallError(consecutive_rejections);
            }
        }
    }
    return traits;
}

MarketState init_market(const PopulationSpec& spec, const InitSpec& init,
                        std::span<const Trait> traits, Rng& rng) {
    validate(spec);
    validate(init);
    if (traits.size() != spec.n_agents)
        throw Error("init_market: traits length does not match population.n_agents");

    MarketState market;
    market.price = init.initial_price;
    market.session_index = 0;
    market.agents.reserve(spec.n_agents);
    for (const Trait& t : traits) {
        AgentState a;
        a.cash = init.initial_cash;
        a.initial_cash = init.initial_cash;
        a.target_ratio = init.initial_target_ratio;
        a.greed = t.greed;
        a.fear = t.fear;
        const double noise = uniform_real(rng, -init.noise_amplitude, init.noise_amplitude);
        a.shares = (init.initial_cash * init.initial_target_ratio + noise) / init.initial_price;
        market.agents.push_back(a);
    }
    return market;
}

}  // namespace aspp
