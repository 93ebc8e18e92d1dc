#include "aspp/ensemble.hpp"

#include <atomic>
#include <cmath>
#include <condition_variable>
#include <exception>
#include <limits>
#include <map>
#include <mutex>
#include <numeric>
#include <thread>

#include "aspp/errors.hpp"
#include "aspp/stats.hpp"

namespace aspp {

namespace {

unsigned resolve_workers(unsigned requested, std::size_t jobs) {
    unsigned n = requested != 0 ? requested : std::thread::hardware_concurrency();
    if (n == 0) n = 1;
    if (jobs < n) n = static_cast<unsigned>(jobs);
    return n > 0 ? n : 1;
}

/// Runs produce(0..n-1) on a worker pool and feeds the results to consume() in
/// strict index order, which keeps floating-point reductions independent of
/// the worker count. A backpressure window bounds buffered items.
template <typename Item, typename Produce, typename Consume>
void ordered_parallel_for(std::size_t n, unsigned n_workers, Produce produce, Consume consume) {
    if (n == 0) return;
    const unsigned workers = resolve_workers(n_workers, n);
    if (workers == 1) {
        for (std::size_t i = 0; i < n; ++i) consume(i, produce(i));
        return;
    }

    std::mutex mu;
    std::condition_variable can_buffer, can_consume;
    std::map<std::size_t, Item> ready;
    std::atomic<std::size_t> next_job{0};
    std::size_t next_consume = 0;
    std::exception_ptr failure;
    const std::size_t window = static_cast<std::size_t>(workers) * 4;

    auto worker = [&] {
        for (;;) {
            const std::size_t i = next_job.fetch_add(1, std::memory_order_relaxed);
            if (i >= n) return;
            Item item{};
            try {
                item = produce(i);
            } catch (...) {
                std::lock_guard lock(mu);
                if (!failure) failure = std::current_exception();
            }
            std::unique_lock lock(mu);
            can_buffer.wait(lock, [&] { return i < next_consume + window || failure; });
            ready.emplace(i, std::move(item));
            can_consume.notify_all();
        }
    };

    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(worker);

    {
        std::unique_lock lock(mu);
        while (next_consume < n && !failure) {
            can_consume.wait(lock, [&] { return ready.count(next_consume) != 0 || failure; });
            if (failure) break;
            Item item = std::move(ready.at(next_consume));
            const std::size_t index = next_consume;
            ready.erase(index);
            lock.unlock();
            consume(index, std::move(item));
            lock.lock();
            ++next_consume;
            can_buffer.notify_all();
        }
        // Unblock stragglers on failure.
        next_consume = n;
        can_buffer.notify_all();
    }
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
}

double risk_fraction(const MarketState& market, double threshold) {
    std::size_t below = 0;
    for (const AgentState& a : market.agents) {
        if (a.cash < threshold * a.initial_cash) ++below;
    }
    return static_cast<double>(below) / static_cast<double>(market.agents.size());
}

/// Per-path wealth-trait correlations, or nothing when a Pearson input is
/// constant (degenerate traits or flat wealth).
std::optional<std::pair<double, double>> path_wealth_trait_corr(const PathStats& path) {
    std::vector<double> greed(path.traits.size()), fear(path.traits.size());
    for (std::size_t i = 0; i < path.traits.size(); ++i) {
        greed[i] = path.traits[i].greed;
        fear[i] = path.traits[i].fear;
    }
    try {
        const double cg = pearson(path.final_wealth, greed);
        const double cf = pearson(path.final_wealth, fear);
        return std::make_pair(cg, cf);
    } catch (const ConstantInputError&) {
        return std::nullopt;
    }
}

}  // namespace

void validate(const SimulationConfig& config) {
    validate(config.population);
    validate(config.init);
    if (config.active_per_session == 0)
        throw ConfigError("simulation.active_per_session: must be >= 1");
    if (config.active_per_session > config.population.n_agents)
        throw ConfigError("simulation.active_per_session: must not exceed population.n_agents");
    if (config.sessions == 0) throw ConfigError("simulation.sessions: must be >= 1");
    if (config.n_paths == 0) throw ConfigError("simulation.n_paths: must be >= 1");
    if (!(config.risk_threshold > 0.0 && config.risk_threshold < 1.0))
        throw ConfigError("simulation.risk_threshold: must lie in (0, 1)");
    if (config.rule.equality_tolerance < 0.0)
        throw ConfigError("simulation.equality_tolerance: must be >= 0");
    if (config.wealth_bins == 0) throw ConfigError("simulation.wealth_bins: must be >= 1");
}

PathStats run_path(const SimulationConfig& config, std::size_t path_index) {
    validate(config);
    const std::uint64_t trait_index = config.resample_traits_per_path ? path_index : 0;
    Rng trait_rng(derive_seed(config.master_seed, StreamPurpose::Traits, trait_index));
    const std::vector<Trait> traits = sample_traits(config.population, trait_rng);

    Rng market_rng(derive_seed(config.master_seed, StreamPurpose::Market, path_index));
    MarketState market = init_market(config.population, config.init, traits, market_rng);

    const std::size_t days = config.sessions + 1;
    PathStats stats;
    stats.log_price.resize(days);
    stats.log_return.resize(days);
    stats.risk_proxy.resize(days);
    stats.log_price[0] = 0.0;
    stats.log_return[0] = 0.0;
    stats.risk_proxy[0] = risk_fraction(market, config.risk_threshold);

    std::vector<std::size_t> pool(config.population.n_agents);
    std::iota(pool.begin(), pool.end(), std::size_t{0});

    double cumulative_log_price = 0.0;
    for (std::size_t t = 1; t <= config.sessions; ++t) {
        draw_active_set(market_rng, pool, config.active_per_session);
        const std::span<const std::size_t> active(pool.data(), config.active_per_session);
        const double gross_return = trading_session(market, active, config.rule);
        const double log_return = std::log(gross_return);
        cumulative_log_price += log_return;
        stats.log_return[t] = log_return;
        stats.log_price[t] = cumulative_log_price;
        stats.risk_proxy[t] = risk_fraction(market, config.risk_threshold);
    }

    stats.final_wealth.resize(market.agents.size());
    for (std::size_t i = 0; i < market.agents.size(); ++i)
        stats.final_wealth[i] = market.agents[i].cash;
    stats.traits = traits;
    return stats;
}

std::vector<PathStats> run_paths(const SimulationConfig& config, unsigned n_workers) {
    validate(config);
    std::vector<PathStats> all(config.n_paths);
    ordered_parallel_for<PathStats>(
        config.n_paths, n_workers, [&](std::size_t i) { return run_path(config, i); },
        [&](std::size_t i, PathStats&& stats) { all[i] = std::move(stats); });
    return all;
}

std::vector<double> homogeneous_prediction(double mean_greed, double mean_fear,
                                           std::size_t n_agents, std::size_t active_per_session,
                                           std::size_t horizon) {
    if (!(mean_greed >= 1.0 && mean_fear >= 1.0))
        throw Error("homogeneous_prediction: greed and fear levels must be >= 1");
    if (n_agents == 0 || active_per_session == 0)
        throw Error("homogeneous_prediction: empty market");
    const double gamma =
        2.0 * static_cast<double>(n_agents) / static_cast<double>(active_per_session);
    const double slope = (std::log(mean_greed) - std::log(mean_fear)) / gamma;
    std::vector<double> prediction(horizon + 1);
    for (std::size_t t = 0; t <= horizon; ++t)
        prediction[t] = slope * static_cast<double>(t);
    return prediction;
}

std::pair<double, double> wealth_trait_correlation(std::span<const PathStats> paths) {
    if (paths.empty()) throw Error("wealth_trait_correlation: no paths");
    double sum_greed = 0.0, sum_fear = 0.0;
    std::size_t n_valid = 0;
    for (const PathStats& path : paths) {
        if (const auto corr = path_wealth_trait_corr(path)) {
            sum_greed += corr->first;
            sum_fear += corr->second;
            ++n_valid;
        }
    }
    if (n_valid == 0) throw DegenerateTraitsError();
    const double n = static_cast<double>(n_valid);
    return {sum_greed / n, sum_fear / n};
}

EnsembleStats run_ensemble(const SimulationConfig& config, unsigned n_workers) {
    validate(config);
    const std::size_t days = config.sessions + 1;

    struct PathResult {
        std::optional<PathStats> stats;
        std::string error;
    };

    std::vector<double> sum_log_price(days, 0.0);
    std::vector<double> sum_log_return(days, 0.0);
    std::vector<double> sum_sq_log_return(days, 0.0);
    std::vector<double> sum_risk(days, 0.0);
    const double bin_width = 2.0 * config.init.initial_cash / static_cast<double>(config.wealth_bins);
    std::vector<std::uint64_t> bin_counts(config.wealth_bins + 1, 0);  // last bin overflows
    double sum_corr_greed = 0.0, sum_corr_fear = 0.0;
    std::size_t n_corr = 0;
    std::size_t completed = 0, aborted = 0;
    std::string first_error;

    ordered_parallel_for<PathResult>(
        config.n_paths, n_workers,
        [&](std::size_t i) -> PathResult {
            try {
                return {run_path(config, i), {}};
            } catch (const Error& e) {
                return {std::nullopt, e.what()};
            }
        },
        [&](std::size_t, PathResult&& result) {
            if (!result.stats) {
                ++aborted;
                if (first_error.empty()) first_error = result.error;
                return;
            }
            const PathStats& path = *result.stats;
            for (std::size_t t = 0; t < days; ++t) {
                sum_log_price[t] += path.log_price[t];
                sum_log_return[t] += path.log_return[t];
                sum_sq_log_return[t] += path.log_return[t] * path.log_return[t];
                sum_risk[t] += path.risk_proxy[t];
            }
            for (double wealth : path.final_wealth) {
                const double pos = wealth / bin_width;
                const std::size_t bin = pos >= static_cast<double>(config.wealth_bins)
                                            ? config.wealth_bins
                                            : static_cast<std::size_t>(pos);
                ++bin_counts[bin];
            }
            if (const auto corr = path_wealth_trait_corr(path)) {
                sum_corr_greed += corr->first;
                sum_corr_fear += corr->second;
                ++n_corr;
            }
            ++completed;
        });

    if (completed == 0)
        throw Error("run_ensemble: all " + std::to_string(config.n_paths) +
                    " paths aborted; first error: " + first_error);

    EnsembleStats stats;
    stats.completed_paths = completed;
    stats.aborted_paths = aborted;
    const double n = static_cast<double>(completed);
    stats.mean_log_price.resize(days);
    stats.std_log_return.resize(days);
    stats.mean_risk_proxy.resize(days);
    for (std::size_t t = 0; t < days; ++t) {
        stats.mean_log_price[t] = sum_log_price[t] / n;
        stats.mean_risk_proxy[t] = sum_risk[t] / n;
        if (completed < 2) {
            stats.std_log_return[t] = 0.0;
        } else {
            const double variance = (sum_sq_log_return[t] -
                                     sum_log_return[t] * sum_log_return[t] / n) /
                                    (n - 1.0);
            stats.std_log_return[t] = std::sqrt(std::max(0.0, variance));
        }
    }

    const double total = n * static_cast<double>(config.population.n_agents);
    stats.wealth_histogram.resize(config.wealth_bins + 1);
    for (std::size_t b = 0; b <= config.wealth_bins; ++b) {
        HistogramBin& bin = stats.wealth_histogram[b];
        bin.lo = bin_width * static_cast<double>(b);
        bin.hi = b == config.wealth_bins ? std::numeric_limits<double>::infinity()
                                         : bin_width * static_cast<double>(b + 1);
        bin.fraction = static_cast<double>(bin_counts[b]) / total;
    }

    if (n_corr > 0) {
        stats.corr_wealth_greed = sum_corr_greed / static_cast<double>(n_corr);
        stats.corr_wealth_fear = sum_corr_fear / static_cast<double>(n_corr);
    }

    const double mean_greed = std::exp(config.population.mean_ln_greed);
    const double mean_fear = std::exp(config.population.mean_ln_fear);
    if (mean_greed >= 1.0 && mean_fear >= 1.0) {
        stats.predicted_log_price =
            homogeneous_prediction(mean_greed, mean_fear, config.population.n_agents,
                                   config.active_per_session, config.sessions);
    } else {
        stats.predicted_log_price.assign(days, std::numeric_limits<double>::quiet_NaN());
    }
    return stats;
}

}  // namespace aspp
