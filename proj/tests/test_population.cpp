#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numeric>

#include "aspp/errors.hpp"
#include "aspp/market.hpp"
#include "aspp/population.hpp"
#include "aspp/stats.hpp"

using namespace aspp;

namespace {

PopulationSpec paper_defaults(double correlation) {
    PopulationSpec spec;
    spec.n_agents = 500;
    spec.mean_ln_greed = 1.2;
    spec.mean_ln_fear = 1.04;
    spec.var_ln_greed = 1.7e-4;
    spec.var_ln_fear = 1.7e-4;
    spec.trait_correlation = correlation;
    return spec;
}

}  // namespace

TEST_CASE("zero variance collapses to the exact means") {
    PopulationSpec spec = paper_defaults(0.0);
    spec.var_ln_greed = 0.0;
    spec.var_ln_fear = 0.0;
    Rng rng(1);
    const auto traits = sample_traits(spec, rng);
    REQUIRE(traits.size() == 500);
    for (const Trait& t : traits) {
        CHECK(t.greed == std::exp(1.2));
        CHECK(t.fear == std::exp(1.04));
    }
}

TEST_CASE("perfect correlation forces a common deviation") {
    Rng rng(2);
    const auto traits = sample_traits(paper_defaults(1.0), rng);
    const double diff = 1.2 - 1.04;
    for (const Trait& t : traits) {
        CHECK(std::log(t.greed) - std::log(t.fear) == doctest::Approx(diff).epsilon(1e-10));
    }

    Rng rng2(3);
    const auto anti = sample_traits(paper_defaults(-1.0), rng2);
    const double total = 1.2 + 1.04;
    for (const Trait& t : anti) {
        CHECK(std::log(t.greed) + std::log(t.fear) == doctest::Approx(total).epsilon(1e-10));
    }
}

TEST_CASE("sample moments converge to the spec") {
    PopulationSpec spec = paper_defaults(0.5);
    spec.n_agents = 100000;
    Rng rng(4);
    const auto traits = sample_traits(spec, rng);

    std::vector<double> ln_greed(traits.size()), ln_fear(traits.size());
    for (std::size_t i = 0; i < traits.size(); ++i) {
        ln_greed[i] = std::log(traits[i].greed);
        ln_fear[i] = std::log(traits[i].fear);
    }
    const double sd = std::sqrt(1.7e-4);
    const double se = sd / std::sqrt(static_cast<double>(traits.size()));
    CHECK(std::abs(mean(ln_greed) - 1.2) < 3.0 * se);
    CHECK(std::abs(mean(ln_fear) - 1.04) < 3.0 * se);
    CHECK(std::abs(pearson(ln_greed, ln_fear) - 0.5) < 0.02);
    CHECK(sample_std(ln_greed) == doctest::Approx(sd).epsilon(0.02));
}

TEST_CASE("truncation keeps both log-traits non-negative") {
    PopulationSpec spec;
    spec.n_agents = 20000;
    spec.mean_ln_greed = 0.005;
    spec.mean_ln_fear = 0.01;
    spec.var_ln_greed = 1e-4;
    spec.var_ln_fear = 1e-4;
    spec.trait_correlation = -0.4;
    Rng rng(5);
    for (const Trait& t : sample_traits(spec, rng)) {
        REQUIRE(t.greed >= 1.0);
        REQUIRE(t.fear >= 1.0);
    }
    CHECK_FALSE(population_warnings(spec).empty());
    CHECK(population_warnings(paper_defaults(0.0)).empty());
}

TEST_CASE("an unreachable region stalls with an error") {
    PopulationSpec spec = paper_defaults(0.0);
    spec.mean_ln_greed = -1.0;
    spec.var_ln_greed = 0.0;
    spec.var_ln_fear = 0.0;
    Rng rng(6);
    CHECK_THROWS_AS(sample_traits(spec, rng), RejectionStallError);
}

TEST_CASE("invalid specs are rejected with field paths") {
    Rng rng(7);
    PopulationSpec bad = paper_defaults(1.5);
    CHECK_THROWS_AS(sample_traits(bad, rng), ConfigError);
    bad = paper_defaults(0.0);
    bad.var_ln_fear = -1.0;
    CHECK_THROWS_WITH_AS(sample_traits(bad, rng), "population.var_ln_fear: must be >= 0",
                         ConfigError);
}

TEST_CASE("sampling and initialization are deterministic in the seed") {
    const PopulationSpec spec = paper_defaults(-0.5);
    Rng rng_a(42), rng_b(42);
    const auto traits_a = sample_traits(spec, rng_a);
    const auto traits_b = sample_traits(spec, rng_b);
    REQUIRE(traits_a.size() == traits_b.size());
    for (std::size_t i = 0; i < traits_a.size(); ++i) {
        CHECK(traits_a[i].greed == traits_b[i].greed);
        CHECK(traits_a[i].fear == traits_b[i].fear);
    }

    const InitSpec init;
    Rng init_a(43), init_b(43);
    const MarketState ma = init_market(spec, init, traits_a, init_a);
    const MarketState mb = init_market(spec, init, traits_b, init_b);
    for (std::size_t i = 0; i < ma.agents.size(); ++i) {
        CHECK(ma.agents[i].shares == mb.agents[i].shares);
        CHECK(ma.agents[i].cash == mb.agents[i].cash);
    }
}

TEST_CASE("initial market matches the configured start") {
    const PopulationSpec spec = paper_defaults(0.5);
    const InitSpec init;  // $10 cash, k = 1, noise 0.1, price 1
    Rng rng(8);
    const auto traits = sample_traits(spec, rng);
    const MarketState m = init_market(spec, init, traits, rng);

    REQUIRE(m.agents.size() == 500);
    CHECK(m.price == 1.0);
    CHECK(m.session_index == 0);
    CHECK(m.total_cash() == 10.0 * 500);
    for (const AgentState& a : m.agents) {
        CHECK(a.cash == 10.0);
        CHECK(a.initial_cash == 10.0);
        CHECK(a.target_ratio == 1.0);
        const double stock_value = a.shares * m.price;
        CHECK(stock_value >= 9.9);
        CHECK(stock_value <= 10.1);
    }
}

TEST_CASE("noise-free start is an equilibrium for the first session") {
    const PopulationSpec spec = paper_defaults(0.5);
    InitSpec init;
    init.noise_amplitude = 0.0;
    Rng rng(9);
    const auto traits = sample_traits(spec, rng);
    MarketState m = init_market(spec, init, traits, rng);

    std::vector<std::size_t> active(20);
    std::iota(active.begin(), active.end(), std::size_t{0});
    CHECK(trading_session(m, active, UpdateRule{}) == 1.0);
    CHECK(m.price == 1.0);
}

TEST_CASE("init spec invariants are enforced") {
    const PopulationSpec spec = paper_defaults(0.0);
    const auto traits = [&] {
        Rng rng(10);
        return sample_traits(spec, rng);
    }();
    Rng rng(11);

    InitSpec bad;
    bad.noise_amplitude = 10.0;  // == initial_cash * target, must be strictly below
    CHECK_THROWS_AS(init_market(spec, bad, traits, rng), ConfigError);
    bad = InitSpec{};
    bad.initial_cash = 0.0;
    CHECK_THROWS_AS(init_market(spec, bad, traits, rng), ConfigError);
    bad = InitSpec{};
    bad.initial_price = -1.0;
    CHECK_THROWS_AS(init_market(spec, bad, traits, rng), ConfigError);
}
