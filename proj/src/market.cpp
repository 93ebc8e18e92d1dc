#include "aspp/market.hpp"

#include <cmath>

#include "aspp/errors.hpp"

namespace aspp {

double MarketState::total_cash() const {
    double s = 0.0;
    for (const auto& a : agents) s += a.cash;
    return s;
}

double MarketState::total_shares() const {
    double s = 0.0;
    for (const auto& a : agents) s += a.shares;
    return s;
}

double clearing_return(std::span<const std::size_t> active, const MarketState& market) {
    if (active.empty()) throw EmptyActiveSetError();
    double demand = 0.0;  // sum k*b/(1+k)
    double supply = 0.0;  // sum n*P0/(1+k)
    for (std::size_t idx : active) {
        const AgentState& a = market.agents[idx];
        const double w = 1.0 + a.target_ratio;
        demand += a.target_ratio * a.cash / w;
        supply += a.shares * market.price / w;
    }
    if (supply == 0.0) throw AllStockZeroError();
    return demand / supply;
}

std::vector<double> trade_amounts(std::span<const std::size_t> active, const MarketState& market,
                                  double gross_return) {
    std::vector<double> trades(active.size());
    for (std::size_t l = 0; l < active.size(); ++l) {
        const AgentState& a = market.agents[active[l]];
        trades[l] = (a.target_ratio * a.cash - gross_return * a.shares * market.price) /
                    (1.0 + a.target_ratio);
    }
    return trades;
}

ClearingOutcome clear_session(std::span<const std::size_t> active, const MarketState& market) {
    ClearingOutcome out;
    out.gross_return = clearing_return(active, market);
    out.trades = trade_amounts(active, market, out.gross_return);
    return out;
}

void apply_trades(MarketState& market, std::span<const std::size_t> active, double gross_return,
                  std::span<const double> trades) {
    const double new_price = gross_return * market.price;
    for (std::size_t l = 0; l < active.size(); ++l) {
        AgentState& a = market.agents[active[l]];
        a.cash -= trades[l];
        a.shares += trades[l] / new_price;
    }
    market.price = new_price;
    ++market.session_index;
}

double update_target(const AgentState& agent, double pre_price, double gross_return, double trade,
                     const UpdateRule& rule) {
    const double k = agent.target_ratio;
    const double ratio = gross_return * agent.shares * pre_price / agent.cash;
    const double band = rule.equality_tolerance * k;
    if (ratio > k + band) {
        return rule.kind == UpdateRule::Kind::Multiplicative
                   ? agent.greed * k
                   : (1.0 + agent.greed * std::abs(trade)) * k;
    }
    if (ratio < k - band) {
        return rule.kind == UpdateRule::Kind::Multiplicative
                   ? k / agent.fear
                   : k / (1.0 + agent.fear * std::abs(trade));
    }
    return k;
}

double trading_session(MarketState& market, std::span<const std::size_t> active,
                       const UpdateRule& rule) {
    const double pre_price = market.price;
    const double gross_return = clearing_return(active, market);
    const std::vector<double> trades = trade_amounts(active, market, gross_return);

    // Target updates see the pre-trade portfolios; they are stored only after
    // the re-balance so apply_trades works against the targets that cleared.
    std::vector<double> new_targets(active.size());
    for (std::size_t l = 0; l < active.size(); ++l) {
        new_targets[l] =
            update_target(market.agents[active[l]], pre_price, gross_return, trades[l], rule);
    }

    apply_trades(market, active, gross_return, trades);
    for (std::size_t l = 0; l < active.size(); ++l) {
        market.agents[active[l]].target_ratio = new_targets[l];
    }
    return gross_return;
}

}  // namespace aspp
