#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace aspp {

/// One trader. Stock holdings are share counts; the dollar stock value is
/// always shares * current price, which keeps share conservation exact.
struct AgentState {
    double shares = 0.0;        ///< non-negative share count
    double cash = 0.0;          ///< bond/cash account, stays positive by construction
    double target_ratio = 1.0;  ///< desired stock-value/cash ratio k
    double greed = 1.0;         ///< target multiplier after outperforming (alpha)
    double fear = 1.0;          ///< target divisor after underperforming (beta)
    double initial_cash = 0.0;  ///< cash at day 0, frozen for risk accounting
};

struct MarketState {
    std::vector<AgentState> agents;
    double price = 1.0;              ///< dollars per share
    std::int64_t session_index = 0;  ///< trading day counter

    double total_cash() const;
    double total_shares() const;
};

/// How active agents adapt their target ratios after a session.
struct UpdateRule {
    enum class Kind {
        Multiplicative,  ///< k -> alpha*k or k/beta
        Proportional,    ///< k -> (1+alpha|x|)*k or k/(1+beta|x|)
    };
    Kind kind = Kind::Multiplicative;
    /// Relative half-width of the "ratio equals target" band. Exact float
    /// equality is measure-zero, so the hold branch needs a band to be reachable.
    double equality_tolerance = 1e-12;
};

struct ClearingOutcome {
    double gross_return = 1.0;   ///< R = P/P0
    std::vector<double> trades;  ///< dollar amount per active agent, positive buys stock
};

/// Gross return R = P/P0 that clears the active agents' desired trades:
///   R = (sum k*b/(1+k)) / (sum n*P0/(1+k)).
/// Requires a non-empty active set holding some stock in aggregate.
double clearing_return(std::span<const std::size_t> active, const MarketState& market);

/// Dollar amount each active agent moves into stock at gross return R:
///   x = (k*b - R*n*P0) / (1+k).
/// By construction of R the amounts sum to zero up to rounding.
std::vector<double> trade_amounts(std::span<const std::size_t> active, const MarketState& market,
                                  double gross_return);

ClearingOutcome clear_session(std::span<const std::size_t> active, const MarketState& market);

/// Moves the traded dollars between cash and stock accounts at the new price
/// P = R*P0, sets the market price, and advances the session counter. Every
/// active agent leaves with stock-value/cash equal to its current target.
void apply_trades(MarketState& market, std::span<const std::size_t> active, double gross_return,
                  std::span<const double> trades);

/// New target ratio for one agent. The comparison uses the pre-trade portfolio
/// revalued at the new price: rho = R*shares*pre_price/cash. `trade` is the
/// agent's dollar amount x and only enters the proportional rule.
double update_target(const AgentState& agent, double pre_price, double gross_return, double trade,
                     const UpdateRule& rule);

/// One full trading day: clear, compute trades, evaluate target updates on the
/// pre-trade state, re-balance. Returns the gross return.
double trading_session(MarketState& market, std::span<const std::size_t> active,
                       const UpdateRule& rule);

}  // namespace aspp
