#include "aspp/estimator.hpp"

#include <cmath>

#include "aspp/errors.hpp"
#include "aspp/stats.hpp"

namespace aspp {

RollingStats rolling_stats(const PriceSeries& series, std::size_t window) {
    if (window < 2) throw Error("rolling_stats: window must be >= 2");
    const std::size_t n = series.closes.size();
    if (n < window + 2) throw SeriesTooShortError(n, window + 2);
    for (double close : series.closes) {
        if (!(close > 0.0)) throw Error("rolling_stats: closes must be positive");
    }

    std::vector<double> log_returns(n - 1);
    for (std::size_t t = 0; t + 1 < n; ++t)
        log_returns[t] = std::log(series.closes[t + 1] / series.closes[t]);

    RollingStats stats;
    stats.window = window;
    const std::size_t n_windows = n - window;
    stats.mean_log_return.resize(n_windows);
    stats.vol.resize(n_windows);
    const double tau = static_cast<double>(window);
    for (std::size_t t = 0; t < n_windows; ++t) {
        double sum = 0.0;
        for (std::size_t k = 0; k < window; ++k) sum += log_returns[t + k];
        const double m = sum / tau;
        double ss = 0.0;
        for (std::size_t k = 0; k < window; ++k) {
            const double d = log_returns[t + k] - m;
            ss += d * d;
        }
        stats.mean_log_return[t] = m;
        stats.vol[t] = std::sqrt(ss / (tau - 1.0));
    }
    return stats;
}

std::pair<double, double> invert_traits(double ln_r, double sigma, double gamma, double c0) {
    if (!(sigma >= 0.0)) throw Error("invert_traits: sigma must be >= 0");
    if (!(c0 > 0.0)) throw Error("invert_traits: c0 must be > 0");
    if (!(gamma > 0.0)) throw Error("invert_traits: gamma must be > 0");
    const double drift = 0.5 * gamma * ln_r;
    const double spread = 0.5 * std::log1p(sigma / c0);
    return {drift + spread, -drift + spread};
}

double calibrate_c0(const RollingStats& stats, double gamma) {
    if (!(gamma > 0.0)) throw Error("calibrate_c0: gamma must be > 0");
    const double std_ln_r = sample_std(stats.mean_log_return);
    const double std_vol = sample_std(stats.vol);
    if (std_ln_r == 0.0)
        throw CalibrationError(CalibrationError::Kind::ConstantReturns,
                               "calibrate_c0: rolling mean log return is constant");
    if (std_vol == 0.0)
        throw CalibrationError(CalibrationError::Kind::ConstantVolatility,
                               "calibrate_c0: rolling volatility is constant");

    const double target = 0.5 * gamma * std_ln_r;
    std::vector<double> spread(stats.vol.size());
    auto spread_std = [&](double c0) {
        for (std::size_t t = 0; t < stats.vol.size(); ++t)
            spread[t] = 0.5 * std::log1p(stats.vol[t] / c0);
        return sample_std(spread);
    };

    // The spread std decreases monotonically in c0, vanishing as c0 -> inf and
    // saturating at std_t[(1/2) ln sigma(t)] as c0 -> 0 when all sigma(t) > 0.
    double c_hi = 1.0;
    while (spread_std(c_hi) > target) c_hi *= 4.0;
    double c_lo = c_hi;
    while (spread_std(c_lo) < target) {
        c_lo *= 0.25;
        if (c_lo < 1e-280)
            throw CalibrationError(
                CalibrationError::Kind::BracketFailure,
                "calibrate_c0: target spread exceeds the attainable supremum; gamma too large "
                "for this series");
    }

    double u_lo = std::log(c_lo);
    double u_hi = std::log(c_hi);
    for (int iteration = 0; iteration < 300; ++iteration) {
        const double u_mid = 0.5 * (u_lo + u_hi);
        const double c_mid = std::exp(u_mid);
        const double value = spread_std(c_mid);
        if (std::abs(value / target - 1.0) < 1e-6) return c_mid;
        if (value > target) {
            u_lo = u_mid;
        } else {
            u_hi = u_mid;
        }
    }
    throw CalibrationError(CalibrationError::Kind::BracketFailure,
                           "calibrate_c0: bisection failed to reach the residual tolerance");
}

std::vector<EstimatePoint> correlation_curve(const PriceSeries& series, std::size_t window,
                                             std::span<const double> gamma_grid,
                                             std::optional<double> fixed_c0) {
    if (gamma_grid.empty()) throw Error("correlation_curve: empty gamma grid");
    const RollingStats stats = rolling_stats(series, window);
    const std::size_t n = stats.mean_log_return.size();

    std::vector<EstimatePoint> curve;
    curve.reserve(gamma_grid.size());
    for (double gamma : gamma_grid) {
        EstimatePoint point;
        point.gamma = gamma;
        try {
            point.c0 = fixed_c0 ? *fixed_c0 : calibrate_c0(stats, gamma);
            if (!(point.c0 > 0.0)) throw Error("correlation_curve: c0 must be > 0");
            point.ln_alpha_tilde.resize(n);
            point.ln_beta_tilde.resize(n);
            for (std::size_t t = 0; t < n; ++t) {
                const auto [a, b] =
                    invert_traits(stats.mean_log_return[t], stats.vol[t], gamma, point.c0);
                point.ln_alpha_tilde[t] = a;
                point.ln_beta_tilde[t] = b;
            }
            point.rho = pearson(point.ln_alpha_tilde, point.ln_beta_tilde);
            const double mean_a = mean(point.ln_alpha_tilde);
            const double mean_b = mean(point.ln_beta_tilde);
            if (std::abs(mean_a) >= 1e-12)
                point.cv_ln_alpha = sample_std(point.ln_alpha_tilde) / std::abs(mean_a);
            if (std::abs(mean_b) >= 1e-12)
                point.cv_ln_beta = sample_std(point.ln_beta_tilde) / std::abs(mean_b);
        } catch (const CalibrationError& e) {
            point = EstimatePoint{};
            point.gamma = gamma;
            point.error = e.kind_name();
        } catch (const Error& e) {
            point = EstimatePoint{};
            point.gamma = gamma;
            point.error = e.what();
        }
        curve.push_back(std::move(point));
    }
    return curve;
}

}  // namespace aspp
