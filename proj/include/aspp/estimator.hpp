#pragma once

#include <chrono>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace aspp {

/// Daily closing prices, strictly ordered by calendar date.
struct PriceSeries {
    std::vector<std::chrono::sys_days> dates;
    std::vector<double> closes;
};

/// Rolling mean and standard deviation of daily log returns over a window of
/// tau observations; entry t covers the returns of days t+1..t+tau.
struct RollingStats {
    std::size_t window = 0;
    std::vector<double> mean_log_return;  ///< ln r(t)
    std::vector<double> vol;              ///< sigma(t) >= 0
};

/// Estimation output at one gamma. When `error` is non-empty the point is
/// flagged and the numeric fields are unset.
struct EstimatePoint {
    double gamma = 0.0;
    double c0 = 0.0;
    std::vector<double> ln_alpha_tilde;
    std::vector<double> ln_beta_tilde;
    double rho = 0.0;  ///< correlation of ln_alpha_tilde and ln_beta_tilde
    std::optional<double> cv_ln_alpha;  ///< std/|mean|, absent when the mean is ~0
    std::optional<double> cv_ln_beta;
    std::string error;

    bool ok() const { return error.empty(); }
};

/// Rolling statistics over consecutive observations:
///   ln r(t)   = tau^-1 sum_{k=1..tau} ln(P(t+k)/P(t+k-1))
///   sigma^2(t) = (tau-1)^-1 sum_{k=1..tau} [ln(P(t+k)/P(t+k-1)) - ln r(t)]^2
/// Output length is closes.size() - tau; requires tau >= 2 and at least tau+2
/// observations.
RollingStats rolling_stats(const PriceSeries& series, std::size_t window);

/// Inverts the return/volatility laws at one day:
///   ln a = (gamma/2) ln r + (1/2) ln((sigma+c0)/c0)
///   ln b = -(gamma/2) ln r + (1/2) ln((sigma+c0)/c0)
/// The recovered values may be negative; they carry no positivity constraint.
std::pair<double, double> invert_traits(double ln_r, double sigma, double gamma, double c0);

/// Picks c0 > 0 so the two terms of invert_traits vary on the same scale:
///   std_t[(1/2) ln((sigma(t)+c0)/c0)] = std_t[(gamma/2) ln r(t)],
/// solved by bisection on ln c0 after bracket expansion; the residual satisfies
/// |ratio - 1| < 1e-6. The left side is strictly decreasing in c0, so the
/// solution is unique when it exists.
double calibrate_c0(const RollingStats& stats, double gamma);

/// Full curve over a gamma grid: per gamma, calibrate c0 (unless fixed_c0 is
/// given), invert every day, and compute rho and both coefficients of
/// variation. Calibration failures flag the point; the curve continues.
std::vector<EstimatePoint> correlation_curve(const PriceSeries& series, std::size_t window,
                                             std::span<const double> gamma_grid,
                                             std::optional<double> fixed_c0 = std::nullopt);

}  // namespace aspp
