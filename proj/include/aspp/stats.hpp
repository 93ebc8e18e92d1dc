#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>

#include "aspp/errors.hpp"

namespace aspp {

inline double mean(std::span<const double> xs) {
    if (xs.empty()) return 0.0;
    double s = 0.0;
    for (double x : xs) s += x;
    return s / static_cast<double>(xs.size());
}

/// Unbiased (n-1) sample variance; 0 for fewer than two observations.
inline double sample_variance(std::span<const double> xs) {
    const std::size_t n = xs.size();
    if (n < 2) return 0.0;
    const double m = mean(xs);
    double ss = 0.0;
    for (double x : xs) {
        const double d = x - m;
        ss += d * d;
    }
    return ss / static_cast<double>(n - 1);
}

inline double sample_std(std::span<const double> xs) {
    return std::sqrt(sample_variance(xs));
}

/// Sample Pearson correlation, clamped to [-1, 1].
inline double pearson(std::span<const double> xs, std::span<const double> ys) {
    if (xs.size() != ys.size()) throw Error("pearson: input lengths differ");
    if (xs.size() < 2) throw Error("pearson: need at least two observations");
    const double mx = mean(xs);
    const double my = mean(ys);
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double dx = xs[i] - mx;
        const double dy = ys[i] - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (sxx == 0.0) throw ConstantInputError("pearson: first input is constant");
    if (syy == 0.0) throw ConstantInputError("pearson: second input is constant");
    return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

/// Moment-based skewness (population normalization).
inline double skewness(std::span<const double> xs) {
    if (xs.size() < 2) throw Error("skewness: need at least two observations");
    const double m = mean(xs);
    double m2 = 0.0, m3 = 0.0;
    for (double x : xs) {
        const double d = x - m;
        m2 += d * d;
        m3 += d * d * d;
    }
    const double n = static_cast<double>(xs.size());
    m2 /= n;
    m3 /= n;
    if (m2 == 0.0) throw ConstantInputError("skewness: input is constant");
    return m3 / std::pow(m2, 1.5);
}

/// Moment-based excess kurtosis (population normalization).
inline double excess_kurtosis(std::span<const double> xs) {
    if (xs.size() < 2) throw Error("kurtosis: need at least two observations");
    const double m = mean(xs);
    double m2 = 0.0, m4 = 0.0;
    for (double x : xs) {
        const double d = x - m;
        const double d2 = d * d;
        m2 += d2;
        m4 += d2 * d2;
    }
    const double n = static_cast<double>(xs.size());
    m2 /= n;
    m4 /= n;
    if (m2 == 0.0) throw ConstantInputError("kurtosis: input is constant");
    return m4 / (m2 * m2) - 3.0;
}

}  // namespace aspp
