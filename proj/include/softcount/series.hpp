#pragma once

#include <cmath>
#include <cstddef>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "softcount/distributions.hpp"
#include "softcount/error.hpp"

namespace softcount {

/// Ordered non-negative integer observations, optionally timestamped.
struct CountSeries {
    std::vector<Count> values;
    std::vector<std::string> timestamps;  // empty, or one per value

    CountSeries() = default;
    CountSeries(std::vector<Count> v) : values(std::move(v)) {}  // NOLINT: implicit by intent
    CountSeries(std::initializer_list<Count> v) : values(v) {}

    std::size_t size() const noexcept { return values.size(); }
    bool empty() const noexcept { return values.empty(); }
    Count operator[](std::size_t i) const { return values[i]; }

    std::vector<double> as_real() const { return {values.begin(), values.end()}; }

    bool operator==(const CountSeries&) const = default;
};

inline double sample_mean(std::span<const double> y) {
    if (y.empty()) throw DomainError("sample_mean: empty series");
    return std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(y.size());
}

/// Sample variance with divisor s - 1.
inline double sample_variance(std::span<const double> y) {
    if (y.size() < 2) throw DomainError("sample_variance: need at least two observations");
    const double m = sample_mean(y);
    double ss = 0.0;
    for (double v : y) ss += (v - m) * (v - m);
    return ss / static_cast<double>(y.size() - 1);
}

inline double sample_mean(const CountSeries& s) { return sample_mean(s.as_real()); }

/**
 * Sample autocorrelations at lags 1..max_lag using the divisor-N
 * autocovariance: sum_t (y_t - m)(y_{t+h} - m) / sum_t (y_t - m)^2.
 */
inline std::vector<double> sample_acf(std::span<const double> y, std::size_t max_lag) {
    if (max_lag < 1) throw DomainError("sample_acf: max_lag must be >= 1");
    if (y.size() <= max_lag) throw DomainError("sample_acf: series must be longer than max_lag");
    const double m = sample_mean(y);
    double denom = 0.0;
    for (double v : y) denom += (v - m) * (v - m);
    if (!(denom > 0.0)) throw DomainError("sample_acf: series has zero variance");
    std::vector<double> acf(max_lag);
    for (std::size_t h = 1; h <= max_lag; ++h) {
        double num = 0.0;
        for (std::size_t t = 0; t + h < y.size(); ++t) num += (y[t] - m) * (y[t + h] - m);
        acf[h - 1] = num / denom;
    }
    return acf;
}

/// Pre-sample fill value for observation and mean lags: the sample mean, floored at 1e-4.
inline double presample_value(const CountSeries& s) {
    if (s.empty()) throw DomainError("series is empty");
    return std::max(sample_mean(s), 1e-4);
}

}  // namespace softcount
