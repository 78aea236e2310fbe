#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <span>
#include <variant>
#include <vector>

#include "softcount/error.hpp"
#include "softcount/fit_result.hpp"
#include "softcount/model.hpp"
#include "softcount/neural.hpp"
#include "softcount/series.hpp"

namespace softcount {

struct ResidualSeries {
    std::vector<double> values;
    Family family = Family::Poisson;
    ModelSpec spec;
};

/// Pearson residuals (x_t - lambda_t) / sqrt(v_t), v_t = lambda_t or lambda_t (1 + lambda_t / n).
inline std::vector<double> pearson_residuals(std::span<const Count> x, std::span<const double> lambda, Family family,
                                             double n) {
    if (x.size() != lambda.size()) throw DomainError("pearson_residuals: series and mean path lengths differ");
    std::vector<double> z(x.size());
    for (std::size_t t = 0; t < x.size(); ++t) {
        const double l = lambda[t];
        if (!(l > 0.0)) throw NumericError("pearson_residuals: non-positive conditional mean", t);
        const double v = family == Family::NegBin ? l * (1.0 + l / n) : l;
        z[t] = (static_cast<double>(x[t]) - l) / std::sqrt(v);
    }
    return z;
}

inline ResidualSeries pearson_residuals(const FitResult& fit, const CountSeries& series) {
    ResidualSeries r;
    r.family = fit.spec.family;
    r.spec = fit.spec;
    r.values = pearson_residuals(series.values, fit.lambda_path, fit.spec.family, fit.dispersion());
    return r;
}

/// Partial autocorrelations from autocorrelations rho(1..H) via Durbin-Levinson.
inline std::vector<double> pacf_from_acf(std::span<const double> acf) {
    const std::size_t H = acf.size();
    std::vector<double> pacf(H), phi(H + 1, 0.0), prev(H + 1, 0.0);
    double v = 1.0;
    for (std::size_t k = 1; k <= H; ++k) {
        double num = acf[k - 1];
        for (std::size_t j = 1; j < k; ++j) num -= prev[j] * acf[k - j - 1];
        if (!(v > 0.0)) throw NumericError("pacf: prediction variance vanished", k);
        const double a = num / v;
        phi[k] = a;
        for (std::size_t j = 1; j < k; ++j) phi[j] = prev[j] - a * prev[k - j];
        v *= 1.0 - a * a;
        pacf[k - 1] = a;
        prev = phi;
    }
    return pacf;
}

inline std::vector<double> sample_pacf(std::span<const double> y, std::size_t max_lag) {
    return pacf_from_acf(sample_acf(y, max_lag));
}

/// Autocorrelations at lags period, 2 period, ..., seasons * period.
inline std::vector<double> seasonal_acf(std::span<const double> y, std::size_t period, std::size_t seasons) {
    if (period < 1 || seasons < 1) throw DomainError("seasonal_acf: period and seasons must be >= 1");
    const auto acf = sample_acf(y, period * seasons);
    std::vector<double> out(seasons);
    for (std::size_t k = 1; k <= seasons; ++k) out[k - 1] = acf[k * period - 1];
    return out;
}

struct CumulativePeriodogram {
    std::vector<double> frequencies;  // j / s, j = 1..m
    std::vector<double> cumulative;   // normalized cumulative periodogram
    double band = 0.0;                // 5% Kolmogorov-Smirnov half-width 1.36 / sqrt(m)

    /// max_j |C_j - j/m|
    double max_deviation() const {
        const double m = static_cast<double>(cumulative.size());
        double d = 0.0;
        for (std::size_t j = 0; j < cumulative.size(); ++j)
            d = std::max(d, std::abs(cumulative[j] - static_cast<double>(j + 1) / m));
        return d;
    }
    bool within_band() const { return max_deviation() < band; }
};

/**
 * Periodogram ordinates I(f_j) = |sum_t y_t exp(-2 pi i j t / s)|^2 / s at the
 * Fourier frequencies j = 1..floor((s-1)/2), accumulated and normalized.
 */
inline CumulativePeriodogram cumulative_periodogram(std::span<const double> y) {
    const std::size_t s = y.size();
    if (s < 16) throw DomainError("cumulative_periodogram: need at least 16 observations");
    if (std::all_of(y.begin(), y.end(), [&](double v) { return v == y[0]; }))
        throw DomainError("cumulative_periodogram: series is constant");
    const std::size_t m = (s - 1) / 2;
    std::vector<double> ord(m);
    for (std::size_t j = 1; j <= m; ++j) {
        const double w = 2.0 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(s);
        // Phasor rotation with periodic re-anchoring to bound drift.
        const double cw = std::cos(w), sw = std::sin(w);
        double c = 1.0, sn = 0.0, re = 0.0, im = 0.0;
        for (std::size_t t = 0; t < s; ++t) {
            if (t % 64 == 0) {
                const double ang = w * static_cast<double>(t);
                c = std::cos(ang);
                sn = std::sin(ang);
            }
            re += y[t] * c;
            im -= y[t] * sn;
            const double nc = c * cw - sn * sw;
            sn = sn * cw + c * sw;
            c = nc;
        }
        ord[j - 1] = (re * re + im * im) / static_cast<double>(s);
    }
    double total = 0.0;
    for (double v : ord) total += v;
    if (!(total > 0.0)) throw DomainError("cumulative_periodogram: series has no variation at Fourier frequencies");
    CumulativePeriodogram cp;
    cp.frequencies.resize(m);
    cp.cumulative.resize(m);
    double acc = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
        acc += ord[j];
        cp.frequencies[j] = static_cast<double>(j + 1) / static_cast<double>(s);
        cp.cumulative[j] = acc / total;
    }
    cp.cumulative.back() = 1.0;
    cp.band = 1.36 / std::sqrt(static_cast<double>(m));
    return cp;
}

namespace detail {

inline std::vector<double> fitted_mean_recursion(const FitResult& fit, std::span<const Count> x, std::size_t steps) {
    if (const auto* lp = std::get_if<LinearParams>(&fit.estimates))
        return linear_mean_recursion(fit.spec, *lp, x, steps, fit.presample);
    return neural_mean_recursion(fit.spec, std::get<NeuralWeights>(fit.estimates), x, steps, fit.presample);
}

}  // namespace detail

/**
 * Rolling one-step-ahead conditional means for the `horizon` time points that
 * follow the training sample. `history` starts with the training series; each
 * forecast uses observations up to the preceding time point and parameters
 * fixed at the fit.
 */
inline std::vector<double> one_step_forecasts(const FitResult& fit, const CountSeries& history, std::size_t horizon) {
    if (horizon < 1) throw DomainError("one_step_forecasts: horizon must be >= 1");
    const std::size_t train = fit.s;
    if (history.size() < train || history.size() + 1 < train + horizon)
        throw DomainError("one_step_forecasts: history does not cover the training sample and forecast horizon");
    const auto path = detail::fitted_mean_recursion(fit, history.values, train + horizon);
    return {path.begin() + static_cast<std::ptrdiff_t>(train), path.end()};
}

/**
 * Experimental: multi-step forecasts from the end of `history`, feeding each
 * predicted mean back in place of the unobserved count.
 */
inline std::vector<double> iterated_forecasts(const FitResult& fit, const CountSeries& history, std::size_t horizon) {
    if (horizon < 1) throw DomainError("iterated_forecasts: horizon must be >= 1");
    std::vector<double> x(history.values.begin(), history.values.end());
    auto lambda = detail::fitted_mean_recursion(fit, history.values, history.size());
    const auto& spec = fit.spec;
    std::vector<double> out;
    std::vector<double> z(spec.input_width());
    for (std::size_t h = 0; h < horizon; ++h) {
        const std::size_t t = x.size();
        auto obs = [&](std::size_t i) { return t >= i ? x[t - i] : fit.presample; };
        auto mean = [&](std::size_t j) { return t >= j ? lambda[t - j] : fit.presample; };
        double next;
        if (const auto* lp = std::get_if<LinearParams>(&fit.estimates)) {
            double eta = lp->alpha0;
            for (std::size_t i = 1; i <= spec.p; ++i) eta += lp->alpha[i - 1] * obs(i);
            for (std::size_t j = 1; j <= spec.q; ++j) eta += lp->beta[j - 1] * mean(j);
            next = softplus(eta, spec.c);
        } else {
            z[0] = 1.0;
            for (std::size_t i = 1; i <= spec.p; ++i) z[i] = obs(i);
            for (std::size_t j = 1; j <= spec.q; ++j) z[spec.p + j] = mean(j);
            next = slfn_forward(std::get<NeuralWeights>(fit.estimates), z);
        }
        out.push_back(next);
        lambda.push_back(next);
        x.push_back(next);
    }
    return out;
}

inline double rmse(std::span<const double> forecasts, std::span<const double> actuals) {
    if (forecasts.size() != actuals.size()) throw DomainError("rmse: length mismatch");
    if (forecasts.empty()) throw DomainError("rmse: empty input");
    double ss = 0.0;
    for (std::size_t i = 0; i < forecasts.size(); ++i) ss += (forecasts[i] - actuals[i]) * (forecasts[i] - actuals[i]);
    return std::sqrt(ss / static_cast<double>(forecasts.size()));
}

inline double rmse(std::span<const double> forecasts, const CountSeries& actuals) {
    const auto a = actuals.as_real();
    return rmse(forecasts, std::span<const double>(a));
}

/// Sample variance (divisor s-1) over sample mean.
inline double dispersion_ratio(const CountSeries& series) {
    const auto y = series.as_real();
    const double m = sample_mean(y);
    if (!(m > 0.0)) throw DomainError("dispersion_ratio: series mean must be > 0");
    return sample_variance(y) / m;
}

}  // namespace softcount
