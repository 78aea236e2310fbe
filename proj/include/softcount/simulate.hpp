#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "softcount/distributions.hpp"
#include "softcount/fit_result.hpp"
#include "softcount/moments.hpp"
#include "softcount/model.hpp"
#include "softcount/neural.hpp"
#include "softcount/parallel.hpp"
#include "softcount/rng.hpp"
#include "softcount/series.hpp"

namespace softcount {

struct SimConfig {
    ModelSpec spec;
    ModelParams params;
    std::size_t length = 100000;
    std::size_t burn_in = 500;
    RngStream rng{0, 0};
};

namespace detail {

inline Count draw_count(RngStream& rng, Family family, double lambda, double n) {
    return family == Family::Poisson ? poisson_sample(rng, lambda) : nb_sample(rng, n, lambda);
}

// Start the chain near the stationary mean when the truncated coefficients allow it.
inline double linear_chain_start(const ModelSpec& spec, const LinearParams& p) {
    double bar = 0.0;
    for (double a : p.alpha) bar += relu(a);
    for (double b : p.beta) bar += relu(b);
    return bar < 1.0 ? softplus(p.alpha0 / (1.0 - bar), spec.c) : softplus(p.alpha0, spec.c);
}

inline double neural_chain_start(const ModelSpec& spec, const NeuralWeights& w) {
    std::vector<double> z(spec.input_width(), 1.0);
    double m = 1.0;
    for (int it = 0; it < 20; ++it) {
        for (std::size_t k = 1; k < z.size(); ++k) z[k] = m;
        m = slfn_forward(w, z);
    }
    return m;
}

}  // namespace detail

/**
 * Simulates burn_in + length steps of the model and returns the last `length`
 * observations. The rng in the config is copied, so a config replays exactly.
 */
inline CountSeries simulate_path(const SimConfig& cfg) {
    cfg.spec.validate();
    if (cfg.length == 0) throw DomainError("simulate_path: length must be >= 1");
    RngStream rng = cfg.rng;
    const auto& spec = cfg.spec;
    const std::size_t total = cfg.burn_in + cfg.length;
    std::vector<Count> x(total);
    std::vector<double> lambda(total);

    const auto* linear = std::get_if<LinearParams>(&cfg.params);
    const auto* neural = std::get_if<NeuralWeights>(&cfg.params);
    if (spec.link == Link::SoftplusLinear && !linear) throw DomainError("softplus link requires linear parameters");
    if (spec.link == Link::Neural && !neural) throw DomainError("neural link requires neural weights");
    if (linear) linear->validate(spec);
    if (neural) neural->validate(spec);
    const double n = linear ? linear->n : neural->n;
    const double start = linear ? detail::linear_chain_start(spec, *linear) : detail::neural_chain_start(spec, *neural);

    std::vector<double> z(spec.input_width());
    for (std::size_t t = 0; t < total; ++t) {
        double lam;
        if (linear) {
            double eta = linear->alpha0;
            for (std::size_t i = 1; i <= spec.p; ++i)
                eta += linear->alpha[i - 1] * (t >= i ? static_cast<double>(x[t - i]) : start);
            for (std::size_t j = 1; j <= spec.q; ++j) eta += linear->beta[j - 1] * (t >= j ? lambda[t - j] : start);
            if (!std::isfinite(eta)) throw NumericError("simulated conditional mean overflowed", t);
            lam = softplus(eta, spec.c);
        } else {
            detail::fill_inputs(spec, x, lambda, t, start, z);
            lam = detail::slfn_eval(*neural, z).output;
        }
        if (!std::isfinite(lam) || lam > 1e15) throw NumericError("simulated conditional mean overflowed", t);
        lambda[t] = lam;
        x[t] = detail::draw_count(rng, spec.family, lam, n);
    }
    return CountSeries(std::vector<Count>(x.begin() + static_cast<std::ptrdiff_t>(cfg.burn_in), x.end()));
}

struct EmpiricalMoments {
    double mean = 0.0;
    double dispersion = 0.0;  // sample variance (divisor s-1) / sample mean
    std::vector<double> acf;  // lags 1..max_lag
};

inline EmpiricalMoments empirical_moments(const CountSeries& series, std::size_t max_lag) {
    if (series.size() <= max_lag) throw DomainError("empirical_moments: series must be longer than max_lag");
    const auto y = series.as_real();
    EmpiricalMoments m;
    m.mean = sample_mean(y);
    const double var = sample_variance(y);
    if (!(var > 0.0)) throw DomainError("empirical_moments: degenerate (zero) sample variance");
    m.dispersion = var / m.mean;
    m.acf = sample_acf(y, max_lag);
    return m;
}

/// One row of the softplus-vs-linear moment comparison.
struct MomentRow {
    LinearParams params;
    double c = 1.0;
    EmpiricalMoments sp;
    std::optional<LinearMoments> lin;  // absent when the linear formulas do not apply
    std::string flag;                  // reason lin or sp is unavailable
};

/**
 * For each (1,1) softplus configuration, simulates a path and pairs its
 * empirical moments with the linear-model approximations. Entries run in
 * parallel; each uses the stream stored in its own config.
 */
inline std::vector<MomentRow> moment_study(const std::vector<SimConfig>& grid, std::size_t max_lag) {
    std::vector<MomentRow> rows(grid.size());
    for (const auto& cfg : grid) {
        if (cfg.spec.link != Link::SoftplusLinear || cfg.spec.p != 1 || cfg.spec.q != 1)
            throw DomainError("moment_study: every grid entry must be a (1,1) softplus model");
    }
    parallel_for(grid.size(), [&](std::size_t i) {
        const auto& cfg = grid[i];
        MomentRow row;
        row.params = std::get<LinearParams>(cfg.params);
        row.c = cfg.spec.c;
        try {
            row.lin = linear_moments_11(row.params, cfg.spec.family, max_lag);
        } catch (const DomainError& e) {
            row.flag = e.what();
        }
        try {
            row.sp = empirical_moments(simulate_path(cfg), max_lag);
        } catch (const std::exception& e) {
            // explosive or degenerate path: keep the row, mark the simulated columns
            const double nan = std::numeric_limits<double>::quiet_NaN();
            row.sp = EmpiricalMoments{nan, nan, std::vector<double>(max_lag, nan)};
            row.flag += (row.flag.empty() ? "" : "; ") + std::string("simulation failed: ") + e.what();
        }
        rows[i] = std::move(row);
    });
    return rows;
}

}  // namespace softcount
