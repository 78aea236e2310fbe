#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include "softcount/estimate.hpp"
#include "softcount/fit_result.hpp"
#include "softcount/likelihood.hpp"
#include "softcount/neural.hpp"
#include "softcount/optimize.hpp"
#include "softcount/parallel.hpp"
#include "softcount/rng.hpp"

namespace softcount {

/// Ten random starts by default; single neural fits often stall in poor basins.
inline OptimizerOptions default_neural_options() {
    OptimizerOptions o;
    o.max_iterations = 2000;
    o.restart_count = 10;
    return o;
}

enum class Criterion { AIC, BIC };

namespace detail {

inline std::vector<double> neural_encode(const ModelSpec& spec, const NeuralWeights& w) {
    auto theta = w.flat();
    if (spec.family == Family::NegBin) theta.push_back(std::log(w.n));
    return theta;
}

inline NeuralWeights neural_decode(const ModelSpec& spec, const std::vector<double>& theta) {
    auto w = NeuralWeights::from_flat(spec.input_width(), spec.hidden, theta);
    w.n = spec.family == Family::NegBin ? std::exp(theta.back()) : 1.0;
    return w;
}

class NeuralTrainingObjective {
public:
    NeuralTrainingObjective(const ModelSpec& spec, const CountSeries& series)
        : spec_(spec), series_(series), lik_(spec.family, series) {}

    double operator()(const std::vector<double>& theta, std::vector<double>& grad) const {
        try {
            const auto w = neural_decode(spec_, theta);
            if (!std::isfinite(w.n) || !(w.n > 0.0)) throw NumericError("dispersion overflow");
            auto obj = neural_objective(w, spec_, series_, lik_);
            grad = std::move(obj.gradient);
            return obj.value;
        } catch (const NumericError&) {
            grad.assign(theta.size(), 0.0);
            return std::numeric_limits<double>::infinity();
        } catch (const DomainError&) {
            grad.assign(theta.size(), 0.0);
            return std::numeric_limits<double>::infinity();
        }
    }

    double operator()(const std::vector<double>& theta) const {
        std::vector<double> g;
        return (*this)(theta, g);
    }

private:
    ModelSpec spec_;
    const CountSeries& series_;
    CountLikelihood lik_;
};

}  // namespace detail

/**
 * Relative disagreement between the backpropagated gradient and central
 * finite differences (step h): max_i |analytic_i - fd_i| / max_i |fd_i|.
 */
inline double neural_gradient_error(const NeuralWeights& w, const ModelSpec& spec, const CountSeries& series,
                                    double h = 1e-6) {
    const detail::NeuralTrainingObjective obj(spec, series);
    const auto theta = detail::neural_encode(spec, w);
    std::vector<double> analytic;
    if (!std::isfinite(obj(theta, analytic))) throw NumericError("gradient check: objective is not finite");
    double num = 0.0, den = 0.0;
    auto x = theta;
    for (std::size_t i = 0; i < theta.size(); ++i) {
        x[i] = theta[i] + h;
        const double fp = obj(x);
        x[i] = theta[i] - h;
        const double fm = obj(x);
        x[i] = theta[i];
        const double fd = (fp - fm) / (2.0 * h);
        num = std::max(num, std::abs(analytic[i] - fd));
        den = std::max(den, std::abs(fd));
    }
    return den > 0.0 ? num / den : num;
}

/// Random start: u0 ~ U(-0.5, 0.5)/sqrt(K); common u1 chosen so the output equals the sample mean.
inline NeuralWeights initial_weights(const ModelSpec& spec, const CountSeries& series, RngStream& rng) {
    const std::size_t K = spec.input_width();
    NeuralWeights w(K, spec.hidden);
    const double scale = 1.0 / std::sqrt(static_cast<double>(K));
    for (Eigen::Index k = 0; k < w.u0.rows(); ++k)
        for (Eigen::Index l = 0; l < w.u0.cols(); ++l) w.u0(k, l) = (rng.uniform() - 0.5) * scale;
    const double mean = presample_value(series);
    std::vector<double> z(K, mean);
    z[0] = 1.0;
    double hsum = 0.0;
    for (Eigen::Index l = 0; l < w.u0.cols(); ++l) {
        double a = 0.0;
        for (std::size_t k = 0; k < K; ++k) a += w.u0(static_cast<Eigen::Index>(k), l) * z[k];
        hsum += logistic(a);
    }
    w.u1.setConstant(softplus_inverse(mean) / hsum);
    if (spec.family == Family::NegBin) {
        const auto y = series.as_real();
        const double var = y.size() > 1 ? sample_variance(y) : 0.0;
        const double disp = var / mean;
        w.n = disp > 1.0 ? std::clamp(mean / (disp - 1.0), 0.1, 1e4) : 1e4;
    }
    return w;
}

/// One BFGS run of the neural likelihood from the given weights.
inline FitResult train_neural(const ModelSpec& spec, const CountSeries& series, const NeuralWeights& start,
                              const OptimizerOptions& opts) {
    spec.validate();
    if (spec.link != Link::Neural) throw DomainError("train_neural requires the neural link");
    start.validate(spec);
    const detail::NeuralTrainingObjective obj(spec, series);
    const ObjectiveWithGradient fg = [&](const std::vector<double>& x, std::vector<double>& g) { return obj(x, g); };
    const auto res = bfgs(fg, detail::neural_encode(spec, start), opts);

    FitResult out;
    out.spec = spec;
    out.s = series.size();
    out.k = spec.free_parameters();
    out.presample = presample_value(series);
    out.iterations = res.iterations;
    out.converged = res.converged && std::isfinite(res.value);
    const auto w = detail::neural_decode(spec, res.x);
    out.estimates = w;
    if (std::isfinite(res.value)) {
        out.loglik = -res.value;
        out.lambda_path = neural_mean_recursion(spec, w, series.values, series.size(), out.presample);
        out.set_criteria();
    } else {
        out.loglik = -std::numeric_limits<double>::infinity();
        out.aic = out.bic = std::numeric_limits<double>::infinity();
        out.warnings.emplace_back("no finite likelihood value was found");
    }
    if (!out.converged) out.warnings.emplace_back("optimizer did not converge");
    return out;
}

namespace detail {

inline void attach_neural_standard_errors(FitResult& fit, const CountSeries& series) {
    const auto& spec = fit.spec;
    const NeuralTrainingObjective obj(spec, series);
    const auto theta = neural_encode(spec, fit.neural());
    std::vector<double> jac(theta.size(), 1.0);
    if (spec.family == Family::NegBin) jac.back() = fit.neural().n;
    if (fit.converged) {
        fit.std_errors = hessian_standard_errors([&](const std::vector<double>& x) { return obj(x); }, theta, jac);
    } else {
        fit.std_errors.assign(theta.size(), std::numeric_limits<double>::quiet_NaN());
    }
}

}  // namespace detail

/**
 * Multi-start training of the neural INGARCH model. Start r uses fresh weights
 * drawn from RngStream(opts.seed, r); the converged start with the highest
 * log-likelihood wins, earliest on ties. The backpropagated gradient must
 * agree with finite differences at the first start or training is refused.
 */
inline FitResult fit_neural(const ModelSpec& spec, const CountSeries& series,
                            const OptimizerOptions& opts = default_neural_options()) {
    spec.validate();
    if (spec.link != Link::Neural) throw DomainError("fit_neural requires the neural link");
    if (series.size() < 2) throw DomainError("fit_neural: series too short");
    const std::size_t starts = std::max<std::size_t>(1, opts.restart_count);

    {
        RngStream rng(opts.seed, 0);
        const auto w0 = initial_weights(spec, series, rng);
        const double err = neural_gradient_error(w0, spec, series);
        if (!(err < 1e-4)) throw NumericError("gradient gate failed: backpropagated gradient disagrees with finite differences");
    }

    std::vector<FitResult> fits(starts);
    parallel_for(starts, [&](std::size_t r) {
        RngStream rng(opts.seed, r);
        fits[r] = train_neural(spec, series, initial_weights(spec, series, rng), opts);
    });
    std::size_t best = 0;
    for (std::size_t r = 1; r < starts; ++r) {
        const auto& a = fits[r];
        const auto& b = fits[best];
        if ((a.converged && !b.converged) || (a.converged == b.converged && a.loglik > b.loglik)) best = r;
    }
    FitResult out = std::move(fits[best]);
    out.restarts_used = starts;
    const double floor = 20.0 * static_cast<double>(spec.input_width() * spec.hidden + spec.hidden) /
                         static_cast<double>(spec.input_width());
    if (static_cast<double>(series.size()) < floor)
        out.warnings.emplace_back("series is short relative to the number of network weights");
    detail::attach_neural_standard_errors(out, series);
    return out;
}

struct HiddenUnitSelection {
    std::size_t best_hidden = 0;
    std::vector<FitResult> fits;  // one per candidate, in input order
};

/// Fits each hidden-unit count and picks the smallest criterion value (smaller L on ties).
inline HiddenUnitSelection select_hidden_units(const ModelSpec& spec, const CountSeries& series,
                                               const std::vector<std::size_t>& hidden_range,
                                               const OptimizerOptions& opts = default_neural_options(),
                                               Criterion criterion = Criterion::BIC) {
    if (hidden_range.empty()) throw DomainError("select_hidden_units: empty hidden-unit range");
    HiddenUnitSelection sel;
    double best_value = std::numeric_limits<double>::infinity();
    for (std::size_t L : hidden_range) {
        ModelSpec s = spec;
        s.hidden = L;
        auto fit = fit_neural(s, series, opts);
        const double v = criterion == Criterion::AIC ? fit.aic : fit.bic;
        if (sel.fits.empty() || v < best_value || (v == best_value && L < sel.best_hidden)) {
            best_value = v;
            sel.best_hidden = L;
        }
        sel.fits.push_back(std::move(fit));
    }
    return sel;
}

}  // namespace softcount
