#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "softcount/error.hpp"
#include "softcount/likelihood.hpp"
#include "softcount/math.hpp"
#include "softcount/model.hpp"
#include "softcount/series.hpp"

/** @file
 * Single-hidden-layer network response for INGARCH models:
 *   lambda_t = f1( sum_l u1_l f0( sum_k u0_kl z_tk ) ),
 * with f0 logistic, f1 softplus (c = 1), and inputs
 * z_t = (1, X_{t-1}, ..., X_{t-p}, lambda_{t-1}, ..., lambda_{t-q}).
 */

namespace softcount {

struct NeuralWeights {
    Eigen::MatrixXd u0;  // K x L, input-to-hidden
    Eigen::VectorXd u1;  // L, hidden-to-output
    double n = 1.0;      // NB dispersion; ignored for Poisson

    NeuralWeights() = default;
    NeuralWeights(std::size_t inputs, std::size_t hidden)
        : u0(Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(inputs), static_cast<Eigen::Index>(hidden))),
          u1(Eigen::VectorXd::Zero(static_cast<Eigen::Index>(hidden))) {}

    std::size_t inputs() const noexcept { return static_cast<std::size_t>(u0.rows()); }
    std::size_t hidden() const noexcept { return static_cast<std::size_t>(u0.cols()); }
    std::size_t weight_count() const noexcept { return inputs() * hidden() + hidden(); }

    /// u0 in row-major (k, l) order followed by u1.
    std::vector<double> flat() const {
        std::vector<double> w;
        w.reserve(weight_count());
        for (Eigen::Index k = 0; k < u0.rows(); ++k)
            for (Eigen::Index l = 0; l < u0.cols(); ++l) w.push_back(u0(k, l));
        for (Eigen::Index l = 0; l < u1.size(); ++l) w.push_back(u1(l));
        return w;
    }

    static NeuralWeights from_flat(std::size_t inputs, std::size_t hidden, std::span<const double> w) {
        NeuralWeights out(inputs, hidden);
        if (w.size() < out.weight_count()) throw DomainError("neural weights: flat vector too short");
        std::size_t i = 0;
        for (Eigen::Index k = 0; k < out.u0.rows(); ++k)
            for (Eigen::Index l = 0; l < out.u0.cols(); ++l) out.u0(k, l) = w[i++];
        for (Eigen::Index l = 0; l < out.u1.size(); ++l) out.u1(l) = w[i++];
        return out;
    }

    void validate(const ModelSpec& spec) const {
        if (inputs() != spec.input_width()) throw DomainError("neural weights: input width must equal p + q + 1");
        if (hidden() != spec.hidden) throw DomainError("neural weights: hidden-unit count does not match spec");
        if (!u0.allFinite() || !u1.allFinite()) throw DomainError("neural weights must be finite");
        if (spec.family == Family::NegBin && (!std::isfinite(n) || !(n > 0.0)))
            throw DomainError("dispersion n must be > 0");
    }

    bool operator==(const NeuralWeights& o) const {
        return u0.rows() == o.u0.rows() && u0.cols() == o.u0.cols() && u0 == o.u0 && u1 == o.u1 && n == o.n;
    }
};

namespace detail {

struct ForwardState {
    Eigen::VectorXd hidden;  // f0 activations
    double pre_output = 0.0;
    double output = 0.0;
};

inline ForwardState slfn_eval(const NeuralWeights& w, std::span<const double> z) {
    ForwardState s;
    s.hidden.resize(w.u1.size());
    for (Eigen::Index l = 0; l < w.u0.cols(); ++l) {
        double a = 0.0;
        for (Eigen::Index k = 0; k < w.u0.rows(); ++k) a += w.u0(k, l) * z[static_cast<std::size_t>(k)];
        s.hidden(l) = logistic(a);
    }
    s.pre_output = w.u1.dot(s.hidden);
    s.output = softplus(s.pre_output, 1.0);
    return s;
}

inline void fill_inputs(const ModelSpec& spec, std::span<const Count> x, const std::vector<double>& lambda,
                        std::size_t t, double presample, std::vector<double>& z) {
    z[0] = 1.0;
    for (std::size_t i = 1; i <= spec.p; ++i) z[i] = t >= i ? static_cast<double>(x[t - i]) : presample;
    for (std::size_t j = 1; j <= spec.q; ++j) z[spec.p + j] = t >= j ? lambda[t - j] : presample;
}

}  // namespace detail

/// Network response g(z) for one input vector of width K.
inline double slfn_forward(const NeuralWeights& w, std::span<const double> z) {
    if (z.size() != w.inputs()) throw DomainError("slfn_forward: input width does not match weights");
    if (w.hidden() != static_cast<std::size_t>(w.u1.size())) throw DomainError("slfn_forward: u1 length mismatch");
    for (double v : z)
        if (!std::isfinite(v)) throw DomainError("slfn_forward: inputs must be finite");
    return detail::slfn_eval(w, z).output;
}

/// Neural conditional means for indices 0..steps-1 (see linear_mean_recursion for conventions).
inline std::vector<double> neural_mean_recursion(const ModelSpec& spec, const NeuralWeights& w,
                                                 std::span<const Count> x, std::size_t steps, double presample) {
    if (steps > x.size() + 1) throw DomainError("mean recursion: not enough observations for requested steps");
    std::vector<double> lambda(steps);
    std::vector<double> z(spec.input_width());
    for (std::size_t t = 0; t < steps; ++t) {
        detail::fill_inputs(spec, x, lambda, t, presample, z);
        const double g = detail::slfn_eval(w, z).output;
        if (!std::isfinite(g) || !(g > 0.0)) throw NumericError("neural response is not a positive finite value", t);
        lambda[t] = g;
    }
    return lambda;
}

inline std::vector<double> neural_lambda_path(const NeuralWeights& w, const ModelSpec& spec, const CountSeries& series) {
    if (spec.link != Link::Neural) throw DomainError("neural_lambda_path requires the neural link");
    if (series.empty()) throw DomainError("neural_lambda_path: empty series");
    w.validate(spec);
    return neural_mean_recursion(spec, w, series.values, series.size(), presample_value(series));
}

inline double neural_negloglik(const NeuralWeights& w, const ModelSpec& spec, const CountSeries& series) {
    const auto lambda = neural_lambda_path(w, spec, series);
    return CountLikelihood(spec.family, series).negloglik(lambda, w.n);
}

/**
 * Exact gradient of the neural negative log-likelihood, ordered as
 * NeuralWeights::flat() followed by d/d(ln n) for the NB family.
 *
 * Sensitivities d lambda_t / dw are propagated forward through the time loop,
 * so when q > 0 the dependence of lambda_t on earlier means is included.
 * Pre-sample means are constants with zero sensitivity.
 */
struct NeuralObjective {
    double value = 0.0;
    std::vector<double> gradient;
};

inline NeuralObjective neural_objective(const NeuralWeights& w, const ModelSpec& spec, const CountSeries& series,
                                        const CountLikelihood& lik) {
    const std::size_t K = w.inputs();
    const std::size_t L = w.hidden();
    const std::size_t P = w.weight_count();
    const std::size_t s = series.size();
    const double presample = presample_value(series);

    std::vector<double> lambda(s);
    std::vector<double> z(K);
    // Ring buffer of the last q sensitivity vectors.
    std::vector<std::vector<double>> sens(spec.q, std::vector<double>(P, 0.0));
    std::vector<double> current(P);
    std::vector<double> grad(P + (spec.family == Family::NegBin ? 1 : 0), 0.0);
    std::vector<double> dz(spec.q);

    for (std::size_t t = 0; t < s; ++t) {
        detail::fill_inputs(spec, series.values, lambda, t, presample, z);
        const auto st = detail::slfn_eval(w, z);
        const double g = st.output;
        if (!std::isfinite(g) || !(g > 0.0)) throw NumericError("neural response is not a positive finite value", t);
        lambda[t] = g;
        const double f1p = logistic(st.pre_output);  // softplus' = logistic

        for (std::size_t l = 0; l < L; ++l) {
            const double h = st.hidden(static_cast<Eigen::Index>(l));
            const double back = f1p * w.u1(static_cast<Eigen::Index>(l)) * h * (1.0 - h);
            for (std::size_t k = 0; k < K; ++k) current[k * L + l] = back * z[k];
            current[K * L + l] = f1p * h;
        }
        for (std::size_t j = 1; j <= spec.q && j <= t; ++j) {
            const auto kz = static_cast<Eigen::Index>(spec.p + j);
            double d = 0.0;
            for (std::size_t l = 0; l < L; ++l) {
                const auto li = static_cast<Eigen::Index>(l);
                const double h = st.hidden(li);
                d += w.u1(li) * h * (1.0 - h) * w.u0(kz, li);
            }
            d *= f1p;
            const auto& prev = sens[(t - j) % spec.q];
            for (std::size_t i = 0; i < P; ++i) current[i] += d * prev[i];
        }
        const double outer = lik.dlambda(t, g, w.n);
        for (std::size_t i = 0; i < P; ++i) grad[i] += outer * current[i];
        if (spec.q > 0) sens[t % spec.q] = current;
    }
    NeuralObjective out;
    out.value = lik.negloglik(lambda, w.n);
    if (spec.family == Family::NegBin) grad[P] = lik.dlog_n(lambda, w.n);
    out.gradient = std::move(grad);
    return out;
}

inline std::vector<double> neural_gradient(const NeuralWeights& w, const ModelSpec& spec, const CountSeries& series) {
    if (spec.link != Link::Neural) throw DomainError("neural_gradient requires the neural link");
    if (series.empty()) throw DomainError("neural_gradient: empty series");
    w.validate(spec);
    return neural_objective(w, spec, series, CountLikelihood(spec.family, series)).gradient;
}

}  // namespace softcount
