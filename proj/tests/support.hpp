#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "softcount/softcount.hpp"

namespace softcount::testing {

// Property-test generator. Deliberately independent of the library's RngStream.
class Gen {
public:
    explicit Gen(std::uint64_t seed) : eng_(seed) {}

    double real(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(eng_); }
    double log_uniform(double lo, double hi) { return std::exp(real(std::log(lo), std::log(hi))); }
    std::int64_t integer(std::int64_t lo, std::int64_t hi) {
        return std::uniform_int_distribution<std::int64_t>(lo, hi)(eng_);
    }
    double normal() { return std::normal_distribution<double>(0.0, 1.0)(eng_); }

    std::vector<Count> counts(std::size_t size, std::int64_t hi) {
        std::vector<Count> v(size);
        for (auto& x : v) x = integer(0, hi);
        return v;
    }

    // (1,1) parameters inside the second-order region for the given family.
    LinearParams admissible_11(Family family) {
        for (;;) {
            LinearParams p{real(0.2, 4.0), {real(-0.6, 0.6)}, {real(-0.6, 0.6)}, real(0.5, 20.0)};
            if (p.alpha[0] + p.beta[0] > 0.95) continue;
            const auto st = check_stationarity(p, family);
            if (!st.second_order_ok) continue;
            try {
                linear_moments_11(p, family, 3);
            } catch (const DomainError&) {
                continue;
            }
            return p;
        }
    }

    std::mt19937_64& engine() { return eng_; }

private:
    std::mt19937_64 eng_;
};

// Naive softplus: the textbook formula in long double.
inline long double naive_softplus(long double x, long double c = 1.0L) { return c * std::log1p(std::exp(x / c)); }

// Term-by-term conditional log-likelihood written directly from the model
// definition, sharing no code with the library's likelihood path.
inline double oracle_loglik(Family family, const std::vector<Count>& x, const std::vector<double>& lambda, double n) {
    long double total = 0.0L;
    for (std::size_t t = 0; t < x.size(); ++t) {
        const long double xt = static_cast<long double>(x[t]);
        const long double lt = lambda[t];
        const long double lnfact = std::lgamma(xt + 1.0L);
        if (family == Family::Poisson) {
            total += xt * std::log(lt) - lt - lnfact;
        } else {
            long double rising = 0.0L;
            for (Count v = 1; v <= x[t]; ++v) rising += std::log(static_cast<long double>(v) + n - 1.0L);
            total += xt * std::log(lt / n) - (n + xt) * std::log1p(lt / n) + rising - lnfact;
        }
    }
    return static_cast<double>(total);
}

// Conditional-mean path for a softplus-linear model, written out directly.
inline std::vector<double> oracle_linear_path(const ModelSpec& spec, const LinearParams& par, const std::vector<Count>& x,
                                              double pre) {
    std::vector<long double> lam;
    for (std::size_t t = 0; t < x.size(); ++t) {
        long double eta = par.alpha0;
        for (std::size_t i = 1; i <= spec.p; ++i) eta += par.alpha[i - 1] * (t >= i ? x[t - i] : pre);
        for (std::size_t j = 1; j <= spec.q; ++j) eta += par.beta[j - 1] * (t >= j ? lam[t - j] : pre);
        lam.push_back(naive_softplus(eta, spec.c));
    }
    return {lam.begin(), lam.end()};
}

inline long double oracle_logistic(long double a) { return 1.0L / (1.0L + std::exp(-a)); }

// Neural conditional-mean path, written out directly.
inline std::vector<double> oracle_neural_path(const ModelSpec& spec, const NeuralWeights& w, const std::vector<Count>& x,
                                              double pre) {
    std::vector<long double> lam;
    const std::size_t K = spec.p + spec.q + 1;
    for (std::size_t t = 0; t < x.size(); ++t) {
        std::vector<long double> z(K);
        z[0] = 1.0L;
        for (std::size_t i = 1; i <= spec.p; ++i) z[i] = t >= i ? x[t - i] : pre;
        for (std::size_t j = 1; j <= spec.q; ++j) z[spec.p + j] = t >= j ? lam[t - j] : pre;
        long double out = 0.0L;
        for (std::size_t l = 0; l < spec.hidden; ++l) {
            long double a = 0.0L;
            for (std::size_t k = 0; k < K; ++k) a += w.u0(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(l)) * z[k];
            out += w.u1(static_cast<Eigen::Index>(l)) * oracle_logistic(a);
        }
        lam.push_back(naive_softplus(out));
    }
    return {lam.begin(), lam.end()};
}

inline NeuralWeights random_weights(Gen& g, const ModelSpec& spec, double scale = 0.5) {
    NeuralWeights w(spec.input_width(), spec.hidden);
    for (Eigen::Index k = 0; k < w.u0.rows(); ++k)
        for (Eigen::Index l = 0; l < w.u0.cols(); ++l) w.u0(k, l) = g.real(-scale, scale);
    for (Eigen::Index l = 0; l < w.u1.size(); ++l) w.u1(l) = g.real(0.5, 3.0);
    w.n = g.real(1.0, 8.0);
    return w;
}

inline ModelSpec linear_spec(Family f, std::size_t p, std::size_t q, double c = 1.0) {
    return ModelSpec{f, Link::SoftplusLinear, p, q, c, 1};
}

inline ModelSpec neural_spec(Family f, std::size_t p, std::size_t q, std::size_t hidden) {
    return ModelSpec{f, Link::Neural, p, q, 1.0, hidden};
}

inline CountSeries simulate(const ModelSpec& spec, const ModelParams& params, std::size_t length, std::uint64_t seed,
                            std::uint64_t stream = 0) {
    SimConfig cfg;
    cfg.spec = spec;
    cfg.params = params;
    cfg.length = length;
    cfg.rng = RngStream(seed, stream);
    return simulate_path(cfg);
}

inline std::vector<double> to_real(const std::vector<Count>& x) { return {x.begin(), x.end()}; }

}  // namespace softcount::testing
