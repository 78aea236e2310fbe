#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "softcount/error.hpp"
#include "softcount/model.hpp"

/** @file
 * Moments of the linear NB/Poisson INGARCH model, used as approximations for
 * the softplus model by plugging in (alpha0, alpha, beta) directly.
 */

namespace softcount {

struct LinearMoments {
    double mu = 0.0;
    double variance = 0.0;
    std::vector<double> acf;  // lags 1..H

    double dispersion() const { return variance / mu; }
};

/// Mean, variance and ACF (lags 1..max_lag) of the linear INGARCH(1,1) model.
inline LinearMoments linear_moments_11(const LinearParams& params, Family family, std::size_t max_lag = 3) {
    if (params.alpha.size() != 1 || params.beta.size() != 1)
        throw DomainError("linear_moments_11 requires p = q = 1");
    if (max_lag < 1) throw DomainError("linear_moments_11: max_lag must be >= 1");
    const double a0 = params.alpha0, a1 = params.alpha[0], b1 = params.beta[0];
    const bool nb = family == Family::NegBin;
    if (nb && !(params.n > 0.0)) throw DomainError("dispersion n must be > 0");

    const double first = 1.0 - a1 - b1;
    if (!(first > 0.0)) throw DomainError("first-order condition violated: alpha1 + beta1 must be < 1");
    const double omega = nb ? 1.0 + 1.0 / params.n : 1.0;
    const double num = 1.0 - 2.0 * a1 * b1 - b1 * b1;
    const double den = 1.0 - omega * a1 * a1 - 2.0 * a1 * b1 - b1 * b1;
    if (!(den > 0.0))
        throw DomainError("second-order condition violated: 1 - omega alpha1^2 - 2 alpha1 beta1 - beta1^2 must be > 0");
    if (num == 0.0) throw DomainError("degenerate ACF denominator: 1 - 2 alpha1 beta1 - beta1^2 = 0");

    LinearMoments m;
    m.mu = a0 / first;
    const double cond_var = nb ? m.mu * (1.0 + m.mu / params.n) : m.mu;
    m.variance = cond_var * num / den;
    const double rho1 = a1 * (1.0 - a1 * b1 - b1 * b1) / num;
    m.acf.resize(max_lag);
    double decay = 1.0;
    for (std::size_t h = 0; h < max_lag; ++h) {
        m.acf[h] = rho1 * decay;
        decay *= a1 + b1;
    }
    return m;
}

/// Autocovariances of observations and conditional means, lags 0..H.
struct LinearAcvf {
    double mu = 0.0;
    std::vector<double> gamma_x;
    std::vector<double> gamma_lambda;

    std::vector<double> acf() const {
        std::vector<double> r(gamma_x.size() > 0 ? gamma_x.size() - 1 : 0);
        for (std::size_t h = 1; h < gamma_x.size(); ++h) r[h - 1] = gamma_x[h] / gamma_x[0];
        return r;
    }
};

inline std::size_t default_acvf_lags(std::size_t p, std::size_t q) { return std::max<std::size_t>(10, 3 * (p + q)); }

/**
 * Solves the autocovariance recursions of the linear INGARCH(p, q) model as a
 * dense linear system in gamma_X(0..M), gamma_lambda(0..M), M = max(H, p, q):
 *
 *   gamma_X(0)      = omega gamma_l(0) + mu (1 + mu/n)
 *   gamma_l(0)      = sum_i a_i gamma_X(i) + sum_j b_j gamma_l(j)
 *   gamma_X(h)      = sum_i a_i gamma_X(|h-i|) + sum_{j<h} b_j gamma_X(h-j) + sum_{j>=h} b_j gamma_l(j-h)
 *   gamma_l(h)      = sum_{i<=h} a_i gamma_l(h-i) + sum_{i>h} a_i gamma_X(i-h) + sum_j b_j gamma_l(|h-j|)
 */
inline LinearAcvf linear_acvf_general(const LinearParams& params, Family family, std::size_t max_lag) {
    const std::size_t p = params.alpha.size();
    const std::size_t q = params.beta.size();
    const bool nb = family == Family::NegBin;
    if (nb && !(params.n > 0.0)) throw DomainError("dispersion n must be > 0");
    const double first = 1.0 - params.coefficient_sum();
    if (!(first > 0.0)) throw DomainError("first-order condition violated: sum of coefficients must be < 1");

    LinearAcvf out;
    out.mu = params.alpha0 / first;
    const double omega = nb ? 1.0 + 1.0 / params.n : 1.0;
    const double cond_var = nb ? out.mu * (1.0 + out.mu / params.n) : out.mu;

    const std::size_t m = std::max({max_lag, p, q});
    const auto dim = static_cast<Eigen::Index>(2 * (m + 1));
    auto gx = [](std::size_t h) { return static_cast<Eigen::Index>(h); };
    auto gl = [m](std::size_t h) { return static_cast<Eigen::Index>(m + 1 + h); };
    auto a = [&](std::size_t i) { return params.alpha[i - 1]; };
    auto b = [&](std::size_t j) { return params.beta[j - 1]; };
    auto absdiff = [](std::size_t u, std::size_t v) { return u > v ? u - v : v - u; };

    Eigen::MatrixXd sys = Eigen::MatrixXd::Zero(dim, dim);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(dim);

    sys(gx(0), gx(0)) = 1.0;
    sys(gx(0), gl(0)) -= omega;
    rhs(gx(0)) = cond_var;

    sys(gl(0), gl(0)) = 1.0;
    for (std::size_t i = 1; i <= p; ++i) sys(gl(0), gx(i)) -= a(i);
    for (std::size_t j = 1; j <= q; ++j) sys(gl(0), gl(j)) -= b(j);

    for (std::size_t h = 1; h <= m; ++h) {
        const auto rx = gx(h);
        sys(rx, gx(h)) += 1.0;
        for (std::size_t i = 1; i <= p; ++i) sys(rx, gx(absdiff(h, i))) -= a(i);
        for (std::size_t j = 1; j <= std::min(h - 1, q); ++j) sys(rx, gx(h - j)) -= b(j);
        for (std::size_t j = h; j <= q; ++j) sys(rx, gl(j - h)) -= b(j);

        const auto rl = gl(h);
        sys(rl, gl(h)) += 1.0;
        for (std::size_t i = 1; i <= std::min(h, p); ++i) sys(rl, gl(h - i)) -= a(i);
        for (std::size_t i = h + 1; i <= p; ++i) sys(rl, gx(i - h)) -= a(i);
        for (std::size_t j = 1; j <= q; ++j) sys(rl, gl(absdiff(h, j))) -= b(j);
    }

    Eigen::FullPivLU<Eigen::MatrixXd> lu(sys);
    lu.setThreshold(1e-12);
    if (!lu.isInvertible()) throw DomainError("autocovariance system is singular: parameters outside second-order stationarity region");
    const Eigen::VectorXd sol = lu.solve(rhs);
    if (!sol.allFinite() || !(sol(gx(0)) > 0.0) || sol(gl(0)) < 0.0)
        throw DomainError("autocovariance solution is not a valid covariance: parameters outside second-order stationarity region");

    out.gamma_x.resize(max_lag + 1);
    out.gamma_lambda.resize(max_lag + 1);
    for (std::size_t h = 0; h <= max_lag; ++h) {
        out.gamma_x[h] = sol(gx(h));
        out.gamma_lambda[h] = sol(gl(h));
    }
    return out;
}

inline LinearAcvf linear_acvf_general(const LinearParams& params, Family family) {
    return linear_acvf_general(params, family, default_acvf_lags(params.alpha.size(), params.beta.size()));
}

}  // namespace softcount
