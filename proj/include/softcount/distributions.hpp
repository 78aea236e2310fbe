#pragma once

#include <cmath>
#include <cstdint>

#include "softcount/error.hpp"
#include "softcount/math.hpp"
#include "softcount/rng.hpp"

namespace softcount {

using Count = std::int64_t;

namespace detail {

inline void check_count(Count x) {
    if (x < 0) throw DomainError("count must be non-negative");
}

inline void check_positive(double v, const char* name) {
    if (!std::isfinite(v) || !(v > 0.0)) throw DomainError(std::string(name) + " must be finite and > 0");
}

// Counts at or below this use the exact product sum for ln G(x+n) - ln G(n).
inline constexpr Count kDirectSumLimit = 2000;

}  // namespace detail

/// ln G(x + n) - ln G(n) = sum_{v=1}^{x} ln(v + n - 1).
inline double log_rising_factorial(Count x, double n) {
    if (x <= detail::kDirectSumLimit) {
        double s = 0.0;
        for (Count v = 1; v <= x; ++v) s += std::log(static_cast<double>(v) + n - 1.0);
        return s;
    }
    return log_gamma(static_cast<double>(x) + n) - log_gamma(n);
}

/**
 * Negative binomial log-pmf in the mean parametrization:
 * C(x+n-1, n-1) p^n (1-p)^x with p = n / (n + lambda). Real n is supported.
 */
inline double nb_log_pmf(Count x, double n, double lambda) {
    detail::check_count(x);
    detail::check_positive(n, "nb_log_pmf: n");
    detail::check_positive(lambda, "nb_log_pmf: lambda");
    const double xd = static_cast<double>(x);
    // n ln p = -n ln(1 + lambda/n);  x ln(1-p) = x (ln lambda - ln(n + lambda))
    double value = log_rising_factorial(x, n) - log_factorial(xd) - n * std::log1p(lambda / n);
    if (x > 0) value += xd * (std::log(lambda) - std::log(n + lambda));
    return value;
}

inline double poisson_log_pmf(Count x, double lambda) {
    detail::check_count(x);
    detail::check_positive(lambda, "poisson_log_pmf: lambda");
    const double xd = static_cast<double>(x);
    return (x > 0 ? xd * std::log(lambda) : 0.0) - lambda - log_factorial(xd);
}

/**
 * Gamma(shape, 1) variate. Marsaglia-Tsang squeeze for shape >= 1; for
 * shape < 1 a Gamma(shape + 1) draw is scaled by U^(1/shape).
 */
inline double gamma_sample(RngStream& rng, double shape) {
    detail::check_positive(shape, "gamma_sample: shape");
    if (shape < 1.0) {
        const double g = gamma_sample(rng, shape + 1.0);
        return g * std::pow(rng.uniform(), 1.0 / shape);
    }
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
        double z, v;
        do {
            z = rng.normal();
            v = 1.0 + c * z;
        } while (v <= 0.0);
        v = v * v * v;
        const double u = rng.uniform();
        const double z2 = z * z;
        if (u < 1.0 - 0.0331 * z2 * z2) return d * v;
        if (std::log(u) < 0.5 * z2 + d * (1.0 - v + std::log(v))) return d * v;
    }
}

namespace detail {

// Sequential inversion; adequate for small means.
inline Count poisson_inversion(RngStream& rng, double lambda) {
    const double u = rng.uniform();
    double p = std::exp(-lambda);
    double cdf = p;
    Count x = 0;
    while (u > cdf && x < 10000) {
        ++x;
        p *= lambda / static_cast<double>(x);
        cdf += p;
        if (p == 0.0 && cdf < u) break;
    }
    return x;
}

// Hormann's transformed rejection with squeeze (PTRS) for lambda >= 10.
inline Count poisson_ptrs(RngStream& rng, double lambda) {
    const double slam = std::sqrt(lambda);
    const double loglam = std::log(lambda);
    const double b = 0.931 + 2.53 * slam;
    const double a = -0.059 + 0.02483 * b;
    const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
    const double vr = 0.9277 - 3.6224 / (b - 2.0);
    for (;;) {
        const double u = rng.uniform() - 0.5;
        const double v = rng.uniform();
        const double us = 0.5 - std::abs(u);
        const double k = std::floor((2.0 * a / us + b) * u + lambda + 0.43);
        if (us >= 0.07 && v <= vr) return static_cast<Count>(k);
        if (k < 0.0 || (us < 0.013 && v > us)) continue;
        if (std::log(v) + std::log(inv_alpha) - std::log(a / (us * us) + b) <=
            -lambda + k * loglam - log_gamma(k + 1.0)) {
            return static_cast<Count>(k);
        }
    }
}

inline Count poisson_draw(RngStream& rng, double mean) {
    if (mean <= 0.0) return 0;
    if (!std::isfinite(mean) || mean > 1e15) throw NumericError("poisson mean is not representable");
    return mean < 10.0 ? poisson_inversion(rng, mean) : poisson_ptrs(rng, mean);
}

}  // namespace detail

inline Count poisson_sample(RngStream& rng, double lambda) {
    detail::check_positive(lambda, "poisson_sample: lambda");
    return detail::poisson_draw(rng, lambda);
}

/// NB(n, p = n/(n+lambda)) draw as Poisson((lambda/n) * Gamma(n, 1)).
inline Count nb_sample(RngStream& rng, double n, double lambda) {
    detail::check_positive(n, "nb_sample: n");
    detail::check_positive(lambda, "nb_sample: lambda");
    const double mu = (lambda / n) * gamma_sample(rng, n);
    return detail::poisson_draw(rng, mu);
}

}  // namespace softcount
