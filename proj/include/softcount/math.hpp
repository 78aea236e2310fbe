#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>

#include "softcount/error.hpp"

/** @file
 * Scalar kernels shared by every model: the softplus family, logistic
 * activation, ReLU and a log-gamma accurate to about 1e-14 relative.
 */

namespace softcount {

namespace detail {

inline void require_finite(double x, const char* what) {
    if (!std::isfinite(x)) throw DomainError(std::string(what) + ": argument must be finite");
}

inline void require_tuning(double c) {
    if (!std::isfinite(c) || !(c > 0.0)) throw DomainError("softplus: tuning parameter c must be > 0");
}

}  // namespace detail

/**
 * Softplus with smoothness parameter c:  c * ln(1 + exp(x / c)).
 *
 * Evaluated as max(x, 0) + c * log1p(exp(-|z|)) with z = x / c, which never
 * overflows. Satisfies max(0, x) < softplus(x, c) <= max(0, x) + c ln 2.
 * Results that underflow are returned as the smallest positive double, so the
 * range stays strictly positive.
 */
inline double softplus(double x, double c = 1.0) {
    detail::require_finite(x, "softplus");
    detail::require_tuning(c);
    const double z = x / c;
    const double tail = c * std::log1p(std::exp(-std::abs(z)));
    const double v = z > 0.0 ? x + tail : tail;
    return v > 0.0 ? v : std::numeric_limits<double>::denorm_min();
}

/// d/dx softplus(x, c) = 1 / (1 + exp(-x / c)).
inline double softplus_deriv(double x, double c = 1.0) {
    detail::require_finite(x, "softplus_deriv");
    detail::require_tuning(c);
    const double z = x / c;
    if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
    const double e = std::exp(z);
    return e / (1.0 + e);
}

inline double logistic(double x) {
    detail::require_finite(x, "logistic");
    if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
    const double e = std::exp(x);
    return e / (1.0 + e);
}

inline double relu(double x) { return std::max(0.0, x); }

/// Inverse of softplus(., 1) for y > 0:  ln(exp(y) - 1).
inline double softplus_inverse(double y) {
    if (!std::isfinite(y) || !(y > 0.0)) throw DomainError("softplus_inverse: argument must be > 0");
    return y + std::log(-std::expm1(-y));
}

/**
 * Natural log of the gamma function for x > 0.
 *
 * Arguments below 10 are shifted up with the recurrence
 * lnG(x) = lnG(x + k) - ln(x (x+1) ... (x+k-1)); the shifted value is
 * evaluated with the Stirling series truncated after the x^-13 term, whose
 * remainder is below 1e-17 for x >= 10.
 */
inline double log_gamma(double x) {
    if (!std::isfinite(x) || !(x > 0.0)) throw DomainError("log_gamma: argument must be finite and > 0");
    if (x == 1.0 || x == 2.0) return 0.0;
    double shift = 0.0;
    if (x < 10.0) {
        double prod = 1.0;
        while (x < 10.0) {
            prod *= x;
            x += 1.0;
        }
        shift = std::log(prod);
    }
    const double inv = 1.0 / x;
    const double inv2 = inv * inv;
    // Bernoulli coefficients B_{2k} / (2k (2k-1)), k = 1..7.
    constexpr std::array<double, 7> coef{1.0 / 12.0,       -1.0 / 360.0,   1.0 / 1260.0,
                                         -1.0 / 1680.0,    1.0 / 1188.0,   -691.0 / 360360.0,
                                         1.0 / 156.0};
    double series = 0.0;
    for (auto it = coef.rbegin(); it != coef.rend(); ++it) series = series * inv2 + *it;
    series *= inv;
    constexpr double half_log_two_pi = 0.91893853320467274178;
    return (x - 0.5) * std::log(x) - x + half_log_two_pi + series - shift;
}

/// ln(x!) for a non-negative integer count.
inline double log_factorial(double x) { return log_gamma(x + 1.0); }

}  // namespace softcount
