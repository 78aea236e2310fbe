#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "softcount/error.hpp"
#include "softcount/math.hpp"
#include "softcount/series.hpp"

namespace softcount {

enum class Family { Poisson, NegBin };
enum class Link { SoftplusLinear, Neural };

inline std::string_view to_string(Family f) { return f == Family::Poisson ? "poisson" : "negbin"; }
inline std::string_view to_string(Link l) { return l == Link::SoftplusLinear ? "softplus" : "neural"; }

inline Family parse_family(std::string_view s) {
    if (s == "poisson") return Family::Poisson;
    if (s == "negbin" || s == "nb") return Family::NegBin;
    throw DomainError("unknown family '" + std::string(s) + "' (expected poisson or negbin)");
}

inline Link parse_link(std::string_view s) {
    if (s == "softplus" || s == "sp") return Link::SoftplusLinear;
    if (s == "neural" || s == "neu") return Link::Neural;
    throw DomainError("unknown link '" + std::string(s) + "' (expected softplus or neural)");
}

struct ModelSpec {
    Family family = Family::NegBin;
    Link link = Link::SoftplusLinear;
    std::size_t p = 1;       // observation lags
    std::size_t q = 0;       // conditional-mean lags
    double c = 1.0;          // softplus tuning (SoftplusLinear only)
    std::size_t hidden = 1;  // hidden units L (Neural only)

    /// Network input width: constant + p observation lags + q mean lags.
    std::size_t input_width() const noexcept { return p + q + 1; }

    void validate() const {
        if (p + q < 1) throw DomainError("model order: p + q must be >= 1");
        if (q >= 1 && p < 1) throw DomainError("model order: p must be >= 1 when q >= 1");
        if (link == Link::SoftplusLinear && (!std::isfinite(c) || !(c > 0.0)))
            throw DomainError("softplus tuning c must be > 0");
        if (link == Link::Neural && hidden < 1) throw DomainError("hidden units must be >= 1");
    }

    /// Number of free parameters (including n for the negative binomial family).
    std::size_t free_parameters() const noexcept {
        const std::size_t nb = family == Family::NegBin ? 1 : 0;
        if (link == Link::Neural) return input_width() * hidden + hidden + nb;
        return 1 + p + q + nb;
    }

    std::string label() const {
        std::string s = link == Link::Neural ? "neu " : "sp ";
        s += family == Family::Poisson ? "P-INGARCH(" : "NB-INGARCH(";
        s += std::to_string(p) + "," + std::to_string(q) + ")";
        if (link == Link::Neural) s += " L=" + std::to_string(hidden);
        return s;
    }

    bool operator==(const ModelSpec&) const = default;
};

/// Intercept, lag and feedback coefficients of the softplus-linear predictor.
struct LinearParams {
    double alpha0 = 0.0;
    std::vector<double> alpha;  // length p
    std::vector<double> beta;   // length q
    double n = 1.0;             // NB dispersion; ignored for Poisson

    void validate(const ModelSpec& spec) const {
        if (alpha.size() != spec.p || beta.size() != spec.q)
            throw DomainError("parameter vector lengths do not match model orders (p, q)");
        auto finite = [](double v) { return std::isfinite(v); };
        if (!finite(alpha0) || !std::all_of(alpha.begin(), alpha.end(), finite) ||
            !std::all_of(beta.begin(), beta.end(), finite))
            throw DomainError("coefficients must be finite");
        if (spec.family == Family::NegBin && (!std::isfinite(n) || !(n > 0.0)))
            throw DomainError("dispersion n must be > 0");
    }

    double coefficient_sum() const {
        double s = 0.0;
        for (double a : alpha) s += a;
        for (double b : beta) s += b;
        return s;
    }

    bool operator==(const LinearParams&) const = default;
};

/**
 * Softplus-linear conditional means for time indices 0..steps-1:
 *   lambda_t = sp(alpha0 + sum_i alpha_i X_{t-i} + sum_j beta_j lambda_{t-j}, c).
 * Observations and means before index 0 take the value `presample`.
 * Only x[0..steps-2] is read, so steps may exceed x.size() by one.
 */
inline std::vector<double> linear_mean_recursion(const ModelSpec& spec, const LinearParams& params,
                                                 std::span<const Count> x, std::size_t steps,
                                                 double presample) {
    if (steps > x.size() + 1) throw DomainError("mean recursion: not enough observations for requested steps");
    std::vector<double> lambda(steps);
    for (std::size_t t = 0; t < steps; ++t) {
        double eta = params.alpha0;
        for (std::size_t i = 1; i <= spec.p; ++i)
            eta += params.alpha[i - 1] * (t >= i ? static_cast<double>(x[t - i]) : presample);
        for (std::size_t j = 1; j <= spec.q; ++j)
            eta += params.beta[j - 1] * (t >= j ? lambda[t - j] : presample);
        if (!std::isfinite(eta)) throw NumericError("conditional mean recursion produced a non-finite value", t);
        lambda[t] = softplus(eta, spec.c);
        if (!(lambda[t] > 0.0) || !std::isfinite(lambda[t]))
            throw NumericError("conditional mean recursion produced a non-positive value", t);
    }
    return lambda;
}

/// lambda_1..lambda_s for an observed series with the given pre-sample fill.
inline std::vector<double> conditional_mean_path(const ModelSpec& spec, const LinearParams& params,
                                                 const CountSeries& series, double lambda_init) {
    if (spec.link != Link::SoftplusLinear) throw DomainError("conditional_mean_path requires the softplus link");
    if (series.empty()) throw DomainError("conditional_mean_path: empty series");
    if (!std::isfinite(lambda_init) || !(lambda_init > 0.0)) throw DomainError("lambda_init must be > 0");
    params.validate(spec);
    return linear_mean_recursion(spec, params, series.values, series.size(), lambda_init);
}

/// Same, with the pre-sample fill taken from the series mean.
inline std::vector<double> conditional_mean_path(const ModelSpec& spec, const LinearParams& params,
                                                 const CountSeries& series) {
    return conditional_mean_path(spec, params, series, presample_value(series));
}

/**
 * First- and second-order moment conditions for the (1,1) softplus model,
 * evaluated on the truncated coefficients max(0, alpha1), max(0, beta1).
 */
struct StationarityReport {
    bool applicable = false;  // false unless p = q = 1
    bool first_order_ok = false;
    bool second_order_ok = false;
    double c11_bar = 0.0;
    double second_order_value = 0.0;
};

inline StationarityReport check_stationarity(const LinearParams& params, Family family) {
    StationarityReport r;
    if (params.alpha.size() != 1 || params.beta.size() != 1) return r;
    r.applicable = true;
    const double a1 = params.alpha[0];
    const double b1 = params.beta[0];
    const double ab = relu(a1);
    const double bb = relu(b1);
    const double omega = family == Family::NegBin ? 1.0 + 1.0 / params.n : 1.0;
    r.c11_bar = ab + bb;
    r.second_order_value = omega * ab * ab + 2.0 * ab * bb + bb * bb;
    r.first_order_ok = r.c11_bar < 1.0 && std::abs(b1) < 1.0;
    r.second_order_ok = r.first_order_ok && r.second_order_value < 1.0;
    return r;
}

/**
 * Second-order stationarity of the linear NB/Poisson INARCH(p) model for p <= 2
 * (q = 0, non-negative coefficients). Returns the value that must stay below 1:
 *   p = 1:  omega a1^2
 *   p = 2:  omega (a1^2 (1 + a2) / (1 - a2) + a2^2)
 * obtained by closing the autocovariance recursions.
 */
inline double inarch_second_order_value(const LinearParams& params, Family family) {
    if (!params.beta.empty()) throw DomainError("INARCH check requires q = 0");
    const double omega = family == Family::NegBin ? 1.0 + 1.0 / params.n : 1.0;
    if (params.alpha.size() == 1) return omega * params.alpha[0] * params.alpha[0];
    if (params.alpha.size() == 2) {
        const double a1 = params.alpha[0], a2 = params.alpha[1];
        if (!(a2 < 1.0)) return std::numeric_limits<double>::infinity();
        return omega * (a1 * a1 * (1.0 + a2) / (1.0 - a2) + a2 * a2);
    }
    throw DomainError("INARCH second-order check is only available for p <= 2");
}

inline bool inarch_second_order_ok(const LinearParams& params, Family family) {
    return params.coefficient_sum() < 1.0 && inarch_second_order_value(params, family) < 1.0;
}

}  // namespace softcount
