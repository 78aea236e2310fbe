#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "softcount/distributions.hpp"
#include "softcount/error.hpp"
#include "softcount/model.hpp"
#include "softcount/series.hpp"

namespace softcount {

/**
 * Conditional negative log-likelihood of a count series given its conditional
 * means. Terms that depend on the data only (ln x!, and the rising-factorial
 * sum of the NB kernel grouped by count level) are precomputed once.
 *
 * NB summand:      x ln(lambda/n) - (n+x) ln(1 + lambda/n) + sum_{v=1}^{x} ln(v+n-1) - ln x!
 * Poisson summand: x ln(lambda) - lambda - ln x!
 */
class CountLikelihood {
public:
    CountLikelihood(Family family, const CountSeries& series) : family_(family), x_(series.as_real()) {
        Count xmax = 0;
        for (Count v : series.values) {
            if (v < 0) throw DomainError("counts must be non-negative");
            log_factorial_sum_ += log_factorial(static_cast<double>(v));
            xmax = std::max(xmax, v);
        }
        grouped_ = xmax <= 1'000'000;
        if (grouped_) {
            // tail_[v] = #{t : x_t >= v}
            tail_.assign(static_cast<std::size_t>(xmax) + 1, 0.0);
            for (Count v : series.values) tail_[static_cast<std::size_t>(v)] += 1.0;
            for (std::size_t v = tail_.size() - 1; v > 0; --v) tail_[v - 1] += tail_[v];
        }
    }

    Family family() const noexcept { return family_; }
    std::size_t size() const noexcept { return x_.size(); }

    double negloglik(std::span<const double> lambda, double n) const {
        check(lambda, n);
        double ll = -log_factorial_sum_;
        if (family_ == Family::Poisson) {
            for (std::size_t t = 0; t < x_.size(); ++t) ll += x_[t] * std::log(lambda[t]) - lambda[t];
        } else {
            for (std::size_t t = 0; t < x_.size(); ++t) {
                const double r = lambda[t] / n;
                ll += (x_[t] > 0.0 ? x_[t] * std::log(r) : 0.0) - (n + x_[t]) * std::log1p(r);
            }
            ll += rising_sum(n);
        }
        if (!std::isfinite(ll)) throw NumericError("log-likelihood is not finite");
        return -ll;
    }

    /// d(-loglik_t)/d(lambda_t)
    double dlambda(std::size_t t, double lambda, double n) const {
        if (family_ == Family::Poisson) return -(x_[t] / lambda - 1.0);
        return -(x_[t] / lambda - (n + x_[t]) / (n + lambda));
    }

    /// d(-loglik)/d(ln n), NB family only.
    double dlog_n(std::span<const double> lambda, double n) const {
        double d = 0.0;
        for (std::size_t t = 0; t < x_.size(); ++t)
            d += (lambda[t] - x_[t]) / (n + lambda[t]) - std::log1p(lambda[t] / n);
        d += rising_sum_deriv(n);
        return -n * d;
    }

private:
    void check(std::span<const double> lambda, double n) const {
        if (lambda.size() != x_.size()) throw DomainError("likelihood: lambda path length mismatch");
        if (family_ == Family::NegBin && (!std::isfinite(n) || !(n > 0.0)))
            throw NumericError("dispersion n is not a positive finite number");
    }

    double rising_sum(double n) const {
        double s = 0.0;
        if (grouped_) {
            for (std::size_t v = 1; v < tail_.size(); ++v) s += tail_[v] * std::log(static_cast<double>(v) + n - 1.0);
        } else {
            for (double x : x_) s += log_rising_factorial(static_cast<Count>(x), n);
        }
        return s;
    }

    double rising_sum_deriv(double n) const {
        double s = 0.0;
        if (grouped_) {
            for (std::size_t v = 1; v < tail_.size(); ++v) s += tail_[v] / (static_cast<double>(v) + n - 1.0);
        } else {
            for (double x : x_)
                for (Count v = 1; v <= static_cast<Count>(x); ++v) s += 1.0 / (static_cast<double>(v) + n - 1.0);
        }
        return s;
    }

    Family family_;
    std::vector<double> x_;
    double log_factorial_sum_ = 0.0;
    bool grouped_ = true;
    std::vector<double> tail_;
};

}  // namespace softcount
