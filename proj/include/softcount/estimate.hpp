#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "softcount/error.hpp"
#include "softcount/fit_result.hpp"
#include "softcount/likelihood.hpp"
#include "softcount/model.hpp"
#include "softcount/moments.hpp"
#include "softcount/optimize.hpp"
#include "softcount/parallel.hpp"
#include "softcount/rng.hpp"
#include "softcount/series.hpp"
#include "softcount/simulate.hpp"

namespace softcount {

/// How the NB dispersion enters the optimizer's parameter vector.
enum class DispersionEncoding { LogN, Direct };

/// Natural-scale free parameters: alpha0, alpha_1..p, beta_1..q, [n].
inline std::vector<double> natural_vector(const ModelSpec& spec, const LinearParams& p) {
    std::vector<double> v{p.alpha0};
    v.insert(v.end(), p.alpha.begin(), p.alpha.end());
    v.insert(v.end(), p.beta.begin(), p.beta.end());
    if (spec.family == Family::NegBin) v.push_back(p.n);
    return v;
}

inline std::vector<double> encode(const ModelSpec& spec, const LinearParams& p,
                                  DispersionEncoding enc = DispersionEncoding::LogN) {
    auto v = natural_vector(spec, p);
    if (spec.family == Family::NegBin && enc == DispersionEncoding::LogN) v.back() = std::log(v.back());
    return v;
}

inline LinearParams decode(const ModelSpec& spec, const std::vector<double>& theta,
                           DispersionEncoding enc = DispersionEncoding::LogN) {
    if (theta.size() != spec.free_parameters()) throw DomainError("parameter vector has the wrong length");
    LinearParams p;
    p.alpha0 = theta[0];
    p.alpha.assign(theta.begin() + 1, theta.begin() + 1 + static_cast<std::ptrdiff_t>(spec.p));
    p.beta.assign(theta.begin() + 1 + static_cast<std::ptrdiff_t>(spec.p),
                  theta.begin() + 1 + static_cast<std::ptrdiff_t>(spec.p + spec.q));
    if (spec.family == Family::NegBin) p.n = enc == DispersionEncoding::LogN ? std::exp(theta.back()) : theta.back();
    return p;
}

/// Conditional negative log-likelihood of a softplus-linear model.
inline double negloglik(const ModelSpec& spec, const LinearParams& params, const CountSeries& series) {
    if (spec.link != Link::SoftplusLinear) throw DomainError("negloglik requires the softplus link");
    const auto lambda = conditional_mean_path(spec, params, series);
    return CountLikelihood(spec.family, series).negloglik(lambda, params.n);
}

namespace detail {

// Objective in encoded coordinates; failures map to +infinity for the optimizers.
class LinearObjective {
public:
    LinearObjective(const ModelSpec& spec, const CountSeries& series, DispersionEncoding enc = DispersionEncoding::LogN)
        : spec_(spec), series_(series), lik_(spec.family, series), presample_(presample_value(series)), enc_(enc) {}

    double operator()(const std::vector<double>& theta) const {
        try {
            const auto p = decode(spec_, theta, enc_);
            if (spec_.family == Family::NegBin && !(p.n > 0.0 && std::isfinite(p.n)))
                return std::numeric_limits<double>::infinity();
            const auto lambda = linear_mean_recursion(spec_, p, series_.values, series_.size(), presample_);
            return lik_.negloglik(lambda, p.n);
        } catch (const NumericError&) {
            return std::numeric_limits<double>::infinity();
        } catch (const DomainError&) {
            return std::numeric_limits<double>::infinity();
        }
    }

    double presample() const { return presample_; }

private:
    ModelSpec spec_;
    const CountSeries& series_;
    CountLikelihood lik_;
    double presample_;
    DispersionEncoding enc_;
};

}  // namespace detail

/**
 * Standard errors from the inverse of a central-difference Hessian of `f` at
 * theta (step max(1e-5, 1e-4 |theta_i|)). `jacobian` holds d(natural)/d(theta)
 * per coordinate for the delta-method back-transform. Parameters loading on a
 * Hessian eigenvalue that is non-positive or within the finite-difference
 * noise are reported as NaN.
 */
inline std::vector<double> hessian_standard_errors(const Objective& f, const std::vector<double>& theta,
                                                   const std::vector<double>& jacobian) {
    const std::size_t d = theta.size();
    const double nan = std::numeric_limits<double>::quiet_NaN();
    std::vector<double> h(d);
    for (std::size_t i = 0; i < d; ++i) h[i] = std::max(1e-5, 1e-4 * std::abs(theta[i]));
    const double f0 = f(theta);
    if (!std::isfinite(f0)) return std::vector<double>(d, nan);

    Eigen::MatrixXd H(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
    std::vector<double> x = theta;
    for (std::size_t i = 0; i < d; ++i) {
        x[i] = theta[i] + h[i];
        const double fp = f(x);
        x[i] = theta[i] - h[i];
        const double fm = f(x);
        x[i] = theta[i];
        H(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) = (fp - 2.0 * f0 + fm) / (h[i] * h[i]);
        for (std::size_t j = 0; j < i; ++j) {
            double acc = 0.0;
            for (int si : {1, -1})
                for (int sj : {1, -1}) {
                    x[i] = theta[i] + si * h[i];
                    x[j] = theta[j] + sj * h[j];
                    acc += si * sj * f(x);
                }
            x[i] = theta[i];
            x[j] = theta[j];
            const double hij = acc / (4.0 * h[i] * h[j]);
            H(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = hij;
            H(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = hij;
        }
    }
    if (!H.allFinite()) return std::vector<double>(d, nan);

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(H);
    const double scale = eig.eigenvalues().cwiseAbs().maxCoeff();
    // eigenvalues at the level of the difference-quotient rounding noise count as zero
    const double h_min = *std::min_element(h.begin(), h.end());
    const double noise = 100.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(f0)) / (h_min * h_min);
    const double cutoff = std::max(1e-9 * scale, noise);
    std::vector<bool> flagged(d, false);
    for (Eigen::Index e = 0; e < eig.eigenvalues().size(); ++e) {
        if (eig.eigenvalues()(e) > cutoff) continue;
        for (std::size_t i = 0; i < d; ++i)
            if (std::abs(eig.eigenvectors()(static_cast<Eigen::Index>(i), e)) > 1e-3) flagged[i] = true;
    }
    std::vector<Eigen::Index> keep;
    for (std::size_t i = 0; i < d; ++i)
        if (!flagged[i]) keep.push_back(static_cast<Eigen::Index>(i));
    std::vector<double> se(d, nan);
    if (keep.empty()) return se;
    Eigen::MatrixXd sub(keep.size(), keep.size());
    for (std::size_t a = 0; a < keep.size(); ++a)
        for (std::size_t b = 0; b < keep.size(); ++b) sub(a, b) = H(keep[a], keep[b]);
    Eigen::LLT<Eigen::MatrixXd> llt(sub);
    if (llt.info() != Eigen::Success) return se;
    const Eigen::MatrixXd cov = llt.solve(Eigen::MatrixXd::Identity(sub.rows(), sub.cols()));
    for (std::size_t a = 0; a < keep.size(); ++a) {
        const auto i = static_cast<std::size_t>(keep[a]);
        const double v = cov(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(a));
        se[i] = v > 0.0 ? std::abs(jacobian[i]) * std::sqrt(v) : nan;
    }
    return se;
}

/// Standard errors of (alpha0, alpha, beta, [n]) at the given estimates.
inline std::vector<double> standard_errors(const ModelSpec& spec, const LinearParams& estimates,
                                           const CountSeries& series,
                                           DispersionEncoding enc = DispersionEncoding::LogN) {
    detail::LinearObjective obj(spec, series, enc);
    const auto theta = encode(spec, estimates, enc);
    std::vector<double> jac(theta.size(), 1.0);
    if (spec.family == Family::NegBin && enc == DispersionEncoding::LogN) jac.back() = estimates.n;
    return hessian_standard_errors(std::cref(obj), theta, jac);
}

/**
 * Method-of-moments starting values.
 *
 * (1,1): phi = alpha1 + beta1 from the ratio of lag-2 to lag-1 sample ACF,
 * then the split of phi that reproduces the lag-1 ACF of the linear model,
 * alpha0 from the mean and n from the dispersion ratio. Insignificant lag-1
 * correlation (|r1| < 2/sqrt(s)) gives alpha1 = beta1 = 0.
 *
 * Other orders: alpha_i = 0.1 r_i, beta_j = 0.1, alpha0 = mean (1 - 0.1 (p + q)),
 * n = mean / (D - 1).
 * n is clamped to [0.1, 1e4].
 */
inline LinearParams init_params(const ModelSpec& spec, const CountSeries& series) {
    spec.validate();
    const std::size_t s = series.size();
    if (s < 10 * (spec.p + spec.q + 2))
        throw DomainError("series too short for estimation: need at least 10 (p + q + 2) observations");
    const auto y = series.as_real();
    const double mean = sample_mean(y);
    const double var = sample_variance(y);
    const double disp = mean > 0.0 ? var / mean : 1.0;
    const std::size_t lags = std::max<std::size_t>(spec.p, 2);
    std::vector<double> acf(lags, 0.0);
    if (var > 0.0) acf = sample_acf(y, lags);
    const double band = 2.0 / std::sqrt(static_cast<double>(s));

    LinearParams p;
    p.alpha.assign(spec.p, 0.0);
    p.beta.assign(spec.q, 0.0);
    double n_raw;
    if (spec.p == 1 && spec.q == 1) {
        const double r1 = acf[0];
        double a1 = 0.0, b1 = 0.0;
        if (std::abs(r1) >= band) {
            const double phi = std::clamp(acf[1] / r1, -0.95, 0.95);
            double best = std::numeric_limits<double>::infinity();
            for (int k = 0; k <= 380; ++k) {
                // scan |beta| outward from zero so ties prefer small beta
                const double mag = 0.005 * (k / 2 + k % 2);
                const double b = (k % 2 == 0) ? mag : -mag;
                if (std::abs(b) > 0.95) continue;
                const double a = phi - b;
                const double den = 1.0 - 2.0 * a * b - b * b;
                if (!(den > 1e-6)) continue;
                const double rho1 = a * (1.0 - a * b - b * b) / den;
                const double err = std::abs(rho1 - r1);
                if (err < best) {
                    best = err;
                    a1 = a;
                    b1 = b;
                }
            }
        }
        p.alpha[0] = a1;
        p.beta[0] = b1;
        const double A = 1.0 - 2.0 * a1 * b1 - b1 * b1;
        const double B = A - a1 * a1;
        const double denom = disp * B - A;
        n_raw = denom > 0.0 ? (A * mean + disp * a1 * a1) / denom : 1e4;
    } else {
        for (std::size_t i = 0; i < spec.p; ++i) p.alpha[i] = 0.1 * acf[i];
        for (std::size_t j = 0; j < spec.q; ++j) p.beta[j] = 0.1;
        n_raw = disp > 1.0 ? mean / (disp - 1.0) : 1e4;
    }
    p.alpha0 = spec.p == 1 && spec.q == 1 ? mean * (1.0 - p.coefficient_sum())
                                          : mean * (1.0 - 0.1 * static_cast<double>(spec.p + spec.q));
    p.n = spec.family == Family::NegBin ? std::clamp(std::isfinite(n_raw) ? n_raw : 1e4, 0.1, 1e4) : 1.0;
    return p;
}

namespace detail {

inline LinearParams jitter(const ModelSpec& spec, const LinearParams& p, RngStream& rng) {
    auto v = natural_vector(spec, p);
    for (double& x : v) x *= 0.8 + 0.4 * rng.uniform();
    return decode(spec, [&] {
        if (spec.family == Family::NegBin) v.back() = std::log(v.back());
        return v;
    }());
}

}  // namespace detail

/**
 * Conditional maximum likelihood fit of a softplus-linear model.
 *
 * Each start runs Nelder-Mead to locate a basin and then BFGS with
 * central-difference gradients. Start 0 is init_params; starts
 * 1..restart_count jitter it multiplicatively by U(0.8, 1.2). The converged
 * start with the highest log-likelihood wins (earliest on ties); if none
 * converge the best point is returned with converged = false.
 */
inline FitResult fit_cml(const ModelSpec& spec, const CountSeries& series, const OptimizerOptions& opts = {}) {
    spec.validate();
    if (spec.link != Link::SoftplusLinear) throw DomainError("fit_cml requires the softplus link");
    const LinearParams init = init_params(spec, series);
    detail::LinearObjective obj(spec, series);
    const Objective f = std::cref(obj);
    const ObjectiveWithGradient fg = [&](const std::vector<double>& x, std::vector<double>& g) {
        const double v = f(x);
        g = std::isfinite(v) ? numeric_gradient(f, x) : std::vector<double>(x.size(), 0.0);
        return v;
    };

    OptimResult best;
    std::size_t best_iterations = 0;
    bool have_best = false;
    for (std::size_t r = 0; r <= opts.restart_count; ++r) {
        LinearParams start = init;
        if (r > 0) {
            RngStream rng(opts.seed, r);
            start = detail::jitter(spec, init, rng);
        }
        const auto theta0 = encode(spec, start);
        std::vector<double> step(theta0.size());
        for (std::size_t i = 0; i < step.size(); ++i) step[i] = 0.1 * std::max(std::abs(theta0[i]), 0.5);
        const auto nm = nelder_mead(f, theta0, step, 200 * theta0.size());
        auto refined = bfgs(fg, nm.x, opts);
        if (!(refined.value <= nm.value)) {
            refined.x = nm.x;
            refined.value = nm.value;
            refined.converged = false;
        }
        const std::size_t iters = nm.iterations + refined.iterations;
        const bool better = !have_best || (refined.converged && !best.converged) ||
                            (refined.converged == best.converged && refined.value < best.value);
        if (better) {
            best = std::move(refined);
            best_iterations = iters;
            have_best = true;
        }
    }

    FitResult out;
    out.spec = spec;
    out.s = series.size();
    out.k = spec.free_parameters();
    out.presample = obj.presample();
    out.converged = best.converged && std::isfinite(best.value);
    out.iterations = best_iterations;
    out.restarts_used = opts.restart_count;
    const LinearParams est = decode(spec, best.x);
    out.estimates = est;
    if (std::isfinite(best.value)) {
        out.loglik = -best.value;
        out.lambda_path = conditional_mean_path(spec, est, series, out.presample);
        out.set_criteria();
    } else {
        out.loglik = -std::numeric_limits<double>::infinity();
        out.aic = out.bic = std::numeric_limits<double>::infinity();
        out.warnings.emplace_back("no finite likelihood value was found");
    }
    out.std_errors = out.converged ? standard_errors(spec, est, series)
                                   : std::vector<double>(out.k, std::numeric_limits<double>::quiet_NaN());
    if (!out.converged) out.warnings.emplace_back("optimizer did not converge");
    const auto st = check_stationarity(est, spec.family);
    if (st.applicable && !st.first_order_ok) out.warnings.emplace_back("estimates violate the first-order moment condition");
    else if (st.applicable && !st.second_order_ok)
        out.warnings.emplace_back("estimates violate the second-order moment condition");
    return out;
}

struct StudyParamSummary {
    std::string name;
    double truth = 0.0;
    double mean = 0.0;
    double abs_bias = 0.0;  // (1/R) sum |estimate - truth|
    double mse = 0.0;
};

struct StudyRow {
    std::size_t size = 0;
    std::size_t replications = 0;
    std::size_t used = 0;      // converged replications entering the summaries
    std::size_t excluded = 0;  // non-converged replications
    std::vector<StudyParamSummary> params;

    double exclusion_rate() const { return replications ? static_cast<double>(excluded) / replications : 0.0; }
};

/**
 * Replicated simulate-then-fit study. Replication r at size index i draws its
 * path from RngStream(seed, (i << 32) | r); non-converged fits are excluded
 * from the summaries and counted.
 */
inline std::vector<StudyRow> simulation_study(const ModelSpec& spec, const LinearParams& truth,
                                              const std::vector<std::size_t>& sizes, std::size_t replications,
                                              std::uint64_t seed, const OptimizerOptions& opts = {},
                                              std::size_t burn_in = 500) {
    spec.validate();
    truth.validate(spec);
    if (replications == 0) throw DomainError("simulation_study: replications must be >= 1");
    const auto truth_vec = natural_vector(spec, truth);
    const auto names = parameter_names(spec);
    std::vector<StudyRow> rows;
    for (std::size_t si = 0; si < sizes.size(); ++si) {
        std::vector<std::vector<double>> est(replications);
        std::vector<char> ok(replications, 0);
        parallel_for(replications, [&](std::size_t r) {
            const std::uint64_t stream = (static_cast<std::uint64_t>(si) << 32) | r;
            SimConfig cfg{spec, truth, sizes[si], burn_in, RngStream(seed, stream)};
            const auto path = simulate_path(cfg);
            OptimizerOptions o = opts;
            o.seed = seed ^ (stream * 0x9E3779B97F4A7C15ull);
            const auto fit = fit_cml(spec, path, o);
            ok[r] = fit.converged;
            est[r] = natural_vector(spec, fit.linear());
        });
        StudyRow row;
        row.size = sizes[si];
        row.replications = replications;
        for (std::size_t r = 0; r < replications; ++r) (ok[r] ? row.used : row.excluded)++;
        for (std::size_t k = 0; k < truth_vec.size(); ++k) {
            StudyParamSummary ps{names[k], truth_vec[k], 0.0, 0.0, 0.0};
            for (std::size_t r = 0; r < replications; ++r) {
                if (!ok[r]) continue;
                const double e = est[r][k] - truth_vec[k];
                ps.mean += est[r][k];
                ps.abs_bias += std::abs(e);
                ps.mse += e * e;
            }
            const double u = static_cast<double>(row.used);
            if (row.used > 0) {
                ps.mean /= u;
                ps.abs_bias /= u;
                ps.mse /= u;
            } else {
                ps.mean = ps.abs_bias = ps.mse = std::numeric_limits<double>::quiet_NaN();
            }
            row.params.push_back(ps);
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

}  // namespace softcount
