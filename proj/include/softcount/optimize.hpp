#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <numeric>
#include <vector>

/** @file
 * Small unconstrained minimizers: Nelder-Mead simplex search to find a basin
 * and BFGS with backtracking line search to refine it.
 */

namespace softcount {

struct OptimizerOptions {
    std::size_t max_iterations = 500;    // BFGS iterations per start
    double function_tolerance = 1e-10;   // relative change in objective
    double parameter_tolerance = 1e-8;   // relative change in parameters
    double gradient_tolerance = 1e-5;    // max_i |g_i| * max(1, |x_i|)
    std::size_t restart_count = 2;
    std::uint64_t seed = 1;
};

struct OptimResult {
    std::vector<double> x;
    double value = std::numeric_limits<double>::infinity();
    std::size_t iterations = 0;
    bool converged = false;
    std::vector<double> trace;  // objective at each accepted iterate, starting point first
};

using Objective = std::function<double(const std::vector<double>&)>;
using ObjectiveWithGradient = std::function<double(const std::vector<double>&, std::vector<double>&)>;

/// Central-difference gradient with step 1e-5 * max(1, |x_i|).
inline std::vector<double> numeric_gradient(const Objective& f, const std::vector<double>& x) {
    std::vector<double> g(x.size());
    std::vector<double> xp = x;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double h = 1e-5 * std::max(1.0, std::abs(x[i]));
        xp[i] = x[i] + h;
        const double fp = f(xp);
        xp[i] = x[i] - h;
        const double fm = f(xp);
        xp[i] = x[i];
        g[i] = (fp - fm) / (2.0 * h);
    }
    return g;
}

inline double scaled_gradient_norm(const std::vector<double>& g, const std::vector<double>& x) {
    double m = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) m = std::max(m, std::abs(g[i]) * std::max(1.0, std::abs(x[i])));
    return m;
}

/**
 * Nelder-Mead with standard coefficients (reflect 1, expand 2, contract 1/2,
 * shrink 1/2). The initial simplex offsets coordinate i by step[i].
 * Non-finite objective values are treated as +infinity.
 */
inline OptimResult nelder_mead(const Objective& f, const std::vector<double>& x0, const std::vector<double>& step,
                               std::size_t max_iterations, double ftol = 1e-9, double xtol = 1e-7) {
    const std::size_t d = x0.size();
    auto eval = [&](const std::vector<double>& x) {
        const double v = f(x);
        return std::isfinite(v) ? v : std::numeric_limits<double>::infinity();
    };
    std::vector<std::vector<double>> pts(d + 1, x0);
    std::vector<double> vals(d + 1);
    for (std::size_t i = 0; i < d; ++i) pts[i + 1][i] += step[i];
    for (std::size_t i = 0; i <= d; ++i) vals[i] = eval(pts[i]);

    OptimResult res;
    std::vector<std::size_t> order(d + 1);
    std::vector<double> centroid(d), trial(d), trial2(d);
    auto along = [&](double coef, std::vector<double>& out, const std::vector<double>& worst) {
        for (std::size_t j = 0; j < d; ++j) out[j] = centroid[j] + coef * (worst[j] - centroid[j]);
    };
    res.trace.push_back(*std::min_element(vals.begin(), vals.end()));
    for (res.iterations = 0; res.iterations < max_iterations; ++res.iterations) {
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return vals[a] < vals[b]; });
        const std::size_t best = order.front(), worst = order.back(), second = order[d - 1];

        double diam = 0.0;
        for (std::size_t i = 0; i <= d; ++i)
            for (std::size_t j = 0; j < d; ++j)
                diam = std::max(diam, std::abs(pts[i][j] - pts[best][j]) / std::max(1.0, std::abs(pts[best][j])));
        const double spread = vals[worst] - vals[best];
        if (std::isfinite(spread) && spread <= ftol * (std::abs(vals[best]) + 1e-12) && diam <= xtol) {
            res.converged = true;
            break;
        }

        std::fill(centroid.begin(), centroid.end(), 0.0);
        for (std::size_t i = 0; i <= d; ++i)
            if (i != worst)
                for (std::size_t j = 0; j < d; ++j) centroid[j] += pts[i][j] / static_cast<double>(d);

        along(-1.0, trial, pts[worst]);
        const double fr = eval(trial);
        if (fr < vals[best]) {
            along(-2.0, trial2, pts[worst]);
            const double fe = eval(trial2);
            if (fe < fr) {
                pts[worst] = trial2;
                vals[worst] = fe;
            } else {
                pts[worst] = trial;
                vals[worst] = fr;
            }
        } else if (fr < vals[second]) {
            pts[worst] = trial;
            vals[worst] = fr;
        } else {
            const bool outside = fr < vals[worst];
            along(outside ? -0.5 : 0.5, trial2, pts[worst]);
            const double fc = eval(trial2);
            if (fc < std::min(fr, vals[worst])) {
                pts[worst] = trial2;
                vals[worst] = fc;
            } else {
                for (std::size_t i = 0; i <= d; ++i) {
                    if (i == best) continue;
                    for (std::size_t j = 0; j < d; ++j) pts[i][j] = pts[best][j] + 0.5 * (pts[i][j] - pts[best][j]);
                    vals[i] = eval(pts[i]);
                }
            }
        }
        res.trace.push_back(*std::min_element(vals.begin(), vals.end()));
    }
    const auto it = std::min_element(vals.begin(), vals.end());
    res.x = pts[static_cast<std::size_t>(it - vals.begin())];
    res.value = *it;
    return res;
}

/**
 * BFGS on the inverse Hessian with an Armijo backtracking line search.
 * Converges when the scaled gradient norm drops below gradient_tolerance, or
 * when a step changes both the objective and every parameter by less than
 * the relative function and parameter tolerances.
 */
inline OptimResult bfgs(const ObjectiveWithGradient& fg, const std::vector<double>& x0, const OptimizerOptions& opts) {
    const std::size_t d = x0.size();
    OptimResult res;
    res.x = x0;
    std::vector<double> g(d), gn(d), xn(d), dir(d), s(d), y(d);
    double f = fg(res.x, g);
    res.value = f;
    res.trace.push_back(f);
    if (!std::isfinite(f)) return res;

    std::vector<double> H(d * d, 0.0);
    auto reset = [&](double scale) {
        std::fill(H.begin(), H.end(), 0.0);
        for (std::size_t i = 0; i < d; ++i) H[i * d + i] = scale;
    };
    reset(1.0 / std::max(1.0, scaled_gradient_norm(g, res.x)));
    bool fresh = true;

    for (res.iterations = 0; res.iterations < opts.max_iterations; ++res.iterations) {
        if (scaled_gradient_norm(g, res.x) <= opts.gradient_tolerance) {
            res.converged = true;
            break;
        }
        double slope = 0.0;
        for (std::size_t i = 0; i < d; ++i) {
            dir[i] = 0.0;
            for (std::size_t j = 0; j < d; ++j) dir[i] -= H[i * d + j] * g[j];
            slope += dir[i] * g[i];
        }
        if (!(slope < 0.0)) {
            reset(1.0 / std::max(1.0, scaled_gradient_norm(g, res.x)));
            fresh = true;
            for (std::size_t i = 0; i < d; ++i) dir[i] = -H[i * d + i] * g[i];
            slope = 0.0;
            for (std::size_t i = 0; i < d; ++i) slope += dir[i] * g[i];
        }
        double t = 1.0;
        double fnew = std::numeric_limits<double>::infinity();
        bool accepted = false;
        for (int k = 0; k < 60; ++k) {
            for (std::size_t i = 0; i < d; ++i) xn[i] = res.x[i] + t * dir[i];
            fnew = fg(xn, gn);
            if (std::isfinite(fnew) && fnew <= f + 1e-4 * t * slope) {
                accepted = true;
                break;
            }
            t *= 0.5;
        }
        if (!accepted) {
            if (!fresh) {
                reset(1.0 / std::max(1.0, scaled_gradient_norm(g, res.x)));
                fresh = true;
                continue;
            }
            res.converged = scaled_gradient_norm(g, res.x) <= 10.0 * opts.gradient_tolerance;
            break;
        }
        double sy = 0.0, yy = 0.0, ss = 0.0;
        bool small_step = true;
        for (std::size_t i = 0; i < d; ++i) {
            s[i] = xn[i] - res.x[i];
            y[i] = gn[i] - g[i];
            sy += s[i] * y[i];
            yy += y[i] * y[i];
            ss += s[i] * s[i];
            if (std::abs(s[i]) > opts.parameter_tolerance * (1.0 + std::abs(res.x[i]))) small_step = false;
        }
        const bool small_change = std::abs(f - fnew) <= opts.function_tolerance * (1.0 + std::abs(f));
        res.x = xn;
        g = gn;
        f = fnew;
        res.value = f;
        res.trace.push_back(f);
        if (small_change && small_step) {
            res.converged = true;
            ++res.iterations;
            break;
        }
        if (sy > 1e-12 * std::sqrt(ss * yy)) {
            if (fresh) reset(sy / yy);
            fresh = false;
            // H <- (I - rho s y^T) H (I - rho y s^T) + rho s s^T
            const double rho = 1.0 / sy;
            std::vector<double> hy(d, 0.0);
            for (std::size_t i = 0; i < d; ++i)
                for (std::size_t j = 0; j < d; ++j) hy[i] += H[i * d + j] * y[j];
            double yhy = 0.0;
            for (std::size_t i = 0; i < d; ++i) yhy += y[i] * hy[i];
            for (std::size_t i = 0; i < d; ++i)
                for (std::size_t j = 0; j < d; ++j)
                    H[i * d + j] += rho * ((1.0 + rho * yhy) * s[i] * s[j] - hy[i] * s[j] - s[i] * hy[j]);
        }
    }
    return res;
}

}  // namespace softcount
