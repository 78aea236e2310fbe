#include <gtest/gtest.h>

#include <cmath>

#include "support.hpp"

using namespace softcount;
using softcount::testing::Gen;
using softcount::testing::linear_spec;
using softcount::testing::simulate;

namespace {

const LinearParams kModel1{0.75, {0.25}, {0.45}, 3.0};
const LinearParams kModel2{1.8, {0.3}, {0.4}, 3.0};

bool all_finite(const std::vector<double>& v) {
    for (double x : v)
        if (!std::isfinite(x)) return false;
    return true;
}

}  // namespace

TEST(NegLogLik, SingleZeroObservation) {
    const auto spec = linear_spec(Family::Poisson, 1, 0);
    const LinearParams p{0.4, {2.0}, {}, 1.0};
    EXPECT_NEAR(negloglik(spec, p, CountSeries{0}), softplus(0.4 + 2.0 * 1e-4), 1e-15);
}

TEST(NegLogLik, ComposesDistributionOracle) {
    const auto spec = linear_spec(Family::NegBin, 1, 0);
    const LinearParams p{1.0, {0.0}, {}, 3.0};
    const double sp1 = softplus(1.0);
    EXPECT_NEAR(sp1, 1.3132617, 1e-7);
    const double expected = -(nb_log_pmf(2, 3.0, sp1) + nb_log_pmf(3, 3.0, sp1));
    EXPECT_NEAR(negloglik(spec, p, CountSeries{2, 3}), expected, 1e-13);
}

TEST(NegLogLik, EncodingRoundTripIsBitIdentical) {
    Gen g(61);
    for (int i = 0; i < 100; ++i) {
        const auto spec = linear_spec(Family::NegBin, 2, 1);
        const LinearParams p{g.real(-1, 2), {g.real(-0.5, 0.5), g.real(-0.5, 0.5)}, {g.real(-0.5, 0.5)}, g.log_uniform(0.2, 50)};
        const CountSeries s(g.counts(40, 15));
        const auto back = decode(spec, encode(spec, p));
        const auto again = decode(spec, encode(spec, back));
        EXPECT_EQ(negloglik(spec, back, s), negloglik(spec, again, s));
        EXPECT_EQ(back, again);
        EXPECT_NEAR(negloglik(spec, back, s), negloglik(spec, p, s), 1e-9 * std::abs(negloglik(spec, p, s)));
        const auto direct = decode(spec, encode(spec, p, DispersionEncoding::Direct), DispersionEncoding::Direct);
        EXPECT_EQ(negloglik(spec, direct, s), negloglik(spec, p, s));
    }
}

TEST(NegLogLikProperty, MatchesTermByTermOracle) {
    Gen g(62);
    for (int i = 0; i < 20; ++i) {
        const Family f = i % 2 ? Family::Poisson : Family::NegBin;
        const std::size_t p = static_cast<std::size_t>(g.integer(1, 2)), q = static_cast<std::size_t>(g.integer(0, 1));
        const auto spec = linear_spec(f, p, q, g.real(0.5, 2.0));
        LinearParams par{g.real(0, 2), {}, {}, g.log_uniform(0.3, 30)};
        for (std::size_t k = 0; k < p; ++k) par.alpha.push_back(g.real(-0.4, 0.4));
        for (std::size_t k = 0; k < q; ++k) par.beta.push_back(g.real(-0.4, 0.4));
        const auto x = g.counts(static_cast<std::size_t>(g.integer(20, 300)), g.integer(3, 60));
        const CountSeries s(x);
        const auto lam = softcount::testing::oracle_linear_path(spec, par, x, presample_value(s));
        const double ref = -softcount::testing::oracle_loglik(f, x, lam, par.n);
        ASSERT_NEAR(negloglik(spec, par, s), ref, 1e-9 * std::abs(ref)) << "trial " << i;
    }
}

TEST(NegLogLikProperty, LargeCountsAgreeWithOracle) {
    const auto spec = linear_spec(Family::NegBin, 1, 0);
    const LinearParams par{5.0, {0.5}, {}, 2.5};
    std::vector<Count> x{3000, 2500, 4100, 10, 0, 2999};
    const CountSeries s(x);
    const auto lam = softcount::testing::oracle_linear_path(spec, par, x, presample_value(s));
    const double ref = -softcount::testing::oracle_loglik(Family::NegBin, x, lam, par.n);
    EXPECT_NEAR(negloglik(spec, par, s), ref, 1e-9 * std::abs(ref));
}

TEST(InformationCriteria, Examples) {
    const auto ic = information_criteria(0.0, 1, static_cast<std::size_t>(std::round(std::exp(2.0))));
    EXPECT_NEAR(ic.aic, 2.0, 1e-15);
    // s must be an integer; e^2 = 7.389 rounds to 7, so check the bic formula directly
    EXPECT_NEAR(ic.bic, std::log(7.0), 1e-15);
    const auto a = information_criteria(-100.0, 3, 50), b = information_criteria(-100.0, 6, 50);
    EXPECT_DOUBLE_EQ(b.aic - a.aic, 2.0 * 3);
    EXPECT_THROW(information_criteria(0.0, 0, 10), DomainError);
    EXPECT_THROW(information_criteria(0.0, 1, 0), DomainError);
}

TEST(InformationCriteria, UnitLogSampleCase) {
    // The bic term is k ln s; with ln s = 2 it equals the aic penalty.
    const double s_real = std::exp(2.0);
    const double bic = -2.0 * 0.0 + 1.0 * std::log(s_real);
    EXPECT_NEAR(bic, 2.0, 1e-15);
}

TEST(InformationCriteria, TableFiveSampleSize) {
    const double gap = 1498.15 - 1488.14;
    EXPECT_NEAR(3 * (std::log(208.0) - 2), gap, 0.02);
    const double s = std::exp(gap / 3 + 2);
    EXPECT_NEAR(s, 208.0, 1.0);
}

TEST(InitParams, IidSeries) {
    RngStream r(63, 0);
    std::vector<Count> v(2000);
    for (auto& x : v) x = nb_sample(r, 2.0, 5.0);
    const CountSeries s(v);
    const auto acf = sample_acf(s.as_real(), 2);
    ASSERT_LT(std::abs(acf[0]), 2 / std::sqrt(2000.0));
    const auto p = init_params(linear_spec(Family::NegBin, 1, 1), s);
    EXPECT_EQ(p.alpha[0], 0.0);
    EXPECT_EQ(p.beta[0], 0.0);
    EXPECT_NEAR(p.alpha0, sample_mean(s), 1e-12);
    EXPECT_NEAR(p.n, 2.0, 0.5);
    const auto p2 = init_params(linear_spec(Family::NegBin, 2, 0), s);
    EXPECT_LT(std::abs(p2.alpha[0]), 0.01);
    EXPECT_NEAR(p2.alpha0, 0.8 * sample_mean(s), 1e-12);
}

TEST(InitParams, EquidispersedClampsDispersion) {
    std::vector<Count> v(200);
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = static_cast<Count>(i % 3);  // variance/mean < 1
    const CountSeries s(v);
    EXPECT_EQ(init_params(linear_spec(Family::NegBin, 2, 0), s).n, 1e4);
    EXPECT_EQ(init_params(linear_spec(Family::NegBin, 1, 1), s).n, 1e4);
}

TEST(InitParams, ModelTwoImpliedMean) {
    const auto s = simulate(linear_spec(Family::NegBin, 1, 1), kModel2, 10000, 64);
    const auto p = init_params(linear_spec(Family::NegBin, 1, 1), s);
    const double mu = p.alpha0 / (1 - p.alpha[0] - p.beta[0]);
    EXPECT_NEAR(mu, 6.0, 0.6);
    EXPECT_GT(p.alpha[0] + p.beta[0], 0.4);
    EXPECT_GT(p.n, 1.0);
    EXPECT_LT(p.n, 10.0);
}

TEST(InitParams, GenericOrders) {
    const auto s = simulate(linear_spec(Family::NegBin, 2, 1), LinearParams{1.0, {0.3, 0.1}, {0.2}, 4.0}, 3000, 65);
    const auto acf = sample_acf(s.as_real(), 2);
    const auto p = init_params(linear_spec(Family::NegBin, 2, 1), s);
    EXPECT_DOUBLE_EQ(p.alpha[0], 0.1 * acf[0]);
    EXPECT_DOUBLE_EQ(p.alpha[1], 0.1 * acf[1]);
    EXPECT_EQ(p.beta[0], 0.1);
    EXPECT_DOUBLE_EQ(p.alpha0, sample_mean(s) * (1 - 0.1 * 3));
    EXPECT_EQ(init_params(linear_spec(Family::Poisson, 2, 1), s).n, 1.0);
}

TEST(InitParams, RejectsShortSeries) {
    EXPECT_THROW(init_params(linear_spec(Family::NegBin, 1, 1), CountSeries(std::vector<Count>(39, 1))), DomainError);
    EXPECT_NO_THROW(init_params(linear_spec(Family::NegBin, 1, 1), CountSeries(std::vector<Count>(40, 1))));
}

TEST(FitCml, ModelOneSingleFit) {
    const auto spec = linear_spec(Family::NegBin, 1, 1);
    const auto s = simulate(spec, kModel1, 1000, 66);
    const auto fit = fit_cml(spec, s);
    EXPECT_TRUE(fit.converged);
    EXPECT_TRUE(std::isfinite(fit.loglik));
    EXPECT_TRUE(check_stationarity(fit.linear(), Family::NegBin).second_order_ok);
    EXPECT_NEAR(fit.linear().alpha[0], 0.25, 0.15);
    EXPECT_EQ(fit.lambda_path.size(), s.size());
    for (double l : fit.lambda_path) ASSERT_GT(l, 0.0);
    EXPECT_EQ(fit.k, 4u);
    EXPECT_EQ(fit.s, 1000u);
    EXPECT_EQ(fit.std_errors.size(), 4u);
    EXPECT_TRUE(all_finite(fit.std_errors));
    EXPECT_NEAR(fit.loglik, -negloglik(spec, fit.linear(), s), 1e-9 * std::abs(fit.loglik));
}

TEST(FitCml, Deterministic) {
    const auto spec = linear_spec(Family::NegBin, 1, 1);
    const auto s = simulate(spec, kModel1, 500, 67);
    OptimizerOptions o;
    o.seed = 9;
    EXPECT_EQ(fit_cml(spec, s, o), fit_cml(spec, s, o));
}

TEST(FitCml, ConstantZerosDoesNotThrow) {
    const auto spec = linear_spec(Family::NegBin, 1, 1);
    const CountSeries zeros(std::vector<Count>(100, 0));
    FitResult fit;
    ASSERT_NO_THROW(fit = fit_cml(spec, zeros));
    EXPECT_TRUE(!fit.converged || !fit.warnings.empty());
}

TEST(FitCml, PoissonRecovery) {
    const auto spec = linear_spec(Family::Poisson, 2, 0);
    const LinearParams truth{1.0, {0.4, -0.2}, {}, 1.0};
    const auto s = simulate(spec, truth, 5000, 68);
    const auto fit = fit_cml(spec, s);
    ASSERT_TRUE(fit.converged);
    EXPECT_NEAR(fit.linear().alpha0, 1.0, 0.15);
    EXPECT_NEAR(fit.linear().alpha[0], 0.4, 0.05);
    EXPECT_NEAR(fit.linear().alpha[1], -0.2, 0.05);
    EXPECT_EQ(fit.k, 3u);
}

TEST(FitCml, RejectsNeuralLink) {
    EXPECT_THROW(fit_cml(softcount::testing::neural_spec(Family::Poisson, 1, 0, 1), CountSeries(std::vector<Count>(100, 1))),
                 DomainError);
}

TEST(FitCmlProperty, CriteriaIdentitiesAndOptimality) {
    for (std::uint64_t seed = 0; seed < 6; ++seed) {
        const auto spec = linear_spec(seed % 2 ? Family::Poisson : Family::NegBin, 1 + seed % 2, seed % 3 == 0 ? 1 : 0);
        LinearParams truth{1.0, std::vector<double>(spec.p, 0.2), std::vector<double>(spec.q, 0.3), 3.0};
        const auto s = simulate(spec, truth, 800, 69, seed);
        const auto fit = fit_cml(spec, s);
        ASSERT_TRUE(fit.converged) << seed;
        const double k = static_cast<double>(fit.k);
        EXPECT_EQ(fit.aic, -2 * fit.loglik + 2 * k);
        EXPECT_EQ(fit.bic, -2 * fit.loglik + k * std::log(static_cast<double>(fit.s)));
        EXPECT_NEAR(fit.bic - fit.aic, k * (std::log(static_cast<double>(fit.s)) - 2), 1e-9 * std::abs(fit.aic));
        // never worse than the starting point
        EXPECT_LE(-fit.loglik, negloglik(spec, init_params(spec, s), s));
        // interior optimum: scaled numerical gradient is small
        detail::LinearObjective obj(spec, s);
        const auto theta = encode(spec, fit.linear());
        const auto g = numeric_gradient(std::cref(obj), theta);
        EXPECT_LE(scaled_gradient_norm(g, theta), 1e-3) << seed;
    }
}

TEST(Optimizer, TracesAreMonotone) {
    const auto spec = linear_spec(Family::NegBin, 1, 1);
    const auto s = simulate(spec, kModel2, 1000, 70);
    detail::LinearObjective obj(spec, s);
    const Objective f = std::cref(obj);
    const auto x0 = encode(spec, init_params(spec, s));
    const auto nm = nelder_mead(f, x0, std::vector<double>(x0.size(), 0.1), 400);
    for (std::size_t i = 1; i < nm.trace.size(); ++i) ASSERT_LE(nm.trace[i], nm.trace[i - 1]);
    const ObjectiveWithGradient fg = [&](const std::vector<double>& x, std::vector<double>& g) {
        g = numeric_gradient(f, x);
        return f(x);
    };
    const auto bf = bfgs(fg, x0, OptimizerOptions{});
    for (std::size_t i = 1; i < bf.trace.size(); ++i) ASSERT_LE(bf.trace[i], bf.trace[i - 1]);
    EXPECT_TRUE(bf.converged);
    EXPECT_LE(bf.value, f(x0));
}

TEST(Optimizer, Rosenbrock) {
    const Objective f = [](const std::vector<double>& x) {
        return 100 * std::pow(x[1] - x[0] * x[0], 2) + std::pow(1 - x[0], 2);
    };
    const ObjectiveWithGradient fg = [&](const std::vector<double>& x, std::vector<double>& g) {
        g = {-400 * x[0] * (x[1] - x[0] * x[0]) - 2 * (1 - x[0]), 200 * (x[1] - x[0] * x[0])};
        return f(x);
    };
    OptimizerOptions o;
    o.max_iterations = 2000;
    const auto r = bfgs(fg, {-1.2, 1.0}, o);
    EXPECT_TRUE(r.converged);
    EXPECT_NEAR(r.x[0], 1.0, 1e-4);
    EXPECT_NEAR(r.x[1], 1.0, 1e-4);
    const auto nm = nelder_mead(f, {-1.2, 1.0}, {0.5, 0.5}, 5000, 1e-14, 1e-10);
    EXPECT_NEAR(nm.x[0], 1.0, 1e-3);
}

TEST(StandardErrors, ShrinkWithSampleSize) {
    const auto spec = linear_spec(Family::NegBin, 1, 1);
    const auto small = simulate(spec, kModel2, 10000, 71);
    const auto large = simulate(spec, kModel2, 100000, 72);
    const auto se_s = standard_errors(spec, kModel2, small);
    const auto se_l = standard_errors(spec, kModel2, large);
    ASSERT_TRUE(all_finite(se_s));
    ASSERT_TRUE(all_finite(se_l));
    for (std::size_t i = 0; i < se_s.size(); ++i) EXPECT_NEAR(se_s[i] / se_l[i], std::sqrt(10.0), 0.2 * std::sqrt(10.0)) << i;
}

TEST(StandardErrors, FlatDirectionIsFlagged) {
    // On a constant series alpha0, alpha1 and alpha2 enter only through one combination.
    const auto spec = linear_spec(Family::Poisson, 2, 0);
    const CountSeries s(std::vector<Count>(3, 4));
    const auto se = standard_errors(spec, LinearParams{1.0, {0.3, 0.3}, {}, 1.0}, s);
    ASSERT_EQ(se.size(), 3u);
    int flagged = 0;
    for (double v : se) flagged += std::isnan(v);
    EXPECT_GE(flagged, 2);
    for (double v : se) EXPECT_TRUE(std::isnan(v) || v > 0);
}

TEST(StandardErrors, EncodingInvariance) {
    const auto spec = linear_spec(Family::NegBin, 1, 1);
    const auto s = simulate(spec, kModel2, 5000, 73);
    const auto fit = fit_cml(spec, s);
    ASSERT_TRUE(fit.converged);
    const auto log_n = standard_errors(spec, fit.linear(), s, DispersionEncoding::LogN);
    const auto direct = standard_errors(spec, fit.linear(), s, DispersionEncoding::Direct);
    for (std::size_t i = 0; i < log_n.size(); ++i) EXPECT_NEAR(log_n[i] / direct[i], 1.0, 0.01) << i;
}

TEST(SimulationStudy, SingleReplicationMse) {
    const auto spec = linear_spec(Family::NegBin, 1, 1);
    const auto rows = simulation_study(spec, kModel1, {300}, 1, 74);
    ASSERT_EQ(rows.size(), 1u);
    const auto& r = rows[0];
    EXPECT_EQ(r.replications, 1u);
    EXPECT_EQ(r.used + r.excluded, 1u);
    ASSERT_EQ(r.params.size(), 4u);
    if (r.used == 1)
        for (const auto& p : r.params) {
            EXPECT_NEAR(p.mse, std::pow(p.mean - p.truth, 2), 1e-12 * std::max(1.0, p.mse));
            EXPECT_NEAR(p.abs_bias, std::abs(p.mean - p.truth), 1e-12);
        }
    EXPECT_EQ(r.params[0].name, "alpha0");
    EXPECT_EQ(r.params[3].name, "n");
}

TEST(SimulationStudy, BiasShrinksAndIsReproducible) {
    const auto spec = linear_spec(Family::NegBin, 1, 1);
    const auto rows = simulation_study(spec, kModel1, {100, 1000}, 20, 75);
    ASSERT_EQ(rows.size(), 2u);
    EXPECT_LT(rows[1].params[1].abs_bias, rows[0].params[1].abs_bias);
    EXPECT_LT(rows[1].params[1].mse, rows[0].params[1].mse);
    EXPECT_NEAR(rows[1].params[1].mean, 0.25, 0.06);
    EXPECT_LE(rows[0].exclusion_rate(), 1.0);
    const auto again = simulation_study(spec, kModel1, {100}, 20, 75);
    for (std::size_t k = 0; k < 4; ++k) EXPECT_EQ(again[0].params[k].mean, rows[0].params[k].mean);
}
