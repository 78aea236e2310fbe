#pragma once

#include <cstdint>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "softcount/softcount.hpp"

/** @file
 * The `softcount` command-line front end: simulate, fit, select, moments,
 * study, diagnose and forecast. Every output embeds the full run
 * configuration, and no state is read from the environment, so a rerun with
 * the same flags and input reproduces the same bytes.
 */

namespace softcount::cli {

enum ExitCode : int { kOk = 0, kUsage = 1, kParse = 2, kNumeric = 3, kNotConverged = 4 };

struct RunConfig {
    std::string command;
    std::string input;
    std::string output;
    std::string model;  // FitResult document to reuse
    std::string family = "negbin";
    std::string link = "softplus";
    std::size_t p = 1;
    std::size_t q = 0;
    double c = 1.0;
    std::size_t hidden = 1;
    std::uint64_t seed = 1;
    int restarts = -1;  // -1: 2 for softplus, 10 for neural
    std::size_t max_iter = 0;  // 0: optimizer default
    std::size_t max_lag = 0;
    std::size_t split = 0;
    std::size_t length = 0;
    std::size_t burn_in = 500;
    double alpha0 = 0.0;
    std::vector<double> alpha;
    std::vector<double> beta;
    double n = 3.0;
    std::vector<std::size_t> sizes{100, 500, 1000};
    std::size_t replications = 100;
    std::string grid;
    std::string criterion = "aic";
    std::vector<std::string> candidates;
    std::size_t period = 0;

    ModelSpec spec() const {
        ModelSpec s;
        s.family = parse_family(family);
        s.link = parse_link(link);
        s.p = p;
        s.q = q;
        s.c = c;
        s.hidden = hidden;
        s.validate();
        return s;
    }

    LinearParams truth() const { return LinearParams{alpha0, alpha, beta, n}; }

    OptimizerOptions optimizer(Link l) const {
        OptimizerOptions o = l == Link::Neural ? default_neural_options() : OptimizerOptions{};
        if (restarts >= 0) o.restart_count = static_cast<std::size_t>(restarts);
        if (max_iter > 0) o.max_iterations = max_iter;
        o.seed = seed;
        return o;
    }

    Provenance provenance() const {
        auto list = [](const auto& v) {
            std::ostringstream os;
            for (std::size_t i = 0; i < v.size(); ++i) {
                if (i) os << ',';
                if constexpr (std::is_same_v<std::decay_t<decltype(v[i])>, double>) os << format_double(v[i]);
                else os << v[i];
            }
            return os.str();
        };
        return {{"command", command},
                {"input", input},
                {"model", model},
                {"family", family},
                {"link", link},
                {"p", std::to_string(p)},
                {"q", std::to_string(q)},
                {"c", format_double(c)},
                {"hidden", std::to_string(hidden)},
                {"seed", std::to_string(seed)},
                {"restarts", std::to_string(restarts)},
                {"max_iter", std::to_string(max_iter)},
                {"max_lag", std::to_string(max_lag)},
                {"split", std::to_string(split)},
                {"length", std::to_string(length)},
                {"burn_in", std::to_string(burn_in)},
                {"alpha0", format_double(alpha0)},
                {"alpha", list(alpha)},
                {"beta", list(beta)},
                {"n", format_double(n)},
                {"sizes", list(sizes)},
                {"replications", std::to_string(replications)},
                {"grid", grid},
                {"criterion", criterion},
                {"candidates", list(candidates)},
                {"period", std::to_string(period)}};
    }
};

class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

namespace detail {

// Writes to the --out file, or to the given stream when no path was given.
inline void emit(const std::string& path, std::ostream& fallback, const std::function<void(std::ostream&)>& body) {
    if (path.empty()) {
        body(fallback);
        return;
    }
    std::ofstream f(path, std::ios::binary);
    if (!f) throw UsageError("cannot open output file '" + path + "'");
    body(f);
}

inline std::string with_suffix(const std::string& prefix, const std::string& suffix) {
    return prefix.empty() ? std::string() : prefix + suffix;
}

inline CountSeries load_input(const RunConfig& cfg, std::ostream& err) {
    if (cfg.input.empty()) throw UsageError("--input is required");
    std::vector<std::string> warnings;
    auto series = parse_counts_csv(cfg.input, &warnings);
    for (const auto& w : warnings) err << "warning: " << w << "\n";
    return series;
}

inline FitResult fit_model(const ModelSpec& spec, const CountSeries& series, const RunConfig& cfg) {
    const auto opts = cfg.optimizer(spec.link);
    return spec.link == Link::Neural ? fit_neural(spec, series, opts) : fit_cml(spec, series, opts);
}

inline FitResult obtain_fit(const RunConfig& cfg, const CountSeries& train) {
    if (!cfg.model.empty()) {
        auto fit = parse_fit_document(cfg.model);
        if (fit.s != train.size())
            throw UsageError("model document was fitted on " + std::to_string(fit.s) +
                             " observations but the training sample has " + std::to_string(train.size()));
        return fit;
    }
    return fit_model(cfg.spec(), train, cfg);
}

inline void print_summary(std::ostream& os, const FitResult& fit) {
    os << fit.spec.label() << ": loglik " << format_double(fit.loglik) << ", AIC " << format_double(fit.aic)
       << ", BIC " << format_double(fit.bic) << (fit.converged ? "" : " (not converged)") << "\n";
}

inline int cmd_simulate(const RunConfig& cfg, std::ostream& out) {
    if (cfg.length == 0) throw UsageError("--length must be >= 1");
    SimConfig sim;
    if (!cfg.model.empty()) {
        const auto fit = parse_fit_document(cfg.model);
        sim.spec = fit.spec;
        sim.params = fit.estimates;
    } else {
        sim.spec = cfg.spec();
        if (sim.spec.link == Link::Neural) throw UsageError("simulating a neural model requires --model");
        sim.params = cfg.truth();
    }
    sim.length = cfg.length;
    sim.burn_in = cfg.burn_in;
    sim.rng = RngStream(cfg.seed, 0);
    const auto series = simulate_path(sim);
    emit(cfg.output, out, [&](std::ostream& os) { write_counts_csv(os, series, cfg.provenance()); });
    return kOk;
}

inline int cmd_fit(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    const auto series = load_input(cfg, err);
    const auto fit = fit_model(cfg.spec(), series, cfg);
    emit(cfg.output, out, [&](std::ostream& os) { write_fit_document(os, fit, cfg.provenance()); });
    print_summary(err, fit);
    for (const auto& w : fit.warnings) err << "warning: " << w << "\n";
    return fit.converged ? kOk : kNotConverged;
}

inline ModelSpec parse_candidate(const std::string& text, const RunConfig& cfg) {
    const auto parts = softcount::detail::split(text, ':');
    if (parts.size() != 3) throw UsageError("candidate must look like FAMILY:P:Q, got '" + text + "'");
    ModelSpec s = cfg.spec();
    s.family = parse_family(parts[0]);
    auto num = [&](std::string_view v) {
        const auto c = softcount::detail::parse_count_field(v);
        if (!c) throw UsageError("candidate order must be a non-negative integer in '" + text + "'");
        return static_cast<std::size_t>(*c);
    };
    s.p = num(parts[1]);
    s.q = num(parts[2]);
    s.validate();
    return s;
}

/**
 * Fits every candidate and ranks by the chosen criterion; ties go to fewer
 * parameters, then to the lower order p + q.
 */
inline int cmd_select(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    if (cfg.candidates.empty()) throw UsageError("select needs at least one --candidate");
    if (cfg.criterion != "aic" && cfg.criterion != "bic") throw UsageError("--criterion must be aic or bic");
    const auto series = load_input(cfg, err);
    std::vector<FitResult> fits;
    for (const auto& c : cfg.candidates) fits.push_back(fit_model(parse_candidate(c, cfg), series, cfg));
    std::vector<std::size_t> order(fits.size());
    std::iota(order.begin(), order.end(), 0);
    const bool use_bic = cfg.criterion == "bic";
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        const double va = use_bic ? fits[a].bic : fits[a].aic;
        const double vb = use_bic ? fits[b].bic : fits[b].aic;
        if (va != vb) return va < vb;
        if (fits[a].k != fits[b].k) return fits[a].k < fits[b].k;
        return fits[a].spec.p + fits[a].spec.q < fits[b].spec.p + fits[b].spec.q;
    });
    emit(cfg.output, out, [&](std::ostream& os) {
        write_provenance(os, cfg.provenance());
        os << "rank,candidate,model,k,loglik,aic,bic,converged\n";
        for (std::size_t r = 0; r < order.size(); ++r) {
            const auto& f = fits[order[r]];
            os << r + 1 << "," << cfg.candidates[order[r]] << ",\"" << f.spec.label() << "\"," << f.k << ","
               << format_double(f.loglik) << "," << format_double(f.aic) << "," << format_double(f.bic) << ","
               << (f.converged ? "true" : "false") << "\n";
        }
    });
    bool all_converged = true;
    for (const auto& f : fits) all_converged = all_converged && f.converged;
    err << "selected: " << fits[order.front()].spec.label() << "\n";
    return all_converged ? kOk : kNotConverged;
}

inline std::vector<SimConfig> load_grid(const RunConfig& cfg, std::size_t length) {
    const Family family = parse_family(cfg.family);
    auto make = [&](double a0, double a1, double b1, double n, double c, std::size_t i) {
        ModelSpec spec{family, Link::SoftplusLinear, 1, 1, c, 1};
        spec.validate();
        return SimConfig{spec, LinearParams{a0, {a1}, {b1}, n}, length, cfg.burn_in, RngStream(cfg.seed, i)};
    };
    std::vector<SimConfig> grid;
    if (cfg.grid.empty()) {
        if (cfg.alpha.size() != 1 || cfg.beta.size() != 1)
            throw UsageError("moments needs --grid or a single (1,1) configuration via --alpha0/--alpha/--beta");
        grid.push_back(make(cfg.alpha0, cfg.alpha[0], cfg.beta[0], cfg.n, cfg.c, 0));
        return grid;
    }
    std::ifstream in(cfg.grid);
    if (!in) throw ParseError("cannot open grid file '" + cfg.grid + "'");
    std::string line;
    std::size_t lineno = 0;
    std::vector<std::string> header;
    while (std::getline(in, line)) {
        ++lineno;
        const auto view = softcount::detail::trim(line);
        if (view.empty() || view.front() == '#') continue;
        const auto fields = softcount::detail::split(view, ',');
        if (header.empty()) {
            for (auto f : fields) header.emplace_back(f);
            continue;
        }
        if (fields.size() != header.size()) throw ParseError("grid row has the wrong number of fields", lineno);
        double a0 = 0, a1 = 0, b1 = 0, n = cfg.n, c = cfg.c;
        bool seen_a0 = false, seen_a1 = false, seen_b1 = false;
        for (std::size_t i = 0; i < fields.size(); ++i) {
            double v;
            try {
                v = parse_double(fields[i]);
            } catch (const ParseError& e) {
                throw ParseError(e.what(), lineno);
            }
            if (header[i] == "alpha0") a0 = v, seen_a0 = true;
            else if (header[i] == "alpha1") a1 = v, seen_a1 = true;
            else if (header[i] == "beta1") b1 = v, seen_b1 = true;
            else if (header[i] == "n") n = v;
            else if (header[i] == "c") c = v;
        }
        if (!seen_a0 || !seen_a1 || !seen_b1) throw ParseError("grid needs alpha0, alpha1 and beta1 columns", lineno);
        grid.push_back(make(a0, a1, b1, n, c, grid.size()));
    }
    if (grid.empty()) throw ParseError("grid file has no rows");
    return grid;
}

inline int cmd_moments(const RunConfig& cfg, std::ostream& out) {
    const std::size_t lags = cfg.max_lag ? cfg.max_lag : 3;
    const auto grid = load_grid(cfg, cfg.length ? cfg.length : 100000);
    const auto rows = moment_study(grid, lags);
    emit(cfg.output, out, [&](std::ostream& os) {
        write_provenance(os, cfg.provenance());
        os << "model,alpha0,alpha1,beta1,n,c,mu_sp,mu_lin,disp_sp,disp_lin";
        for (std::size_t h = 1; h <= lags; ++h) os << ",rho" << h << "_sp,rho" << h << "_lin";
        os << ",flag\n";
        for (std::size_t i = 0; i < rows.size(); ++i) {
            const auto& r = rows[i];
            auto lin = [&](double v) { return r.lin ? format_double(v) : std::string(); };
            os << i + 1 << "," << format_double(r.params.alpha0) << "," << format_double(r.params.alpha[0]) << ","
               << format_double(r.params.beta[0]) << "," << format_double(r.params.n) << "," << format_double(r.c)
               << "," << format_double(r.sp.mean) << "," << lin(r.lin ? r.lin->mu : 0.0) << ","
               << format_double(r.sp.dispersion) << "," << lin(r.lin ? r.lin->dispersion() : 0.0);
            for (std::size_t h = 0; h < lags; ++h)
                os << "," << format_double(r.sp.acf[h]) << "," << lin(r.lin ? r.lin->acf[h] : 0.0);
            os << ",\"" << r.flag << "\"\n";
        }
    });
    return kOk;
}

inline int cmd_study(const RunConfig& cfg, std::ostream& out) {
    const auto spec = cfg.spec();
    if (spec.link != Link::SoftplusLinear) throw UsageError("study supports the softplus link only");
    if (cfg.sizes.empty()) throw UsageError("--sizes must list at least one sample size");
    const auto rows =
        simulation_study(spec, cfg.truth(), cfg.sizes, cfg.replications, cfg.seed, cfg.optimizer(spec.link), cfg.burn_in);
    emit(cfg.output, out, [&](std::ostream& os) {
        write_provenance(os, cfg.provenance());
        os << "size,replications,used,excluded,parameter,truth,mean,abs_bias,mse\n";
        for (const auto& r : rows)
            for (const auto& p : r.params)
                os << r.size << "," << r.replications << "," << r.used << "," << r.excluded << "," << p.name << ","
                   << format_double(p.truth) << "," << format_double(p.mean) << "," << format_double(p.abs_bias)
                   << "," << format_double(p.mse) << "\n";
    });
    return kOk;
}

inline int cmd_diagnose(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    const auto series = load_input(cfg, err);
    const auto fit = obtain_fit(cfg, series);
    const auto z = pearson_residuals(fit, series).values;
    const std::size_t lags = cfg.max_lag ? cfg.max_lag : std::min<std::size_t>(20, z.size() - 1);
    const auto acf = sample_acf(z, lags);
    const auto pacf = pacf_from_acf(acf);
    const auto cp = cumulative_periodogram(z);
    const auto prov = cfg.provenance();
    emit(detail::with_suffix(cfg.output, ".residuals.csv"), out, [&](std::ostream& os) {
        write_provenance(os, prov);
        os << "z\n";
        for (double v : z) os << format_double(v) << "\n";
    });
    emit(detail::with_suffix(cfg.output, ".acf.csv"), out, [&](std::ostream& os) {
        write_provenance(os, prov);
        os << "lag,acf,pacf,band\n";
        const double band = 1.96 / std::sqrt(static_cast<double>(z.size()));
        for (std::size_t h = 0; h < lags; ++h)
            os << h + 1 << "," << format_double(acf[h]) << "," << format_double(pacf[h]) << "," << format_double(band)
               << "\n";
    });
    emit(detail::with_suffix(cfg.output, ".cpgram.csv"), out, [&](std::ostream& os) {
        write_provenance(os, prov);
        os << "j,frequency,cumulative,band\n";
        for (std::size_t j = 0; j < cp.cumulative.size(); ++j)
            os << j + 1 << "," << format_double(cp.frequencies[j]) << "," << format_double(cp.cumulative[j]) << ","
               << format_double(cp.band) << "\n";
    });
    if (cfg.period > 0) {
        const std::size_t seasons = std::min<std::size_t>(3, (z.size() - 1) / cfg.period);
        if (seasons == 0) throw UsageError("--period is too long for the series");
        const auto sacf = seasonal_acf(z, cfg.period, seasons);
        emit(detail::with_suffix(cfg.output, ".seasonal.csv"), out, [&](std::ostream& os) {
            write_provenance(os, prov);
            os << "lag,acf\n";
            for (std::size_t k = 0; k < sacf.size(); ++k)
                os << (k + 1) * cfg.period << "," << format_double(sacf[k]) << "\n";
        });
    }
    print_summary(err, fit);
    err << "residual mean " << format_double(sample_mean(z)) << ", variance " << format_double(sample_variance(z))
        << ", periodogram max deviation " << format_double(cp.max_deviation()) << " (band "
        << format_double(cp.band) << ")\n";
    return fit.converged ? kOk : kNotConverged;
}

inline int cmd_forecast(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    const auto series = load_input(cfg, err);
    if (cfg.split == 0 || cfg.split >= series.size())
        throw UsageError("--split must be between 1 and the series length - 1");
    CountSeries train(std::vector<Count>(series.values.begin(), series.values.begin() + static_cast<std::ptrdiff_t>(cfg.split)));
    const auto fit = obtain_fit(cfg, train);
    const std::size_t horizon = series.size() - cfg.split;
    const auto fc = one_step_forecasts(fit, series, horizon);
    const CountSeries test(std::vector<Count>(series.values.begin() + static_cast<std::ptrdiff_t>(cfg.split), series.values.end()));
    const double err_model = rmse(fc, test);
    const std::vector<double> baseline(horizon, sample_mean(train));
    const double err_base = rmse(baseline, test);
    emit(cfg.output, out, [&](std::ostream& os) {
        write_provenance(os, cfg.provenance());
        os << "# rmse = " << format_double(err_model) << "\n# rmse_mean_baseline = " << format_double(err_base) << "\n";
        os << "t,actual,forecast\n";
        for (std::size_t h = 0; h < horizon; ++h)
            os << cfg.split + h + 1 << "," << test[h] << "," << format_double(fc[h]) << "\n";
    });
    print_summary(err, fit);
    err << "one-step RMSE " << format_double(err_model) << " (training-mean baseline " << format_double(err_base)
        << ")\n";
    return fit.converged ? kOk : kNotConverged;
}

}  // namespace detail

/// Parses argv and runs one subcommand; returns the process exit code.
inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
    CLI::App app{"Softplus and neural INGARCH models for count time series", "softcount"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(kVersion));
    RunConfig cfg;

    auto model_flags = [&](CLI::App* sub) {
        sub->add_option("--family", cfg.family, "Conditional distribution: poisson | negbin")->capture_default_str();
        sub->add_option("--link", cfg.link, "Response function: softplus | neural")->capture_default_str();
        sub->add_option("--p", cfg.p, "Observation lags")->capture_default_str();
        sub->add_option("--q", cfg.q, "Conditional-mean lags")->capture_default_str();
        sub->add_option("--c", cfg.c, "Softplus tuning parameter")->capture_default_str();
        sub->add_option("--hidden", cfg.hidden, "Hidden units (neural link)")->capture_default_str();
    };
    auto fit_flags = [&](CLI::App* sub) {
        model_flags(sub);
        sub->add_option("--seed", cfg.seed, "Seed for restarts")->capture_default_str();
        sub->add_option("--restarts", cfg.restarts, "Optimizer restarts (default 2 softplus, 10 neural)");
        sub->add_option("--max-iter", cfg.max_iter, "BFGS iterations per start (default 500)");
    };
    auto truth_flags = [&](CLI::App* sub) {
        sub->add_option("--alpha0", cfg.alpha0, "Intercept");
        sub->add_option("--alpha", cfg.alpha, "Observation-lag coefficients")->delimiter(',');
        sub->add_option("--beta", cfg.beta, "Mean-lag coefficients")->delimiter(',');
        sub->add_option("--n", cfg.n, "NB dispersion")->capture_default_str();
    };

    auto* sim = app.add_subcommand("simulate", "Simulate a count series");
    model_flags(sim);
    truth_flags(sim);
    sim->add_option("--model", cfg.model, "Simulate from the estimates in a fit document");
    sim->add_option("--length", cfg.length, "Number of observations")->required();
    sim->add_option("--burn-in", cfg.burn_in, "Discarded initial steps")->capture_default_str();
    sim->add_option("--seed", cfg.seed, "Random seed")->capture_default_str();
    sim->add_option("--out", cfg.output, "Output CSV (default stdout)");

    auto* fit = app.add_subcommand("fit", "Fit a model by conditional maximum likelihood");
    fit->add_option("--input", cfg.input, "Counts CSV")->required();
    fit_flags(fit);
    fit->add_option("--out", cfg.output, "Output fit document (default stdout)");

    auto* select = app.add_subcommand("select", "Rank candidate models by AIC or BIC");
    select->add_option("--input", cfg.input, "Counts CSV")->required();
    fit_flags(select);
    select->add_option("--candidate", cfg.candidates, "FAMILY:P:Q (repeatable)")->required();
    select->add_option("--criterion", cfg.criterion, "aic | bic")->capture_default_str();
    select->add_option("--out", cfg.output, "Output CSV (default stdout)");

    auto* moments = app.add_subcommand("moments", "Compare simulated and linear-approximation moments");
    model_flags(moments);
    truth_flags(moments);
    moments->add_option("--grid", cfg.grid, "CSV with alpha0,alpha1,beta1[,n][,c] columns");
    moments->add_option("--length", cfg.length, "Path length per configuration (default 100000)");
    moments->add_option("--burn-in", cfg.burn_in, "Discarded initial steps")->capture_default_str();
    moments->add_option("--max-lag", cfg.max_lag, "ACF lags (default 3)");
    moments->add_option("--seed", cfg.seed, "Random seed")->capture_default_str();
    moments->add_option("--out", cfg.output, "Output CSV (default stdout)");

    auto* study = app.add_subcommand("study", "Replicated simulate-and-fit study (mean, abs. bias, MSE)");
    fit_flags(study);
    truth_flags(study);
    study->add_option("--sizes", cfg.sizes, "Sample sizes")->delimiter(',')->capture_default_str();
    study->add_option("--replications", cfg.replications, "Replications per size")->capture_default_str();
    study->add_option("--burn-in", cfg.burn_in, "Discarded initial steps")->capture_default_str();
    study->add_option("--out", cfg.output, "Output CSV (default stdout)");

    auto* diagnose = app.add_subcommand("diagnose", "Pearson residuals, ACF/PACF and cumulative periodogram");
    diagnose->add_option("--input", cfg.input, "Counts CSV")->required();
    fit_flags(diagnose);
    diagnose->add_option("--model", cfg.model, "Fit document (fits the series when omitted)");
    diagnose->add_option("--max-lag", cfg.max_lag, "ACF/PACF lags (default min(20, s-1))");
    diagnose->add_option("--period", cfg.period, "Seasonal period for the seasonal-lag ACF table");
    diagnose->add_option("--out", cfg.output, "Output prefix (default stdout)");

    auto* forecast = app.add_subcommand("forecast", "One-step-ahead forecasts and RMSE on a held-out tail");
    forecast->add_option("--input", cfg.input, "Counts CSV")->required();
    fit_flags(forecast);
    forecast->add_option("--model", cfg.model, "Fit document for the training part (fits it when omitted)");
    forecast->add_option("--split", cfg.split, "Number of leading observations used for training")->required();
    forecast->add_option("--out", cfg.output, "Output CSV (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        app.exit(e, out, err);
        return kOk;
    } catch (const CLI::CallForVersion& e) {
        app.exit(e, out, err);
        return kOk;
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        return kUsage;
    }

    try {
        if (sim->parsed()) return cfg.command = "simulate", detail::cmd_simulate(cfg, out);
        if (fit->parsed()) return cfg.command = "fit", detail::cmd_fit(cfg, out, err);
        if (select->parsed()) return cfg.command = "select", detail::cmd_select(cfg, out, err);
        if (moments->parsed()) return cfg.command = "moments", detail::cmd_moments(cfg, out);
        if (study->parsed()) return cfg.command = "study", detail::cmd_study(cfg, out);
        if (diagnose->parsed()) return cfg.command = "diagnose", detail::cmd_diagnose(cfg, out, err);
        if (forecast->parsed()) return cfg.command = "forecast", detail::cmd_forecast(cfg, out, err);
    } catch (const UsageError& e) {
        err << "error: " << e.what() << "\n";
        return kUsage;
    } catch (const DomainError& e) {
        err << "error: " << e.what() << "\n";
        return kUsage;
    } catch (const ParseError& e) {
        err << "parse error: " << e.what() << "\n";
        return kParse;
    } catch (const NumericError& e) {
        err << "numeric error: " << e.what() << "\n";
        return kNumeric;
    }
    return kUsage;
}

inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    std::vector<const char*> argv{"softcount"};
    for (const auto& a : args) argv.push_back(a.c_str());
    return run(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace softcount::cli
