#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <variant>
#include <vector>

#include "softcount/error.hpp"
#include "softcount/model.hpp"
#include "softcount/neural.hpp"

namespace softcount {

using ModelParams = std::variant<LinearParams, NeuralWeights>;

struct InformationCriteria {
    double aic = 0.0;
    double bic = 0.0;
};

/// aic = -2 loglik + 2k, bic = -2 loglik + k ln s.
inline InformationCriteria information_criteria(double loglik, std::size_t k, std::size_t s) {
    if (s == 0) throw DomainError("information_criteria: sample size must be > 0");
    if (k == 0) throw DomainError("information_criteria: parameter count must be >= 1");
    const double kd = static_cast<double>(k);
    return {-2.0 * loglik + 2.0 * kd, -2.0 * loglik + kd * std::log(static_cast<double>(s))};
}

struct FitResult {
    ModelSpec spec;
    ModelParams estimates;
    std::vector<double> std_errors;  // aligned with free parameters; NaN = unavailable
    double loglik = 0.0;
    double aic = 0.0;
    double bic = 0.0;
    std::size_t k = 0;  // free parameters
    std::size_t s = 0;  // series length
    double presample = 1.0;
    std::vector<double> lambda_path;
    bool converged = false;
    std::size_t iterations = 0;
    std::size_t restarts_used = 0;
    std::vector<std::string> warnings;

    const LinearParams& linear() const { return std::get<LinearParams>(estimates); }
    const NeuralWeights& neural() const { return std::get<NeuralWeights>(estimates); }
    double dispersion() const { return std::visit([](const auto& p) { return p.n; }, estimates); }

    void set_criteria() {
        const auto ic = information_criteria(loglik, k, s);
        aic = ic.aic;
        bic = ic.bic;
    }

    bool operator==(const FitResult& o) const {
        auto same = [](const std::vector<double>& a, const std::vector<double>& b) {
            if (a.size() != b.size()) return false;
            for (std::size_t i = 0; i < a.size(); ++i)
                if (!(a[i] == b[i] || (std::isnan(a[i]) && std::isnan(b[i])))) return false;
            return true;
        };
        return spec == o.spec && estimates == o.estimates && same(std_errors, o.std_errors) && loglik == o.loglik &&
               aic == o.aic && bic == o.bic && k == o.k && s == o.s && presample == o.presample &&
               lambda_path == o.lambda_path && converged == o.converged && iterations == o.iterations &&
               restarts_used == o.restarts_used && warnings == o.warnings;
    }
};

/// Names of the free parameters in the order used by std_errors.
inline std::vector<std::string> parameter_names(const ModelSpec& spec) {
    std::vector<std::string> names;
    if (spec.link == Link::SoftplusLinear) {
        names.emplace_back("alpha0");
        for (std::size_t i = 1; i <= spec.p; ++i) names.push_back("alpha" + std::to_string(i));
        for (std::size_t j = 1; j <= spec.q; ++j) names.push_back("beta" + std::to_string(j));
    } else {
        for (std::size_t k = 0; k < spec.input_width(); ++k)
            for (std::size_t l = 0; l < spec.hidden; ++l)
                names.push_back("u0_" + std::to_string(k) + "_" + std::to_string(l));
        for (std::size_t l = 0; l < spec.hidden; ++l) names.push_back("u1_" + std::to_string(l));
    }
    if (spec.family == Family::NegBin) names.emplace_back("n");
    return names;
}

}  // namespace softcount
