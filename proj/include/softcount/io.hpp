#pragma once

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "softcount/error.hpp"
#include "softcount/fit_result.hpp"
#include "softcount/series.hpp"

#ifndef SOFTCOUNT_VERSION
#define SOFTCOUNT_VERSION "1.0.0"
#endif

namespace softcount {

inline constexpr std::string_view kVersion = SOFTCOUNT_VERSION;

/// Ordered key/value pairs describing how an output was produced.
using Provenance = std::vector<std::pair<std::string, std::string>>;

/// Full-precision decimal (17 significant digits); nan / inf / -inf for non-finite values.
inline std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline double parse_double(std::string_view s) {
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size())
        throw ParseError("invalid number '" + std::string(s) + "'");
    return v;
}

namespace detail {

inline std::string_view trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

inline std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    for (;;) {
        const auto pos = s.find(sep, start);
        out.push_back(trim(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

inline std::optional<Count> parse_count_field(std::string_view s) {
    if (s.empty()) return std::nullopt;
    if (s.front() == '+') s.remove_prefix(1);
    if (s.empty() || !std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; }))
        return std::nullopt;
    Count v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
    return v;
}

// Seconds since an arbitrary epoch for numeric or ISO-8601-like timestamps.
inline std::optional<double> timestamp_seconds(std::string_view s) {
    double v;
    if (const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v); ec == std::errc() && p == s.data() + s.size())
        return v;
    int y, mo, d, hh = 0, mm = 0, ss = 0;
    const std::string str(s);
    const int got = std::sscanf(str.c_str(), "%d-%d-%d%*[T ]%d:%d:%d", &y, &mo, &d, &hh, &mm, &ss);
    if (got < 3) return std::nullopt;
    const std::chrono::year_month_day ymd{std::chrono::year{y}, std::chrono::month{static_cast<unsigned>(mo)},
                                          std::chrono::day{static_cast<unsigned>(d)}};
    if (!ymd.ok()) return std::nullopt;
    const auto days = std::chrono::sys_days{ymd}.time_since_epoch().count();
    return static_cast<double>(days) * 86400.0 + hh * 3600.0 + mm * 60.0 + ss;
}

}  // namespace detail

/**
 * Reads counts from CSV text with a header row of either `count` or
 * `timestamp,count`. Blank lines and lines starting with '#' are skipped.
 * Counts must be non-negative integers. Irregular timestamp spacing adds a
 * warning but is not an error.
 */
inline CountSeries parse_counts_csv(std::istream& in, std::vector<std::string>* warnings = nullptr) {
    std::string line;
    std::size_t lineno = 0;
    int count_col = -1;
    int time_col = -1;
    std::size_t columns = 0;
    CountSeries series;
    while (std::getline(in, line)) {
        ++lineno;
        std::string_view view(line);
        if (lineno == 1 && view.starts_with("\xEF\xBB\xBF")) view.remove_prefix(3);
        view = detail::trim(view);
        if (view.empty() || view.front() == '#') continue;
        const auto fields = detail::split(view, ',');
        if (count_col < 0) {
            columns = fields.size();
            for (std::size_t i = 0; i < fields.size(); ++i) {
                if (fields[i] == "count") count_col = static_cast<int>(i);
                if (fields[i] == "timestamp") time_col = static_cast<int>(i);
            }
            if (count_col < 0 || columns > 2 || (columns == 2 && time_col < 0))
                throw ParseError("header must be 'count' or 'timestamp,count'", lineno);
            continue;
        }
        if (fields.size() != columns) throw ParseError("expected " + std::to_string(columns) + " fields", lineno);
        const auto field = fields[static_cast<std::size_t>(count_col)];
        const auto v = detail::parse_count_field(field);
        if (!v) throw ParseError("count must be a non-negative integer, got '" + std::string(field) + "'", lineno);
        series.values.push_back(*v);
        if (time_col >= 0) series.timestamps.emplace_back(fields[static_cast<std::size_t>(time_col)]);
    }
    if (count_col < 0) throw ParseError("missing header row");
    if (series.empty()) throw ParseError("no observations");
    if (warnings && series.timestamps.size() > 2) {
        std::vector<double> secs;
        for (const auto& ts : series.timestamps)
            if (auto v = detail::timestamp_seconds(ts)) secs.push_back(*v);
        if (secs.size() == series.timestamps.size()) {
            const double step = secs[1] - secs[0];
            for (std::size_t i = 2; i < secs.size(); ++i) {
                if (std::abs((secs[i] - secs[i - 1]) - step) > 1e-9 * std::max(1.0, std::abs(step))) {
                    warnings->push_back("timestamps are not equally spaced (first irregular gap before row " +
                                        std::to_string(i + 1) + ")");
                    break;
                }
            }
        } else {
            warnings->emplace_back("timestamps could not be interpreted; spacing not checked");
        }
    }
    return series;
}

inline CountSeries parse_counts_csv(const std::string& path, std::vector<std::string>* warnings = nullptr) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open '" + path + "'");
    return parse_counts_csv(in, warnings);
}

inline void write_provenance(std::ostream& out, const Provenance& prov) {
    out << "# softcount " << kVersion << "\n";
    for (const auto& [k, v] : prov) out << "# " << k << " = " << v << "\n";
}

inline void write_counts_csv(std::ostream& out, const CountSeries& series, const Provenance& prov = {}) {
    write_provenance(out, prov);
    const bool stamped = !series.timestamps.empty();
    out << (stamped ? "timestamp,count\n" : "count\n");
    for (std::size_t i = 0; i < series.size(); ++i) {
        if (stamped) out << series.timestamps[i] << ",";
        out << series.values[i] << "\n";
    }
}

namespace detail {

inline std::string join(const std::vector<double>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) s += ' ';
        s += format_double(v[i]);
    }
    return s;
}

inline std::vector<double> split_doubles(std::string_view s) {
    std::vector<double> out;
    std::size_t i = 0;
    while (i < s.size()) {
        while (i < s.size() && s[i] == ' ') ++i;
        const std::size_t j = std::min(s.find(' ', i), s.size());
        if (j > i) out.push_back(parse_double(s.substr(i, j - i)));
        i = j;
    }
    return out;
}

struct Document {
    // section -> ordered (key, value) pairs; keys may repeat
    std::map<std::string, std::vector<std::pair<std::string, std::string>>> sections;

    const std::string& get(const std::string& sec, const std::string& key) const {
        const auto it = sections.find(sec);
        if (it != sections.end())
            for (const auto& [k, v] : it->second)
                if (k == key) return v;
        throw ParseError("missing key '" + key + "' in section [" + sec + "]");
    }
    std::vector<std::string> all(const std::string& sec, const std::string& key) const {
        std::vector<std::string> out;
        if (const auto it = sections.find(sec); it != sections.end())
            for (const auto& [k, v] : it->second)
                if (k == key) out.push_back(v);
        return out;
    }
};

inline Document parse_document(std::istream& in) {
    Document doc;
    std::string line, section;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto view = trim(line);
        if (view.empty() || view.front() == '#') continue;
        if (view.front() == '[') {
            if (view.back() != ']') throw ParseError("malformed section header", lineno);
            section = std::string(view.substr(1, view.size() - 2));
            doc.sections[section];
            continue;
        }
        const auto eq = view.find('=');
        if (eq == std::string_view::npos || section.empty()) throw ParseError("expected 'key = value'", lineno);
        doc.sections[section].emplace_back(std::string(trim(view.substr(0, eq))), std::string(trim(view.substr(eq + 1))));
    }
    return doc;
}

inline std::size_t parse_size(const std::string& s) {
    std::size_t v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) throw ParseError("invalid integer '" + s + "'");
    return v;
}

}  // namespace detail

/**
 * Writes a FitResult as a sectioned key/value document. Doubles carry 17
 * significant digits so that identical fits serialize to identical bytes and
 * parse back exactly.
 */
inline void write_fit_document(std::ostream& out, const FitResult& fit, const Provenance& prov = {}) {
    out << "# softcount fit result\n[provenance]\nversion = " << kVersion << "\n";
    for (const auto& [k, v] : prov) out << k << " = " << v << "\n";
    const auto& spec = fit.spec;
    out << "\n[model]\nfamily = " << to_string(spec.family) << "\nlink = " << to_string(spec.link)
        << "\np = " << spec.p << "\nq = " << spec.q << "\nc = " << format_double(spec.c)
        << "\nhidden = " << spec.hidden << "\n";
    out << "\n[estimates]\n";
    if (const auto* lp = std::get_if<LinearParams>(&fit.estimates)) {
        out << "alpha0 = " << format_double(lp->alpha0) << "\nalpha = " << detail::join(lp->alpha)
            << "\nbeta = " << detail::join(lp->beta) << "\n";
        if (spec.family == Family::NegBin) out << "n = " << format_double(lp->n) << "\n";
    } else {
        const auto& w = std::get<NeuralWeights>(fit.estimates);
        out << "inputs = " << w.inputs() << "\nhidden = " << w.hidden() << "\nweights = " << detail::join(w.flat())
            << "\n";
        if (spec.family == Family::NegBin) out << "n = " << format_double(w.n) << "\n";
    }
    out << "\n[fit]\nconverged = " << (fit.converged ? "true" : "false") << "\niterations = " << fit.iterations
        << "\nrestarts_used = " << fit.restarts_used << "\nk = " << fit.k << "\ns = " << fit.s
        << "\nloglik = " << format_double(fit.loglik) << "\naic = " << format_double(fit.aic)
        << "\nbic = " << format_double(fit.bic) << "\npresample = " << format_double(fit.presample)
        << "\nstd_errors = " << detail::join(fit.std_errors) << "\n";
    for (const auto& w : fit.warnings) out << "warning = " << w << "\n";
    out << "\n[lambda_path]\nvalues = " << detail::join(fit.lambda_path) << "\n";
}

inline std::string fit_document(const FitResult& fit, const Provenance& prov = {}) {
    std::ostringstream os;
    write_fit_document(os, fit, prov);
    return os.str();
}

inline FitResult parse_fit_document(std::istream& in, Provenance* prov = nullptr) {
    const auto doc = detail::parse_document(in);
    FitResult fit;
    auto& spec = fit.spec;
    spec.family = parse_family(doc.get("model", "family"));
    spec.link = parse_link(doc.get("model", "link"));
    spec.p = detail::parse_size(doc.get("model", "p"));
    spec.q = detail::parse_size(doc.get("model", "q"));
    spec.c = parse_double(doc.get("model", "c"));
    spec.hidden = detail::parse_size(doc.get("model", "hidden"));
    spec.validate();
    const bool nb = spec.family == Family::NegBin;
    if (spec.link == Link::SoftplusLinear) {
        LinearParams lp;
        lp.alpha0 = parse_double(doc.get("estimates", "alpha0"));
        lp.alpha = detail::split_doubles(doc.get("estimates", "alpha"));
        lp.beta = detail::split_doubles(doc.get("estimates", "beta"));
        lp.n = nb ? parse_double(doc.get("estimates", "n")) : 1.0;
        lp.validate(spec);
        fit.estimates = lp;
    } else {
        const auto K = detail::parse_size(doc.get("estimates", "inputs"));
        const auto L = detail::parse_size(doc.get("estimates", "hidden"));
        const auto flat = detail::split_doubles(doc.get("estimates", "weights"));
        if (flat.size() != K * L + L) throw ParseError("weights: expected K*L + L values");
        auto w = NeuralWeights::from_flat(K, L, flat);
        w.n = nb ? parse_double(doc.get("estimates", "n")) : 1.0;
        w.validate(spec);
        fit.estimates = w;
    }
    const auto& conv = doc.get("fit", "converged");
    if (conv != "true" && conv != "false") throw ParseError("converged must be true or false");
    fit.converged = conv == "true";
    fit.iterations = detail::parse_size(doc.get("fit", "iterations"));
    fit.restarts_used = detail::parse_size(doc.get("fit", "restarts_used"));
    fit.k = detail::parse_size(doc.get("fit", "k"));
    fit.s = detail::parse_size(doc.get("fit", "s"));
    fit.loglik = parse_double(doc.get("fit", "loglik"));
    fit.aic = parse_double(doc.get("fit", "aic"));
    fit.bic = parse_double(doc.get("fit", "bic"));
    fit.presample = parse_double(doc.get("fit", "presample"));
    fit.std_errors = detail::split_doubles(doc.get("fit", "std_errors"));
    fit.warnings = doc.all("fit", "warning");
    fit.lambda_path = detail::split_doubles(doc.get("lambda_path", "values"));
    if (prov) {
        prov->clear();
        if (const auto it = doc.sections.find("provenance"); it != doc.sections.end()) *prov = it->second;
    }
    return fit;
}

inline FitResult parse_fit_document(const std::string& path, Provenance* prov = nullptr) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open '" + path + "'");
    return parse_fit_document(in, prov);
}

}  // namespace softcount
