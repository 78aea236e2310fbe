#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "softcount_cli.hpp"
#include "support.hpp"

using namespace softcount;
using softcount::testing::linear_spec;
using softcount::testing::neural_spec;
using softcount::testing::simulate;

namespace fs = std::filesystem;

namespace {

struct Run {
    int code;
    std::string out;
    std::string err;
};

Run run_cli(const std::vector<std::string>& args) {
    std::ostringstream out, err;
    const int code = cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

CountSeries parse(const std::string& text, std::vector<std::string>* warnings = nullptr) {
    std::istringstream in(text);
    return parse_counts_csv(in, warnings);
}

class CliTest : public ::testing::Test {
protected:
    void SetUp() override {
        dir_ = fs::temp_directory_path() /
               ("softcount_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
        fs::remove_all(dir_);
        fs::create_directories(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }

    std::string path(const std::string& name) const { return (dir_ / name).string(); }

    std::string write_series(const std::string& name, const CountSeries& s) const {
        std::ofstream f(path(name));
        write_counts_csv(f, s);
        return path(name);
    }

    std::string model2_series(std::size_t length, std::uint64_t seed) const {
        return write_series("series.csv", simulate(linear_spec(Family::NegBin, 1, 1), LinearParams{1.8, {0.3}, {0.4}, 3.0},
                                                   length, seed));
    }

    fs::path dir_;
};

}  // namespace

TEST(CountsCsv, Examples) {
    EXPECT_EQ(parse("count\n2\n3\n0\n").values, (std::vector<Count>{2, 3, 0}));
    EXPECT_EQ(parse("# comment\n\ncount\r\n5\r\n").values, (std::vector<Count>{5}));
    const auto stamped = parse("timestamp,count\n2020-01-01,4\n2020-01-02,1\n");
    EXPECT_EQ(stamped.values, (std::vector<Count>{4, 1}));
    EXPECT_EQ(stamped.timestamps[1], "2020-01-02");
}

TEST(CountsCsv, RejectsNegativeCountWithLine) {
    try {
        parse("count\n2\n-1\n");
        FAIL() << "expected ParseError";
    } catch (const ParseError& e) {
        EXPECT_EQ(e.line(), 3u);
        EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos);
    }
}

TEST(CountsCsv, RejectsMalformedInput) {
    EXPECT_THROW(parse("count\n2.5\n"), ParseError);
    EXPECT_THROW(parse("count\nabc\n"), ParseError);
    EXPECT_THROW(parse("value\n1\n"), ParseError);
    EXPECT_THROW(parse("count\n"), ParseError);
    EXPECT_THROW(parse("timestamp,count\n2020-01-01\n"), ParseError);
    EXPECT_THROW(parse_counts_csv(std::string("/nonexistent/file.csv")), ParseError);
}

TEST(CountsCsv, IrregularTimestampsWarn) {
    std::vector<std::string> warnings;
    parse("timestamp,count\n2020-01-01,1\n2020-01-02,2\n2020-01-03,3\n", &warnings);
    EXPECT_TRUE(warnings.empty());
    parse("timestamp,count\n2020-01-01,1\n2020-01-02,2\n2020-01-05,3\n", &warnings);
    ASSERT_EQ(warnings.size(), 1u);
    EXPECT_NE(warnings[0].find("equally spaced"), std::string::npos);
}

TEST(CountsCsv, WriteParseRoundTrip) {
    CountSeries s{0, 7, 123456, 3};
    s.timestamps = {"1", "2", "3", "4"};
    std::ostringstream os;
    write_counts_csv(os, s, {{"seed", "9"}});
    const auto back = parse(os.str());
    EXPECT_EQ(back.values, s.values);
    EXPECT_EQ(back.timestamps, s.timestamps);
}

TEST(FitDocument, LinearRoundTrip) {
    const auto spec = linear_spec(Family::NegBin, 2, 1, 0.5);
    const auto s = simulate(spec, LinearParams{1.0, {0.3, 0.1}, {0.2}, 4.0}, 400, 130);
    auto fit = fit_cml(spec, s);
    fit.std_errors[1] = std::numeric_limits<double>::quiet_NaN();
    fit.warnings.push_back("a warning with = sign");
    Provenance prov{{"command", "fit"}, {"seed", "3"}};
    const std::string text = fit_document(fit, prov);
    std::istringstream in(text);
    Provenance back_prov;
    const auto back = parse_fit_document(in, &back_prov);
    EXPECT_TRUE(back == fit);
    EXPECT_EQ(back_prov.front().first, "version");
    EXPECT_EQ(back_prov.front().second, std::string(kVersion));
    EXPECT_EQ(back_prov[2].second, "3");
    EXPECT_EQ(fit_document(back, prov), text);
}

TEST(FitDocument, NeuralAndPoissonRoundTrip) {
    const auto nspec = neural_spec(Family::Poisson, 1, 1, 2);
    const auto s = simulate(linear_spec(Family::Poisson, 1, 1), LinearParams{1.0, {0.3}, {0.3}, 1.0}, 200, 131);
    auto opts = default_neural_options();
    opts.restart_count = 1;
    const auto fit = fit_neural(nspec, s, opts);
    std::istringstream in(fit_document(fit));
    EXPECT_TRUE(parse_fit_document(in) == fit);

    const auto pfit = fit_cml(linear_spec(Family::Poisson, 1, 0), s);
    std::istringstream pin(fit_document(pfit));
    EXPECT_TRUE(parse_fit_document(pin) == pfit);
}

TEST(FitDocument, RejectsMalformed) {
    std::istringstream a("[model]\nfamily = weibull\n");
    EXPECT_ANY_THROW(parse_fit_document(a));
    std::istringstream b("[model]\nno equals sign\n");
    EXPECT_THROW(parse_fit_document(b), ParseError);
}

TEST_F(CliTest, SimulateHonoursLengthAndWritesProvenance) {
    const auto r = run_cli({"simulate", "--alpha0", "1.8", "--alpha", "0.3", "--beta", "0.4", "--q", "1", "--length",
                            "50", "--seed", "7"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto s = parse(r.out);
    EXPECT_EQ(s.size(), 50u);
    EXPECT_NE(r.out.find("# softcount " + std::string(kVersion)), std::string::npos);
    EXPECT_NE(r.out.find("# seed = 7"), std::string::npos);
    EXPECT_NE(r.out.find("# length = 50"), std::string::npos);
}

TEST_F(CliTest, SimulateZeroLengthIsUsageError) {
    const auto r = run_cli({"simulate", "--alpha0", "1", "--alpha", "0.3", "--length", "0"});
    EXPECT_EQ(r.code, 1);
    EXPECT_NE(r.err.find("--length"), std::string::npos);
}

TEST_F(CliTest, DomainAndUsageErrors) {
    EXPECT_EQ(run_cli({"simulate", "--alpha0", "1", "--alpha", "0.3", "--length", "10", "--family", "weibull"}).code, 1);
    EXPECT_EQ(run_cli({"simulate", "--alpha0", "1", "--alpha", "0.3", "--length", "10", "--n", "-1"}).code, 1);
    EXPECT_EQ(run_cli({"simulate", "--length", "10", "--link", "neural"}).code, 1);
    EXPECT_EQ(run_cli({"fit"}).code, 1);
    EXPECT_EQ(run_cli({}).code, 1);
    EXPECT_EQ(run_cli({"bogus"}).code, 1);
}

TEST_F(CliTest, ParseErrorExitCode) {
    {
        std::ofstream f(path("bad.csv"));
        f << "count\n1\n2\n-4\n";
    }
    const auto r = run_cli({"fit", "--input", path("bad.csv")});
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.err.find("line 4"), std::string::npos);
    EXPECT_EQ(run_cli({"fit", "--input", path("missing.csv")}).code, 2);
}

TEST_F(CliTest, FitIsByteDeterministic) {
    const auto input = model2_series(300, 132);
    const auto a = run_cli({"fit", "--input", input, "--q", "1", "--seed", "5"});
    const auto b = run_cli({"fit", "--input", input, "--q", "1", "--seed", "5"});
    ASSERT_EQ(a.code, 0) << a.err;
    EXPECT_EQ(a.out, b.out);
    EXPECT_NE(a.out.find("version = " + std::string(kVersion)), std::string::npos);
    EXPECT_NE(a.out.find("input = " + input), std::string::npos);
    std::istringstream in(a.out);
    const auto fit = parse_fit_document(in);
    EXPECT_EQ(fit.s, 300u);
    EXPECT_EQ(fit.k, 4u);
}

TEST_F(CliTest, FitOutputFileMatchesStdout) {
    const auto input = model2_series(200, 133);
    const auto a = run_cli({"fit", "--input", input, "--q", "1"});
    const auto b = run_cli({"fit", "--input", input, "--q", "1", "--out", path("fit.txt")});
    ASSERT_EQ(b.code, 0);
    EXPECT_TRUE(b.out.empty());
    EXPECT_EQ(slurp(path("fit.txt")), a.out);
}

TEST_F(CliTest, NonConvergenceExitsFourAndStillWrites) {
    // a hard periodic pattern that one BFGS iteration cannot settle
    std::vector<Count> v(300);
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = static_cast<Count>(((i + 1) * 7919) % 13);
    const auto input = write_series("hard.csv", CountSeries(v));
    const auto r = run_cli({"fit", "--input", input, "--q", "1", "--max-iter", "1", "--restarts", "0", "--out",
                            path("fit.txt")});
    EXPECT_EQ(r.code, 4);
    const auto fit = parse_fit_document(path("fit.txt"));
    EXPECT_FALSE(fit.converged);
    EXPECT_FALSE(fit.warnings.empty());
}

TEST_F(CliTest, SimulateIsByteDeterministic) {
    const std::vector<std::string> args{"simulate", "--alpha0", "1.8", "--alpha", "0.3", "--beta", "0.4",
                                        "--q",      "1",        "--length", "500", "--seed", "11"};
    const auto a = run_cli(args), b = run_cli(args);
    EXPECT_EQ(a.out, b.out);
    auto other = args;
    other.back() = "12";
    EXPECT_NE(run_cli(other).out, a.out);
}

TEST_F(CliTest, StudyIsByteDeterministic) {
    const std::vector<std::string> args{"study", "--alpha0", "1.8", "--alpha", "0.3", "--beta", "0.4", "--q", "1",
                                        "--sizes", "100,200", "--replications", "3", "--seed", "4"};
    const auto a = run_cli(args), b = run_cli(args);
    ASSERT_EQ(a.code, 0) << a.err;
    EXPECT_EQ(a.out, b.out);
    EXPECT_NE(a.out.find("# sizes = 100,200"), std::string::npos);
    EXPECT_NE(a.out.find("size,replications,used,excluded,parameter,truth,mean,abs_bias,mse"), std::string::npos);
}

TEST_F(CliTest, SimulateFromFitDocument) {
    const auto input = model2_series(300, 135);
    ASSERT_EQ(run_cli({"fit", "--input", input, "--q", "1", "--out", path("fit.txt")}).code, 0);
    const auto r = run_cli({"simulate", "--model", path("fit.txt"), "--length", "40", "--seed", "2"});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(parse(r.out).size(), 40u);
    EXPECT_NE(r.out.find("# model = " + path("fit.txt")), std::string::npos);
}

TEST_F(CliTest, SelectRanksByCriterion) {
    const auto input = model2_series(400, 136);
    const auto r = run_cli({"select", "--input", input, "--candidate", "poisson:1:0", "--candidate", "negbin:1:1",
                            "--candidate", "negbin:1:0", "--candidate", "negbin:1:1"});
    ASSERT_EQ(r.code, 0) << r.err;
    std::istringstream in(r.out);
    std::string line;
    std::vector<std::vector<std::string>> rows;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#' || line.starts_with("rank")) continue;
        std::vector<std::string> f;
        std::istringstream ls(line);
        for (std::string cell; std::getline(ls, cell, ',');) f.push_back(cell);
        rows.push_back(f);
    }
    ASSERT_EQ(rows.size(), 4u);
    // the quoted model label contains a comma, so read the criteria from the right
    const auto aic = [](const std::vector<std::string>& f) { return f[f.size() - 3]; };
    for (std::size_t i = 1; i < rows.size(); ++i) EXPECT_LE(std::stod(aic(rows[i - 1])), std::stod(aic(rows[i])));
    EXPECT_EQ(rows[0][1], "negbin:1:1");
    EXPECT_EQ(rows[1][1], "negbin:1:1");
    EXPECT_EQ(aic(rows[0]), aic(rows[1]));
    EXPECT_EQ(rows[0][0], "1");
    EXPECT_EQ(rows.back()[1], "poisson:1:0");
    EXPECT_NE(r.err.find("selected:"), std::string::npos);
    EXPECT_EQ(run_cli({"select", "--input", input, "--candidate", "negbin:1"}).code, 1);
    EXPECT_EQ(run_cli({"select", "--input", input, "--candidate", "negbin:1:0", "--criterion", "hqic"}).code, 1);
}

TEST_F(CliTest, DiagnoseWritesTables) {
    const auto input = model2_series(400, 137);
    const auto r = run_cli({"diagnose", "--input", input, "--q", "1", "--max-lag", "8", "--period", "12", "--out",
                            path("diag")});
    ASSERT_EQ(r.code, 0) << r.err;
    for (const char* suffix : {".residuals.csv", ".acf.csv", ".cpgram.csv", ".seasonal.csv"}) {
        const auto text = slurp(path(std::string("diag") + suffix));
        EXPECT_NE(text.find("# softcount " + std::string(kVersion)), std::string::npos) << suffix;
        EXPECT_NE(text.find("# command = diagnose"), std::string::npos) << suffix;
    }
    const auto acf = slurp(path("diag.acf.csv"));
    EXPECT_NE(acf.find("lag,acf,pacf,band\n1,"), std::string::npos);
    EXPECT_NE(acf.find("\n8,"), std::string::npos);
    EXPECT_EQ(acf.find("\n9,"), std::string::npos);
    const auto cpgram = slurp(path("diag.cpgram.csv"));
    const auto last = cpgram.substr(cpgram.rfind("\n199,"));
    EXPECT_NE(last.find(",1," + format_double(1.36 / std::sqrt(199.0))), std::string::npos) << last;
}

TEST_F(CliTest, ForecastWithReusedModel) {
    const auto s = simulate(linear_spec(Family::NegBin, 1, 1), LinearParams{1.8, {0.3}, {0.4}, 3.0}, 300, 138);
    const auto full = write_series("full.csv", s);
    const auto train = write_series("train.csv", CountSeries(std::vector<Count>(s.values.begin(), s.values.begin() + 250)));
    ASSERT_EQ(run_cli({"fit", "--input", train, "--q", "1", "--out", path("fit.txt")}).code, 0);
    const auto a = run_cli({"forecast", "--input", full, "--q", "1", "--split", "250"});
    const auto b = run_cli({"forecast", "--input", full, "--q", "1", "--split", "250", "--model", path("fit.txt")});
    ASSERT_EQ(a.code, 0) << a.err;
    ASSERT_EQ(b.code, 0) << b.err;
    EXPECT_NE(a.out.find("# rmse = "), std::string::npos);
    EXPECT_NE(a.out.find("# rmse_mean_baseline = "), std::string::npos);
    const auto body = [](const std::string& t) { return t.substr(t.find("t,actual,forecast")); };
    EXPECT_EQ(body(a.out), body(b.out));
    EXPECT_EQ(run_cli({"forecast", "--input", full, "--split", "249", "--model", path("fit.txt")}).code, 1);
    EXPECT_EQ(run_cli({"forecast", "--input", full, "--split", "300"}).code, 1);
}

TEST_F(CliTest, MomentsGridFlagsExplosiveRows) {
    {
        std::ofstream f(path("grid.csv"));
        f << "alpha0,alpha1,beta1,n\n1.8,0.3,0.4,3\n0.5,0.9,0.3,3\n";
    }
    const auto r = run_cli({"moments", "--grid", path("grid.csv"), "--length", "20000", "--seed", "3"});
    ASSERT_EQ(r.code, 0) << r.err;
    std::istringstream in(r.out);
    std::string line;
    std::vector<std::string> rows;
    while (std::getline(in, line))
        if (!line.empty() && line[0] != '#' && !line.starts_with("model")) rows.push_back(line);
    ASSERT_EQ(rows.size(), 2u);
    EXPECT_TRUE(rows[0].starts_with("1,1.8," + format_double(0.3) + "," + format_double(0.4) + ",3,1,")) << rows[0];
    EXPECT_TRUE(rows[0].ends_with(",\"\""));
    EXPECT_NE(rows[1].find("first-order"), std::string::npos);
    EXPECT_EQ(run_cli({"moments", "--grid", path("missing.csv")}).code, 2);
}

TEST_F(CliTest, VersionAndHelp) {
    const auto v = run_cli({"--version"});
    EXPECT_EQ(v.code, 0);
    EXPECT_NE(v.out.find(std::string(kVersion)), std::string::npos);
    EXPECT_EQ(run_cli({"--help"}).code, 0);
}
