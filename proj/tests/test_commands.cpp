#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "oracles.hpp"
#include "wentropy/commands.hpp"

using namespace wentropy;
using namespace wentropy::commands;
using json = nlohmann::json;

namespace {

const std::string kData = WENTROPY_DATA_DIR;

struct Captured {
    int code;
    std::string out;
    std::string err;
};

template <class Fn>
Captured capture(Fn fn) {
    std::ostringstream out, err;
    const int code = fn(out, err);
    return {code, out.str(), err.str()};
}

Captured moment(MomentArgs a) {
    return capture([&](std::ostream& o, std::ostream& e) { return cmd_moment(a, o, e); });
}

Captured run_wdic(WdicArgs a) {
    return capture([&](std::ostream& o, std::ostream& e) { return cmd_wdic(a, o, e); });
}

const json* lambda_entry(const json& report, const std::string& sigma, int i, int j) {
    for (const json& e : report["entries"])
        if (e["formula"] == "lambda" && e["point"]["sigma"] == sigma && e["point"]["i"] == i &&
            e["point"]["j"] == j)
            return &e;
    return nullptr;
}

}  // namespace

TEST(Moment, IdentitySixthOrder) {
    const Captured r = moment({kData + "/identity3.json", {2, 2, 2}, std::nullopt});
    ASSERT_EQ(r.code, kOk) << r.err;
    const json j = json::parse(r.out);
    EXPECT_EQ(j["value"].get<double>(), 1.0);
    EXPECT_EQ(j["matchings"].get<int>(), 15);
    EXPECT_EQ(j["order"].get<int>(), 6);
    EXPECT_FALSE(j.contains("shift"));
}

TEST(Moment, OddOrderIsZero) {
    const Captured r = moment({kData + "/identity3.json", {1, 1, 1}, std::nullopt});
    ASSERT_EQ(r.code, kOk);
    EXPECT_EQ(json::parse(r.out)["value"].get<double>(), 0.0);
}

TEST(Moment, ShiftedConditionalPair) {
    // Example-1 conditional pair at rho = 0.5, x3 = 2: mean shift (rho^2 x3, 0).
    const oracle::TempFile cov("cond.json", R"({"mean": [0, 0], "cov": [[0.9375, 0.5], [0.5, 1]]})");
    const Captured r = moment({cov.path(), {2, 2}, std::string("0.5,0")});
    ASSERT_EQ(r.code, kOk) << r.err;
    const json j = json::parse(r.out);
    // E[(Y1+m)^2 Y2^2] = S11 S22 + 2 S12^2 + m^2 S22
    const double expected = 0.9375 + 2 * 0.25 + 0.25;
    EXPECT_NEAR(j["value"].get<double>(), expected, 1e-14);
    EXPECT_EQ(j["shift"], json::array({0.5, 0.0}));
}

TEST(Moment, Errors) {
    Captured r = moment({"/nonexistent.json", {2}, std::nullopt});
    EXPECT_EQ(r.code, kUsage);
    EXPECT_EQ(r.err.rfind("error: ", 0), 0u);
    r = moment({kData + "/identity3.json", {2, 2}, std::nullopt});
    EXPECT_EQ(r.code, kUsage);
    r = moment({kData + "/identity3.json", {2, 2, 2}, std::string("0,x,0")});
    EXPECT_EQ(r.code, kUsage);
    r = moment({kData + "/identity3.json", {6, 6, 2}, std::nullopt});
    EXPECT_EQ(r.code, kUsage);
    EXPECT_NE(r.err.find("12"), std::string::npos);
}

TEST(Wdic, GoldenToyRun) {
    WdicArgs a;
    a.data_file = kData + "/toy_data.csv";
    a.draws_file = kData + "/toy_draws.csv";
    a.prior_sd = 0.0;
    const Captured r = run_wdic(a);
    ASSERT_EQ(r.code, kOk) << r.err;
    const json got = json::parse(r.out);
    std::ifstream f(kData + "/toy_dic_golden.json");
    const json golden = json::parse(f);
    for (const auto& [key, mine] :
         std::vector<std::pair<std::string, std::string>>{
             {"dic", "wdic"}, {"pd", "pwd"}, {"dev_at_hat", "dev_at_hat"}}) {
        const double g = golden[key].get<double>();
        EXPECT_LE(std::abs(got[mine].get<double>() - g), 1e-12 * std::abs(g)) << key;
    }
    EXPECT_LE(std::abs(got["theta_hat"][0].get<double>() - golden["theta_hat"].get<double>()),
              1e-12 * std::abs(golden["theta_hat"].get<double>()));
    EXPECT_EQ(got["provenance"], "file:" + a.draws_file.value());
    EXPECT_FALSE(got.contains("acceptance_rate"));
}

TEST(Wdic, ZeroWeightsGiveZero) {
    const oracle::TempFile data("zero.csv", "y_1,weight\n0.5,0\n-1.2,0\n3,0\n");
    WdicArgs a;
    a.data_file = data.path();
    a.draws_file = kData + "/toy_draws.csv";
    const Captured r = run_wdic(a);
    ASSERT_EQ(r.code, kOk) << r.err;
    const json j = json::parse(r.out);
    EXPECT_EQ(j["wdic"].get<double>(), 0.0);
    EXPECT_EQ(j["pwd"].get<double>(), 0.0);
}

TEST(Wdic, SamplerRunIsDeterministic) {
    WdicArgs a;
    a.data_file = kData + "/toy_data.csv";
    a.sample = "6000,1000,0.4,7";
    const Captured r1 = run_wdic(a);
    const Captured r2 = run_wdic(a);
    ASSERT_EQ(r1.code, kOk) << r1.err;
    EXPECT_EQ(r1.out, r2.out);
    const json j = json::parse(r1.out);
    EXPECT_EQ(j["provenance"], "sampler(seed=7,steps=6000,burn_in=1000)");
    EXPECT_EQ(j["draws"].get<int>(), 5000);
    EXPECT_TRUE(j.contains("acceptance_rate"));
}

TEST(Wdic, WriteDrawsRoundTrip) {
    const oracle::TempFile drawn("drawn.csv", "");
    WdicArgs a;
    a.data_file = kData + "/toy_data.csv";
    a.sample = "3000,500,0.4,3";
    a.write_draws = drawn.path();
    const Captured first = run_wdic(a);
    ASSERT_EQ(first.code, kOk) << first.err;
    WdicArgs b = a;
    b.sample.reset();
    b.write_draws.reset();
    b.draws_file = drawn.path();
    const Captured second = run_wdic(b);
    ASSERT_EQ(second.code, kOk) << second.err;
    const json j1 = json::parse(first.out), j2 = json::parse(second.out);
    EXPECT_EQ(j1["wdic"], j2["wdic"]);
    EXPECT_EQ(j1["pwd"], j2["pwd"]);
}

TEST(Wdic, MalformedCsvNamesRowAndColumn) {
    const oracle::TempFile data("bad.csv", "y_1,weight\n1,1\n2,oops\n");
    WdicArgs a;
    a.data_file = data.path();
    a.draws_file = kData + "/toy_draws.csv";
    const Captured r = run_wdic(a);
    EXPECT_EQ(r.code, kUsage);
    EXPECT_NE(r.err.find("row 3, column 2 (weight)"), std::string::npos) << r.err;
}

TEST(Wdic, DrawsSourceMustBeUnique) {
    WdicArgs a;
    a.data_file = kData + "/toy_data.csv";
    EXPECT_EQ(run_wdic(a).code, kUsage);
    a.draws_file = kData + "/toy_draws.csv";
    a.sample = "1000,100,0.5,1";
    EXPECT_EQ(run_wdic(a).code, kUsage);
}

TEST(Wdic, OptionErrors) {
    WdicArgs a;
    a.data_file = kData + "/toy_data.csv";
    a.draws_file = kData + "/toy_draws.csv";
    a.model = "cauchy";
    EXPECT_EQ(run_wdic(a).code, kUsage);
    a.model = "normal";
    a.theta_hat = "median";
    EXPECT_EQ(run_wdic(a).code, kUsage);
    a.theta_hat = "mean";
    a.weights = "central:x";
    EXPECT_EQ(run_wdic(a).code, kUsage);
    a.weights = "central:1.5";
    EXPECT_EQ(run_wdic(a).code, kOk);
}

TEST(Verify, DefaultRunPassesAndReportsLambda) {
    const Captured r = capture([](std::ostream& o, std::ostream& e) { return cmd_verify({}, o, e); });
    ASSERT_EQ(r.code, kOk) << r.err;
    const json report = json::parse(r.out);
    EXPECT_TRUE(report["passed"].get<bool>());
    EXPECT_EQ(report["oracle_failures"].get<int>(), 0);
    const json* l11 = lambda_entry(report, "identity", 1, 1);
    ASSERT_NE(l11, nullptr);
    EXPECT_EQ((*l11)["verdict"], "DISCREPANT");
    EXPECT_EQ((*l11)["paper_value"].get<double>(), 1.0);
    EXPECT_EQ((*l11)["wick_value"].get<double>(), 3.0);
    const json* l33 = lambda_entry(report, "identity", 3, 3);
    ASSERT_NE(l33, nullptr);
    EXPECT_EQ((*l33)["verdict"], "CONFIRMED");
}

TEST(Verify, TightQuadratureToleranceFails) {
    verify::VerifyConfig cfg;
    cfg.tol_quad = 1e-9;
    cfg.mc_samples = 20000;
    cfg.pmf_count = 20;
    const Captured r = capture([&](std::ostream& o, std::ostream& e) { return cmd_verify(cfg, o, e); });
    EXPECT_EQ(r.code, kVerifyFailed);
    EXPECT_NE(r.err.find("GridTooCoarse"), std::string::npos);
    EXPECT_NE(r.err.find("--quad-points"), std::string::npos);
}

TEST(Scan, Example2DomainIsUsageError) {
    scan::ScanGrid g;
    g.example = 2;
    g.rho = {0.1, 0.6, 6};
    const Captured r = capture([&](std::ostream& o, std::ostream& e) { return cmd_scan(g, o, e); });
    EXPECT_EQ(r.code, kUsage);
    EXPECT_TRUE(r.out.empty());
    EXPECT_NE(r.err.find("rho outside (0, 0.5)"), std::string::npos);
}

TEST(Scan, TwiceIsByteIdentical) {
    const scan::ScanGrid g;
    const Captured a = capture([&](std::ostream& o, std::ostream& e) { return cmd_scan(g, o, e); });
    const Captured b = capture([&](std::ostream& o, std::ostream& e) { return cmd_scan(g, o, e); });
    ASSERT_EQ(a.code, kOk);
    EXPECT_EQ(a.out, b.out);
}

TEST(Simulate, DeterministicAndShaped) {
    SimulateArgs s;
    s.model = "laplace";
    s.theta = 1.0;
    s.n = 400;
    s.seed = 11;
    const Captured a = capture([&](std::ostream& o, std::ostream& e) { return cmd_simulate(s, o, e); });
    const Captured b = capture([&](std::ostream& o, std::ostream& e) { return cmd_simulate(s, o, e); });
    ASSERT_EQ(a.code, kOk);
    EXPECT_EQ(a.out, b.out);
    std::istringstream in(a.out);
    const auto d = io::read_dataset(in, "sim");
    ASSERT_EQ(d.size(), 400u);
    double mean = 0.0, var = 0.0;
    for (const auto& y : d.observations) mean += y[0];
    mean /= 400.0;
    for (const auto& y : d.observations) var += (y[0] - mean) * (y[0] - mean);
    var /= 399.0;
    // Laplace with scale sqrt(1/2) has unit variance.
    EXPECT_NEAR(mean, 1.0, 4.0 / std::sqrt(400.0));
    EXPECT_NEAR(var, 1.0, 0.3);

    s.weights = "central:1";
    const auto w = simulate(s);
    for (std::size_t i = 0; i < w.size(); ++i)
        EXPECT_DOUBLE_EQ(w.weights[i], (w.observations[i][0] - 1.0) * (w.observations[i][0] - 1.0));
    s.model = "gamma";
    EXPECT_EQ(capture([&](std::ostream& o, std::ostream& e) { return cmd_simulate(s, o, e); }).code, kUsage);
}
