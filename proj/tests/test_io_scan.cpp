#include <gtest/gtest.h>

#include <sstream>

#include "oracles.hpp"
#include "wentropy/io.hpp"
#include "wentropy/scan.hpp"

using namespace wentropy;

namespace {

std::string parse_message(auto&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::ParseError);
        return e.what();
    }
    ADD_FAILURE() << "no error thrown";
    return "";
}

wdic::WeightedDataset dataset(const std::string& text) {
    std::istringstream in(text);
    return io::read_dataset(in, "data.csv");
}

std::vector<std::string> lines(const std::string& text) {
    std::vector<std::string> out;
    std::istringstream in(text);
    for (std::string l; std::getline(in, l);) out.push_back(l);
    return out;
}

}  // namespace

TEST(GaussianJson, RoundTrip) {
    const GaussianDist d = io::gaussian_from_json(io::parse_json(
        R"({"mean": [1, 2], "cov": [[2, 0.5], [0.5, 1]]})", "inline"));
    EXPECT_EQ(d.mean()(1), 2.0);
    EXPECT_EQ(d.cov()(0, 1), 0.5);
    const GaussianDist back = io::gaussian_from_json(io::gaussian_to_json(d));
    EXPECT_EQ(back.cov(), d.cov());
    EXPECT_EQ(back.mean(), d.mean());
}

TEST(GaussianJson, BundledIdentity) {
    const GaussianDist d = io::load_gaussian(std::string(WENTROPY_DATA_DIR) + "/identity3.json");
    EXPECT_EQ(d.cov(), Matrix::Identity(3, 3));
}

TEST(GaussianJson, Errors) {
    EXPECT_THROW(io::parse_json("{not json", "x"), Error);
    EXPECT_THROW(io::gaussian_from_json(io::parse_json(R"({"mean": [0]})", "x")), Error);
    EXPECT_THROW(io::gaussian_from_json(io::parse_json(R"({"mean": [0, 0], "cov": [[1, 0], [0]]})", "x")),
                 Error);
    EXPECT_THROW(io::gaussian_from_json(io::parse_json(R"({"mean": ["a"], "cov": [[1]]})", "x")), Error);
    try {
        io::gaussian_from_json(io::parse_json(R"({"mean": [0, 0], "cov": [[1, 2], [2, 1]]})", "x"));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::NotPositiveDefinite);
    }
    EXPECT_THROW(io::load_gaussian("/nonexistent/cov.json"), Error);
}

TEST(DiscreteJson, DefaultAndExplicitLabels) {
    const auto a = io::discrete_from_json(io::parse_json(R"({"dims": [2, 2], "probs": [0.1, 0.2, 0.3, 0.4]})", "x"));
    EXPECT_EQ(a.support()[1], (std::vector<double>{0, 1}));
    const auto b = io::discrete_from_json(
        io::parse_json(R"({"dims": [2], "support": [[-1.5, 2]], "probs": [0.5, 0.5]})", "x"));
    EXPECT_EQ(b.label(0, 0), -1.5);
    EXPECT_THROW(io::discrete_from_json(io::parse_json(R"({"dims": [-2], "probs": [1]})", "x")), Error);
    EXPECT_THROW(io::discrete_from_json(io::parse_json(R"({"dims": [2], "probs": [0.7, 0.7]})", "x")), Error);
}

TEST(DatasetCsv, ParsesWithCommentsAndBlankLines) {
    const auto d = dataset("# comment\ny_1,y_2,weight\n\n1.5,2,0.5\n-1,3e-1,2\r\n");
    ASSERT_EQ(d.size(), 2u);
    EXPECT_EQ(d.observations[1][1], 0.3);
    EXPECT_EQ(d.weights[0], 0.5);
}

TEST(DatasetCsv, RoundTripIsExact) {
    wdic::WeightedDataset d{{{0.1}, {1.0 / 3.0}, {-2.5e-17}}, {1.0, 0.123456789012345678, 0.0}};
    std::ostringstream out;
    io::write_dataset(out, d);
    const auto back = dataset(out.str());
    EXPECT_EQ(back.observations, d.observations);
    EXPECT_EQ(back.weights, d.weights);
}

TEST(DatasetCsv, Diagnostics) {
    EXPECT_NE(parse_message([] { dataset("y_1,weight\n1,1\n2\n"); }).find("row 3 has 1 columns"),
              std::string::npos);
    EXPECT_NE(parse_message([] { dataset("y_1,weight\n1,1\n2,abc\n"); }).find("row 3, column 2 (weight)"),
              std::string::npos);
    EXPECT_NE(parse_message([] { dataset("y_1,weight\n1,-1\n"); }).find("negative"), std::string::npos);
    EXPECT_NE(parse_message([] { dataset("x,weight\n1,1\n"); }).find("column 1 is \"x\""), std::string::npos);
    EXPECT_NE(parse_message([] { dataset("y_1,w\n1,1\n"); }).find("y_1..y_d,weight"), std::string::npos);
    EXPECT_NE(parse_message([] { dataset("y_1,weight\n"); }).find("no data rows"), std::string::npos);
    EXPECT_NE(parse_message([] { dataset(""); }).find("missing header"), std::string::npos);
    EXPECT_NE(parse_message([] { dataset("y_1,weight\nnan,1\n"); }).find("not a finite number"),
              std::string::npos);
    EXPECT_NE(parse_message([] { io::load_dataset("/nonexistent.csv"); }).find("cannot open"),
              std::string::npos);
}

TEST(DrawsCsv, RoundTripAndMinimum) {
    wdic::PosteriorDraws p;
    for (int k = 0; k < 120; ++k) p.draws.push_back({0.01 * k, -1.0 / (k + 1)});
    std::ostringstream out;
    io::write_draws(out, p);
    std::istringstream in(out.str());
    const auto back = io::read_draws(in, "d.csv");
    EXPECT_EQ(back.draws, p.draws);
    EXPECT_EQ(back.provenance, "file:d.csv");

    std::istringstream few("theta_1\n1\n2\n");
    EXPECT_NE(parse_message([&] { io::read_draws(few, "few.csv"); }).find("at least 100"), std::string::npos);
    std::istringstream bad("theta_2\n1\n");
    EXPECT_NE(parse_message([&] { io::read_draws(bad, "bad.csv"); }).find("expected \"theta_1\""),
              std::string::npos);
}

TEST(BundledData, Loads) {
    const auto d = io::load_dataset(std::string(WENTROPY_DATA_DIR) + "/toy_data.csv");
    EXPECT_EQ(d.size(), 50u);
    const auto p = io::load_draws(std::string(WENTROPY_DATA_DIR) + "/toy_draws.csv");
    EXPECT_EQ(p.draws.size(), 5000u);
}

TEST(ScanRange, Parse) {
    const scan::Range r = scan::Range::parse("-0.7:0.7:29", "rho");
    EXPECT_EQ(r.lo, -0.7);
    EXPECT_EQ(r.steps, 29u);
    EXPECT_EQ(r.at(0), -0.7);
    EXPECT_EQ(r.at(28), 0.7);
    EXPECT_NEAR(r.at(14), 0.0, 1e-16);
    for (const char* bad : {"0:1", "a:1:3", "0:1:x", "1:0:3", "0:1:-2", "0:inf:3"})
        EXPECT_THROW(scan::Range::parse(bad, "rho"), Error) << bad;
    EXPECT_THROW(scan::parse_mode("exact"), Error);
    EXPECT_EQ(scan::parse_mode("wick"), scan::Mode::wick);
}

TEST(ScanGrid, Validation) {
    scan::ScanGrid g;
    EXPECT_NO_THROW(g.validate());
    g.rho = {-0.8, 0.8, 5};
    EXPECT_THROW(g.validate(), Error);
    g = scan::ScanGrid{};
    g.example = 2;
    g.rho = {0.1, 0.6, 5};
    try {
        g.validate();
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::DomainError);
        EXPECT_NE(std::string(e.what()).find("rho outside (0, 0.5)"), std::string::npos);
    }
    g.rho = {0.1, 0.4, 1};
    EXPECT_THROW(g.validate(), Error);
    g = scan::ScanGrid{};
    g.modes.clear();
    EXPECT_THROW(g.validate(), Error);
    g = scan::ScanGrid{};
    g.example = 3;
    EXPECT_THROW(g.validate(), Error);
}

TEST(Scan, DefaultGrid) {
    const scan::ScanGrid g;
    const auto rows = scan::run(g);
    ASSERT_EQ(rows.size(), 899u);
    for (const scan::Row& r : rows) {
        EXPECT_GE(r.d_corrected, 0.0);
        EXPECT_NEAR(r.d_paper - r.d_corrected, 1.0, 1e-12);
    }
    EXPECT_EQ(rows.front().rho, -0.7);
    EXPECT_EQ(rows.front().x3, -3.0);
    EXPECT_EQ(rows[1].x3, -2.8);
    std::ostringstream out;
    scan::write_csv(out, g, rows);
    const auto ls = lines(out.str());
    ASSERT_EQ(ls.size(), 901u);
    EXPECT_EQ(ls[0], "# wentropy-scan v1 example=1 rho=-0.69999999999999996:0.69999999999999996:29 "
                     "x3=-3:3:31 modes=paper,corrected,wick");
    EXPECT_EQ(ls[1], "rho,x3,D_paper,D_corrected,Dw_wick,Dw_printed,gibbs_gap");
}

TEST(Scan, OriginPoint) {
    const scan::Row r = scan::evaluate(1, 0.0, 0.0);
    EXPECT_EQ(r.d_paper, 1.0);
    EXPECT_EQ(r.d_corrected, 0.0);
    EXPECT_NEAR(r.dw_wick, 0.0, 1e-14);
    EXPECT_EQ(r.gibbs_gap, 0.0);
}

TEST(Scan, UnselectedModesLeaveEmptyColumns) {
    scan::ScanGrid g;
    g.example = 2;
    g.rho = {0.1, 0.4, 2};
    g.x3 = {0.0, 1.0, 2};
    g.modes = {scan::Mode::corrected};
    std::ostringstream out;
    scan::write_csv(out, g, scan::run(g));
    const auto ls = lines(out.str());
    ASSERT_EQ(ls.size(), 6u);
    const auto cells = io::detail::split(ls[2], ',');
    ASSERT_EQ(cells.size(), 7u);
    EXPECT_TRUE(cells[2].empty());
    EXPECT_FALSE(cells[3].empty());
    EXPECT_TRUE(cells[4].empty());
    EXPECT_TRUE(cells[5].empty());
    EXPECT_FALSE(cells[6].empty());
}

TEST(Scan, NumbersRoundTrip) {
    scan::ScanGrid g;
    g.rho = {0.1, 0.3, 3};
    g.x3 = {-1.0, 1.0, 3};
    const auto rows = scan::run(g);
    std::ostringstream out;
    scan::write_csv(out, g, rows);
    const auto ls = lines(out.str());
    for (std::size_t k = 0; k < rows.size(); ++k) {
        const auto cells = io::detail::split(ls[k + 2], ',');
        EXPECT_EQ(std::stod(cells[4]), rows[k].dw_wick);
        EXPECT_EQ(std::stod(cells[2]), rows[k].d_paper);
    }
}
