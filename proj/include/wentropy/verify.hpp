#pragma once

// The verification basket: every closed form against its oracle (wick
// moments, quadrature, Gaussian KL, Monte Carlo, brute-force pmf sums) and
// every printed formula against the corresponding wick-mode value.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "closed_form.hpp"
#include "discrete.hpp"
#include "gaussian.hpp"
#include "monte_carlo.hpp"
#include "numeric_utils.hpp"
#include "quadrature.hpp"
#include "wick.hpp"

namespace wentropy::verify {

using json = nlohmann::json;
namespace cf = closed_form;

struct VerifyConfig {
    double tol_quad = 1e-4;
    std::uint64_t seed = 20240611;
    std::size_t quad_points = 64;
    double quad_sigmas = 8.0;  // half-width of the grid box in marginal sds
    std::size_t mc_samples = 200000;
    std::size_t pmf_count = 200;
};

/// oracle: wick-mode (or exact) value against an independent oracle; a
/// failure fails the run. paper: a printed formula against the wick value;
/// reported only.
enum class Kind { oracle, paper };

struct Entry {
    std::string formula;
    std::string mode;
    json point = json::object();
    std::optional<double> paper_value;
    std::optional<double> wick_value;
    std::optional<double> quadrature_value;
    double abs_dev = 0.0;
    double tolerance = 0.0;
    bool relative = false;  // tolerance applies to abs_dev / scale
    Kind kind = Kind::oracle;
    bool ok = true;
    std::string note;

    std::string verdict() const { return ok ? "CONFIRMED" : "DISCREPANT"; }

    json to_json() const {
        auto opt = [](const std::optional<double>& v) { return v ? json(*v) : json(nullptr); };
        json j{{"formula", formula},
               {"mode", mode},
               {"point", point},
               {"paper_value", opt(paper_value)},
               {"wick_value", opt(wick_value)},
               {"quadrature_value", opt(quadrature_value)},
               {"abs_dev", abs_dev},
               {"verdict", verdict()},
               {"kind", kind == Kind::oracle ? "oracle" : "paper"},
               {"tolerance", tolerance},
               {"tolerance_type", relative ? "relative" : "absolute"}};
        if (!note.empty()) j["note"] = note;
        return j;
    }
};

struct Report {
    std::vector<Entry> entries;

    bool passed() const {
        return std::all_of(entries.begin(), entries.end(),
                           [](const Entry& e) { return e.kind != Kind::oracle || e.ok; });
    }

    const Entry* find(const std::string& formula, const json& point) const {
        for (const Entry& e : entries)
            if (e.formula == formula && e.point == point) return &e;
        return nullptr;
    }

    json to_json() const {
        std::size_t oracle_fail = 0, discrepant = 0;
        json list = json::array();
        for (const Entry& e : entries) {
            if (e.kind == Kind::oracle && !e.ok) ++oracle_fail;
            if (e.kind == Kind::paper && !e.ok) ++discrepant;
            list.push_back(e.to_json());
        }
        return json{{"schema", "wentropy-verify v1"},
                    {"passed", passed()},
                    {"oracle_failures", oracle_fail},
                    {"paper_discrepancies", discrepant},
                    {"entries", list}};
    }
};

namespace detail {

inline constexpr double kExactTol = 1e-12;
inline constexpr double kKlTol = 1e-10;
inline constexpr double kDiscreteTol = 1e-10;
inline constexpr double kGibbsFloor = -1e-8;

inline const char* kGridGuidance =
    "GridTooCoarse: quadrature disagrees beyond --tol-quad; widen the box (--quad-sigmas), "
    "add points (--quad-points) or relax --tol-quad";

inline Entry compare(std::string formula, std::string mode, json point, double reference,
                     double value, double tol, Kind kind, bool relative = false) {
    Entry e;
    e.formula = std::move(formula);
    e.mode = std::move(mode);
    e.point = std::move(point);
    e.abs_dev = std::abs(reference - value);
    e.tolerance = tol;
    e.relative = relative;
    e.kind = kind;
    // Relative comparisons use a unit floor so exact zeros compare absolutely.
    const double scale = relative ? std::max({std::abs(reference), std::abs(value), 1.0}) : 1.0;
    e.ok = e.abs_dev <= tol * scale;
    return e;
}

// Printed value against the wick value.
inline Entry paper_vs_wick(std::string formula, json point, double paper, double wick,
                           double tol = kExactTol) {
    Entry e = compare(std::move(formula), "paper", std::move(point), wick, paper, tol, Kind::paper,
                      true);
    e.paper_value = paper;
    e.wick_value = wick;
    return e;
}

// Wick (or exact) value against quadrature.
inline Entry wick_vs_quad(std::string formula, json point, double wick, double quad, double tol) {
    Entry e = compare(std::move(formula), "wick", std::move(point), quad, wick, tol, Kind::oracle);
    e.wick_value = wick;
    e.quadrature_value = quad;
    if (!e.ok) e.note = kGridGuidance;
    return e;
}

inline json pt(int example, double rho, double x3) {
    return json{{"example", example}, {"rho", rho}, {"x3", x3}};
}

inline GaussianDist example_dist(int example, double rho) {
    return example == 1 ? example1_cov(rho) : example2_cov(rho);
}

struct PairPoint {
    int example;
    double rho;
    double x3;
};

}  // namespace detail

/// The (rho, x3) basket: 20 points per example.
inline std::vector<detail::PairPoint> pair_basket() {
    std::vector<detail::PairPoint> out;
    for (double rho : {0.0, 0.3, -0.4, 0.5})
        for (double x3 : {0.0, 0.5, 1.0, 1.5, -2.0}) out.push_back({1, rho, x3});
    for (double rho : {0.1, 0.25, 0.4, 0.45})
        for (double x3 : {0.0, 0.5, 1.0, 1.5, -2.0}) out.push_back({2, rho, x3});
    return out;
}

inline void xi_identity(Report& r, const VerifyConfig& cfg) {
    double worst = 0.0;
    for (std::uint64_t k = 0; k < 100; ++k) {
        const Matrix s = random_spd(cfg.seed + k, 3);
        worst = std::max(worst, relative_deviation(cf::xi(s), cf::xi_wick(s)));
    }
    Entry e;
    e.formula = "xi_identity";
    e.mode = "paper";
    e.point = json{{"matrices", 100}, {"seed", cfg.seed}};
    e.abs_dev = worst;
    e.tolerance = detail::kExactTol;
    e.relative = true;
    e.kind = Kind::paper;
    e.ok = worst < detail::kExactTol;
    e.note = "max relative deviation over random SPD matrices";
    r.entries.push_back(e);
}

inline void lambda_table(Report& r) {
    const std::array<std::pair<std::string, Matrix>, 2> cases{
        std::pair{std::string("identity"), Matrix(Matrix::Identity(3, 3))},
        std::pair{std::string("example1_rho_0.5"), Matrix(example1_cov(0.5).cov())}};
    for (const auto& [name, s] : cases)
        for (std::size_t i = 0; i < 3; ++i)
            for (std::size_t j = i; j < 3; ++j)
                r.entries.push_back(detail::paper_vs_wick(
                    "lambda", json{{"sigma", name}, {"i", i + 1}, {"j", j + 1}},
                    cf::lambda_paper(s, i, j), cf::lambda_wick(s, i, j)));
}

inline void weighted_normal(Report& r, const VerifyConfig& cfg) {
    const numeric::QuadratureOptions opt{false, cfg.tol_quad};
    const std::array<std::pair<int, double>, 6> cases{
        std::pair{1, 0.0}, std::pair{1, 0.3}, std::pair{1, 0.5},
        std::pair{2, 0.1}, std::pair{2, 0.25}, std::pair{2, 0.4}};
    for (const auto& [ex, rho] : cases) {
        const GaussianDist d = detail::example_dist(ex, rho);
        const auto grid = numeric::GridSpec::around(d, cfg.quad_sigmas, cfg.quad_points);
        const double quad = numeric::wde_quadrature(numeric::Density::gaussian(d),
                                                    numeric::central_weight({0.0, 0.0, 0.0}), grid,
                                                    opt)
                                .value;
        const json p{{"example", ex}, {"rho", rho}};
        const double wick = cf::wde_trivariate(d, cf::FormulaMode::wick);
        r.entries.push_back(detail::wick_vs_quad("trivariate_wde", p, wick, quad, cfg.tol_quad));
        r.entries.push_back(detail::paper_vs_wick("trivariate_wde", p,
                                                  cf::wde_trivariate(d, cf::FormulaMode::paper), wick));
    }
    const GaussianDist id(Vector::Zero(3), Matrix::Identity(3, 3));
    r.entries.push_back(detail::paper_vs_wick("trivariate_wde", json{{"sigma", "identity"}},
                                              cf::wde_trivariate(id, cf::FormulaMode::paper),
                                              cf::wde_trivariate(id, cf::FormulaMode::wick)));
}

inline void pair_point(Report& r, const VerifyConfig& cfg, const detail::PairPoint& pp) {
    using cf::FormulaMode;
    const cf::PairConditional pc(detail::example_dist(pp.example, pp.rho), pp.x3);
    const json p = detail::pt(pp.example, pp.rho, pp.x3);
    const bool ex1 = pp.example == 1;

    // Relative DE.
    const double d_paper = cf::relative_de_pair(pc, EntropyMode::paper);
    const double d_corr = cf::relative_de_pair(pc, EntropyMode::corrected);
    {
        Entry e = detail::compare("relative_de_corrected_vs_kl", "corrected", p,
                                  gaussian_kl(pc.conditional(), pc.pair()), d_corr, detail::kKlTol,
                                  Kind::oracle);
        e.wick_value = d_corr;
        r.entries.push_back(e);
    }
    const double printed_d = ex1 ? cf::example1::relative_de(pp.rho, pp.x3)
                                 : cf::example2::relative_de(pp.rho, pp.x3);
    r.entries.push_back(detail::paper_vs_wick("relative_de_printed_vs_paper_mode", p, printed_d, d_paper));
    if (!ex1) {
        Entry e = detail::paper_vs_wick("relative_de_printed_vs_corrected_mode", p, printed_d, d_corr);
        e.note = "the printed final line equals corrected mode";
        r.entries.push_back(e);
    }

    // Quadrature oracles over the pair.
    const std::array<GaussianDist, 2> both{pc.conditional(), pc.pair()};
    const auto grid = numeric::GridSpec::covering(both, cfg.quad_sigmas, cfg.quad_points);
    const auto fc = numeric::Density::gaussian(pc.conditional());
    const auto fp = numeric::Density::gaussian(pc.pair());
    const Vector& mu = pc.pair().mean();
    const auto w = numeric::central_weight({mu(0), mu(1)});
    const numeric::QuadratureOptions opt{false, cfg.tol_quad};
    const double q_cond = numeric::wde_quadrature(fc, w, grid, opt).value;
    const double q_cross = numeric::cross_wde_quadrature(fc, fp, w, grid, opt).value;
    const double q_rel = numeric::relative_wde_quadrature(fc, fp, w, grid, opt).value;
    const double q_gap = numeric::gibbs_condition_value(fc, fp, w, grid);

    const double cond_w = cf::cond_wde_pair(pc, FormulaMode::wick);
    const double cross_w = cf::cross_wde_pair(pc, FormulaMode::wick);
    const double rel_w = cf::relative_we_pair(pc, FormulaMode::wick);
    r.entries.push_back(detail::wick_vs_quad("cond_wde_pair", p, cond_w, q_cond, cfg.tol_quad));
    r.entries.push_back(detail::wick_vs_quad("cross_wde_pair", p, cross_w, q_cross, cfg.tol_quad));
    r.entries.push_back(detail::wick_vs_quad("relative_we_pair", p, rel_w, q_rel, cfg.tol_quad));
    r.entries.push_back(detail::paper_vs_wick("cond_wde_pair", p, cf::cond_wde_pair(pc, FormulaMode::paper), cond_w));
    r.entries.push_back(detail::paper_vs_wick("cross_wde_pair", p, cf::cross_wde_pair(pc, FormulaMode::paper), cross_w));
    r.entries.push_back(detail::paper_vs_wick("relative_we_pair", p, cf::relative_we_pair(pc, FormulaMode::paper), rel_w));

    // Moments entering the pair formulas.
    const double th = cf::theta(pc);
    r.entries.push_back(detail::paper_vs_wick(
        "theta_printed", p, ex1 ? cf::example1::theta(pp.rho, pp.x3) : cf::example2::theta(pp.rho, pp.x3), th));
    for (std::size_t i = 0; i < 2; ++i)
        for (std::size_t j = i; j < 2; ++j) {
            json pij = p;
            pij["i"] = i + 1;
            pij["j"] = j + 1;
            const double lw = cf::lambda_bar(pc, i, j, FormulaMode::wick);
            const double uw = cf::upsilon(pc, i, j, FormulaMode::wick);
            r.entries.push_back(detail::paper_vs_wick("lambda_bar_appendix", pij,
                                                      cf::lambda_bar(pc, i, j, FormulaMode::paper), lw));
            r.entries.push_back(detail::paper_vs_wick("upsilon_appendix", pij,
                                                      cf::upsilon(pc, i, j, FormulaMode::paper), uw));
            r.entries.push_back(detail::paper_vs_wick(
                "lambda_bar_printed", pij,
                ex1 ? cf::example1::lambda_bar(pp.rho, pp.x3, i, j)
                    : cf::example2::lambda_bar(pp.rho, pp.x3, i, j),
                lw));
            r.entries.push_back(detail::paper_vs_wick(
                "upsilon_printed", pij,
                ex1 ? cf::example1::upsilon(pp.rho, pp.x3, i, j)
                    : cf::example2::upsilon(pp.rho, pp.x3, i, j),
                uw));
        }
    r.entries.push_back(detail::paper_vs_wick(
        "relative_we_printed", p,
        ex1 ? cf::example1::relative_we(pp.rho, pp.x3) : cf::example2::relative_we(pp.rho, pp.x3),
        rel_w));

    // Weighted Gibbs condition.
    const double gap = cf::gibbs_gap(pc);
    r.entries.push_back(detail::wick_vs_quad("gibbs_gap", p, gap, q_gap, cfg.tol_quad));
    r.entries.push_back(detail::paper_vs_wick(
        ex1 ? "gibbs_gap_printed" : "gibbs_condition_printed", p,
        ex1 ? cf::example1::gibbs_gap(pp.rho, pp.x3) : cf::example2::gibbs_condition(pp.rho, pp.x3), gap));
    {
        Entry e;
        e.formula = "gibbs_implication";
        e.mode = "wick";
        e.point = p;
        e.wick_value = rel_w;
        e.quadrature_value = q_rel;
        e.tolerance = -detail::kGibbsFloor;
        if (gap >= 0.0) {
            e.kind = Kind::oracle;
            e.ok = q_rel >= detail::kGibbsFloor;
            e.note = "condition holds; divergence must be nonnegative";
        } else {
            // The theorem says nothing here; record the sign.
            e.kind = Kind::paper;
            e.ok = q_rel >= detail::kGibbsFloor;
            e.note = e.ok ? "condition violated; divergence still nonnegative"
                          : "condition violated; divergence negative";
        }
        e.abs_dev = std::max(0.0, -q_rel);
        r.entries.push_back(e);
    }
}

inline void discrete_identities(Report& r, const VerifyConfig& cfg) {
    double chain = 0, wchain = 0, wchain_printed = 0, wmutual = 0, rel = 0, mutual = 0;
    for (std::size_t k = 0; k < cfg.pmf_count; ++k) {
        const std::uint64_t seed = cfg.seed + 1000 + k;
        std::vector<std::size_t> dims;
        SplitMix64 g = SplitMix64::stream(seed, 99);
        const std::size_t n = 2 + g() % 3;
        for (std::size_t i = 0; i < n; ++i) dims.push_back(2 + g() % 3);
        const auto joint = discrete::DiscreteJoint::random(dims, seed, (k % 4 == 0) ? 0.2 : 0.0);
        std::vector<double> centers(n);
        for (std::size_t i = 0; i < n; ++i) centers[i] = static_cast<double>(g() % 5) * 0.5 - 1.0;
        chain = std::max(chain, discrete::chain_rule_de_check(joint).deviation());
        const auto wc = discrete::chain_rule_wde_check(joint, centers);
        wchain = std::max(wchain, wc.deviation());
        wchain_printed = std::max(wchain_printed, std::abs(wc.lhs - wc.rhs_printed));
        wmutual = std::max(wmutual, discrete::mutual_wde_decomposition_check(joint, centers).deviation());
        mutual = std::max(mutual, discrete::mutual_de_decomposition_check(joint).deviation());
        const std::size_t split = 1 + k % (n - 1);
        const std::vector<double> xc(centers.begin(), centers.begin() + static_cast<long>(split));
        const std::vector<double> yc(centers.begin() + static_cast<long>(split), centers.end());
        rel = std::max(rel, discrete::relative_de_identity_check(joint, split, xc, yc).max_deviation());
    }
    const json p{{"pmfs", cfg.pmf_count}, {"seed", cfg.seed + 1000}};
    auto add = [&](const char* name, double dev, Kind kind, const char* note) {
        Entry e;
        e.formula = name;
        e.mode = kind == Kind::oracle ? "exact" : "paper";
        e.point = p;
        e.abs_dev = dev;
        e.tolerance = detail::kDiscreteTol;
        e.kind = kind;
        e.ok = dev <= detail::kDiscreteTol;
        e.note = note;
        r.entries.push_back(e);
    };
    add("chain_rule_de", chain, Kind::oracle, "max |lhs - rhs| over random pmfs");
    add("chain_rule_wde", wchain, Kind::oracle,
        "psi_i uses E[prod_{k>i}(X_k-a_k)^2 | X_1..X_i]");
    add("chain_rule_wde_printed_psi", wchain_printed, Kind::paper,
        "psi_i with the printed E[(X_{i+1}-a_{i+1})^2 | X_1..X_i]; exact only for n = 2");
    add("mutual_wde_decomposition", wmutual, Kind::oracle, "max |lhs - rhs| over random pmfs");
    add("mutual_de_decomposition", mutual, Kind::oracle, "both the sum and the expectation form");
    add("relative_de_identity", rel, Kind::oracle,
        "per-y identity, weighted analogue and both expectation forms");
}

inline void monte_carlo(Report& r, const VerifyConfig& cfg) {
    const cf::PairConditional pc(example1_cov(0.5), 1.5);
    const Vector& mu = pc.pair().mean();
    const auto w = numeric::central_weight({mu(0), mu(1)});
    const auto fc = numeric::Density::gaussian(pc.conditional());
    const auto fp = numeric::Density::gaussian(pc.pair());
    const std::array<GaussianDist, 2> both{pc.conditional(), pc.pair()};
    const double quad = numeric::relative_wde_quadrature(
                            fc, fp, w, numeric::GridSpec::covering(both, cfg.quad_sigmas, cfg.quad_points))
                            .value;
    const auto mc = numeric::relative_wde_monte_carlo(numeric::Sampler::gaussian(pc.conditional()),
                                                      fc, fp, w, {cfg.mc_samples, cfg.seed});
    Entry e;
    e.formula = "relative_we_monte_carlo";
    e.mode = "monte_carlo";
    e.point = json{{"example", 1}, {"rho", 0.5}, {"x3", 1.5}, {"samples", cfg.mc_samples},
                   {"seed", cfg.seed}};
    e.wick_value = mc.estimate;
    e.quadrature_value = quad;
    e.abs_dev = std::abs(mc.estimate - quad);
    e.tolerance = 4.0 * mc.standard_error;
    e.ok = e.abs_dev <= e.tolerance;
    e.note = "estimate within 4 standard errors of quadrature";
    r.entries.push_back(e);
}

inline Report run(const VerifyConfig& cfg) {
    if (!(cfg.tol_quad > 0.0)) throw Error(ErrorCode::InvalidArgument, "tol-quad must be positive");
    if (!(cfg.quad_sigmas > 0.0)) throw Error(ErrorCode::InvalidArgument, "quad-sigmas must be positive");
    Report r;
    xi_identity(r, cfg);
    lambda_table(r);
    weighted_normal(r, cfg);
    for (const auto& pp : pair_basket()) pair_point(r, cfg, pp);
    discrete_identities(r, cfg);
    monte_carlo(r, cfg);
    return r;
}

}  // namespace wentropy::verify
