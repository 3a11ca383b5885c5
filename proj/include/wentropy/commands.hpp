#pragma once

// Command implementations behind the CLI. Each writes its primary output to
// `out`, diagnostics to `err`, and returns the process exit code:
// 0 success, 1 verification failure, 2 usage or input error.

#include <fstream>
#include <iostream>
#include <optional>
#include <ostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "error.hpp"
#include "io.hpp"
#include "scan.hpp"
#include "verify.hpp"
#include "wdic.hpp"
#include "wick.hpp"

namespace wentropy::commands {

inline constexpr int kOk = 0;
inline constexpr int kVerifyFailed = 1;
inline constexpr int kUsage = 2;

using json = nlohmann::json;

namespace detail {

inline std::vector<double> parse_list(const std::string& text, const std::string& what) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t used = 0;
            out.push_back(std::stod(item, &used));
            if (used != item.size()) throw std::invalid_argument(item);
        } catch (const std::logic_error&) {
            throw Error(ErrorCode::InvalidArgument, what + ": \"" + item + "\" is not a number");
        }
    }
    if (out.empty()) throw Error(ErrorCode::InvalidArgument, what + " is empty");
    return out;
}

template <class Fn>
int guarded(std::ostream& err, Fn fn) {
    try {
        return fn();
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const nlohmann::json::exception& e) {
        err << "error: " << e.what() << '\n';
        return kUsage;
    }
}

}  // namespace detail

inline int cmd_scan(const scan::ScanGrid& grid, std::ostream& out, std::ostream& err) {
    return detail::guarded(err, [&] {
        const auto rows = scan::run(grid);
        scan::write_csv(out, grid, rows);
        return kOk;
    });
}

inline int cmd_verify(const verify::VerifyConfig& cfg, std::ostream& out, std::ostream& err) {
    return detail::guarded(err, [&] {
        const verify::Report report = verify::run(cfg);
        const json j = report.to_json();
        out << j.dump(2) << '\n';
        err << "verify: " << report.entries.size() << " checks, "
            << j["oracle_failures"].get<std::size_t>() << " oracle failures, "
            << j["paper_discrepancies"].get<std::size_t>() << " paper discrepancies\n";
        for (const auto& e : report.entries)
            if (e.kind == verify::Kind::oracle && !e.ok)
                err << "  FAIL " << e.formula << ' ' << e.point.dump() << " abs_dev=" << e.abs_dev
                    << (e.note.empty() ? "" : "  " + e.note) << '\n';
        return report.passed() ? kOk : kVerifyFailed;
    });
}

struct MomentArgs {
    std::string cov_file;
    std::vector<int> exponents;
    std::optional<std::string> shift;
};

inline int cmd_moment(const MomentArgs& a, std::ostream& out, std::ostream& err) {
    return detail::guarded(err, [&] {
        const GaussianDist d = io::load_gaussian(a.cov_file);
        const wick::MomentSpec spec{a.exponents};
        wick::MomentResult r;
        json j{{"exponents", a.exponents}, {"order", spec.order()}};
        if (a.shift) {
            const std::vector<double> shift = detail::parse_list(*a.shift, "shift");
            r = wick::shifted_moment_counted(d.cov(), shift, spec);
            j["shift"] = shift;
        } else {
            r = wick::central_moment_counted(d.cov(), spec);
        }
        j["value"] = r.value;
        j["matchings"] = r.matchings;
        out << j.dump() << '\n';
        return kOk;
    });
}

struct WdicArgs {
    std::string data_file;
    std::optional<std::string> draws_file;
    std::optional<std::string> sample;  // steps,burn_in,step_size,seed
    std::string model = "normal";
    double model_scale = 0.0;           // 0: model default
    std::string weights = "column";     // column | unit | central:a1,...
    std::string theta_hat = "mean";     // mean | mode
    double prior_sd = 100.0;            // 0: flat prior
    std::optional<std::string> write_draws;
};

inline wdic::ModelSpec make_model(const std::string& name, double scale) {
    if (name == "normal") return scale > 0.0 ? wdic::normal_model(scale) : wdic::normal_model();
    if (name == "laplace") return scale > 0.0 ? wdic::laplace_model(scale) : wdic::laplace_model();
    throw Error(ErrorCode::InvalidArgument, "unknown model \"" + name + "\" (normal, laplace)");
}

inline void apply_weights(wdic::WeightedDataset& data, const std::string& spec) {
    if (spec == "column") return;
    if (spec == "unit") {
        data.weights.assign(data.size(), 1.0);
        return;
    }
    if (spec.rfind("central:", 0) == 0) {
        const std::vector<double> centers = detail::parse_list(spec.substr(8), "weight centers");
        data.weights = wdic::WeightedDataset::central_weights(data.observations, centers);
        return;
    }
    throw Error(ErrorCode::InvalidArgument,
                "weights must be column, unit or central:a1,..., got \"" + spec + "\"");
}

inline wdic::SamplerConfig parse_sample(const std::string& text) {
    const std::vector<double> v = detail::parse_list(text, "sample");
    if (v.size() != 4)
        throw Error(ErrorCode::InvalidArgument, "sample must be steps,burn_in,step_size,seed");
    for (std::size_t k : {0u, 1u, 3u})
        if (v[k] < 0.0 || v[k] != std::floor(v[k]))
            throw Error(ErrorCode::InvalidArgument, "steps, burn_in and seed must be nonnegative integers");
    return wdic::SamplerConfig{static_cast<std::size_t>(v[0]), static_cast<std::size_t>(v[1]), v[2],
                               static_cast<std::uint64_t>(v[3])};
}

inline int cmd_wdic(const WdicArgs& a, std::ostream& out, std::ostream& err) {
    return detail::guarded(err, [&] {
        if (a.draws_file.has_value() == a.sample.has_value())
            throw Error(ErrorCode::InvalidArgument, "give exactly one of --draws or --sample");
        const wdic::ModelSpec model = make_model(a.model, a.model_scale);
        wdic::WeightedDataset data = io::load_dataset(a.data_file);
        apply_weights(data, a.weights);
        if (data.observations[0].size() != 1)
            throw Error(ErrorCode::DimensionMismatch, "the bundled models take scalar observations");
        const wdic::LogPrior prior =
            a.prior_sd > 0.0 ? wdic::normal_prior(a.prior_sd) : wdic::flat_prior();

        wdic::PosteriorDraws draws = a.draws_file
                                         ? io::load_draws(*a.draws_file)
                                         : wdic::metropolis_sample(model, prior, data,
                                                                   parse_sample(*a.sample));
        if (a.write_draws) {
            std::ofstream f(*a.write_draws);
            if (!f) throw Error(ErrorCode::InvalidArgument, "cannot write " + *a.write_draws);
            io::write_draws(f, draws);
        }
        wdic::ThetaHatRule rule;
        if (a.theta_hat == "mean") rule = wdic::ThetaHatRule::mean;
        else if (a.theta_hat == "mode") rule = wdic::ThetaHatRule::mode;
        else throw Error(ErrorCode::InvalidArgument, "theta-hat must be mean or mode");

        const wdic::WdicResult r = wdic::wdic(model, draws, data, rule, prior);
        json j{{"model", model.name},
               {"wdic", r.wdic},
               {"pwd", r.pwd},
               {"dev_at_hat", r.dev_at_hat},
               {"theta_hat", r.theta_hat},
               {"theta_hat_rule", a.theta_hat},
               {"draws", draws.draws.size()},
               {"provenance", draws.provenance}};
        if (!std::isnan(draws.acceptance_rate)) j["acceptance_rate"] = draws.acceptance_rate;
        out << j.dump(2) << '\n';
        return kOk;
    });
}

struct SimulateArgs {
    std::string model = "normal";
    double model_scale = 0.0;
    double theta = 0.0;
    std::size_t n = 100;
    std::uint64_t seed = 1;
    std::string weights = "unit";  // unit | central:a
};

/// Synthetic scalar dataset from one of the bundled models.
inline wdic::WeightedDataset simulate(const SimulateArgs& a) {
    const wdic::ModelSpec model = make_model(a.model, a.model_scale);
    SplitMix64 rng = SplitMix64::stream(a.seed, 0);
    wdic::WeightedDataset data;
    const double scale = a.model_scale > 0.0 ? a.model_scale
                                             : (a.model == "normal" ? 1.0 : std::sqrt(0.5));
    std::normal_distribution<double> normal(a.theta, scale);
    std::exponential_distribution<double> expo(1.0 / scale);
    std::bernoulli_distribution sign(0.5);
    for (std::size_t i = 0; i < a.n; ++i) {
        const double y = model.name == "normal" ? normal(rng)
                                                : a.theta + (sign(rng) ? 1.0 : -1.0) * expo(rng);
        data.observations.push_back({y});
    }
    data.weights.assign(a.n, 1.0);
    apply_weights(data, a.weights);
    return data;
}

inline int cmd_simulate(const SimulateArgs& a, std::ostream& out, std::ostream& err) {
    return detail::guarded(err, [&] {
        io::write_dataset(out, simulate(a));
        return kOk;
    });
}

}  // namespace wentropy::commands
