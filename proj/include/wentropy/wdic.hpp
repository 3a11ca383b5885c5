#pragma once

// Weighted deviance information criterion: weighted log-likelihood,
// weighted deviance, effective number of parameters and the WDIC score,
// plus a small random-walk Metropolis sampler for the demo.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <numbers>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "error.hpp"
#include "numeric_utils.hpp"

namespace wentropy::wdic {

using Params = std::vector<double>;

struct WeightedDataset {
    std::vector<std::vector<double>> observations;
    std::vector<double> weights;

    std::size_t size() const { return observations.size(); }

    void validate() const {
        if (observations.size() != weights.size())
            throw Error(ErrorCode::DimensionMismatch,
                        std::to_string(observations.size()) + " observations but " +
                            std::to_string(weights.size()) + " weights");
        for (std::size_t i = 0; i < weights.size(); ++i)
            if (!(weights[i] >= 0.0) || !std::isfinite(weights[i]))
                throw Error(ErrorCode::InvalidArgument,
                            "weight " + std::to_string(i + 1) + " is negative or not finite");
        for (std::size_t i = 1; i < observations.size(); ++i)
            if (observations[i].size() != observations[0].size())
                throw Error(ErrorCode::DimensionMismatch,
                            "observation " + std::to_string(i + 1) + " has a different length");
    }

    /// Weights phi(y_i) = prod_k (y_ik - a_k)^2.
    static std::vector<double> central_weights(const std::vector<std::vector<double>>& ys,
                                               std::span<const double> centers) {
        std::vector<double> w;
        w.reserve(ys.size());
        for (const auto& y : ys) {
            if (y.size() != centers.size())
                throw Error(ErrorCode::DimensionMismatch, "one weight center per coordinate required");
            double v = 1.0;
            for (std::size_t k = 0; k < y.size(); ++k) v *= (y[k] - centers[k]) * (y[k] - centers[k]);
            w.push_back(v);
        }
        return w;
    }
};

/// Parametric model g(y | theta) with box bounds on theta.
struct ModelSpec {
    std::string name;
    std::size_t dim = 1;
    std::function<double(std::span<const double> y, std::span<const double> theta)> log_density;
    Params lower;
    Params upper;
    Params initial;

    bool in_bounds(std::span<const double> theta) const {
        if (theta.size() != dim) return false;
        for (std::size_t k = 0; k < dim; ++k)
            if (!(theta[k] >= lower[k] && theta[k] <= upper[k])) return false;
        return true;
    }

    void check_theta(std::span<const double> theta) const {
        if (theta.size() != dim)
            throw Error(ErrorCode::DimensionMismatch,
                        "model " + name + " has " + std::to_string(dim) + " parameters, got " +
                            std::to_string(theta.size()));
        if (!in_bounds(theta))
            throw Error(ErrorCode::InvalidArgument, "theta outside the bounds of model " + name);
    }
};

/// y ~ N(theta, sd^2) with known sd.
inline ModelSpec normal_model(double sd = 1.0) {
    if (!(sd > 0.0)) throw Error(ErrorCode::InvalidArgument, "sd must be positive");
    const double log_norm = std::log(sd) + 0.5 * std::log(kTwoPi);
    const double inf = std::numeric_limits<double>::infinity();
    return ModelSpec{"normal", 1,
                     [sd, log_norm](std::span<const double> y, std::span<const double> t) {
                         const double z = (y[0] - t[0]) / sd;
                         return -0.5 * z * z - log_norm;
                     },
                     {-inf}, {inf}, {0.0}};
}

/// y ~ Laplace(theta, b) with known scale b.
inline ModelSpec laplace_model(double scale = std::numbers::sqrt2 / 2.0) {
    if (!(scale > 0.0)) throw Error(ErrorCode::InvalidArgument, "scale must be positive");
    const double log_norm = std::log(2.0 * scale);
    const double inf = std::numeric_limits<double>::infinity();
    return ModelSpec{"laplace", 1,
                     [scale, log_norm](std::span<const double> y, std::span<const double> t) {
                         return -std::abs(y[0] - t[0]) / scale - log_norm;
                     },
                     {-inf}, {inf}, {0.0}};
}

/// sum_i phi(y_i) log g(y_i | theta), unnormalized.
inline double weighted_loglik(const ModelSpec& model, std::span<const double> theta,
                              const WeightedDataset& data) {
    model.check_theta(theta);
    CompensatedSum acc;
    for (std::size_t i = 0; i < data.size(); ++i) {
        const double w = data.weights[i];
        if (w == 0.0) continue;
        const double l = model.log_density(data.observations[i], theta);
        if (!std::isfinite(l))
            throw Error(ErrorCode::OutOfSupport,
                        "observation " + std::to_string(i + 1) + " has zero density under " +
                            model.name);
        acc += w * l;
    }
    return acc.value();
}

inline double weighted_deviance(const ModelSpec& model, std::span<const double> theta,
                                const WeightedDataset& data) {
    return -2.0 * weighted_loglik(model, theta, data);
}

struct PosteriorDraws {
    std::vector<Params> draws;
    std::string provenance;  // "file:<path>" or "sampler(seed=..,steps=..,burn_in=..)"
    double acceptance_rate = std::numeric_limits<double>::quiet_NaN();

    void check(const ModelSpec& model) const {
        if (draws.empty()) throw Error(ErrorCode::EmptyDraws, "no posterior draws");
        for (std::size_t s = 0; s < draws.size(); ++s)
            if (!model.in_bounds(draws[s]))
                throw Error(ErrorCode::InvalidArgument,
                            "draw " + std::to_string(s + 1) + " outside the bounds of model " +
                                model.name);
    }
};

/// Mean deviance over draws minus deviance at theta_hat. The mean is summed
/// in sorted order so it does not depend on the order of the draws.
inline double penalty_pwd(const ModelSpec& model, const PosteriorDraws& draws,
                          std::span<const double> theta_hat, const WeightedDataset& data) {
    draws.check(model);
    std::vector<double> dev;
    dev.reserve(draws.draws.size());
    for (const Params& t : draws.draws) dev.push_back(weighted_deviance(model, t, data));
    const double mean = order_independent_sum(std::move(dev)) / static_cast<double>(draws.draws.size());
    return mean - weighted_deviance(model, theta_hat, data);
}

enum class ThetaHatRule { mean, mode };

using LogPrior = std::function<double(std::span<const double>)>;

inline LogPrior flat_prior() {
    return [](std::span<const double>) { return 0.0; };
}

/// Independent N(0, sd^2) prior on every component.
inline LogPrior normal_prior(double sd) {
    return [sd](std::span<const double> t) {
        double s = 0.0;
        for (double v : t) s += -0.5 * (v / sd) * (v / sd) - std::log(sd) - 0.5 * std::log(kTwoPi);
        return s;
    };
}

/// Posterior mean of the draws, or the draw with the highest log posterior
/// (ties go to the lexicographically smallest draw).
inline Params theta_hat(const ModelSpec& model, const PosteriorDraws& draws,
                        const WeightedDataset& data, ThetaHatRule rule, const LogPrior& prior) {
    draws.check(model);
    if (rule == ThetaHatRule::mean) {
        Params out(model.dim);
        for (std::size_t k = 0; k < model.dim; ++k) {
            std::vector<double> col;
            col.reserve(draws.draws.size());
            for (const Params& t : draws.draws) col.push_back(t[k]);
            out[k] = order_independent_sum(std::move(col)) / static_cast<double>(draws.draws.size());
        }
        return out;
    }
    WeightedDataset unit{data.observations, std::vector<double>(data.size(), 1.0)};
    const Params* best = nullptr;
    double best_lp = -std::numeric_limits<double>::infinity();
    for (const Params& t : draws.draws) {
        const double lp = weighted_loglik(model, t, unit) + prior(t);
        if (best == nullptr || lp > best_lp || (lp == best_lp && t < *best)) {
            best = &t;
            best_lp = lp;
        }
    }
    return *best;
}

struct WdicResult {
    double wdic = 0.0;
    double pwd = 0.0;
    double dev_at_hat = 0.0;
    Params theta_hat;
};

/// WDIC = DE^w(theta_hat, y) + 2 p^w_D.
inline WdicResult wdic(const ModelSpec& model, const PosteriorDraws& draws,
                       const WeightedDataset& data, ThetaHatRule rule = ThetaHatRule::mean,
                       const LogPrior& prior = flat_prior()) {
    data.validate();
    WdicResult r;
    r.theta_hat = theta_hat(model, draws, data, rule, prior);
    r.dev_at_hat = weighted_deviance(model, r.theta_hat, data);
    r.pwd = penalty_pwd(model, draws, r.theta_hat, data);
    r.wdic = r.dev_at_hat + 2.0 * r.pwd;
    return r;
}

struct SamplerConfig {
    std::size_t steps = 20000;
    std::size_t burn_in = 2000;
    double step_size = 0.5;
    std::uint64_t seed = 1;
};

inline constexpr double kMinAcceptance = 1e-3;

/// Random-walk Metropolis on the posterior L(theta | y) Pi(theta) (data
/// weights do not enter the target). Proposals outside the bounds are
/// rejected.
inline PosteriorDraws metropolis_sample(const ModelSpec& model, const LogPrior& prior,
                                        const WeightedDataset& data, const SamplerConfig& cfg) {
    data.validate();
    if (!(cfg.steps > cfg.burn_in))
        throw Error(ErrorCode::InvalidArgument, "steps must exceed burn_in");
    if (!(cfg.step_size >= 0.0) || !std::isfinite(cfg.step_size))
        throw Error(ErrorCode::InvalidArgument, "step size must be finite and nonnegative");
    model.check_theta(model.initial);

    const WeightedDataset unit{data.observations, std::vector<double>(data.size(), 1.0)};
    auto log_post = [&](const Params& t) { return weighted_loglik(model, t, unit) + prior(t); };

    SplitMix64 rng = SplitMix64::stream(cfg.seed, 0);
    std::normal_distribution<double> normal;
    std::uniform_real_distribution<double> unif(0.0, 1.0);

    Params current = model.initial;
    double lp = log_post(current);
    Params proposal(model.dim);
    std::size_t accepted_after_burn = 0;

    PosteriorDraws out;
    out.draws.reserve(cfg.steps - cfg.burn_in);
    for (std::size_t step = 0; step < cfg.steps; ++step) {
        for (std::size_t k = 0; k < model.dim; ++k)
            proposal[k] = current[k] + cfg.step_size * normal(rng);
        const double u = unif(rng);
        bool accept = false;
        if (model.in_bounds(proposal)) {
            const double lq = log_post(proposal);
            if (std::log(u) < lq - lp) {
                accept = true;
                current = proposal;
                lp = lq;
            }
        }
        if (step >= cfg.burn_in) {
            if (accept) ++accepted_after_burn;
            out.draws.push_back(current);
        }
    }
    out.acceptance_rate =
        static_cast<double>(accepted_after_burn) / static_cast<double>(cfg.steps - cfg.burn_in);
    if (out.acceptance_rate < kMinAcceptance)
        throw Error(ErrorCode::ZeroAcceptance,
                    "acceptance rate " + format_real(out.acceptance_rate) +
                        " after burn-in; reduce the step size");
    out.provenance = "sampler(seed=" + std::to_string(cfg.seed) +
                     ",steps=" + std::to_string(cfg.steps) +
                     ",burn_in=" + std::to_string(cfg.burn_in) + ")";
    return out;
}

/// Monte Carlo standard error of the mean of a correlated series by
/// non-overlapping batch means.
inline double batch_means_stderr(std::span<const double> xs, std::size_t batches = 20) {
    if (batches < 2 || xs.size() < 2 * batches)
        throw Error(ErrorCode::InvalidArgument, "series too short for batch means");
    const std::size_t len = xs.size() / batches;
    std::vector<double> means(batches);
    for (std::size_t b = 0; b < batches; ++b)
        means[b] = compensated_sum(xs.subspan(b * len, len)) / static_cast<double>(len);
    const double grand = compensated_sum(means) / static_cast<double>(batches);
    CompensatedSum ss;
    for (double m : means) ss += (m - grand) * (m - grand);
    return std::sqrt(ss.value() / static_cast<double>(batches - 1) / static_cast<double>(batches));
}

}  // namespace wentropy::wdic
