#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <vector>

#include "error.hpp"
#include "gaussian.hpp"
#include "numeric_utils.hpp"
#include "quadrature.hpp"

namespace wentropy::numeric {

struct McConfig {
    std::size_t samples = 100000;
    std::uint64_t seed = 0;
};

struct McEstimate {
    double estimate = 0.0;
    double standard_error = 0.0;
};

/// Draws one point from f into `out`.
struct Sampler {
    std::size_t dim = 0;
    std::function<void(SplitMix64&, std::span<double>)> draw;

    static Sampler gaussian(const GaussianDist& dist) {
        GaussianDensity g(dist);
        const std::size_t n = dist.dim();
        return Sampler{n, [g, n](SplitMix64& rng, std::span<double> out) {
                           std::normal_distribution<double> normal;
                           double z[kMaxGenericDim];
                           for (std::size_t i = 0; i < n; ++i) z[i] = normal(rng);
                           g.transform(std::span<const double>(z, n), out);
                       }};
    }
};

/// E_f[phi log(f/g)] by sampling from f. Sample i uses its own counter-based
/// stream, so the estimate depends only on (seed, samples).
inline McEstimate relative_wde_monte_carlo(const Sampler& sampler, const Density& f,
                                           const Density& g, const WeightFn& weight,
                                           const McConfig& cfg) {
    if (cfg.samples < 1000)
        throw Error(ErrorCode::InvalidArgument, "Monte Carlo needs at least 1000 samples");
    if (sampler.dim != f.dim() || f.dim() != g.dim())
        throw Error(ErrorCode::DimensionMismatch, "sampler, f and g dimensions differ");
    std::vector<double> x(sampler.dim);
    // Welford
    double mean = 0.0, m2 = 0.0;
    for (std::size_t i = 0; i < cfg.samples; ++i) {
        SplitMix64 rng = SplitMix64::stream(cfg.seed, i);
        sampler.draw(rng, x);
        const double v = weight(x) * (f.log_pdf(x) - g.log_pdf(x));
        const double delta = v - mean;
        mean += delta / static_cast<double>(i + 1);
        m2 += delta * (v - mean);
    }
    const double n = static_cast<double>(cfg.samples);
    const double var = m2 / (n - 1.0);
    return McEstimate{mean, std::sqrt(var / n)};
}

}  // namespace wentropy::numeric
