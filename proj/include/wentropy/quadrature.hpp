#pragma once

// Tensor-grid midpoint quadrature and the density/weight vocabulary shared
// by the numerical entropy oracles.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "error.hpp"
#include "gaussian.hpp"
#include "numeric_utils.hpp"

namespace wentropy::numeric {

/// Cells with density at or below this are treated as zero (0 log 0 = 0).
inline constexpr double kDensityFloor = 1e-300;
inline constexpr std::size_t kMinPoints = 16;
inline constexpr double kMaxCells = 1e8;

struct Axis {
    double lo = 0.0;
    double hi = 1.0;
    std::size_t points = kMinPoints;

    double step() const { return (hi - lo) / static_cast<double>(points); }
};

/// Rectangular midpoint grid, one Axis per dimension.
struct GridSpec {
    std::vector<Axis> axes;

    std::size_t dim() const { return axes.size(); }

    double cells() const {
        double c = 1.0;
        for (const Axis& a : axes) c *= static_cast<double>(a.points);
        return c;
    }

    double cell_volume() const {
        double v = 1.0;
        for (const Axis& a : axes) v *= a.step();
        return v;
    }

    void validate() const {
        if (axes.empty()) throw Error(ErrorCode::InvalidArgument, "grid has no axes");
        for (std::size_t k = 0; k < axes.size(); ++k) {
            const Axis& a = axes[k];
            if (!(a.lo < a.hi))
                throw Error(ErrorCode::InvalidArgument,
                            "axis " + std::to_string(k) + " needs lo < hi");
            if (a.points < kMinPoints)
                throw Error(ErrorCode::InvalidArgument,
                            "axis " + std::to_string(k) + " has fewer than 16 points");
        }
        if (cells() > kMaxCells)
            throw Error(ErrorCode::InvalidArgument, "grid exceeds 1e8 cells");
    }

    GridSpec refined() const {
        GridSpec g = *this;
        for (Axis& a : g.axes) a.points *= 2;
        return g;
    }

    /// mean_i +/- sigmas * sd_i on every axis.
    static GridSpec around(const GaussianDist& dist, double sigmas = 8.0,
                           std::size_t points = 64) {
        GridSpec g;
        for (std::size_t i = 0; i < dist.dim(); ++i) {
            const auto k = static_cast<Eigen::Index>(i);
            const double sd = std::sqrt(dist.cov()(k, k));
            g.axes.push_back({dist.mean()(k) - sigmas * sd, dist.mean()(k) + sigmas * sd, points});
        }
        return g;
    }

    /// Smallest box containing `around` boxes of every distribution.
    static GridSpec covering(std::span<const GaussianDist> dists, double sigmas = 8.0,
                             std::size_t points = 64) {
        GridSpec g = around(dists.front(), sigmas, points);
        for (const GaussianDist& d : dists.subspan(1)) {
            const GridSpec o = around(d, sigmas, points);
            if (o.dim() != g.dim())
                throw Error(ErrorCode::DimensionMismatch, "distributions differ in dimension");
            for (std::size_t k = 0; k < g.dim(); ++k) {
                g.axes[k].lo = std::min(g.axes[k].lo, o.axes[k].lo);
                g.axes[k].hi = std::max(g.axes[k].hi, o.axes[k].hi);
            }
        }
        return g;
    }
};

/// Visits every cell midpoint in row-major order.
template <class Visitor>
void for_each_node(const GridSpec& grid, Visitor&& visit) {
    grid.validate();
    const std::size_t n = grid.dim();
    std::vector<std::size_t> idx(n, 0);
    std::vector<double> x(n);
    for (std::size_t k = 0; k < n; ++k) x[k] = grid.axes[k].lo + 0.5 * grid.axes[k].step();
    while (true) {
        visit(std::span<const double>(x));
        std::size_t k = n;
        while (k > 0) {
            --k;
            if (++idx[k] < grid.axes[k].points) {
                x[k] = grid.axes[k].lo + (static_cast<double>(idx[k]) + 0.5) * grid.axes[k].step();
                break;
            }
            idx[k] = 0;
            x[k] = grid.axes[k].lo + 0.5 * grid.axes[k].step();
            if (k == 0) return;
        }
    }
}

using PointFn = std::function<double(std::span<const double>)>;

/// A probability density known through its log (log 0 = -inf).
class Density {
public:
    static Density from_log_pdf(PointFn log_pdf, std::size_t dim) {
        return Density(std::move(log_pdf), dim);
    }

    static Density from_pdf(PointFn pdf, std::size_t dim) {
        return Density(
            [pdf = std::move(pdf)](std::span<const double> x) {
                const double p = pdf(x);
                return p > 0.0 ? std::log(p) : -std::numeric_limits<double>::infinity();
            },
            dim);
    }

    static Density gaussian(const GaussianDist& dist) {
        GaussianDensity g(dist);
        return Density([g](std::span<const double> x) { return g.log_pdf(x); }, dist.dim());
    }

    std::size_t dim() const { return dim_; }
    double log_pdf(std::span<const double> x) const { return log_pdf_(x); }
    double pdf(std::span<const double> x) const { return std::exp(log_pdf_(x)); }

private:
    Density(PointFn f, std::size_t dim) : log_pdf_(std::move(f)), dim_(dim) {}

    PointFn log_pdf_;
    std::size_t dim_;
};

/// phi(x) = prod (x_i - a_i)^2.
struct CentralWeight {
    std::vector<double> centers;

    double operator()(std::span<const double> x) const {
        double w = 1.0;
        for (std::size_t i = 0; i < centers.size(); ++i) {
            const double d = x[i] - centers[i];
            w *= d * d;
        }
        return w;
    }
};

using WeightFn = PointFn;

inline WeightFn unit_weight() {
    return [](std::span<const double>) { return 1.0; };
}

inline WeightFn central_weight(std::vector<double> centers) {
    for (double a : centers)
        if (!std::isfinite(a)) throw Error(ErrorCode::InvalidArgument, "non-finite weight center");
    return CentralWeight{std::move(centers)};
}

struct QuadratureResult {
    double value = 0.0;
    /// Integral of phi * f over the grid; compare with the expected weighted
    /// mass to see how much the box truncates.
    double weighted_mass = 0.0;
};

struct QuadratureOptions {
    /// Re-evaluate on a grid with doubled points and fail with
    /// GridTooCoarse if the two results differ by more than `tolerance`.
    bool self_check = false;
    double tolerance = 1e-4;
};

namespace detail {

template <class Eval>
QuadratureResult with_refinement(const GridSpec& grid, const QuadratureOptions& opt, Eval eval) {
    const QuadratureResult coarse = eval(grid);
    if (!opt.self_check) return coarse;
    const QuadratureResult fine = eval(grid.refined());
    const double change = std::abs(fine.value - coarse.value);
    if (change > opt.tolerance)
        throw Error(ErrorCode::GridTooCoarse,
                    "doubling grid points changed the result by " + format_real(change) +
                        " (> " + format_real(opt.tolerance) +
                        "); increase points per axis or widen the tolerance");
    return fine;
}

inline void check_dim(const GridSpec& grid, std::size_t dim, const char* what) {
    if (grid.dim() != dim)
        throw Error(ErrorCode::DimensionMismatch,
                    std::string(what) + " has dimension " + std::to_string(dim) + ", grid has " +
                        std::to_string(grid.dim()));
}

inline const double kLogFloor = std::log(kDensityFloor);

}  // namespace detail

/// -integral phi f log f. Unit weight gives the differential entropy.
inline QuadratureResult wde_quadrature(const Density& f, const WeightFn& weight,
                                       const GridSpec& grid, const QuadratureOptions& opt = {}) {
    detail::check_dim(grid, f.dim(), "density");
    return detail::with_refinement(grid, opt, [&](const GridSpec& g) {
        CompensatedSum value, mass;
        for_each_node(g, [&](std::span<const double> x) {
            const double lf = f.log_pdf(x);
            if (!(lf > detail::kLogFloor)) return;
            const double wp = weight(x) * std::exp(lf);
            value += -wp * lf;
            mass += wp;
        });
        const double vol = g.cell_volume();
        return QuadratureResult{value.value() * vol, mass.value() * vol};
    });
}

inline QuadratureResult de_quadrature(const Density& f, const GridSpec& grid,
                                      const QuadratureOptions& opt = {}) {
    return wde_quadrature(f, unit_weight(), grid, opt);
}

/// -integral phi f(x) log[f(x) / f_B(x_B)]: conditional weighted entropy of
/// the remaining coordinates given the coordinates listed in `given`.
inline QuadratureResult conditional_wde_quadrature(const Density& joint,
                                                   const Density& given_marginal,
                                                   const std::vector<std::size_t>& given,
                                                   const WeightFn& weight, const GridSpec& grid,
                                                   const QuadratureOptions& opt = {}) {
    detail::check_dim(grid, joint.dim(), "joint density");
    if (given.size() != given_marginal.dim())
        throw Error(ErrorCode::DimensionMismatch, "given index set does not match marginal");
    for (std::size_t i : given)
        if (i >= joint.dim()) throw Error(ErrorCode::InvalidArgument, "given index out of range");
    return detail::with_refinement(grid, opt, [&](const GridSpec& g) {
        CompensatedSum value, mass;
        std::vector<double> xb(given.size());
        for_each_node(g, [&](std::span<const double> x) {
            const double lf = joint.log_pdf(x);
            if (!(lf > detail::kLogFloor)) return;
            for (std::size_t k = 0; k < given.size(); ++k) xb[k] = x[given[k]];
            const double wp = weight(x) * std::exp(lf);
            value += -wp * (lf - given_marginal.log_pdf(xb));
            mass += wp;
        });
        const double vol = g.cell_volume();
        return QuadratureResult{value.value() * vol, mass.value() * vol};
    });
}

/// A marginal factor of a product reference density.
struct MarginalBlock {
    std::vector<std::size_t> coords;
    Density density;
};

/// integral phi f log[f / prod_b f_b(x_b)]; the blocks must partition the
/// coordinates. With single-coordinate blocks this is the mutual WE.
inline QuadratureResult mutual_wde_quadrature(const Density& joint,
                                              const std::vector<MarginalBlock>& blocks,
                                              const WeightFn& weight, const GridSpec& grid,
                                              const QuadratureOptions& opt = {}) {
    detail::check_dim(grid, joint.dim(), "joint density");
    std::vector<bool> seen(joint.dim(), false);
    for (const MarginalBlock& b : blocks) {
        if (b.coords.size() != b.density.dim())
            throw Error(ErrorCode::DimensionMismatch, "block coordinates do not match its density");
        for (std::size_t i : b.coords) {
            if (i >= joint.dim() || seen[i])
                throw Error(ErrorCode::InvalidArgument, "blocks must partition the coordinates");
            seen[i] = true;
        }
    }
    if (std::find(seen.begin(), seen.end(), false) != seen.end())
        throw Error(ErrorCode::InvalidArgument, "blocks must partition the coordinates");

    return detail::with_refinement(grid, opt, [&](const GridSpec& g) {
        CompensatedSum value, mass;
        std::vector<std::vector<double>> parts(blocks.size());
        for (std::size_t b = 0; b < blocks.size(); ++b) parts[b].resize(blocks[b].coords.size());
        for_each_node(g, [&](std::span<const double> x) {
            const double lf = joint.log_pdf(x);
            if (!(lf > detail::kLogFloor)) return;
            double lprod = 0.0;
            for (std::size_t b = 0; b < blocks.size(); ++b) {
                for (std::size_t k = 0; k < blocks[b].coords.size(); ++k)
                    parts[b][k] = x[blocks[b].coords[k]];
                lprod += blocks[b].density.log_pdf(parts[b]);
            }
            const double wp = weight(x) * std::exp(lf);
            value += wp * (lf - lprod);
            mass += wp;
        });
        const double vol = g.cell_volume();
        return QuadratureResult{value.value() * vol, mass.value() * vol};
    });
}

/// Weighted Kullback-Leibler divergence integral phi f log(f/g).
inline QuadratureResult relative_wde_quadrature(const Density& f, const Density& g,
                                                const WeightFn& weight, const GridSpec& grid,
                                                const QuadratureOptions& opt = {}) {
    detail::check_dim(grid, f.dim(), "f");
    detail::check_dim(grid, g.dim(), "g");
    return detail::with_refinement(grid, opt, [&](const GridSpec& gr) {
        CompensatedSum value, mass;
        for_each_node(gr, [&](std::span<const double> x) {
            const double lf = f.log_pdf(x);
            if (!(lf > detail::kLogFloor)) return;
            const double wp = weight(x) * std::exp(lf);
            if (wp == 0.0) return;
            const double lg = g.log_pdf(x);
            if (!std::isfinite(lg)) {
                if (wp > kDensityFloor)
                    throw Error(ErrorCode::SupportMismatch,
                                "g vanishes where phi f > 0 at x0=" + format_real(x[0]));
                return;
            }
            value += wp * (lf - lg);
            mass += wp;
        });
        const double vol = gr.cell_volume();
        return QuadratureResult{value.value() * vol, mass.value() * vol};
    });
}

/// Weighted cross-entropy -integral phi f log g.
inline QuadratureResult cross_wde_quadrature(const Density& f, const Density& g,
                                             const WeightFn& weight, const GridSpec& grid,
                                             const QuadratureOptions& opt = {}) {
    detail::check_dim(grid, f.dim(), "f");
    detail::check_dim(grid, g.dim(), "g");
    return detail::with_refinement(grid, opt, [&](const GridSpec& gr) {
        CompensatedSum value, mass;
        for_each_node(gr, [&](std::span<const double> x) {
            const double lf = f.log_pdf(x);
            if (!(lf > detail::kLogFloor)) return;
            const double wp = weight(x) * std::exp(lf);
            if (wp == 0.0) return;
            const double lg = g.log_pdf(x);
            if (!std::isfinite(lg))
                throw Error(ErrorCode::SupportMismatch, "g vanishes where phi f > 0");
            value += -wp * lg;
            mass += wp;
        });
        const double vol = gr.cell_volume();
        return QuadratureResult{value.value() * vol, mass.value() * vol};
    });
}

/// integral phi (f - g); nonnegative values guarantee D^w_phi(f||g) >= 0.
inline double gibbs_condition_value(const Density& f, const Density& g, const WeightFn& weight,
                                    const GridSpec& grid) {
    detail::check_dim(grid, f.dim(), "f");
    detail::check_dim(grid, g.dim(), "g");
    CompensatedSum s;
    for_each_node(grid, [&](std::span<const double> x) {
        s += weight(x) * (f.pdf(x) - g.pdf(x));
    });
    return s.value() * grid.cell_volume();
}

/// integral phi f x^r over the grid for every monomial in `exponents`;
/// used to check moment formulas. One pass over the grid.
inline std::vector<double> moment_quadrature(const Density& f,
                                             const std::vector<std::vector<int>>& exponents,
                                             const GridSpec& grid,
                                             std::span<const double> center) {
    detail::check_dim(grid, f.dim(), "density");
    const std::size_t n = f.dim();
    int max_r = 0;
    for (const auto& e : exponents) {
        if (e.size() != n) throw Error(ErrorCode::DimensionMismatch, "exponent length");
        for (int r : e) max_r = std::max(max_r, r);
    }
    std::vector<CompensatedSum> sums(exponents.size());
    std::vector<double> powers(n * static_cast<std::size_t>(max_r + 1));
    for_each_node(grid, [&](std::span<const double> x) {
        const double p = f.pdf(x);
        if (p <= kDensityFloor) return;
        for (std::size_t i = 0; i < n; ++i) {
            const double y = x[i] - center[i];
            double v = 1.0;
            for (int r = 0; r <= max_r; ++r) {
                powers[i * static_cast<std::size_t>(max_r + 1) + static_cast<std::size_t>(r)] = v;
                v *= y;
            }
        }
        for (std::size_t m = 0; m < exponents.size(); ++m) {
            double term = p;
            for (std::size_t i = 0; i < n; ++i)
                term *= powers[i * static_cast<std::size_t>(max_r + 1) +
                               static_cast<std::size_t>(exponents[m][i])];
            sums[m] += term;
        }
    });
    std::vector<double> out(exponents.size());
    for (std::size_t m = 0; m < out.size(); ++m) out[m] = sums[m].value() * grid.cell_volume();
    return out;
}

}  // namespace wentropy::numeric
