#pragma once

// Finite surrogates for joint densities and exact checkers for the chain
// rules and mutual-information decompositions. Every identity is evaluated
// by brute-force summation over the pmf tensor on both sides.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "error.hpp"
#include "numeric_utils.hpp"

namespace wentropy::discrete {

inline constexpr double kNormalizationTol = 1e-12;
inline constexpr std::size_t kMaxCheckRank = 4;

/// Dense joint pmf over a product of finite real-labelled supports,
/// stored row-major (last axis fastest).
class DiscreteJoint {
public:
    DiscreteJoint(std::vector<std::size_t> dims, std::vector<std::vector<double>> support,
                  std::vector<double> probs)
        : dims_(std::move(dims)), support_(std::move(support)), probs_(std::move(probs)) {
        if (dims_.empty()) throw Error(ErrorCode::InvalidArgument, "pmf needs at least one axis");
        if (support_.size() != dims_.size())
            throw Error(ErrorCode::DimensionMismatch, "one support vector per axis required");
        std::size_t total = 1;
        for (std::size_t k = 0; k < dims_.size(); ++k) {
            if (dims_[k] == 0) throw Error(ErrorCode::InvalidArgument, "empty axis");
            if (support_[k].size() != dims_[k])
                throw Error(ErrorCode::DimensionMismatch,
                            "support of axis " + std::to_string(k) + " has " +
                                std::to_string(support_[k].size()) + " labels, expected " +
                                std::to_string(dims_[k]));
            total *= dims_[k];
        }
        if (probs_.size() != total)
            throw Error(ErrorCode::DimensionMismatch,
                        "probs has " + std::to_string(probs_.size()) + " entries, expected " +
                            std::to_string(total));
        for (std::size_t i = 0; i < probs_.size(); ++i)
            if (!(probs_[i] >= 0.0) || !std::isfinite(probs_[i]))
                throw Error(ErrorCode::InvalidArgument,
                            "probability " + std::to_string(i) + " is negative or not finite");
        const double sum = compensated_sum(probs_);
        if (std::abs(sum - 1.0) > kNormalizationTol)
            throw Error(ErrorCode::InvalidArgument, "probabilities sum to " + format_real(sum));
    }

    /// Labels 0, 1, ..., k-1 on every axis.
    static DiscreteJoint with_default_labels(std::vector<std::size_t> dims,
                                             std::vector<double> probs) {
        std::vector<std::vector<double>> support;
        for (std::size_t d : dims) {
            std::vector<double> labels(d);
            for (std::size_t i = 0; i < d; ++i) labels[i] = static_cast<double>(i);
            support.push_back(std::move(labels));
        }
        return DiscreteJoint(std::move(dims), std::move(support), std::move(probs));
    }

    /// Seeded random pmf; each cell is zeroed with probability `zero_fraction`
    /// (at least one cell stays positive). Labels are drawn from [-2, 3).
    static DiscreteJoint random(const std::vector<std::size_t>& dims, std::uint64_t seed,
                                double zero_fraction = 0.0, bool random_labels = true) {
        std::mt19937_64 rng(seed);
        std::uniform_real_distribution<double> label(-2.0, 3.0);
        std::exponential_distribution<double> mass(1.0);
        std::bernoulli_distribution drop(zero_fraction);
        std::size_t total = 1;
        std::vector<std::vector<double>> support;
        for (std::size_t d : dims) {
            total *= d;
            std::vector<double> labels(d);
            for (std::size_t i = 0; i < d; ++i)
                labels[i] = random_labels ? label(rng) : static_cast<double>(i);
            support.push_back(std::move(labels));
        }
        std::vector<double> p(total);
        for (double& v : p) v = drop(rng) ? 0.0 : mass(rng);
        if (std::all_of(p.begin(), p.end(), [](double v) { return v == 0.0; })) p[0] = 1.0;
        const double s = compensated_sum(p);
        for (double& v : p) v /= s;
        // Renormalization leaves |sum - 1| at a few ulps.
        return DiscreteJoint(dims, std::move(support), std::move(p));
    }

    std::size_t rank() const { return dims_.size(); }
    const std::vector<std::size_t>& dims() const { return dims_; }
    const std::vector<std::vector<double>>& support() const { return support_; }
    const std::vector<double>& probs() const { return probs_; }
    std::size_t size() const { return probs_.size(); }

    /// Multi-index of a flat (row-major) position.
    void unravel(std::size_t flat, std::span<std::size_t> idx) const {
        for (std::size_t k = dims_.size(); k-- > 0;) {
            idx[k] = flat % dims_[k];
            flat /= dims_[k];
        }
    }

    double label(std::size_t axis, std::size_t k) const { return support_[axis][k]; }

private:
    std::vector<std::size_t> dims_;
    std::vector<std::vector<double>> support_;
    std::vector<double> probs_;
};

namespace detail {

/// Marginal over the contiguous axis range [first, last), row-major.
inline std::vector<double> range_marginal(const DiscreteJoint& j, std::size_t first,
                                          std::size_t last) {
    std::size_t inner = 1, size = 1;
    for (std::size_t k = last; k < j.rank(); ++k) inner *= j.dims()[k];
    for (std::size_t k = first; k < last; ++k) size *= j.dims()[k];
    std::vector<CompensatedSum> acc(size);
    for (std::size_t flat = 0; flat < j.size(); ++flat) acc[(flat / inner) % size] += j.probs()[flat];
    std::vector<double> out(size);
    for (std::size_t i = 0; i < size; ++i) out[i] = acc[i].value();
    return out;
}

inline std::vector<double> axis_marginal(const DiscreteJoint& j, std::size_t axis) {
    return range_marginal(j, axis, axis + 1);
}

inline void check_rank(const DiscreteJoint& j, std::size_t min_rank) {
    if (j.rank() < min_rank || j.rank() > kMaxCheckRank)
        throw Error(ErrorCode::InvalidArgument,
                    "identity checks need " + std::to_string(min_rank) + " to 4 variables, got " +
                        std::to_string(j.rank()));
}

inline void check_centers(const DiscreteJoint& j, std::span<const double> centers) {
    if (centers.size() != j.rank())
        throw Error(ErrorCode::DimensionMismatch, "one weight center per variable required");
}

inline double sq(double v) { return v * v; }

// -p log(p / parent), with 0 log 0 = 0.
inline double neg_plogratio(double p, double parent) {
    return p > 0.0 ? -p * std::log(p / parent) : 0.0;
}

}  // namespace detail

/// Two sides of an identity, evaluated independently.
struct IdentityCheck {
    double lhs = 0.0;
    double rhs = 0.0;
    double deviation() const { return std::abs(lhs - rhs); }
};

/// H(X1..Xn) versus sum_i H(X_i | X_{i-1}, ..., X_1).
inline IdentityCheck chain_rule_de_check(const DiscreteJoint& joint) {
    detail::check_rank(joint, 1);
    IdentityCheck out;
    CompensatedSum lhs;
    for (double p : joint.probs()) lhs += detail::neg_plogratio(p, 1.0);
    out.lhs = lhs.value();

    CompensatedSum rhs;
    std::vector<double> parent{1.0};
    for (std::size_t i = 0; i < joint.rank(); ++i) {
        const std::vector<double> prefix = detail::range_marginal(joint, 0, i + 1);
        for (std::size_t q = 0; q < prefix.size(); ++q)
            rhs += detail::neg_plogratio(prefix[q], parent[q / joint.dims()[i]]);
        parent = prefix;
    }
    out.rhs = rhs.value();
    return out;
}

struct ChainRuleWdeCheck {
    double lhs = 0.0;
    double rhs = 0.0;
    /// rhs with the literal weights psi_i = prod_{j<=i}(x_j-a_j)^2
    /// E[(X_{i+1}-a_{i+1})^2 | X_1..X_i]; equals rhs when n <= 2.
    double rhs_printed = 0.0;
    /// psi_i tabulated over the prefix (X_1..X_{i+1} in 1-based terms),
    /// row-major, for i = 0..n-2.
    std::vector<std::vector<double>> psi;

    double deviation() const { return std::abs(lhs - rhs); }
};

/// Weighted chain rule with phi = prod (x_i - a_i)^2:
/// H^w_phi(X1..Xn) = H^w_phi(X_n | X_<n) + sum_{i<n} H^w_{psi_i}(X_i | X_<i),
/// psi_i = prod_{j<=i}(x_j-a_j)^2 E[prod_{k>i}(X_k-a_k)^2 | X_1..X_i].
inline ChainRuleWdeCheck chain_rule_wde_check(const DiscreteJoint& joint,
                                              std::span<const double> centers) {
    detail::check_rank(joint, 1);
    detail::check_centers(joint, centers);
    const std::size_t n = joint.rank();
    std::vector<std::size_t> idx(n);

    // Per-cell squared deviations.
    std::vector<std::vector<double>> dev(n);
    for (std::size_t k = 0; k < n; ++k) {
        dev[k].resize(joint.dims()[k]);
        for (std::size_t v = 0; v < joint.dims()[k]; ++v)
            dev[k][v] = detail::sq(joint.label(k, v) - centers[k]);
    }

    ChainRuleWdeCheck out;
    const std::vector<double> prefix_last =
        n > 1 ? detail::range_marginal(joint, 0, n - 1) : std::vector<double>{1.0};
    CompensatedSum lhs, last;
    for (std::size_t flat = 0; flat < joint.size(); ++flat) {
        const double p = joint.probs()[flat];
        if (p == 0.0) continue;
        joint.unravel(flat, idx);
        double phi = 1.0;
        for (std::size_t k = 0; k < n; ++k) phi *= dev[k][idx[k]];
        lhs += -phi * p * std::log(p);
        last += -phi * p * std::log(p / prefix_last[flat / joint.dims()[n - 1]]);
    }
    out.lhs = lhs.value();

    CompensatedSum rhs, rhs_printed;
    rhs += last.value();
    rhs_printed += last.value();
    std::vector<double> parent{1.0};
    for (std::size_t i = 0; i + 1 < n; ++i) {
        const std::vector<double> prefix = detail::range_marginal(joint, 0, i + 1);
        std::size_t tail = 1;
        for (std::size_t k = i + 1; k < n; ++k) tail *= joint.dims()[k];

        std::vector<CompensatedSum> tail_moment(prefix.size()), next_moment(prefix.size());
        for (std::size_t flat = 0; flat < joint.size(); ++flat) {
            const double p = joint.probs()[flat];
            if (p == 0.0) continue;
            joint.unravel(flat, idx);
            double t = 1.0;
            for (std::size_t k = i + 1; k < n; ++k) t *= dev[k][idx[k]];
            tail_moment[flat / tail] += p * t;
            next_moment[flat / tail] += p * dev[i + 1][idx[i + 1]];
        }

        std::vector<double> psi(prefix.size(), 0.0);
        CompensatedSum term, term_printed;
        std::vector<std::size_t> pidx(n);
        for (std::size_t q = 0; q < prefix.size(); ++q) {
            if (prefix[q] == 0.0) continue;
            joint.unravel(q * tail, pidx);
            double head = 1.0;
            for (std::size_t j = 0; j <= i; ++j) head *= dev[j][pidx[j]];
            psi[q] = head * tail_moment[q].value() / prefix[q];
            const double psi_printed = head * next_moment[q].value() / prefix[q];
            const double h = detail::neg_plogratio(prefix[q], parent[q / joint.dims()[i]]);
            term += psi[q] * h;
            term_printed += psi_printed * h;
        }
        rhs += term.value();
        rhs_printed += term_printed.value();
        out.psi.push_back(std::move(psi));
        parent = prefix;
    }
    out.rhs = rhs.value();
    out.rhs_printed = rhs_printed.value();
    return out;
}

/// I^w_phi(f, f_1...f_n) versus sum_{j<n} H^w_{psi'_j}(X_j) - H^w_phi(X_<n | X_n),
/// psi'_j(x_j) = (x_j-a_j)^2 E[prod_{i != j}(X_i-a_i)^2 | X_j = x_j].
inline IdentityCheck mutual_wde_decomposition_check(const DiscreteJoint& joint,
                                                    std::span<const double> centers) {
    detail::check_rank(joint, 2);
    detail::check_centers(joint, centers);
    const std::size_t n = joint.rank();
    std::vector<std::vector<double>> marg(n);
    for (std::size_t k = 0; k < n; ++k) marg[k] = detail::axis_marginal(joint, k);
    std::vector<std::size_t> idx(n);

    auto cell_weight = [&](std::size_t skip) {
        double w = 1.0;
        for (std::size_t k = 0; k < n; ++k)
            if (k != skip) w *= detail::sq(joint.label(k, idx[k]) - centers[k]);
        return w;
    };

    IdentityCheck out;
    CompensatedSum lhs, cond;
    std::vector<std::vector<CompensatedSum>> others(n);
    for (std::size_t k = 0; k < n; ++k) others[k].resize(joint.dims()[k]);
    for (std::size_t flat = 0; flat < joint.size(); ++flat) {
        const double p = joint.probs()[flat];
        if (p == 0.0) continue;
        joint.unravel(flat, idx);
        const double phi = cell_weight(n);
        double lprod = 0.0;
        for (std::size_t k = 0; k < n; ++k) lprod += std::log(marg[k][idx[k]]);
        lhs += phi * p * (std::log(p) - lprod);
        cond += -phi * p * std::log(p / marg[n - 1][idx[n - 1]]);
        for (std::size_t j = 0; j + 1 < n; ++j) others[j][idx[j]] += p * cell_weight(j);
    }
    out.lhs = lhs.value();

    CompensatedSum rhs;
    for (std::size_t j = 0; j + 1 < n; ++j)
        for (std::size_t v = 0; v < joint.dims()[j]; ++v) {
            const double pj = marg[j][v];
            if (pj == 0.0) continue;
            const double psi = detail::sq(joint.label(j, v) - centers[j]) * others[j][v].value() / pj;
            rhs += -psi * pj * std::log(pj);
        }
    rhs += -cond.value();
    out.rhs = rhs.value();
    return out;
}

struct ConditionalRow {
    std::size_t y_index = 0;  // row-major index over the Y axes
    double lhs = 0.0;         // D(f_{X|y} || f_X)
    double rhs = 0.0;         // H^w_{f(x|y)/f1(x)}(X) - H(X|y)
    double weighted_lhs = 0.0;  // D^w_phi(f_{X|y} || f_X)
    double weighted_rhs = 0.0;  // H^w_{phi'}(X) - H^w_phi(X|y)
};

struct RelativeDeIdentityReport {
    std::vector<ConditionalRow> rows;  // one per y with positive probability
    double expected_divergence = 0.0;  // E_Y[D(f_{X|y} || f_X)]
    double mutual_de = 0.0;            // I(f_{X,Y}, f_X f_Y)
    double weighted_expectation = 0.0;  // E_Y[prod (Y_j-b_j)^2 D^w_phi]
    double weighted_mutual = 0.0;       // I^w with weight phi(x) psi(y)

    double max_deviation() const {
        double m = std::max(std::abs(expected_divergence - mutual_de),
                            std::abs(weighted_expectation - weighted_mutual));
        for (const ConditionalRow& r : rows)
            m = std::max({m, std::abs(r.lhs - r.rhs), std::abs(r.weighted_lhs - r.weighted_rhs)});
        return m;
    }
};

/// X = the first `x_axes` variables, Y = the rest. Evaluates the relative-DE
/// identity for every y, its weighted analogue with phi(x) = prod(x_i-a_i)^2,
/// and both expectation forms over Y (Y weighted by prod(y_j-b_j)^2).
inline RelativeDeIdentityReport relative_de_identity_check(const DiscreteJoint& joint,
                                                           std::size_t x_axes,
                                                           std::span<const double> x_centers,
                                                           std::span<const double> y_centers) {
    detail::check_rank(joint, 2);
    if (x_axes == 0 || x_axes >= joint.rank())
        throw Error(ErrorCode::InvalidArgument, "X and Y must both be non-empty");
    if (x_centers.size() != x_axes || y_centers.size() != joint.rank() - x_axes)
        throw Error(ErrorCode::DimensionMismatch, "center vectors do not match the X/Y split");

    const std::size_t n = joint.rank();
    std::size_t nx = 1, ny = 1;
    for (std::size_t k = 0; k < x_axes; ++k) nx *= joint.dims()[k];
    for (std::size_t k = x_axes; k < n; ++k) ny *= joint.dims()[k];

    const std::vector<double> fx = detail::range_marginal(joint, 0, x_axes);
    const std::vector<double> fy = detail::range_marginal(joint, x_axes, n);

    std::vector<std::size_t> idx(n);
    std::vector<double> phi_x(nx), psi_y(ny);
    for (std::size_t xi = 0; xi < nx; ++xi) {
        joint.unravel(xi * ny, idx);
        double w = 1.0;
        for (std::size_t k = 0; k < x_axes; ++k) w *= detail::sq(joint.label(k, idx[k]) - x_centers[k]);
        phi_x[xi] = w;
    }
    for (std::size_t yi = 0; yi < ny; ++yi) {
        joint.unravel(yi, idx);
        double w = 1.0;
        for (std::size_t k = x_axes; k < n; ++k)
            w *= detail::sq(joint.label(k, idx[k]) - y_centers[k - x_axes]);
        psi_y[yi] = w;
    }

    RelativeDeIdentityReport out;
    CompensatedSum expect, wexpect;
    for (std::size_t yi = 0; yi < ny; ++yi) {
        if (fy[yi] == 0.0) continue;
        CompensatedSum d, hw_lr, h_cond, dw, hw_prime, hw_cond;
        for (std::size_t xi = 0; xi < nx; ++xi) {
            const double c = joint.probs()[xi * ny + yi] / fy[yi];
            if (c == 0.0) continue;
            const double lc = std::log(c), lf = std::log(fx[xi]);
            const double ratio = c / fx[xi];
            d += c * (lc - lf);
            hw_lr += -ratio * fx[xi] * lf;
            h_cond += -c * lc;
            dw += phi_x[xi] * c * (lc - lf);
            hw_prime += -phi_x[xi] * ratio * fx[xi] * lf;
            hw_cond += -phi_x[xi] * c * lc;
        }
        ConditionalRow row{yi, d.value(), hw_lr.value() - h_cond.value(), dw.value(),
                           hw_prime.value() - hw_cond.value()};
        expect += fy[yi] * row.lhs;
        wexpect += psi_y[yi] * fy[yi] * row.weighted_lhs;
        out.rows.push_back(row);
    }
    out.expected_divergence = expect.value();
    out.weighted_expectation = wexpect.value();

    CompensatedSum mi, wmi;
    for (std::size_t xi = 0; xi < nx; ++xi)
        for (std::size_t yi = 0; yi < ny; ++yi) {
            const double p = joint.probs()[xi * ny + yi];
            if (p == 0.0) continue;
            const double l = std::log(p / (fx[xi] * fy[yi]));
            mi += p * l;
            wmi += phi_x[xi] * psi_y[yi] * p * l;
        }
    out.mutual_de = mi.value();
    out.weighted_mutual = wmi.value();
    return out;
}

struct MutualDeCheck {
    double lhs = 0.0;     // I(f, f_1 ... f_n) from the definition
    double rhs = 0.0;     // sum_{i<n} [H(X_i) - H(X_i | X_{i+1}..X_n)]
    double remark = 0.0;  // sum_{i<n} E_{X_{>i}}[H(X_i) - H(X_i | x_{>i})]

    double deviation() const { return std::max(std::abs(lhs - rhs), std::abs(lhs - remark)); }
};

inline MutualDeCheck mutual_de_decomposition_check(const DiscreteJoint& joint) {
    detail::check_rank(joint, 2);
    const std::size_t n = joint.rank();
    std::vector<std::vector<double>> marg(n);
    for (std::size_t k = 0; k < n; ++k) marg[k] = detail::axis_marginal(joint, k);

    MutualDeCheck out;
    std::vector<std::size_t> idx(n);
    CompensatedSum lhs;
    for (std::size_t flat = 0; flat < joint.size(); ++flat) {
        const double p = joint.probs()[flat];
        if (p == 0.0) continue;
        joint.unravel(flat, idx);
        double lprod = 0.0;
        for (std::size_t k = 0; k < n; ++k) lprod += std::log(marg[k][idx[k]]);
        lhs += p * (std::log(p) - lprod);
    }
    out.lhs = lhs.value();

    CompensatedSum rhs, remark;
    for (std::size_t i = 0; i + 1 < n; ++i) {
        CompensatedSum hi;
        for (double p : marg[i]) hi += detail::neg_plogratio(p, 1.0);
        const std::vector<double> suffix = detail::range_marginal(joint, i, n);
        const std::vector<double> rest = detail::range_marginal(joint, i + 1, n);
        CompensatedSum hcond;
        for (std::size_t s = 0; s < suffix.size(); ++s)
            hcond += detail::neg_plogratio(suffix[s], rest[s % rest.size()]);
        rhs += hi.value() - hcond.value();

        // Expectation over the conditioning values.
        for (std::size_t q = 0; q < rest.size(); ++q) {
            if (rest[q] == 0.0) continue;
            CompensatedSum hgiven;
            for (std::size_t v = 0; v < joint.dims()[i]; ++v) {
                const double c = suffix[v * rest.size() + q] / rest[q];
                hgiven += detail::neg_plogratio(c, 1.0);
            }
            remark += rest[q] * (hi.value() - hgiven.value());
        }
    }
    out.rhs = rhs.value();
    out.remark = remark.value();
    return out;
}

}  // namespace wentropy::discrete
