#pragma once

// Exact moments of jointly Gaussian vectors by Isserlis (Wick) pairing.

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "error.hpp"
#include "gaussian.hpp"

namespace wentropy::wick {

inline constexpr int kMaxOrder = 12;

/// Exponents r_i of E[prod Y_i^{r_i}].
struct MomentSpec {
    std::vector<int> exponents;

    int order() const {
        int m = 0;
        for (int r : exponents) m += r;
        return m;
    }
};

struct MomentResult {
    double value = 0.0;
    std::uint64_t matchings = 0;  // perfect matchings enumerated
};

/// One factor (Y_coord + shift) of a product moment.
struct Factor {
    std::size_t coord;
    double shift = 0.0;
};

namespace detail {

using SymbolList = std::array<std::size_t, kMaxOrder>;

// Pairs the first unpaired symbol with every later one and recurses.
template <class PairValue>
void enumerate(const SymbolList& symbols, int len, double acc, const PairValue& pair,
               double& total, std::uint64_t& count) {
    if (len == 0) {
        total += acc;
        ++count;
        return;
    }
    const std::size_t head = symbols[0];
    SymbolList rest{};
    for (int k = 1; k < len; ++k) {
        int w = 0;
        for (int m = 1; m < len; ++m)
            if (m != k) rest[w++] = symbols[m];
        enumerate(rest, len - 2, acc * pair(head, symbols[k]), pair, total, count);
    }
}

inline void check_order(int order) {
    if (order > kMaxOrder)
        throw Error(ErrorCode::OrderCapExceeded,
                    "moment order " + std::to_string(order) + " exceeds cap " +
                        std::to_string(kMaxOrder));
}

inline void check_spec(const Matrix& cov, const MomentSpec& spec) {
    if (cov.rows() != cov.cols())
        throw Error(ErrorCode::DimensionMismatch, "covariance is not square");
    if (static_cast<Eigen::Index>(spec.exponents.size()) != cov.rows())
        throw Error(ErrorCode::DimensionMismatch,
                    "exponent vector has length " + std::to_string(spec.exponents.size()) +
                        ", covariance dimension is " + std::to_string(cov.rows()));
    for (int r : spec.exponents)
        if (r < 0) throw Error(ErrorCode::InvalidArgument, "negative exponent");
    check_order(spec.order());
}

// Flat symbol list, e.g. r=(2,2,1,1) -> [0,0,1,1,2,3].
inline int expand(const MomentSpec& spec, SymbolList& symbols) {
    int len = 0;
    for (std::size_t i = 0; i < spec.exponents.size(); ++i)
        for (int k = 0; k < spec.exponents[i]; ++k) symbols[len++] = i;
    return len;
}

inline MomentResult matching_sum(const Matrix& cov, const SymbolList& symbols, int len) {
    MomentResult out;
    if (len % 2 != 0) return out;
    const auto pair = [&cov](std::size_t a, std::size_t b) {
        return cov(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b));
    };
    enumerate(symbols, len, 1.0, pair, out.value, out.matchings);
    return out;
}

inline double binomial(int n, int k) {
    double c = 1.0;
    for (int i = 1; i <= k; ++i) c = c * (n - k + i) / i;
    return c;
}

}  // namespace detail

/// E[prod Y_i^{r_i}] for Y ~ N(0, cov), with the number of matchings summed.
/// Odd total order returns exactly 0 without enumeration.
inline MomentResult central_moment_counted(const Matrix& cov, const MomentSpec& spec) {
    detail::check_spec(cov, spec);
    detail::SymbolList symbols{};
    const int len = detail::expand(spec, symbols);
    return detail::matching_sum(cov, symbols, len);
}

inline double central_moment(const Matrix& cov, const MomentSpec& spec) {
    return central_moment_counted(cov, spec).value;
}

/// E[prod (Y_i + delta_i)^{r_i}] by multi-binomial expansion into central
/// moments.
inline MomentResult shifted_moment_counted(const Matrix& cov, std::span<const double> shift,
                                           const MomentSpec& spec) {
    detail::check_spec(cov, spec);
    const std::size_t n = spec.exponents.size();
    if (shift.size() != n)
        throw Error(ErrorCode::DimensionMismatch,
                    "shift has length " + std::to_string(shift.size()) + ", expected " +
                        std::to_string(n));
    for (double d : shift)
        if (!std::isfinite(d)) throw Error(ErrorCode::InvalidArgument, "non-finite shift");

    MomentResult out;
    MomentSpec k{std::vector<int>(n, 0)};
    // Odometer over 0 <= k_i <= r_i.
    while (true) {
        if (k.order() % 2 == 0) {
            double coeff = 1.0;
            for (std::size_t i = 0; i < n; ++i)
                coeff *= detail::binomial(spec.exponents[i], k.exponents[i]) *
                         std::pow(shift[i], spec.exponents[i] - k.exponents[i]);
            const MomentResult c = central_moment_counted(cov, k);
            out.value += coeff * c.value;
            out.matchings += c.matchings;
        }
        std::size_t pos = 0;
        while (pos < n && k.exponents[pos] == spec.exponents[pos]) k.exponents[pos++] = 0;
        if (pos == n) break;
        ++k.exponents[pos];
    }
    return out;
}

inline double shifted_moment(const Matrix& cov, std::span<const double> shift,
                             const MomentSpec& spec) {
    return shifted_moment_counted(cov, shift, spec).value;
}

/// E[prod_s (Y_{c_s} + shift_s)] where each factor carries its own shift.
/// Expands over the subsets of factors that keep their Gaussian part.
inline double mixed_moment(const Matrix& cov, std::span<const Factor> factors) {
    const int len = static_cast<int>(factors.size());
    detail::check_order(len);
    for (const Factor& f : factors)
        if (static_cast<Eigen::Index>(f.coord) >= cov.rows())
            throw Error(ErrorCode::DimensionMismatch,
                        "factor coordinate " + std::to_string(f.coord) + " out of range");
    double total = 0.0;
    for (std::uint32_t mask = 0; mask < (1u << len); ++mask) {
        detail::SymbolList symbols{};
        int kept = 0;
        double coeff = 1.0;
        for (int s = 0; s < len; ++s) {
            if (mask & (1u << s))
                symbols[kept++] = factors[s].coord;
            else
                coeff *= factors[s].shift;
        }
        if (kept % 2 != 0 || coeff == 0.0) continue;
        total += coeff * detail::matching_sum(cov, symbols, kept).value;
    }
    return total;
}

/// Number of perfect matchings of `order` symbols, by enumeration.
inline std::uint64_t count_matchings(int order) {
    if (order < 0) throw Error(ErrorCode::InvalidArgument, "negative order");
    if (order % 2 != 0)
        throw Error(ErrorCode::OddOrder, "order " + std::to_string(order) + " is odd");
    detail::check_order(order);
    detail::SymbolList symbols{};
    std::iota(symbols.begin(), symbols.end(), std::size_t{0});
    double total = 0.0;
    std::uint64_t count = 0;
    detail::enumerate(symbols, order, 1.0, [](std::size_t, std::size_t) { return 1.0; }, total,
                      count);
    return count;
}

}  // namespace wentropy::wick
