#pragma once

// Closed-form Gaussian weighted entropies for the pair (X1, X2) given X3,
// with weight centers at the marginal means. Each expression is available
// as printed ("paper") and with moments from the pair-partition oracle
// ("wick").

#include <array>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "error.hpp"
#include "gaussian.hpp"
#include "numeric_utils.hpp"
#include "wick.hpp"

namespace wentropy::closed_form {

enum class FormulaMode { paper, wick };

inline const char* to_string(FormulaMode m) { return m == FormulaMode::paper ? "paper" : "wick"; }

/// Trivariate base, observed x3 (0-based coordinate 2), marginal pair and
/// conditional pair.
class PairConditional {
public:
    PairConditional(GaussianDist base, double x3)
        : base_(check_dim(std::move(base))), x3_(x3),
          pair_(marginal(base_, {0, 1})),
          cond_(condition(base_, ConditionSpec{{0, 1}, {2}, {x3}})),
          delta_(cond_.mean() - pair_.mean()) {}

    const GaussianDist& base() const { return base_; }
    double x3() const { return x3_; }
    /// (mu, Sigma1): marginal law of (X1, X2).
    const GaussianDist& pair() const { return pair_; }
    /// (mubar, Sigmabar): law of (X1, X2) given X3 = x3.
    const GaussianDist& conditional() const { return cond_; }
    /// mubar - mu.
    const Vector& delta() const { return delta_; }

private:
    static GaussianDist check_dim(GaussianDist d) {
        if (d.dim() != 3)
            throw Error(ErrorCode::DimensionMismatch,
                        "pair conditional needs a trivariate base, got dimension " +
                            std::to_string(d.dim()));
        return d;
    }

    GaussianDist base_;
    double x3_;
    GaussianDist pair_;
    GaussianDist cond_;
    Vector delta_;
};

namespace detail {

inline void check_pair_index(std::size_t i, std::size_t j, std::size_t n) {
    if (i >= n || j >= n)
        throw Error(ErrorCode::InvalidArgument,
                    "index (" + std::to_string(i) + "," + std::to_string(j) + ") out of range");
}

inline void check_trivariate(const Matrix& cov) {
    if (cov.rows() != 3 || cov.cols() != 3)
        throw Error(ErrorCode::DimensionMismatch, "trivariate covariance required");
}

// Fourth- and second-order conditional moments in the factored style used
// by the printed expansions (indices 0-based).
struct PairMoments {
    const Matrix& s;
    double e2(std::size_t a, std::size_t b) const { return s(a, b); }
    // E[Y_a Y_b Y_c Y_d]
    double e4(std::size_t a, std::size_t b, std::size_t c, std::size_t d) const {
        return s(a, b) * s(c, d) + s(a, c) * s(b, d) + s(a, d) * s(b, c);
    }
    // E[Y1^2 Y2^2 Y_i Y_j], printed form.
    double e6(std::size_t i, std::size_t j) const {
        return s(0, 0) * (s(1, 1) * s(i, j) + 2.0 * s(1, i) * s(1, j)) +
               2.0 * s(0, 1) * (s(0, 1) * s(i, j) + s(0, i) * s(1, j) + s(0, j) * s(1, i)) +
               s(0, i) * (2.0 * s(0, 1) * s(1, j) + s(1, 1) * s(0, j)) +
               s(0, j) * (2.0 * s(0, 1) * s(1, i) + s(1, 1) * s(0, i));
    }
};

inline double weighted_trace(const Matrix& precision, const Matrix& m) {
    double t = 0.0;
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j) t += precision(i, j) * m(i, j);
    return t;
}

}  // namespace detail

/// E[prod_k (X_k - mu_k)^2] for a trivariate covariance, printed expansion.
inline double xi(const Matrix& s) {
    detail::check_trivariate(s);
    return s(0, 0) * (s(1, 1) * s(2, 2) + 2.0 * s(1, 2) * s(1, 2)) +
           2.0 * s(0, 1) * (s(0, 1) * s(2, 2) + 2.0 * s(0, 2) * s(1, 2)) +
           2.0 * s(0, 2) * (2.0 * s(0, 1) * s(1, 2) + s(0, 2) * s(1, 1));
}

inline double xi_wick(const Matrix& s) {
    detail::check_trivariate(s);
    return wick::central_moment(s, wick::MomentSpec{{2, 2, 2}});
}

/// Printed factorization (S11 S22 + 2 S12^2)(S33 S_ij + 2 S3i S3j).
inline double lambda_paper(const Matrix& s, std::size_t i, std::size_t j) {
    detail::check_trivariate(s);
    detail::check_pair_index(i, j, 3);
    return (s(0, 0) * s(1, 1) + 2.0 * s(0, 1) * s(0, 1)) *
           (s(2, 2) * s(i, j) + 2.0 * s(2, i) * s(2, j));
}

/// E[Y1^2 Y2^2 Y3^2 Y_i Y_j], order-8 pair-partition sum.
inline double lambda_wick(const Matrix& s, std::size_t i, std::size_t j) {
    detail::check_trivariate(s);
    detail::check_pair_index(i, j, 3);
    wick::MomentSpec spec{{2, 2, 2}};
    ++spec.exponents[i];
    ++spec.exponents[j];
    return wick::central_moment(s, spec);
}

/// Weighted entropy of a trivariate Gaussian with phi centered at its mean.
inline double wde_trivariate(const GaussianDist& dist, FormulaMode mode) {
    detail::check_trivariate(dist.cov());
    const Matrix& s = dist.cov();
    const Matrix p = dist.precision();
    Matrix lam(3, 3);
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 3; ++j)
            lam(i, j) = mode == FormulaMode::paper ? lambda_paper(s, i, j) : lambda_wick(s, i, j);
    const double x = mode == FormulaMode::paper ? xi(s) : xi_wick(s);
    return 0.5 * (3.0 * std::log(kTwoPi) + dist.log_det()) * x +
           0.5 * detail::weighted_trace(p, lam);
}

/// Relative DE D(f_{pair|x3} || f_pair). Paper mode omits the -n/2 term.
inline double relative_de_pair(const PairConditional& pc, EntropyMode mode) {
    const Matrix& sbar = pc.conditional().cov();
    const Vector& d = pc.delta();
    const Matrix braces = sbar + d * d.transpose();
    const double printed = 0.5 * (std::log(kTwoPi * kTwoPi) + pc.pair().log_det()) -
                           0.5 * (std::log(kTwoPi * kTwoPi) + pc.conditional().log_det()) +
                           0.5 * detail::weighted_trace(pc.pair().precision(), braces);
    return mode == EntropyMode::paper ? printed : printed - 1.0;
}

/// Theta(x3) = E[prod_{i<2} (X_i - a_i)^2 | X3 = x3].
inline double theta(const PairConditional& pc, std::span<const double> centers) {
    if (centers.size() != 2) throw Error(ErrorCode::DimensionMismatch, "two centers required");
    const Vector& mbar = pc.conditional().mean();
    const std::array<double, 2> shift{mbar(0) - centers[0], mbar(1) - centers[1]};
    return wick::shifted_moment(pc.conditional().cov(), shift, wick::MomentSpec{{2, 2}});
}

inline double theta(const PairConditional& pc) {
    const Vector& mu = pc.pair().mean();
    const std::array<double, 2> centers{mu(0), mu(1)};
    return theta(pc, centers);
}

/// Theta with centers mu via the printed expansion in Sigmabar and mubar - mu.
inline double theta_paper(const PairConditional& pc) {
    const Matrix& s = pc.conditional().cov();
    const double d1 = pc.delta()(0), d2 = pc.delta()(1);
    return (s(0, 0) * s(1, 1) + 2.0 * s(0, 1) * s(0, 1)) + s(0, 0) * d2 * d2 + s(1, 1) * d1 * d1 +
           4.0 * s(0, 1) * d1 * d2 + d1 * d1 * d2 * d2;
}

/// E[prod_k (X_k - mu_k)^2 (X_i - mubar_i)(X_j - mubar_j) | X3].
inline double lambda_bar(const PairConditional& pc, std::size_t i, std::size_t j,
                         FormulaMode mode) {
    detail::check_pair_index(i, j, 2);
    const Matrix& s = pc.conditional().cov();
    const double d1 = pc.delta()(0), d2 = pc.delta()(1);
    if (mode == FormulaMode::wick) {
        const std::array<wick::Factor, 6> f{wick::Factor{0, d1}, wick::Factor{0, d1},
                                            wick::Factor{1, d2}, wick::Factor{1, d2},
                                            wick::Factor{i, 0.0}, wick::Factor{j, 0.0}};
        return wick::mixed_moment(s, f);
    }
    const detail::PairMoments m{s};
    // delta_k^2 is paired with E[Y_k^2 Y_i Y_j] exactly as printed.
    return m.e6(i, j) + d1 * d1 * m.e4(0, 0, i, j) + d2 * d2 * m.e4(1, 1, i, j) +
           d1 * d1 * d2 * d2 * m.e2(i, j) + 4.0 * d1 * d2 * m.e4(0, 1, i, j);
}

/// E[prod_k (X_k - mu_k)^2 (X_i - mu_i)(X_j - mu_j) | X3].
inline double upsilon(const PairConditional& pc, std::size_t i, std::size_t j, FormulaMode mode) {
    detail::check_pair_index(i, j, 2);
    const Matrix& s = pc.conditional().cov();
    const double d1 = pc.delta()(0), d2 = pc.delta()(1);
    if (mode == FormulaMode::wick) {
        std::array<double, 2> shift{d1, d2};
        wick::MomentSpec spec{{2, 2}};
        ++spec.exponents[i];
        ++spec.exponents[j];
        return wick::shifted_moment(s, shift, spec);
    }
    const detail::PairMoments m{s};
    const double di = pc.delta()(static_cast<Eigen::Index>(i));
    const double dj = pc.delta()(static_cast<Eigen::Index>(j));
    return m.e6(i, j) + m.e4(0, 0, 1, 1) * di * dj +
           2.0 * m.e4(0, 0, 1, i) * d2 * dj + 2.0 * m.e4(0, 0, 1, j) * d2 * di +
           m.e4(0, 0, i, j) * d2 * d2 + m.e2(0, 0) * d2 * d2 * di * dj +
           2.0 * m.e4(0, 1, 1, i) * d1 * dj + 2.0 * m.e4(0, 1, 1, j) * d1 * di +
           4.0 * m.e4(0, 1, i, j) * d1 * d2 + 4.0 * m.e2(0, 1) * d1 * d2 * di * dj +
           2.0 * m.e2(0, i) * dj * d1 * d2 * d2 + 2.0 * m.e2(0, j) * di * d1 * d2 * d2 +
           m.e4(1, 1, i, j) * d1 * d1 + m.e2(1, 1) * d1 * d1 * di * dj +
           2.0 * m.e2(1, i) * d2 * d1 * d1 * dj + 2.0 * m.e2(1, j) * d2 * d1 * d1 * di +
           m.e2(i, j) * d1 * d1 * d2 * d2 + d1 * d1 * d2 * d2 * di * dj;
}

namespace detail {

inline Matrix lambda_bar_table(const PairConditional& pc, FormulaMode mode) {
    Matrix m(2, 2);
    for (std::size_t i = 0; i < 2; ++i)
        for (std::size_t j = 0; j < 2; ++j) m(i, j) = lambda_bar(pc, i, j, mode);
    return m;
}

inline Matrix upsilon_table(const PairConditional& pc, FormulaMode mode) {
    Matrix m(2, 2);
    for (std::size_t i = 0; i < 2; ++i)
        for (std::size_t j = 0; j < 2; ++j) m(i, j) = upsilon(pc, i, j, mode);
    return m;
}

inline double theta_for(const PairConditional& pc, FormulaMode mode) {
    return mode == FormulaMode::paper ? theta_paper(pc) : theta(pc);
}

}  // namespace detail

/// H^w_phi(X1, X2 | X3 = x3).
inline double cond_wde_pair(const PairConditional& pc, FormulaMode mode) {
    return 0.5 * (std::log(kTwoPi * kTwoPi) + pc.conditional().log_det()) *
               detail::theta_for(pc, mode) +
           0.5 * detail::weighted_trace(pc.conditional().precision(),
                                        detail::lambda_bar_table(pc, mode));
}

/// -int prod (x_i - mu_i)^2 f(x|x3) log f_pair(x) dx.
inline double cross_wde_pair(const PairConditional& pc, FormulaMode mode) {
    return 0.5 * (std::log(kTwoPi * kTwoPi) + pc.pair().log_det()) * detail::theta_for(pc, mode) +
           0.5 * detail::weighted_trace(pc.pair().precision(), detail::upsilon_table(pc, mode));
}

/// D^w_phi(f_{pair|x3} || f_pair), assembled directly.
inline double relative_we_pair(const PairConditional& pc, FormulaMode mode) {
    return 0.5 * (pc.pair().log_det() - pc.conditional().log_det()) * detail::theta_for(pc, mode) +
           0.5 * detail::weighted_trace(pc.pair().precision(), detail::upsilon_table(pc, mode)) -
           0.5 * detail::weighted_trace(pc.conditional().precision(),
                                        detail::lambda_bar_table(pc, mode));
}

/// int phi (f_{pair|x3} - f_pair) = Theta(x3) - E[prod (X_i - a_i)^2].
inline double gibbs_gap(const PairConditional& pc, std::span<const double> centers) {
    if (centers.size() != 2) throw Error(ErrorCode::DimensionMismatch, "two centers required");
    const Vector& mu = pc.pair().mean();
    const std::array<double, 2> shift{mu(0) - centers[0], mu(1) - centers[1]};
    return theta(pc, centers) -
           wick::shifted_moment(pc.pair().cov(), shift, wick::MomentSpec{{2, 2}});
}

inline double gibbs_gap(const PairConditional& pc) {
    const Vector& mu = pc.pair().mean();
    const std::array<double, 2> centers{mu(0), mu(1)};
    return gibbs_gap(pc, centers);
}

// Printed special cases, evaluated verbatim.

namespace example1 {

inline void check_rho(double rho) {
    if (!(1.0 - rho * rho - rho * rho * rho * rho > 0.0))
        throw Error(ErrorCode::DomainError, "rho outside 1 - rho^2 - rho^4 > 0");
}

inline double relative_de(double rho, double x3) {
    check_rho(rho);
    const double r2 = rho * rho, r4 = r2 * r2;
    return 0.5 * std::log((1.0 - r2) / (1.0 - r2 - r4)) + r4 / (2.0 * (1.0 - r2)) * (x3 * x3 - 1.0) +
           1.0;
}

inline double theta(double rho, double x3) {
    const double r2 = rho * rho;
    return 1.0 + 2.0 * r2 + r2 * r2 * (x3 * x3 - 1.0);
}

inline double gibbs_gap(double rho, double x3) {
    const double r2 = rho * rho;
    return r2 * r2 * (x3 * x3 - 1.0);
}

namespace detail {

inline Matrix sbar(double rho) {
    Matrix s(2, 2);
    s << 1.0 - rho * rho * rho * rho, rho, rho, 1.0;
    return s;
}

}  // namespace detail

inline double alpha(double rho, std::size_t i, std::size_t j) {
    closed_form::detail::check_pair_index(i, j, 2);
    const Matrix s = detail::sbar(rho);
    const double r4 = rho * rho * rho * rho;
    return (1.0 - r4) * (s(i, j) + 2.0 * s(1, i) * s(1, j)) +
           2.0 * rho * (rho * s(i, j) + s(0, i) * s(1, j) + s(0, j) * s(1, i)) +
           s(0, i) * (2.0 * rho * s(1, j) + s(0, j)) + s(0, j) * (2.0 * rho * s(1, i) + s(0, i));
}

inline double lambda_bar(double rho, double x3, std::size_t i, std::size_t j) {
    const Matrix s = detail::sbar(rho);
    const double r4 = rho * rho * rho * rho;
    return alpha(rho, i, j) + r4 * x3 * x3 * ((1.0 - r4) * s(i, j) + 2.0 * s(0, i) * s(0, j));
}

inline double upsilon(double rho, double x3, std::size_t i, std::size_t j) {
    const Matrix s = detail::sbar(rho);
    const double r2 = rho * rho, r4 = r2 * r2;
    const std::array<double, 2> d{r2 * x3, 0.0};
    const double beta = d[i] * d[j];
    return alpha(rho, i, j) + beta * (1.0 + 2.0 * r2 + r4 * (x3 * x3 - 1.0)) +
           2.0 * r2 * x3 * d[j] * (s(0, i) + 2.0 * rho * s(1, i)) +
           2.0 * r2 * x3 * d[i] * (s(i, j) + 2.0 * rho * s(1, j)) +
           r4 * x3 * x3 * (s(i, j) + 2.0 * s(1, i) * s(1, j));
}

inline double relative_we(double rho, double x3) {
    check_rho(rho);
    const double r2 = rho * rho, r4 = r2 * r2, r6 = r4 * r2, r8 = r4 * r4;
    const double x2 = x3 * x3;
    const double a = 1.0 - r4;
    return 0.5 * std::log((1.0 - r2) / (1.0 - r2 - r4)) * (1.0 + 2.0 * r2 + r4 * (x2 - 1.0)) +
           (3.0 * a * a + 3.0 * a + 6.0 * r2 - 6.0 * r4 - 6.0 * r6 * x2 + 9.0 * r4 * x2 -
            6.0 * r8 * x2 + r8 * x2) /
               (2.0 * (1.0 - r2)) -
           (6.0 * r2 * a + 6.0 * a * a + 4.0 * r4 * a * x2 - 12.0 * r4 - 4.0 * r6 * a * x2) /
               (2.0 * (1.0 - r2 - r4));
}

}  // namespace example1

namespace example2 {

inline void check_rho(double rho) {
    if (!(rho > 0.0 && rho < 0.5)) throw Error(ErrorCode::DomainError, "rho outside (0, 0.5)");
}

/// Final printed line.
inline double relative_de(double rho, double x3) {
    check_rho(rho);
    return 0.5 * (1.0 + rho + (1.0 - rho) * x3 * x3 - std::log(rho)) - 1.0;
}

/// First printed line (log-determinant form).
inline double relative_de_intermediate(double rho, double x3) {
    check_rho(rho);
    const double c = kTwoPi * kTwoPi;
    return 0.5 * std::log(c * 4.0 * rho * (1.0 - rho)) -
           0.5 * std::log(c * 4.0 * rho * rho * (1.0 - rho)) +
           0.5 * (1.0 + rho + (1.0 - rho) * x3 * x3);
}

inline double theta(double rho, double x3) {
    const double q = 2.0 - rho, p = 1.0 - rho, x2 = x3 * x3;
    const double r2 = rho * rho;
    return r2 * q * q + 4.0 * r2 * r2 + 2.0 * rho * q * p * p * x2 - 4.0 * r2 * p * p * x2 +
           p * p * p * p * x2 * x2;
}

inline double gibbs_condition(double rho, double x3) {
    const double t = 1.0 - 2.0 * rho;
    return theta(rho, x3) - 1.0 - t * t;
}

inline double lambda_bar(double rho, double x3, std::size_t i, std::size_t j) {
    closed_form::detail::check_pair_index(i, j, 2);
    const double q = 2.0 - rho, p = 1.0 - rho, x2 = x3 * x3, x4 = x2 * x2;
    const double r2 = rho * rho, r3 = r2 * rho, r4 = r2 * r2, r5 = r4 * rho, r6 = r4 * r2;
    const double p2 = p * p, p4 = p2 * p2;
    if (i != j)
        return -9.0 * r4 * q * q - 6.0 * r6 - 6.0 * x2 * p2 * r3 * q - r2 * x4 * p4 +
               8.0 * r4 * x2 * p2 + 4.0 * r2 * x2 * p2 * q * q;
    if (i == 0)
        return 12.0 * r5 * q + 3.0 * r3 * q * q * q + 4.0 * x2 * r2 * q * q * p2 +
               2.0 * r4 * x2 * p2 + x4 * rho * q * p4 - 12.0 * r3 * x2 * q * p2;
    return 3.0 * r4 * q * q * q + 12.0 * r5 * q + 4.0 * r2 * x2 * q * q * p2 + 2.0 * r4 * x2 * p2 +
           x4 * rho * q * p4 - 12.0 * x2 * r3 * q * p2;
}

inline double upsilon(double rho, double x3, std::size_t i, std::size_t j) {
    closed_form::detail::check_pair_index(i, j, 2);
    const double q = 2.0 - rho, p = 1.0 - rho, x2 = x3 * x3, x4 = x2 * x2, x6 = x4 * x2;
    const double r2 = rho * rho, r3 = r2 * rho, r4 = r2 * r2, r5 = r4 * rho, r6 = r4 * r2;
    const double p2 = p * p, p4 = p2 * p2, p6 = p4 * p2;
    const double inner = r2 * q * q + 2.0 * r4;
    if (i != j)
        return -9.0 * r4 * q * q - 6.0 * r6 + 9.0 * p2 * x2 * inner + p6 * x6 -
               18.0 * p2 * x2 * r3 * q + 6.0 * rho * q * p4 * x4 - 6.0 * r2 * p4 * x4;
    if (i == 0)
        return 12.0 * r5 * q + 3.0 * r3 * q * q * q + 2.0 * p2 * x2 * inner -
               24.0 * p2 * x2 * r3 * q + 3.0 * p2 * x2 * r2 * q * q + p6 * x6 +
               4.0 * p2 * x2 * (r2 * q * q - 2.0 * r3 * q) - 8.0 * r2 * p4 * x4 +
               7.0 * rho * q * p4 * x4;
    return 3.0 * r4 * q * q * q + 12.0 * r5 * q + 6.0 * p2 * x2 * inner -
           24.0 * p2 * x2 * r3 * q + p6 * x6 + 7.0 * rho * q * p4 * x4 - 8.0 * r2 * p4 * x4 +
           3.0 * r2 * q * q * p2 * x2;
}

inline double relative_we(double rho, double x3) {
    check_rho(rho);
    const double q = 2.0 - rho;
    const double det_bar = rho * rho * q * q - rho * rho * rho * rho;
    const double u11 = upsilon(rho, x3, 0, 0), u12 = upsilon(rho, x3, 0, 1),
                 u22 = upsilon(rho, x3, 1, 1);
    const double l11 = lambda_bar(rho, x3, 0, 0), l12 = lambda_bar(rho, x3, 0, 1),
                 l22 = lambda_bar(rho, x3, 1, 1);
    return 0.5 * std::log(kTwoPi * kTwoPi * (4.0 * rho * (1.0 - rho) / det_bar)) * theta(rho, x3) +
           ((u11 + u22) + (2.0 * rho - 1.0) * u12) / (8.0 * rho * (1.0 - rho)) -
           (rho * q * (l11 + l22) + 2.0 * rho * rho * l12) / (2.0 * det_bar);
}

}  // namespace example2

}  // namespace wentropy::closed_form
