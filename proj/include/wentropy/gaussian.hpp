#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "error.hpp"
#include "numeric_utils.hpp"

namespace wentropy {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

inline constexpr double kSymmetryTol = 1e-12;
inline constexpr double kEigenRatioTol = 1e-10;
inline constexpr std::size_t kMaxGenericDim = 6;

/// Which constant the standard Gaussian entropy/KL formulas carry.
/// `paper` reproduces the printed formulas (no n/2 term); `corrected`
/// is the analytically exact value.
enum class EntropyMode { paper, corrected };

namespace detail {

inline std::string entry_name(Eigen::Index i, Eigen::Index j) {
    return "(" + std::to_string(i) + "," + std::to_string(j) + ")";
}

}  // namespace detail

/// Throws unless `cov` is a symmetric positive-definite n x n matrix
/// matching `mean`, with 1 <= n <= 6.
inline void validate(const Vector& mean, const Matrix& cov) {
    const Eigen::Index n = cov.rows();
    if (cov.cols() != n || mean.size() != n)
        throw Error(ErrorCode::DimensionMismatch,
                    "mean has length " + std::to_string(mean.size()) + ", cov is " +
                        std::to_string(cov.rows()) + "x" + std::to_string(cov.cols()));
    if (n < 1 || static_cast<std::size_t>(n) > kMaxGenericDim)
        throw Error(ErrorCode::DimensionMismatch,
                    "dimension " + std::to_string(n) + " outside supported range 1..6");
    if (!mean.allFinite() || !cov.allFinite())
        throw Error(ErrorCode::InvalidArgument, "non-finite entry in mean or covariance");

    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = i + 1; j < n; ++j)
            if (std::abs(cov(i, j) - cov(j, i)) > kSymmetryTol)
                throw Error(ErrorCode::NotSymmetric,
                            "entry " + detail::entry_name(i, j) + " differs from " +
                                detail::entry_name(j, i));

    // Unpivoted Cholesky: the k-th pivot is minor_k / minor_{k-1}, so the
    // first non-positive pivot names the first non-positive leading minor.
    Matrix l = Matrix::Zero(n, n);
    for (Eigen::Index k = 0; k < n; ++k) {
        double pivot = cov(k, k);
        for (Eigen::Index m = 0; m < k; ++m) pivot -= l(k, m) * l(k, m);
        if (!(pivot > 0.0))
            throw Error(ErrorCode::NotPositiveDefinite,
                        "leading principal minor " + std::to_string(k + 1) + " is not positive");
        l(k, k) = std::sqrt(pivot);
        for (Eigen::Index r = k + 1; r < n; ++r) {
            double s = cov(r, k);
            for (Eigen::Index m = 0; m < k; ++m) s -= l(r, m) * l(k, m);
            l(r, k) = s / l(k, k);
        }
    }

    const Eigen::SelfAdjointEigenSolver<Matrix> eig(cov, Eigen::EigenvaluesOnly);
    const double lo = eig.eigenvalues().minCoeff();
    const double hi = eig.eigenvalues().maxCoeff();
    if (lo < kEigenRatioTol * hi)
        throw Error(ErrorCode::NotPositiveDefinite,
                    "smallest eigenvalue " + format_real(lo) + " is below 1e-10 x largest " +
                        format_real(hi));
}

/// Multivariate normal N(mean, cov). Always valid once constructed.
class GaussianDist {
public:
    GaussianDist(Vector mean, Matrix cov) : mean_(std::move(mean)), cov_(std::move(cov)) {
        validate(mean_, cov_);
        llt_.compute(cov_);
        log_det_ = 2.0 * llt_.matrixLLT().diagonal().array().log().sum();
    }

    const Vector& mean() const { return mean_; }
    const Matrix& cov() const { return cov_; }
    std::size_t dim() const { return static_cast<std::size_t>(mean_.size()); }

    /// Cholesky factor L with cov = L L^T.
    Matrix chol() const { return llt_.matrixL(); }
    double log_det() const { return log_det_; }
    double det() const { return std::exp(log_det_); }
    /// Concentration matrix, via the Cholesky factorization.
    Matrix precision() const { return llt_.solve(Matrix::Identity(cov_.rows(), cov_.cols())); }
    Vector solve(const Vector& b) const { return llt_.solve(b); }

private:
    Vector mean_;
    Matrix cov_;
    Eigen::LLT<Matrix> llt_;
    double log_det_ = 0.0;
};

/// X_A given X_B = value. Indices are 0-based.
struct ConditionSpec {
    std::vector<std::size_t> kept;
    std::vector<std::size_t> given;
    std::vector<double> value;
};

namespace detail {

inline void check_indices(const std::vector<std::size_t>& idx, std::size_t n,
                          std::vector<bool>& seen) {
    for (std::size_t i : idx) {
        if (i >= n)
            throw Error(ErrorCode::InvalidArgument,
                        "index " + std::to_string(i) + " outside 0.." + std::to_string(n - 1));
        if (seen[i])
            throw Error(ErrorCode::InvalidArgument,
                        "index " + std::to_string(i) + " appears twice");
        seen[i] = true;
    }
}

inline Matrix block(const Matrix& m, const std::vector<std::size_t>& rows,
                    const std::vector<std::size_t>& cols) {
    Matrix out(rows.size(), cols.size());
    for (std::size_t r = 0; r < rows.size(); ++r)
        for (std::size_t c = 0; c < cols.size(); ++c)
            out(r, c) = m(rows[r], cols[c]);
    return out;
}

inline Vector subvector(const Vector& v, const std::vector<std::size_t>& idx) {
    Vector out(idx.size());
    for (std::size_t k = 0; k < idx.size(); ++k) out(k) = v(idx[k]);
    return out;
}

}  // namespace detail

inline GaussianDist marginal(const GaussianDist& dist, const std::vector<std::size_t>& kept) {
    std::vector<bool> seen(dist.dim(), false);
    detail::check_indices(kept, dist.dim(), seen);
    if (kept.empty()) throw Error(ErrorCode::InvalidArgument, "empty marginal");
    return GaussianDist(detail::subvector(dist.mean(), kept),
                        detail::block(dist.cov(), kept, kept));
}

/// Conditional Gaussian of X_A given X_B = value (Schur complement).
inline GaussianDist condition(const GaussianDist& dist, const ConditionSpec& spec) {
    const std::size_t n = dist.dim();
    std::vector<bool> seen(n, false);
    detail::check_indices(spec.kept, n, seen);
    detail::check_indices(spec.given, n, seen);
    if (spec.kept.empty()) throw Error(ErrorCode::InvalidArgument, "kept index set is empty");
    if (spec.value.size() != spec.given.size())
        throw Error(ErrorCode::DimensionMismatch,
                    "value has length " + std::to_string(spec.value.size()) + ", given set has " +
                        std::to_string(spec.given.size()));
    if (spec.given.empty()) return marginal(dist, spec.kept);

    const Matrix s_aa = detail::block(dist.cov(), spec.kept, spec.kept);
    const Matrix s_ab = detail::block(dist.cov(), spec.kept, spec.given);
    const Matrix s_bb = detail::block(dist.cov(), spec.given, spec.given);
    const Eigen::LLT<Matrix> llt(s_bb);
    if (llt.info() != Eigen::Success)
        throw Error(ErrorCode::SingularGivenBlock, "covariance of the given block is not invertible");

    const Vector x_b = Eigen::Map<const Vector>(spec.value.data(),
                                                static_cast<Eigen::Index>(spec.value.size()));
    const Vector shift = x_b - detail::subvector(dist.mean(), spec.given);
    const Vector mean = detail::subvector(dist.mean(), spec.kept) + s_ab * llt.solve(shift);
    Matrix cov = s_aa - s_ab * llt.solve(s_ab.transpose());
    cov = 0.5 * (cov + cov.transpose()).eval();
    return GaussianDist(mean, cov);
}

/// Zero-mean trivariate Gaussian with cov [[1,r,r^2],[r,1,0],[r^2,0,1]].
inline GaussianDist example1_cov(double rho) {
    Matrix cov(3, 3);
    cov << 1.0, rho, rho * rho,
           rho, 1.0, 0.0,
           rho * rho, 0.0, 1.0;
    return GaussianDist(Vector::Zero(3), cov);
}

/// Zero-mean trivariate Gaussian with unit variances, cov12 = 1-2r,
/// cov13 = cov23 = 1-r; defined for 0 < r < 1/2.
inline GaussianDist example2_cov(double rho) {
    if (!(rho > 0.0 && rho < 0.5))
        throw Error(ErrorCode::DomainError, "rho outside (0, 0.5)");
    Matrix cov(3, 3);
    cov << 1.0, 1.0 - 2.0 * rho, 1.0 - rho,
           1.0 - 2.0 * rho, 1.0, 1.0 - rho,
           1.0 - rho, 1.0 - rho, 1.0;
    return GaussianDist(Vector::Zero(3), cov);
}

/// Differential entropy in nats. Paper mode omits the n/2 term.
inline double gaussian_de(const GaussianDist& dist, EntropyMode mode) {
    const double n = static_cast<double>(dist.dim());
    const double printed = 0.5 * (n * std::log(kTwoPi) + dist.log_det());
    return mode == EntropyMode::paper ? printed : printed + 0.5 * n;
}

/// KL(f || g) for two Gaussians of equal dimension.
inline double gaussian_kl(const GaussianDist& f, const GaussianDist& g) {
    if (f.dim() != g.dim())
        throw Error(ErrorCode::DimensionMismatch,
                    "dimensions " + std::to_string(f.dim()) + " and " + std::to_string(g.dim()));
    if (f.mean() == g.mean() && f.cov() == g.cov()) return 0.0;
    const double n = static_cast<double>(f.dim());
    const Matrix gi_f = g.precision() * f.cov();
    const Vector d = g.mean() - f.mean();
    const double quad = d.dot(g.solve(d));
    const double kl = 0.5 * (gi_f.trace() + quad - n + g.log_det() - f.log_det());
    return kl > 0.0 ? kl : 0.0;
}

/// Seeded random SPD matrix A A^T / n + 0.25 I with standard normal A.
inline Matrix random_spd(std::uint64_t seed, std::size_t n) {
    SplitMix64 rng = SplitMix64::stream(seed, 0);
    std::normal_distribution<double> normal;
    const auto m = static_cast<Eigen::Index>(n);
    Matrix a(m, m);
    for (Eigen::Index i = 0; i < m; ++i)
        for (Eigen::Index j = 0; j < m; ++j) a(i, j) = normal(rng);
    Matrix s = a * a.transpose() / static_cast<double>(n) + 0.25 * Matrix::Identity(m, m);
    return 0.5 * (s + s.transpose());
}

/// Fast density evaluator and sampler for a GaussianDist; used by the
/// quadrature and Monte Carlo oracles.
class GaussianDensity {
public:
    explicit GaussianDensity(const GaussianDist& dist)
        : n_(dist.dim()), mean_(dist.mean().data(), dist.mean().data() + dist.dim()),
          chol_(n_ * n_, 0.0), inv_chol_(n_ * n_, 0.0) {
        const Matrix l = dist.chol();
        const Matrix li = l.triangularView<Eigen::Lower>().solve(
            Matrix::Identity(static_cast<Eigen::Index>(n_), static_cast<Eigen::Index>(n_)));
        for (std::size_t i = 0; i < n_; ++i)
            for (std::size_t j = 0; j <= i; ++j) {
                chol_[i * n_ + j] = l(i, j);
                inv_chol_[i * n_ + j] = li(i, j);
            }
        log_norm_ = 0.5 * (static_cast<double>(n_) * std::log(kTwoPi) + dist.log_det());
    }

    std::size_t dim() const { return n_; }

    double log_pdf(std::span<const double> x) const {
        double q = 0.0;
        for (std::size_t i = 0; i < n_; ++i) {
            double z = 0.0;
            for (std::size_t j = 0; j <= i; ++j) z += inv_chol_[i * n_ + j] * (x[j] - mean_[j]);
            q += z * z;
        }
        return -0.5 * q - log_norm_;
    }

    double pdf(std::span<const double> x) const { return std::exp(log_pdf(x)); }

    /// x = mean + L z for a standard normal vector z.
    void transform(std::span<const double> z, std::span<double> x) const {
        for (std::size_t i = 0; i < n_; ++i) {
            double v = mean_[i];
            for (std::size_t j = 0; j <= i; ++j) v += chol_[i * n_ + j] * z[j];
            x[i] = v;
        }
    }

private:
    std::size_t n_;
    std::vector<double> mean_;
    std::vector<double> chol_;
    std::vector<double> inv_chol_;
    double log_norm_ = 0.0;
};

}  // namespace wentropy
