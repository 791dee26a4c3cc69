#ifndef SPOC_LINALG_HPP
#define SPOC_LINALG_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <utility>

#include <Eigen/Dense>

#include "spoc/errors.hpp"
#include "spoc/random.hpp"

namespace spoc {

using Index = Eigen::Index;

/// Row-major dense matrix; carrier for X, Π, W, A and singular factors.
using DenseMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;

/// Numerical thresholds shared across modules.
struct Tolerances {
    double orthonormality = 1e-10;
    /// λ_k below this fraction of λ₁ counts as rank deficient.
    double rank_relative = 1e-12;
    /// Residual rows with smaller ℓ2 norm are never picked by SPA.
    double zero_row = 1e-14;
    /// Matrices with more entries than this use randomized subspace iteration.
    std::size_t exact_svd_max_entries = 1'000'000;
    Index oversampling = 10;
    int min_power_iterations = 2;
    int max_power_iterations = 200;
    /// Subspace iteration stops once the top-k Ritz values move by less
    /// than this fraction of λ₁ between sweeps.
    double power_tolerance = 1e-14;
};

inline constexpr Tolerances kTolerances{};

inline bool all_finite(const DenseMatrix& m) { return m.allFinite(); }

inline void require_finite(const DenseMatrix& m, const char* where) {
    if (!m.allFinite()) throw InvalidArgument(std::string(where) + ": matrix has non-finite entries");
}

inline void require_nonempty(const DenseMatrix& m, const char* where) {
    if (m.rows() == 0 || m.cols() == 0) throw InvalidArgument(std::string(where) + ": empty matrix");
}

/// Rank-k factors M ≈ U·diag(L)·Vᵀ.
struct SvdResult {
    DenseMatrix u; ///< n×k, orthonormal columns
    Vector l;      ///< k singular values, nonincreasing
    DenseMatrix v; ///< p×k, orthonormal columns

    [[nodiscard]] Index rank() const { return l.size(); }
    [[nodiscard]] DenseMatrix reconstruct() const { return u * l.asDiagonal() * v.transpose(); }
};

enum class SvdMethod { automatic, exact, randomized };

struct SvdOptions {
    SvdMethod method = SvdMethod::automatic;
    /// Seeds the Gaussian sketch of the randomized path.
    RngSeed seed{0x5eed, 0};
    Tolerances tol{};
};

namespace detail {

// Flip (u_j, v_j) pairs so the largest-magnitude entry of u_j is positive;
// ties go to the lowest row index.
inline void fix_signs(DenseMatrix& u, DenseMatrix& v) {
    for (Index j = 0; j < u.cols(); ++j) {
        Index best = 0;
        double best_abs = -1.0;
        for (Index i = 0; i < u.rows(); ++i) {
            const double a = std::abs(u(i, j));
            if (a > best_abs) {
                best_abs = a;
                best = i;
            }
        }
        if (u(best, j) < 0.0) {
            u.col(j) *= -1.0;
            v.col(j) *= -1.0;
        }
    }
}

inline DenseMatrix orthonormal_basis(const DenseMatrix& y) {
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(y);
    Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(y.rows(), y.cols());
    return q;
}

inline SvdResult exact_svd(const DenseMatrix& m, Index k) {
    Eigen::BDCSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
    SvdResult r;
    r.u = svd.matrixU().leftCols(k);
    r.l = svd.singularValues().head(k);
    r.v = svd.matrixV().leftCols(k);
    return r;
}

// Randomized range finder followed by subspace (power) iteration. The sweep
// count is adaptive: at least min_power_iterations, then until the leading k
// Ritz values settle.
inline SvdResult randomized_svd(const DenseMatrix& m, Index k, const SvdOptions& opts) {
    const Index n = m.rows();
    const Index p = m.cols();
    const Index width = std::min<Index>(k + opts.tol.oversampling, std::min(n, p));

    Rng rng(opts.seed);
    Eigen::MatrixXd omega(p, width);
    for (Index j = 0; j < width; ++j)
        for (Index i = 0; i < p; ++i) omega(i, j) = rng.normal();

    const Eigen::MatrixXd mt = m.transpose();
    Eigen::MatrixXd q = orthonormal_basis(m * omega);
    Vector previous = Vector::Zero(k);
    Eigen::MatrixXd b;
    for (int it = 0; it < opts.tol.max_power_iterations; ++it) {
        Eigen::MatrixXd z = orthonormal_basis(mt * q);
        q = orthonormal_basis(m * z);
        b = q.transpose() * m;
        Eigen::JacobiSVD<Eigen::MatrixXd> small(b);
        Vector current = small.singularValues().head(k);
        const double scale = std::max(current(0), 1e-300);
        const double moved = (current - previous).cwiseAbs().maxCoeff();
        previous = current;
        if (it + 1 >= opts.tol.min_power_iterations && moved <= opts.tol.power_tolerance * scale) break;
    }
    b = q.transpose() * m;
    Eigen::BDCSVD<Eigen::MatrixXd> svd(b, Eigen::ComputeThinU | Eigen::ComputeThinV);
    SvdResult r;
    r.u = q * svd.matrixU().leftCols(k);
    r.l = svd.singularValues().head(k);
    r.v = svd.matrixV().leftCols(k);
    return r;
}

} // namespace detail

/// Top-k singular triplets of m with deterministic column signs.
///
/// Matrices up to `exact_svd_max_entries` entries go through a dense
/// divide-and-conquer bidiagonal SVD; larger ones through a Gaussian sketch
/// with oversampling and subspace iteration. An all-zero input yields zero
/// singular values and some orthonormal bases.
inline SvdResult truncated_svd(const DenseMatrix& m, Index k, const SvdOptions& opts = {}) {
    require_nonempty(m, "truncated_svd");
    require_finite(m, "truncated_svd");
    if (k < 1 || k > std::min(m.rows(), m.cols()))
        throw InvalidArgument("truncated_svd: rank " + std::to_string(k) + " outside [1, " +
                              std::to_string(std::min(m.rows(), m.cols())) + "]");
    bool exact = true;
    switch (opts.method) {
    case SvdMethod::exact: break;
    case SvdMethod::randomized: exact = false; break;
    case SvdMethod::automatic:
        exact = static_cast<std::size_t>(m.rows()) * static_cast<std::size_t>(m.cols()) <=
                opts.tol.exact_svd_max_entries;
        break;
    }
    SvdResult r = exact ? detail::exact_svd(m, k) : detail::randomized_svd(m, k, opts);
    detail::fix_signs(r.u, r.v);
    return r;
}

/// Leading k singular values only.
inline Vector singular_values(const DenseMatrix& m, Index k, const SvdOptions& opts = {}) {
    return truncated_svd(m, k, opts).l;
}

/// λ₁(m), the operator 2-norm.
inline double spectral_norm(const DenseMatrix& m, const SvdOptions& opts = {}) {
    return truncated_svd(m, 1, opts).l(0);
}

struct MatrixNorms {
    double fro = 0.0;
    double l1 = 0.0;     ///< sum of absolute entries
    double l1_inf = 0.0; ///< largest row ℓ1 sum
};

inline MatrixNorms norms(const DenseMatrix& m) {
    require_nonempty(m, "norms");
    require_finite(m, "norms");
    MatrixNorms out;
    out.fro = m.norm();
    const Vector row_l1 = m.cwiseAbs().rowwise().sum();
    out.l1 = row_l1.sum();
    out.l1_inf = row_l1.maxCoeff();
    return out;
}

/// κ = λ₁/λ_k. Throws SingularityError when λ_k < rank_relative·λ₁.
inline double condition_number(const DenseMatrix& m, Index k, const SvdOptions& opts = {}) {
    const Vector l = singular_values(m, k, opts);
    if (!(l(k - 1) > opts.tol.rank_relative * l(0)))
        throw SingularityError("condition_number: matrix is rank deficient at level " + std::to_string(k));
    return l(0) / l(k - 1);
}

} // namespace spoc

#endif // SPOC_LINALG_HPP
