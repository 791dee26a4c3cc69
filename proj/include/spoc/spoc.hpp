#ifndef SPOC_SPOC_HPP
#define SPOC_SPOC_HPP

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "spoc/errors.hpp"
#include "spoc/linalg.hpp"
#include "spoc/spa.hpp"

namespace spoc {

struct SpocOptions {
    bool preconditioned = true;
    bool clip_to_simplex = false;
    /// c in the rank threshold c·√(n·log(n+p)/N).
    double threshold_const = 4.0;
    /// Ĥ is rejected when λ_min(Ĥ) < singularity_tol·λ₁(Ĥ).
    double singularity_tol = 1e-10;
    /// Largest number of topics the adaptive rule may return.
    Index max_topics = 50;
    SvdOptions svd{};
    MveeOptions mvee{};

    void validate() const {
        if (!(threshold_const > 0.0)) throw InvalidArgument("SpocOptions: threshold_const must be positive");
        if (!(singularity_tol > 0.0)) throw InvalidArgument("SpocOptions: singularity_tol must be positive");
        if (max_topics < 2) throw InvalidArgument("SpocOptions: max_topics must be at least 2");
    }
};

/// Output of one SPOC fit.
struct SpocEstimate {
    DenseMatrix w_hat; ///< n×K estimated topic weights
    DenseMatrix h_hat; ///< K×K rows of Û at the anchors
    DenseMatrix a_hat; ///< K×p estimated topic-word matrix
    DenseMatrix u_hat; ///< n×K leading left singular vectors of X
    Vector l_hat;      ///< K leading singular values of X
    Index k_used = 0;
    AnchorIndexSet anchors;
    bool preconditioned = false;
    bool clipped = false;
};

/// Â = Ĥ · diag(l̂) · V̂ᵀ.
inline DenseMatrix estimate_a(const DenseMatrix& h_hat, const Vector& l_hat, const DenseMatrix& v_hat) {
    const Index k = h_hat.rows();
    if (h_hat.cols() != k || l_hat.size() != k || v_hat.cols() != k)
        throw InvalidArgument("estimate_a: dimension mismatch");
    return h_hat * l_hat.asDiagonal() * v_hat.transpose();
}

/// Euclidean projection of every row onto the probability simplex.
inline DenseMatrix project_rows_to_simplex(const DenseMatrix& w) {
    require_finite(w, "project_rows_to_simplex");
    DenseMatrix out(w.rows(), w.cols());
    std::vector<double> sorted(static_cast<std::size_t>(w.cols()));
    for (Index i = 0; i < w.rows(); ++i) {
        for (Index j = 0; j < w.cols(); ++j) sorted[static_cast<std::size_t>(j)] = w(i, j);
        std::sort(sorted.begin(), sorted.end(), std::greater<>());
        double cumulative = 0.0;
        double theta = 0.0;
        for (std::size_t j = 0; j < sorted.size(); ++j) {
            cumulative += sorted[j];
            const double candidate = (cumulative - 1.0) / static_cast<double>(j + 1);
            if (sorted[j] - candidate > 0.0) theta = candidate;
        }
        for (Index j = 0; j < w.cols(); ++j) out(i, j) = std::max(w(i, j) - theta, 0.0);
        // Drive the rounding residue of the row sum into the largest entry.
        Index top = 0;
        out.row(i).maxCoeff(&top);
        out(i, top) += 1.0 - out.row(i).sum();
    }
    return out;
}

namespace detail {

inline void require_k(const DenseMatrix& x, Index k, const char* where) {
    if (k < 2 || k > std::min(x.rows(), x.cols()))
        throw InvalidArgument(std::string(where) + ": K = " + std::to_string(k) + " must lie in [2, min(n, p)]");
}

} // namespace detail

/// SPOC with known K: rank-K SVD of X, (preconditioned) SPA on Û giving J,
/// Ĥ = Û_J, Ŵ = Û Ĥ⁻¹, and Â from the same factors.
inline SpocEstimate fit_w(const DenseMatrix& x, Index k, const SpocOptions& opts = {}) {
    opts.validate();
    require_nonempty(x, "fit_w");
    require_finite(x, "fit_w");
    detail::require_k(x, k, "fit_w");

    SvdResult svd = truncated_svd(x, k, opts.svd);
    SpocEstimate est;
    est.k_used = k;
    est.preconditioned = opts.preconditioned;
    est.anchors = opts.preconditioned ? preconditioned_spa(svd.u, k, nullptr, opts.mvee) : spa(svd.u, k);

    est.h_hat.resize(k, k);
    for (Index t = 0; t < k; ++t) est.h_hat.row(t) = svd.u.row(est.anchors[static_cast<std::size_t>(t)]);

    const Vector hs = Eigen::JacobiSVD<Eigen::MatrixXd>(est.h_hat).singularValues();
    if (!(hs(k - 1) >= opts.singularity_tol * hs(0)))
        throw DegenerateAnchorError("fit_w: selected anchor block is singular (relative λ_min = " +
                                    std::to_string(hs(0) > 0.0 ? hs(k - 1) / hs(0) : 0.0) + ")");

    // Ŵ = Û Ĥ⁻¹  ⇔  Ĥᵀ Ŵᵀ = Ûᵀ
    const Eigen::PartialPivLU<Eigen::MatrixXd> lu(est.h_hat.transpose());
    est.w_hat = lu.solve(svd.u.transpose()).transpose();
    if (opts.clip_to_simplex) {
        est.w_hat = project_rows_to_simplex(est.w_hat);
        est.clipped = true;
    }
    est.a_hat = estimate_a(est.h_hat, svd.l, svd.v);
    est.u_hat = std::move(svd.u);
    est.l_hat = std::move(svd.l);
    return est;
}

/// K̂ = #{j : λ_j(X) > c·√(n·log(n+p)/N)}.
///
/// Computes singular values in growing batches, up to max_topics + 1;
/// exceeding max_topics raises UnderdeterminedRankError.
inline Index estimate_k(const DenseMatrix& x, double n_words, double threshold_const = 4.0,
                        Index max_topics = 50, const SvdOptions& svd_opts = {}) {
    require_nonempty(x, "estimate_k");
    require_finite(x, "estimate_k");
    if (!(n_words >= 1.0)) throw InvalidArgument("estimate_k: n_words must be at least 1");
    const double n = static_cast<double>(x.rows());
    const double p = static_cast<double>(x.cols());
    const double threshold = threshold_const * std::sqrt(n * std::log(n + p) / n_words);
    const Index full = std::min(x.rows(), x.cols());

    Index batch = std::min<Index>(8, full);
    for (;;) {
        const Vector l = singular_values(x, batch, svd_opts);
        Index count = 0;
        while (count < batch && l(count) > threshold) ++count;
        if (count > max_topics)
            throw UnderdeterminedRankError("estimate_k: more than " + std::to_string(max_topics) +
                                           " singular values above threshold");
        if (count < batch || batch == full) return count;
        batch = std::min(full, std::min<Index>(2 * batch, max_topics + 1));
    }
}

/// SPOC with K replaced by estimate_k(x, n_words, threshold_const).
inline SpocEstimate fit_adaptive(const DenseMatrix& x, double n_words, const SpocOptions& opts = {}) {
    opts.validate();
    const Index k = estimate_k(x, n_words, opts.threshold_const, opts.max_topics, opts.svd);
    if (k < 2)
        throw UnderdeterminedRankError("fit_adaptive: estimated number of topics is " + std::to_string(k) +
                                       ", need at least 2");
    return fit_w(x, k, opts);
}

} // namespace spoc

#endif // SPOC_SPOC_HPP
