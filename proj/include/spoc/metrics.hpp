#ifndef SPOC_METRICS_HPP
#define SPOC_METRICS_HPP

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "spoc/errors.hpp"
#include "spoc/linalg.hpp"

namespace spoc {

enum class ErrorNorm { fro, l1, l1_inf };

inline const char* to_string(ErrorNorm n) {
    switch (n) {
    case ErrorNorm::fro: return "fro";
    case ErrorNorm::l1: return "l1";
    case ErrorNorm::l1_inf: return "l1_inf";
    }
    return "?";
}

inline ErrorNorm parse_error_norm(const std::string& s) {
    if (s == "fro") return ErrorNorm::fro;
    if (s == "l1") return ErrorNorm::l1;
    if (s == "l1_inf") return ErrorNorm::l1_inf;
    throw InvalidArgument("unknown norm '" + s + "' (expected fro, l1 or l1_inf)");
}

/// min over column permutations P of ‖Ŵ − W·P‖, with all three norms
/// evaluated at the permutation that minimises the requested one.
struct ErrorReport {
    double fro = 0.0;
    double l1 = 0.0;
    double l1_inf = 0.0;
    /// permutation[k] = column of W matched to column k of Ŵ.
    std::vector<Index> permutation;
    ErrorNorm minimized = ErrorNorm::fro;
    /// False only for l1_inf with K > 8, where the result is an upper bound.
    bool exact = true;

    [[nodiscard]] double value() const {
        switch (minimized) {
        case ErrorNorm::fro: return fro;
        case ErrorNorm::l1: return l1;
        case ErrorNorm::l1_inf: return l1_inf;
        }
        return fro;
    }
};

/// Largest K for which permutations are enumerated exhaustively.
inline constexpr Index kExhaustiveMaxK = 8;

/// Minimum-cost perfect matching on a square cost matrix (Hungarian method
/// with potentials, O(K³)). Returns assignment[row] = column.
inline std::vector<Index> min_cost_assignment(const Eigen::MatrixXd& cost) {
    const Index k = cost.rows();
    if (cost.cols() != k) throw InvalidArgument("min_cost_assignment: cost matrix must be square");
    const double inf = std::numeric_limits<double>::infinity();
    // 1-based arrays; column 0 is a sentinel.
    std::vector<double> u(static_cast<std::size_t>(k + 1), 0.0), v(static_cast<std::size_t>(k + 1), 0.0);
    std::vector<Index> match(static_cast<std::size_t>(k + 1), 0), way(static_cast<std::size_t>(k + 1), 0);
    for (Index row = 1; row <= k; ++row) {
        match[0] = row;
        Index col0 = 0;
        std::vector<double> minv(static_cast<std::size_t>(k + 1), inf);
        std::vector<char> used(static_cast<std::size_t>(k + 1), 0);
        do {
            used[static_cast<std::size_t>(col0)] = 1;
            const Index r0 = match[static_cast<std::size_t>(col0)];
            double delta = inf;
            Index col1 = 0;
            for (Index c = 1; c <= k; ++c) {
                const auto cs = static_cast<std::size_t>(c);
                if (used[cs]) continue;
                const double cur = cost(r0 - 1, c - 1) - u[static_cast<std::size_t>(r0)] - v[cs];
                if (cur < minv[cs]) {
                    minv[cs] = cur;
                    way[cs] = col0;
                }
                if (minv[cs] < delta) {
                    delta = minv[cs];
                    col1 = c;
                }
            }
            for (Index c = 0; c <= k; ++c) {
                const auto cs = static_cast<std::size_t>(c);
                if (used[cs]) {
                    u[static_cast<std::size_t>(match[cs])] += delta;
                    v[cs] -= delta;
                } else {
                    minv[cs] -= delta;
                }
            }
            col0 = col1;
        } while (match[static_cast<std::size_t>(col0)] != 0);
        do {
            const Index col1 = way[static_cast<std::size_t>(col0)];
            match[static_cast<std::size_t>(col0)] = match[static_cast<std::size_t>(col1)];
            col0 = col1;
        } while (col0 != 0);
    }
    std::vector<Index> assignment(static_cast<std::size_t>(k));
    for (Index c = 1; c <= k; ++c) assignment[static_cast<std::size_t>(match[static_cast<std::size_t>(c)] - 1)] = c - 1;
    return assignment;
}

namespace detail {

inline DenseMatrix permuted_difference(const DenseMatrix& w_hat, const DenseMatrix& w, const std::vector<Index>& perm) {
    DenseMatrix d(w_hat.rows(), w_hat.cols());
    for (Index k = 0; k < w_hat.cols(); ++k) d.col(k) = w_hat.col(k) - w.col(perm[static_cast<std::size_t>(k)]);
    return d;
}

inline double l1_inf_at(const DenseMatrix& w_hat, const DenseMatrix& w, const std::vector<Index>& perm) {
    double worst = 0.0;
    for (Index i = 0; i < w_hat.rows(); ++i) {
        double s = 0.0;
        for (Index k = 0; k < w_hat.cols(); ++k) s += std::abs(w_hat(i, k) - w(i, perm[static_cast<std::size_t>(k)]));
        worst = std::max(worst, s);
    }
    return worst;
}

} // namespace detail

/// Permutation-minimised estimation error of Ŵ against W.
inline ErrorReport perm_min_error(const DenseMatrix& w_hat, const DenseMatrix& w, ErrorNorm norm = ErrorNorm::fro) {
    if (w_hat.rows() != w.rows() || w_hat.cols() != w.cols())
        throw InvalidArgument("perm_min_error: dimension mismatch");
    require_finite(w_hat, "perm_min_error");
    require_finite(w, "perm_min_error");
    const Index k = w.cols();

    // Column-decomposable costs: squared ℓ2 for fro, ℓ1 for l1 (and l1_inf fallback).
    Eigen::MatrixXd cost(k, k);
    for (Index a = 0; a < k; ++a)
        for (Index b = 0; b < k; ++b) {
            const Vector diff = w_hat.col(a) - w.col(b);
            cost(a, b) = norm == ErrorNorm::fro ? diff.squaredNorm() : diff.cwiseAbs().sum();
        }

    ErrorReport rep;
    rep.minimized = norm;
    std::vector<Index> perm(static_cast<std::size_t>(k));
    std::iota(perm.begin(), perm.end(), Index{0});

    if (k <= kExhaustiveMaxK) {
        double best = std::numeric_limits<double>::infinity();
        std::vector<Index> best_perm = perm;
        do {
            double obj = 0.0;
            if (norm == ErrorNorm::l1_inf) {
                obj = detail::l1_inf_at(w_hat, w, perm);
            } else {
                for (Index a = 0; a < k; ++a) obj += cost(a, perm[static_cast<std::size_t>(a)]);
            }
            if (obj < best) {
                best = obj;
                best_perm = perm;
            }
        } while (std::next_permutation(perm.begin(), perm.end()));
        perm = std::move(best_perm);
    } else {
        perm = min_cost_assignment(cost);
        rep.exact = norm != ErrorNorm::l1_inf;
    }

    const DenseMatrix d = detail::permuted_difference(w_hat, w, perm);
    const Vector row_l1 = d.cwiseAbs().rowwise().sum();
    rep.fro = d.norm();
    rep.l1 = row_l1.sum();
    rep.l1_inf = row_l1.size() > 0 ? row_l1.maxCoeff() : 0.0;
    rep.permutation = std::move(perm);
    return rep;
}

/// Orthogonal O minimising ‖Û − U·O‖_F: O = P Qᵀ for UᵀÛ = P Σ Qᵀ.
inline DenseMatrix procrustes_align(const DenseMatrix& u_hat, const DenseMatrix& u) {
    if (u_hat.rows() != u.rows() || u_hat.cols() != u.cols())
        throw InvalidArgument("procrustes_align: dimension mismatch");
    require_finite(u_hat, "procrustes_align");
    require_finite(u, "procrustes_align");
    const Eigen::MatrixXd cross = u.transpose() * u_hat;
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(cross, Eigen::ComputeFullU | Eigen::ComputeFullV);
    return svd.matrixU() * svd.matrixV().transpose();
}

/// Inputs of the row-wise perturbation and rate bounds.
struct BoundInputs {
    double beta = 0.0;
    std::vector<double> beta_rows;
    double delta = 0.0;
    double threshold = 0.0;
};

namespace detail {

inline Vector leading_pair(const DenseMatrix& m, Index k, const char* where, const SvdOptions& opts) {
    const Vector l = singular_values(m, k, opts);
    if (!(l(k - 1) > opts.tol.rank_relative * l(0)))
        throw SingularityError(std::string(where) + ": matrix is rank deficient at level " + std::to_string(k));
    Vector out(2);
    out << l(0), l(k - 1);
    return out;
}

} // namespace detail

/// β_i = √K κ²(Π) ‖e_iᵀX‖₂ ‖X−Π‖ / λ_K²(Π) + ‖e_iᵀ(X−Π)‖₂ / λ_K(Π), and β = max_i β_i.
inline BoundInputs beta(const DenseMatrix& x, const DenseMatrix& pi, Index k, const SvdOptions& opts = {}) {
    if (x.rows() != pi.rows() || x.cols() != pi.cols()) throw InvalidArgument("beta: dimension mismatch");
    require_finite(x, "beta");
    const Vector lp = detail::leading_pair(pi, k, "beta", opts);
    const double kappa = lp(0) / lp(1);
    const double lk = lp(1);
    const DenseMatrix noise = x - pi;
    const double noise_norm = spectral_norm(noise, opts);
    const double first = std::sqrt(static_cast<double>(k)) * kappa * kappa * noise_norm / (lk * lk);

    BoundInputs out;
    out.beta_rows.resize(static_cast<std::size_t>(x.rows()));
    for (Index i = 0; i < x.rows(); ++i) {
        const double b = first * x.row(i).norm() + noise.row(i).norm() / lk;
        out.beta_rows[static_cast<std::size_t>(i)] = b;
        out.beta = std::max(out.beta, b);
    }
    return out;
}

/// Δ(W, Π) = (λ₁(W)/λ_K(Π))² κ(W) κ²(Π).
inline double delta(const DenseMatrix& w, const DenseMatrix& pi, Index k, const SvdOptions& opts = {}) {
    const Vector lw = detail::leading_pair(w, k, "delta", opts);
    const Vector lp = detail::leading_pair(pi, k, "delta", opts);
    const double ratio = lw(0) / lp(1);
    const double kappa_pi = lp(0) / lp(1);
    return ratio * ratio * (lw(0) / lw(1)) * kappa_pi * kappa_pi;
}

/// c·√(n·log(n+p)/N); with c = 4 the high-probability bound on ‖X − Π‖.
inline double concentration_threshold(Index n, Index p, double n_words, double c = 4.0) {
    if (n < 1 || p < 1 || !(n_words >= 1.0)) throw InvalidArgument("concentration_threshold: sizes must be >= 1");
    const double nd = static_cast<double>(n);
    return c * std::sqrt(nd * std::log(nd + static_cast<double>(p)) / n_words);
}

/// K·√(n·log(n+p)/N)·Δ, the Frobenius rate with its constant set to one.
/// Only meaningful in ratios.
inline double fro_bound_shape(Index k, Index n, Index p, double n_words, double delta_value) {
    return static_cast<double>(k) * concentration_threshold(n, p, n_words, 1.0) * delta_value;
}

} // namespace spoc

#endif // SPOC_METRICS_HPP
