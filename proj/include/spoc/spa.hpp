#ifndef SPOC_SPA_HPP
#define SPOC_SPA_HPP

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "spoc/errors.hpp"
#include "spoc/linalg.hpp"

namespace spoc {

/// Row indices chosen by SPA, in selection order.
struct AnchorIndexSet {
    std::vector<Index> indices;

    [[nodiscard]] std::size_t size() const { return indices.size(); }
    [[nodiscard]] Index operator[](std::size_t i) const { return indices[i]; }
};

/// Optional diagnostics recorded while SPA runs.
struct SpaTrace {
    /// Largest residual row norm seen at the start of each step.
    std::vector<double> max_norms;
    /// Residual rows after the final projection (n×K).
    DenseMatrix residual;
};

/// Successive projection: pick the residual row of largest ℓ2 norm, project
/// every row onto the orthogonal complement of the pick, repeat r times.
///
/// Rows of `m` are the points (the columns of S₀ = Mᵀ). Exact ties go to the
/// lowest index. Rows with residual norm below `tol.zero_row` are never
/// picked; running out of such rows raises RankDeficiencyError.
inline AnchorIndexSet spa(const DenseMatrix& m, Index r, SpaTrace* trace = nullptr,
                          const Tolerances& tol = kTolerances) {
    require_finite(m, "spa");
    if (r < 1 || r > std::min(m.rows(), m.cols()))
        throw InvalidArgument("spa: r = " + std::to_string(r) + " must lie in [1, min(n, K)]");

    DenseMatrix s = m;
    AnchorIndexSet out;
    out.indices.reserve(static_cast<std::size_t>(r));
    if (trace) trace->max_norms.clear();

    for (Index t = 0; t < r; ++t) {
        const Vector sq = s.rowwise().squaredNorm();
        Index pick = -1;
        double best = tol.zero_row * tol.zero_row;
        for (Index i = 0; i < sq.size(); ++i) {
            if (sq(i) > best) {
                best = sq(i);
                pick = i;
            }
        }
        if (trace) trace->max_norms.push_back(std::sqrt(std::max(best, 0.0)));
        if (pick < 0)
            throw RankDeficiencyError("spa: residual vanished after " + std::to_string(t) + " of " +
                                      std::to_string(r) + " selections");
        const Eigen::RowVectorXd dir = s.row(pick) / std::sqrt(best);
        // s ← s (I − d dᵀ)
        const Vector coef = s * dir.transpose();
        s.noalias() -= coef * dir;
        s.row(pick).setZero();
        out.indices.push_back(pick);
    }
    if (trace) trace->residual = std::move(s);
    return out;
}

/// Origin-centred minimum-volume ellipsoid {x : xᵀ L x ≤ 1}.
struct Preconditioner {
    DenseMatrix l_star;      ///< K×K, symmetric positive definite
    DenseMatrix sqrt_l_star; ///< symmetric square root of l_star
    Vector weights;          ///< optimal design weights on the input points
    int iterations = 0;
    /// max_i a_iᵀ M⁻¹ a_i / K − 1 at termination (0 means optimal).
    double final_violation = 0.0;
};

/// Raised when the MVEE ascent hits its iteration cap; carries the last iterate.
class MveeIterationLimit : public Error {
  public:
    MveeIterationLimit(const std::string& what, Preconditioner last)
        : Error(what), last_iterate(std::move(last)) {}
    Preconditioner last_iterate;
};

struct MveeOptions {
    double tolerance = 1e-7;
    /// 0 selects the default cap max(100·K·ln n, 1000).
    int max_iterations = 0;
};

namespace detail {

/// Newton moves are attempted while the design has at most this many
/// supported points per K² (the optimum needs at most K(K+1)/2).
inline constexpr Index kNewtonMaxSupport = 2;

inline DenseMatrix symmetric_sqrt(const DenseMatrix& a) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(a);
    const Vector ev = eig.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    return eig.eigenvectors() * ev.asDiagonal() * eig.eigenvectors().transpose();
}

inline Preconditioner finish_mvee(const DenseMatrix& pts, const Vector& u, const Eigen::MatrixXd& moment,
                                  int iterations, double violation) {
    const Index k = pts.cols();
    Preconditioner pc;
    DenseMatrix l = moment.inverse() / static_cast<double>(k);
    l = 0.5 * (l + l.transpose()).eval();
    // Rescale so the binding constraint is met with equality.
    const double worst = (pts * l).cwiseProduct(pts).rowwise().sum().maxCoeff();
    l /= worst;
    pc.l_star = l;
    pc.sqrt_l_star = symmetric_sqrt(l);
    pc.weights = u;
    pc.iterations = iterations;
    pc.final_violation = violation;
    return pc;
}

} // namespace detail

/// Minimum-volume origin-centred ellipsoid enclosing the rows of `points`.
///
/// Solves the dual D-optimal design max log det Σ u_i a_i a_iᵀ over the
/// simplex with Khachiyan's multiplicative (Frank-Wolfe) steps, Wolfe-Atwood
/// away steps and pairwise mass transfers, all with exact line search, plus
/// Newton steps on the support once it is small. The points and
/// their reflections give the same moment matrix, so the symmetrised set is
/// handled implicitly. Stops once max_i a_iᵀM⁻¹a_i ≤ K(1+tol), which bounds
/// the gap to the optimal −log det L by K·log(1+tol).
inline Preconditioner mvee_origin(const DenseMatrix& points, const MveeOptions& opts = {}) {
    require_nonempty(points, "mvee_origin");
    require_finite(points, "mvee_origin");
    const Index n = points.rows();
    const Index k = points.cols();
    if (n < k) throw SingularityError("mvee_origin: fewer points than dimensions");
    {
        const Vector sv = Eigen::JacobiSVD<Eigen::MatrixXd>(points).singularValues();
        if (!(sv(k - 1) > kTolerances.rank_relative * sv(0)))
            throw SingularityError("mvee_origin: points do not span the space");
    }
    const double kd = static_cast<double>(k);
    const int cap = opts.max_iterations > 0
                        ? opts.max_iterations
                        : std::max(1000, static_cast<int>(100.0 * kd * std::log(static_cast<double>(n)) + 1));

    Vector u = Vector::Constant(n, 1.0 / static_cast<double>(n));
    const Eigen::MatrixXd pts = points;
    Eigen::MatrixXd moment;

    double violation = 0.0;
    for (int it = 0; it < cap; ++it) {
        moment = pts.transpose() * u.asDiagonal() * pts;
        Eigen::LLT<Eigen::MatrixXd> chol(moment);
        const Eigen::MatrixXd solved = chol.solve(pts.transpose()); // K×n
        const Vector g = pts.cwiseProduct(solved.transpose()).rowwise().sum();

        Index up = 0;
        g.maxCoeff(&up);
        Index down = -1;
        for (Index i = 0; i < n; ++i)
            if (u(i) > 0.0 && (down < 0 || g(i) < g(down))) down = i;

        const double eps_up = g(up) / kd - 1.0;
        violation = eps_up;
        if (violation <= opts.tolerance) return detail::finish_mvee(points, u, moment, it, eps_up);

        // Three candidate moves, each with exact line search; the one with the
        // largest increase of log det M is taken. Gains are closed forms of
        // log det M(step) − log det M.

        // Forward: u ← (1−λ)u + λ e_up.
        const double lambda = (g(up) - kd) / (kd * (g(up) - 1.0));
        const double gain_fwd = (kd - 1.0) * std::log1p(-lambda) + std::log1p(lambda * (g(up) - 1.0));

        // Away: u ← (1+α)u − α e_down, capped so u_down stays nonnegative.
        double alpha = 0.0, gain_away = -1.0;
        if (u(down) < 1.0) {
            const double cap_alpha = u(down) / (1.0 - u(down));
            alpha = cap_alpha;
            if (g(down) > 1.0) alpha = std::min(cap_alpha, (kd - g(down)) / (kd * (g(down) - 1.0)));
            gain_away = (kd - 1.0) * std::log1p(alpha) + std::log1p(alpha * (1.0 - g(down)));
        }

        // Pairwise: move mass t from a supported point `from` to `to`. The
        // candidates pair `up` with every supported point and `down` with
        // every point, which lets near-duplicate points hand over their mass.
        const auto pair_gain = [&](Index to, Index from, double cross, double& t_out) {
            const double curv = g(to) * g(from) - cross * cross;
            double t = u(from);
            if (curv > 0.0) t = std::min(t, (g(to) - g(from)) / (2.0 * curv));
            t_out = t;
            return std::log1p(t * (g(to) - g(from)) - t * t * std::max(curv, 0.0));
        };
        const Vector cross_up = pts * solved.col(up);
        const Vector cross_down = pts * solved.col(down);
        Index pair_to = up, pair_from = down;
        double t = 0.0, gain_pair = -1.0;
        for (Index i = 0; i < n; ++i) {
            double ti = 0.0;
            if (u(i) > 0.0 && g(i) < g(up)) {
                const double gi = pair_gain(up, i, cross_up(i), ti);
                if (gi > gain_pair) {
                    gain_pair = gi;
                    t = ti;
                    pair_to = up;
                    pair_from = i;
                }
            }
            if (g(i) > g(down)) {
                const double gi = pair_gain(i, down, cross_down(i), ti);
                if (gi > gain_pair) {
                    gain_pair = gi;
                    t = ti;
                    pair_to = i;
                    pair_from = down;
                }
            }
        }

        // Newton: constrained Newton step on the weights of the current
        // support (gradient g_S, Hessian −(a_iᵀM⁻¹a_j)², Σ d = 0), with
        // backtracking inside the simplex.
        Vector newton;
        double gain_newton = -1.0;
        std::vector<Index> support;
        for (Index i = 0; i < n; ++i)
            if (u(i) > 0.0) support.push_back(i);
        const auto ns = static_cast<Index>(support.size());
        if (ns > 1 && ns <= detail::kNewtonMaxSupport * k * k) {
            Eigen::MatrixXd kkt = Eigen::MatrixXd::Zero(ns + 1, ns + 1);
            Vector rhs = Vector::Zero(ns + 1);
            for (Index r = 0; r < ns; ++r) {
                const Index i = support[static_cast<std::size_t>(r)];
                for (Index c = 0; c < ns; ++c) {
                    const double gij = pts.row(i).dot(solved.col(support[static_cast<std::size_t>(c)]));
                    kkt(r, c) = -gij * gij;
                }
                kkt(r, ns) = -1.0;
                kkt(ns, r) = 1.0;
                rhs(r) = -g(i);
            }
            const Vector sol = kkt.fullPivLu().solve(rhs);
            if (sol.allFinite() && (kkt * sol - rhs).norm() <= 1e-8 * (1.0 + rhs.norm())) {
                const Vector d = sol.head(ns);
                double step = 1.0;
                for (Index r = 0; r < ns; ++r)
                    if (d(r) < 0.0) step = std::min(step, -u(support[static_cast<std::size_t>(r)]) / d(r));
                const double logdet = 2.0 * Eigen::MatrixXd(chol.matrixL()).diagonal().array().log().sum();
                for (int bt = 0; bt < 30 && step > 0.0; ++bt, step *= 0.5) {
                    Vector trial = u;
                    for (Index r = 0; r < ns; ++r) {
                        const Index i = support[static_cast<std::size_t>(r)];
                        trial(i) = std::max(0.0, trial(i) + step * d(r));
                    }
                    trial /= trial.sum();
                    const Eigen::LLT<Eigen::MatrixXd> tc(pts.transpose() * trial.asDiagonal() * pts);
                    if (tc.info() != Eigen::Success) continue;
                    const double gain = 2.0 * Eigen::MatrixXd(tc.matrixL()).diagonal().array().log().sum() - logdet;
                    if (gain > 0.0) {
                        gain_newton = gain;
                        newton = std::move(trial);
                        break;
                    }
                }
            }
        }

        if (gain_newton > std::max({gain_pair, gain_fwd, gain_away})) {
            u = std::move(newton);
        } else if (gain_pair >= gain_fwd && gain_pair >= gain_away) {
            u(pair_to) += t;
            u(pair_from) = t == u(pair_from) ? 0.0 : u(pair_from) - t;
        } else if (gain_fwd >= gain_away) {
            u *= (1.0 - lambda);
            u(up) += lambda;
        } else {
            const bool drop = alpha == u(down) / (1.0 - u(down));
            u *= (1.0 + alpha);
            u(down) = drop ? 0.0 : u(down) - alpha;
        }
    }
    moment = pts.transpose() * u.asDiagonal() * pts;
    throw MveeIterationLimit("mvee_origin: no convergence after " + std::to_string(cap) + " iterations",
                             detail::finish_mvee(points, u, moment, cap, violation));
}

/// SPA on the rows of m after mapping each row a_i to (L*)^{1/2} a_i.
/// Indices refer to rows of the original m.
inline AnchorIndexSet preconditioned_spa(const DenseMatrix& m, Index r, Preconditioner* out = nullptr,
                                         const MveeOptions& opts = {}) {
    Preconditioner pc = mvee_origin(m, opts);
    const DenseMatrix transformed = m * pc.sqrt_l_star; // sqrt_l_star is symmetric
    AnchorIndexSet j = spa(transformed, r);
    if (out) *out = std::move(pc);
    return j;
}

} // namespace spoc

#endif // SPOC_SPA_HPP
