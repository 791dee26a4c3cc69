#ifndef SPOC_SYNTH_HPP
#define SPOC_SYNTH_HPP

#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "spoc/errors.hpp"
#include "spoc/linalg.hpp"
#include "spoc/random.hpp"

namespace spoc {

/// Ground truth (W, A, Π = W·A) with anchor bookkeeping.
struct TopicModelTruth {
    DenseMatrix w;  ///< n×K, row-stochastic
    DenseMatrix a;  ///< K×p, row-stochastic
    DenseMatrix pi; ///< n×p
    std::vector<Index> anchor_docs;
    std::vector<Index> anchor_words; ///< empty when A has no pure anchor words

    [[nodiscard]] Index n() const { return w.rows(); }
    [[nodiscard]] Index k() const { return w.cols(); }
    [[nodiscard]] Index p() const { return a.cols(); }
};

/// Observed frequencies X (rows of counts / N) and the per-document length.
struct CorpusSample {
    DenseMatrix x;
    Index n_words = 0;
};

namespace detail {

inline bool rows_stochastic(const DenseMatrix& m, double tol) {
    if ((m.array() < 0.0).any()) return false;
    for (Index i = 0; i < m.rows(); ++i)
        if (std::abs(m.row(i).sum() - 1.0) > tol) return false;
    return true;
}

inline void normalize_row(DenseMatrix& m, Index i) { m.row(i) /= m.row(i).sum(); }

} // namespace detail

/// Checks stochasticity of W and A, Π = W·A and the recorded anchor rows.
inline void validate_truth(const TopicModelTruth& t, double tol = 1e-12) {
    if (t.w.cols() != t.a.rows() || t.pi.rows() != t.w.rows() || t.pi.cols() != t.a.cols())
        throw InvalidArgument("truth: dimension mismatch between W, A and Π");
    if (!t.w.allFinite() || !t.a.allFinite() || !t.pi.allFinite())
        throw InvalidArgument("truth: non-finite entries");
    if (!detail::rows_stochastic(t.w, tol)) throw InvalidArgument("truth: W is not row-stochastic");
    if (!detail::rows_stochastic(t.a, tol)) throw InvalidArgument("truth: A is not row-stochastic");
    if (((t.w * t.a) - t.pi).cwiseAbs().maxCoeff() > tol) throw InvalidArgument("truth: Π differs from W·A");
    for (std::size_t k = 0; k < t.anchor_docs.size(); ++k) {
        const Index i = t.anchor_docs[k];
        if (i < 0 || i >= t.w.rows()) throw InvalidArgument("truth: anchor document out of range");
        for (Index j = 0; j < t.w.cols(); ++j)
            if (t.w(i, j) != (static_cast<std::size_t>(j) == k ? 1.0 : 0.0))
                throw InvalidArgument("truth: anchor document " + std::to_string(i) + " is not a basis vector");
    }
}

/// One Dirichlet(alpha) draw, built from normalised Gamma(alpha_k) variates.
inline Vector dirichlet_sample(const Vector& alpha, Rng& rng) {
    if (alpha.size() == 0) throw InvalidArgument("dirichlet_sample: empty parameter");
    for (Index k = 0; k < alpha.size(); ++k)
        if (!(alpha(k) > 0.0) || !std::isfinite(alpha(k)))
            throw InvalidArgument("dirichlet_sample: parameters must be positive");
    Vector g(alpha.size());
    double total = 0.0;
    do {
        for (Index k = 0; k < alpha.size(); ++k) g(k) = rng.gamma(alpha(k));
        total = g.sum();
    } while (!(total > 0.0)); // every component underflowed; redraw
    return g / total;
}

namespace detail {

inline void require_shape(Index n, Index k, const char* where) {
    if (k < 2) throw InvalidArgument(std::string(where) + ": K must be at least 2");
    if (n < k) throw InvalidArgument(std::string(where) + ": need n >= K");
}

} // namespace detail

/// W with rows 0..K−1 equal to I_K and the rest i.i.d. Dirichlet(alpha).
inline DenseMatrix gen_w_dirichlet(Index n, Index k, const Vector& alpha, Rng& rng) {
    detail::require_shape(n, k, "gen_w_dirichlet");
    if (alpha.size() != k) throw InvalidArgument("gen_w_dirichlet: alpha must have K components");
    DenseMatrix w = DenseMatrix::Zero(n, k);
    w.topRows(k).setIdentity();
    for (Index i = k; i < n; ++i) w.row(i) = dirichlet_sample(alpha, rng).transpose();
    return w;
}

/// W with rows 0..K−1 equal to I_K and the rest uniform on [0,1] then normalised.
inline DenseMatrix gen_w_uniform(Index n, Index k, Rng& rng) {
    detail::require_shape(n, k, "gen_w_uniform");
    DenseMatrix w = DenseMatrix::Zero(n, k);
    w.topRows(k).setIdentity();
    for (Index i = k; i < n; ++i) {
        do {
            for (Index j = 0; j < k; ++j) w(i, j) = rng.uniform();
        } while (!(w.row(i).sum() > 0.0));
        detail::normalize_row(w, i);
    }
    return w;
}

enum class AnchorWordStyle {
    /// Anchor entries drawn uniform like every other entry, then each row
    /// normalised as a whole.
    proportional,
    /// Anchor entry of topic k is U_k ~ Unif[0,1]; the non-anchor part of
    /// the row is normalised to 1 − U_k.
    scaled,
};

/// K×p topic-word matrix whose first K columns are anchor words (column k
/// is nonzero only in row k).
inline DenseMatrix gen_a_anchor(Index k, Index p, Rng& rng,
                                AnchorWordStyle style = AnchorWordStyle::proportional) {
    if (k < 2) throw InvalidArgument("gen_a_anchor: K must be at least 2");
    if (p < k) throw InvalidArgument("gen_a_anchor: need p >= K");
    DenseMatrix a = DenseMatrix::Zero(k, p);
    for (Index t = 0; t < k; ++t) {
        const double anchor = rng.uniform_open0();
        for (Index j = k; j < p; ++j) a(t, j) = rng.uniform();
        if (style == AnchorWordStyle::proportional || p == k) {
            a(t, t) = anchor;
            detail::normalize_row(a, t);
        } else {
            const double rest = a.row(t).sum();
            if (rest > 0.0) {
                a.row(t) *= (1.0 - anchor) / rest;
                a(t, t) = anchor;
            } else {
                a(t, t) = 1.0;
            }
        }
    }
    return a;
}

/// Assemble a truth from W and A; anchors documents are the rows of W that
/// are canonical basis vectors, taken as the first K rows.
inline TopicModelTruth make_truth(DenseMatrix w, DenseMatrix a, bool anchor_words_first = true) {
    TopicModelTruth t;
    t.pi = w * a;
    t.w = std::move(w);
    t.a = std::move(a);
    const Index k = t.w.cols();
    t.anchor_docs.resize(static_cast<std::size_t>(k));
    std::iota(t.anchor_docs.begin(), t.anchor_docs.end(), Index{0});
    if (anchor_words_first) {
        t.anchor_words.resize(static_cast<std::size_t>(k));
        std::iota(t.anchor_words.begin(), t.anchor_words.end(), Index{0});
    }
    return t;
}

/// Permute documents uniformly at random; W, Π and anchor_docs follow.
inline TopicModelTruth shuffle_documents(const TopicModelTruth& t, Rng& rng, std::vector<Index>* order = nullptr) {
    const Index n = t.n();
    std::vector<Index> perm(static_cast<std::size_t>(n));
    std::iota(perm.begin(), perm.end(), Index{0});
    for (Index i = n - 1; i > 0; --i) {
        const auto j = static_cast<Index>(rng.below(static_cast<std::uint64_t>(i + 1)));
        std::swap(perm[static_cast<std::size_t>(i)], perm[static_cast<std::size_t>(j)]);
    }
    // Row r of the result is row perm[r] of the input.
    TopicModelTruth out = t;
    std::vector<Index> where(static_cast<std::size_t>(n));
    for (Index r = 0; r < n; ++r) {
        out.w.row(r) = t.w.row(perm[static_cast<std::size_t>(r)]);
        out.pi.row(r) = t.pi.row(perm[static_cast<std::size_t>(r)]);
        where[static_cast<std::size_t>(perm[static_cast<std::size_t>(r)])] = r;
    }
    for (auto& d : out.anchor_docs) d = where[static_cast<std::size_t>(d)];
    if (order) *order = std::move(perm);
    return out;
}

/// Walker/Vose alias table for O(1) categorical draws.
class AliasTable {
  public:
    template <typename Row> explicit AliasTable(const Row& probs) {
        const auto m = static_cast<std::size_t>(probs.size());
        prob_.assign(m, 0.0);
        alias_.assign(m, 0);
        double total = 0.0;
        for (std::size_t j = 0; j < m; ++j) total += probs(static_cast<Index>(j));
        std::vector<double> scaled(m);
        std::vector<std::size_t> small, large;
        for (std::size_t j = 0; j < m; ++j) {
            scaled[j] = probs(static_cast<Index>(j)) * static_cast<double>(m) / total;
            (scaled[j] < 1.0 ? small : large).push_back(j);
        }
        while (!small.empty() && !large.empty()) {
            const std::size_t s = small.back();
            small.pop_back();
            const std::size_t l = large.back();
            prob_[s] = scaled[s];
            alias_[s] = l;
            scaled[l] = (scaled[l] + scaled[s]) - 1.0;
            if (scaled[l] < 1.0) {
                large.pop_back();
                small.push_back(l);
            }
        }
        for (std::size_t j : large) prob_[j] = 1.0;
        // Leftovers in `small` are rounding artefacts of mass ~1, except
        // zero-probability cells, which must alias to a live category.
        std::size_t heaviest = 0;
        for (std::size_t j = 1; j < m; ++j)
            if (probs(static_cast<Index>(j)) > probs(static_cast<Index>(heaviest))) heaviest = j;
        for (std::size_t j : small) {
            prob_[j] = scaled[j] > 0.0 ? 1.0 : 0.0;
            alias_[j] = heaviest;
        }
    }

    std::size_t draw(Rng& rng) const {
        const auto j = static_cast<std::size_t>(rng.below(prob_.size()));
        return rng.uniform() < prob_[j] ? j : alias_[j];
    }

  private:
    std::vector<double> prob_;
    std::vector<std::size_t> alias_;
};

/// Draw N words per document: N·X_i ~ Multinomial(N, Π_i), realised as N
/// independent categorical draws.
inline CorpusSample sample_corpus(const TopicModelTruth& truth, Index n_words, Rng& rng) {
    if (n_words < 1) throw InvalidArgument("sample_corpus: n_words must be at least 1");
    if (truth.pi.rows() == 0 || truth.pi.cols() == 0) throw InvalidArgument("sample_corpus: empty truth");
    if (!truth.pi.allFinite() || (truth.pi.array() < 0.0).any())
        throw InvalidArgument("sample_corpus: Π must be finite and nonnegative");
    CorpusSample out;
    out.n_words = n_words;
    out.x = DenseMatrix::Zero(truth.pi.rows(), truth.pi.cols());
    const double nw = static_cast<double>(n_words);
    std::vector<Index> counts(static_cast<std::size_t>(truth.pi.cols()));
    for (Index i = 0; i < truth.pi.rows(); ++i) {
        if (!(truth.pi.row(i).sum() > 0.0)) throw InvalidArgument("sample_corpus: Π has an all-zero row");
        const AliasTable table(truth.pi.row(i));
        std::fill(counts.begin(), counts.end(), 0);
        for (Index m = 0; m < n_words; ++m) ++counts[table.draw(rng)];
        for (Index j = 0; j < truth.pi.cols(); ++j)
            if (counts[static_cast<std::size_t>(j)] != 0)
                out.x(i, j) = static_cast<double>(counts[static_cast<std::size_t>(j)]) / nw;
    }
    return out;
}

/// A = ((N−K)/N)·A⁰ + (K/(pN))·𝟙 where A⁰ puts a single 1 in column k·p/K of
/// row k. Every row carries one dominant word, so λ_K(A) stays near one.
inline DenseMatrix lower_bound_topic_matrix(Index k, Index p, Index n_words) {
    if (k < 2 || p % k != 0 || n_words <= k)
        throw InvalidArgument("lower_bound_topic_matrix: need K >= 2, p a multiple of K and N > K");
    const double kd = static_cast<double>(k);
    const double nw = static_cast<double>(n_words);
    DenseMatrix a = DenseMatrix::Constant(k, p, kd / (static_cast<double>(p) * nw));
    const Index block = p / k;
    for (Index t = 0; t < k; ++t) a(t, t * block) += (nw - kd) / nw;
    return a;
}

/// Deterministic base instance of the minimax lower-bound construction.
///
/// W⁽⁰⁾: rows 0..K−1 are I_K, row i ≥ K is (1 − Kγ₁)e_{i mod K} + γ₁𝟙 with
/// γ₁ = 1/(4K); A comes from lower_bound_topic_matrix.
inline TopicModelTruth lower_bound_fixture(Index n, Index k, Index p, Index n_words) {
    if (k < 2 || k % 2 != 0) throw InvalidArgument("lower_bound_fixture: K must be even and at least 2");
    if (n % k != 0) throw InvalidArgument("lower_bound_fixture: n must be a multiple of K");
    if (p % k != 0) throw InvalidArgument("lower_bound_fixture: p must be a multiple of K");
    if (4 * k > p || 2 * k > n_words || 2 * k > n)
        throw InvalidArgument("lower_bound_fixture: need K <= min(p/4, N/2, n/2)");

    const double kd = static_cast<double>(k);
    const double gamma1 = 1.0 / (4.0 * kd);
    DenseMatrix w = DenseMatrix::Zero(n, k);
    w.topRows(k).setIdentity();
    for (Index i = k; i < n; ++i) {
        w.row(i).setConstant(gamma1);
        w(i, i % k) += 1.0 - kd * gamma1;
    }

    return make_truth(std::move(w), lower_bound_topic_matrix(k, p, n_words), false);
}

} // namespace spoc

#endif // SPOC_SYNTH_HPP
