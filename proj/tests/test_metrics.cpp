#include <cmath>
#include <numeric>

#include <gtest/gtest.h>

#include "spoc/metrics.hpp"
#include "spoc/synth.hpp"
#include "spoc/verify.hpp"

using namespace spoc;

namespace {

DenseMatrix uniform(Index n, Index k, Rng& rng) {
    DenseMatrix m(n, k);
    for (Index i = 0; i < n; ++i)
        for (Index j = 0; j < k; ++j) m(i, j) = rng.uniform();
    return m;
}

DenseMatrix random_orthogonal(Index k, Rng& rng) {
    Eigen::MatrixXd g(k, k);
    for (Index i = 0; i < k; ++i)
        for (Index j = 0; j < k; ++j) g(i, j) = rng.normal();
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
    return qr.householderQ();
}

} // namespace

TEST(PermMinError, Identical) {
    Rng rng(61, 0);
    const DenseMatrix w = uniform(10, 3, rng);
    const ErrorReport r = perm_min_error(w, w);
    EXPECT_EQ(r.fro, 0.0);
    EXPECT_EQ(r.l1, 0.0);
    EXPECT_EQ(r.l1_inf, 0.0);
    EXPECT_EQ(r.permutation, (std::vector<Index>{0, 1, 2}));
    EXPECT_TRUE(r.exact);
}

TEST(PermMinError, SwappedColumns) {
    Rng rng(62, 0);
    const DenseMatrix w = uniform(10, 3, rng);
    DenseMatrix s = w;
    s.col(0).swap(s.col(2));
    for (ErrorNorm n : {ErrorNorm::fro, ErrorNorm::l1, ErrorNorm::l1_inf}) {
        const ErrorReport r = perm_min_error(s, w, n);
        EXPECT_EQ(r.value(), 0.0);
        EXPECT_EQ(r.permutation, (std::vector<Index>{2, 1, 0}));
    }
}

TEST(PermMinError, MatchesBruteForce) {
    for (std::uint64_t rep = 0; rep < 30; ++rep) {
        Rng rng(63, rep);
        const Index k = 1 + static_cast<Index>(rep % 6);
        const DenseMatrix a = uniform(8, k, rng), b = uniform(8, k, rng);
        for (ErrorNorm n : {ErrorNorm::fro, ErrorNorm::l1, ErrorNorm::l1_inf})
            EXPECT_NEAR(perm_min_error(a, b, n).value(), verify::oracle::brute_force_perm_error(a, b, n), 1e-12);
    }
}

TEST(PermMinError, ReportInvariants) {
    Rng rng(64, 0);
    for (Index k : {2, 5, 9, 12}) {
        const DenseMatrix a = uniform(15, k, rng), b = uniform(15, k, rng);
        const ErrorReport r = perm_min_error(a, b, ErrorNorm::l1);
        std::vector<Index> seen = r.permutation;
        std::sort(seen.begin(), seen.end());
        std::vector<Index> expect(static_cast<std::size_t>(k));
        std::iota(expect.begin(), expect.end(), Index{0});
        EXPECT_EQ(seen, expect);
        EXPECT_GE(r.fro, 0.0);
        EXPECT_GE(r.l1_inf, 0.0);
        EXPECT_LE(r.l1, std::sqrt(static_cast<double>(k * 15)) * r.fro + 1e-9);
        EXPECT_LE(r.l1_inf, r.l1 + 1e-12);
    }
}

TEST(PermMinError, HungarianAgreesWithExhaustiveAboveCutoff) {
    // For fro and l1 the cost is additive over matched columns, so the
    // assignment solver is exact for any K; compare at K = 9 against
    // enumeration.
    Rng rng(65, 0);
    const DenseMatrix a = uniform(12, 9, rng), b = uniform(12, 9, rng);
    for (ErrorNorm n : {ErrorNorm::fro, ErrorNorm::l1}) {
        const ErrorReport r = perm_min_error(a, b, n);
        EXPECT_TRUE(r.exact);
        EXPECT_NEAR(r.value(), verify::oracle::brute_force_perm_error(a, b, n), 1e-12);
    }
    const ErrorReport inf = perm_min_error(a, b, ErrorNorm::l1_inf);
    EXPECT_FALSE(inf.exact);
    EXPECT_GE(inf.value() + 1e-12, verify::oracle::brute_force_perm_error(a, b, ErrorNorm::l1_inf));
}

TEST(PermMinError, TriangleInequality) {
    Rng rng(66, 0);
    for (int rep = 0; rep < 20; ++rep) {
        const DenseMatrix a = uniform(7, 4, rng), b = uniform(7, 4, rng), c = uniform(7, 4, rng);
        EXPECT_LE(perm_min_error(a, c).fro, perm_min_error(a, b).fro + perm_min_error(b, c).fro + 1e-12);
    }
}

TEST(PermMinError, Errors) {
    EXPECT_THROW(perm_min_error(DenseMatrix::Ones(3, 2), DenseMatrix::Ones(3, 3)), InvalidArgument);
}

TEST(MinCostAssignment, SmallKnownCase) {
    Eigen::MatrixXd c(3, 3);
    c << 4, 1, 3, 2, 0, 5, 3, 2, 2;
    EXPECT_EQ(min_cost_assignment(c), (std::vector<Index>{1, 0, 2}));
}

TEST(Procrustes, IdentityAndRotation) {
    Rng rng(67, 0);
    DenseMatrix g(20, 4);
    for (Index i = 0; i < 20; ++i)
        for (Index j = 0; j < 4; ++j) g(i, j) = rng.normal();
    const DenseMatrix u = Eigen::HouseholderQR<Eigen::MatrixXd>(g).householderQ() * Eigen::MatrixXd::Identity(20, 4);
    EXPECT_LE((procrustes_align(u, u) - DenseMatrix::Identity(4, 4)).norm(), 1e-10);
    for (int rep = 0; rep < 10; ++rep) {
        const DenseMatrix r = random_orthogonal(4, rng);
        EXPECT_LE((procrustes_align(u * r, u) - r).cwiseAbs().maxCoeff(), 1e-10);
    }
}

TEST(Procrustes, OptimalAmongOrthogonalMatrices) {
    Rng rng(68, 0);
    DenseMatrix a(15, 3), b(15, 3);
    for (Index i = 0; i < 15; ++i)
        for (Index j = 0; j < 3; ++j) {
            a(i, j) = rng.normal();
            b(i, j) = rng.normal();
        }
    const DenseMatrix o = procrustes_align(a, b);
    EXPECT_LE((o.transpose() * o - DenseMatrix::Identity(3, 3)).norm(), 1e-12);
    const double best = (a - b * o).norm();
    for (int rep = 0; rep < 500; ++rep) EXPECT_LE(best, (a - b * random_orthogonal(3, rng)).norm() + 1e-12);
}

TEST(Beta, ZeroNoise) {
    Rng rng(69, 0);
    const TopicModelTruth t = make_truth(gen_w_uniform(20, 3, rng), gen_a_anchor(3, 15, rng));
    EXPECT_EQ(beta(t.pi, t.pi, 3).beta, 0.0);
}

TEST(Beta, HandEvaluatedTwoByTwo) {
    const DenseMatrix pi = DenseMatrix::Identity(2, 2);
    DenseMatrix x = pi;
    x(0, 0) += 0.1;
    // κ(Π) = λ_K(Π) = 1 and ‖X − Π‖ = 0.1:
    // β₀ = √2·1.1·0.1 + 0.1, β₁ = √2·1·0.1.
    const BoundInputs b = beta(x, pi, 2);
    ASSERT_EQ(b.beta_rows.size(), 2u);
    EXPECT_NEAR(b.beta_rows[0], std::sqrt(2.0) * 0.11 + 0.1, 1e-12);
    EXPECT_NEAR(b.beta_rows[1], std::sqrt(2.0) * 0.1, 1e-12);
    EXPECT_NEAR(b.beta, b.beta_rows[0], 0.0);
}

// N ≈ 70·K⁵·log(n+p); β ≤ 1/(λ₁(W)κ(W)K√K) with the constant set to one.
TEST(Beta, SmallAtLargeDocumentLength) {
    const Index n = 60, k = 2, p = 30, n_words = 10000;
    Rng rng(71, 0);
    int held = 0;
    for (int t = 0; t < 50; ++t) {
        const TopicModelTruth truth =
            make_truth(gen_w_dirichlet(n, k, Vector::Constant(k, 0.3), rng), lower_bound_topic_matrix(k, p, n_words), false);
        const CorpusSample s = sample_corpus(truth, n_words, rng);
        const Vector lw = singular_values(truth.w, k);
        const double bound = 1.0 / (lw(0) * (lw(0) / lw(k - 1)) * k * std::sqrt(static_cast<double>(k)));
        held += beta(s.x, truth.pi, k).beta <= bound;
    }
    EXPECT_GE(held, 48);
}

TEST(Beta, RankDeficientThrows) {
    EXPECT_THROW(beta(DenseMatrix::Ones(3, 3), DenseMatrix::Ones(3, 3), 2), SingularityError);
}

TEST(Delta, Examples) {
    EXPECT_NEAR(delta(DenseMatrix::Identity(3, 3), DenseMatrix::Identity(3, 3), 3), 1.0, 1e-14);
    DenseMatrix w = DenseMatrix::Zero(2, 2), pi = DenseMatrix::Zero(2, 2);
    w(0, 0) = 2;
    w(1, 1) = 1;
    pi(0, 0) = 4;
    pi(1, 1) = 2;
    EXPECT_NEAR(delta(w, pi, 2), 8.0, 1e-12);
}

TEST(Delta, BoundedAcrossDocumentCounts) {
    // The lower-bound fixture is balanced: κ(W) ≤ 3 and A close to orthogonal.
    for (Index n : {250, 500, 1000, 2000}) {
        const TopicModelTruth t = lower_bound_fixture(n, 2, 40, 200);
        EXPECT_LE(delta(t.w, t.pi, 2), 10.0) << "n = " << n;
    }
}

TEST(ConcentrationThreshold, Formula) {
    EXPECT_NEAR(concentration_threshold(1, 1, 1.0), 4.0 * std::sqrt(std::log(2.0)), 1e-15);
    EXPECT_EQ(concentration_threshold(10, 10, 5.0, 0.0), 0.0);
    EXPECT_NEAR(concentration_threshold(200, 500, 100.0), 4.0 * std::sqrt(200.0 * std::log(700.0) / 100.0), 1e-12);
    EXPECT_THROW(concentration_threshold(0, 1, 1.0), InvalidArgument);
}

TEST(FroBoundShape, Scaling) {
    const double base = fro_bound_shape(3, 1000, 5000, 200.0, 1.0);
    EXPECT_NEAR(base, 3.0 * std::sqrt(1000.0 * std::log(6000.0) / 200.0), 1e-12);
    // Doubling n also moves log(n+p), so compare with p adjusted to keep n+p fixed.
    EXPECT_NEAR(fro_bound_shape(3, 2000, 4000, 200.0, 1.0) / base, std::sqrt(2.0), 1e-12);
    EXPECT_NEAR(fro_bound_shape(3, 1000, 5000, 800.0, 1.0) / base, 0.5, 1e-12);
    EXPECT_NEAR(fro_bound_shape(3, 1000, 5000, 200.0, 2.5) / base, 2.5, 1e-12);
}

TEST(ErrorNormNames, RoundTrip) {
    for (ErrorNorm n : {ErrorNorm::fro, ErrorNorm::l1, ErrorNorm::l1_inf}) EXPECT_EQ(parse_error_norm(to_string(n)), n);
    EXPECT_THROW(parse_error_norm("max"), InvalidArgument);
}
