#include <cmath>

#include <gtest/gtest.h>

#include "spoc/linalg.hpp"
#include "spoc/random.hpp"
#include "spoc/synth.hpp"
#include "spoc/verify.hpp"

using namespace spoc;

namespace {

DenseMatrix gaussian(Index n, Index p, Rng& rng) {
    DenseMatrix m(n, p);
    for (Index i = 0; i < n; ++i)
        for (Index j = 0; j < p; ++j) m(i, j) = rng.normal();
    return m;
}

double orthonormality_gap(const DenseMatrix& q) {
    return (q.transpose() * q - DenseMatrix::Identity(q.cols(), q.cols())).cwiseAbs().maxCoeff();
}

} // namespace

TEST(TruncatedSvd, IdentityHasUnitSpectrumAndIdentityFactors) {
    const SvdResult s = truncated_svd(DenseMatrix::Identity(3, 3), 3);
    EXPECT_TRUE(s.l.isApprox(Vector::Ones(3), 1e-14));
    EXPECT_TRUE(s.u.cwiseAbs().isApprox(DenseMatrix::Identity(3, 3), 1e-12));
    EXPECT_TRUE(s.v.cwiseAbs().isApprox(DenseMatrix::Identity(3, 3), 1e-12));
}

TEST(TruncatedSvd, PaddedDiagonal) {
    DenseMatrix m = DenseMatrix::Zero(3, 5);
    m(0, 0) = 3;
    m(1, 1) = 2;
    m(2, 2) = 1;
    const SvdResult s = truncated_svd(m, 2);
    ASSERT_EQ(s.l.size(), 2);
    EXPECT_NEAR(s.l(0), 3.0, 1e-14);
    EXPECT_NEAR(s.l(1), 2.0, 1e-14);
}

TEST(TruncatedSvd, RankFourProductMatchesJacobiReference) {
    Rng rng(11, 0);
    const DenseMatrix m = gaussian(20, 4, rng) * gaussian(4, 30, rng);
    const SvdResult s = truncated_svd(m, 4);
    EXPECT_LE((s.reconstruct() - m).norm(), 1e-8);
    const Eigen::VectorXd ref = verify::oracle::jacobi_singular_values(m);
    for (Index i = 0; i < 4; ++i) EXPECT_NEAR(s.l(i), ref(i), 1e-10 * ref(0));
}

TEST(TruncatedSvd, FactorsOrthonormalAndSpectrumSorted) {
    Rng rng(12, 0);
    for (int rep = 0; rep < 5; ++rep) {
        const DenseMatrix m = gaussian(40, 25, rng);
        const SvdResult s = truncated_svd(m, 7);
        EXPECT_LE(orthonormality_gap(s.u), 1e-10);
        EXPECT_LE(orthonormality_gap(s.v), 1e-10);
        for (Index i = 0; i < 7; ++i) {
            EXPECT_GE(s.l(i), 0.0);
            if (i > 0) {
                EXPECT_LE(s.l(i), s.l(i - 1));
            }
        }
        // Best rank-k residual equals the tail of the spectrum.
        const Eigen::VectorXd ref = verify::oracle::jacobi_singular_values(m);
        const double tail = ref.tail(ref.size() - 7).norm();
        EXPECT_LE((s.reconstruct() - m).norm(), tail + 1e-8 * m.norm());
    }
}

TEST(TruncatedSvd, RandomizedPathAgreesWithExact) {
    Rng rng(13, 0);
    const DenseMatrix m = gaussian(300, 5, rng) * gaussian(5, 200, rng) + 1e-3 * gaussian(300, 200, rng);
    SvdOptions exact;
    exact.method = SvdMethod::exact;
    SvdOptions randomized;
    randomized.method = SvdMethod::randomized;
    const SvdResult a = truncated_svd(m, 5, exact);
    const SvdResult b = truncated_svd(m, 5, randomized);
    EXPECT_LE((a.l - b.l).cwiseAbs().maxCoeff(), 1e-9 * a.l(0));
    EXPECT_LE(orthonormality_gap(b.u), 1e-10);
    // Same subspace: projector difference.
    EXPECT_LE((a.u * a.u.transpose() - b.u * b.u.transpose()).norm(), 1e-8);
}

TEST(TruncatedSvd, RandomizedPathIsSeedDeterministic) {
    Rng rng(14, 0);
    const DenseMatrix m = gaussian(120, 90, rng);
    SvdOptions o;
    o.method = SvdMethod::randomized;
    const SvdResult a = truncated_svd(m, 4, o);
    const SvdResult b = truncated_svd(m, 4, o);
    EXPECT_EQ(a.u, b.u);
    EXPECT_EQ(a.l, b.l);
}

TEST(TruncatedSvd, ProjectionOntoLeftFactorIsIdempotent) {
    Rng rng(15, 0);
    const DenseMatrix m = gaussian(30, 20, rng);
    const SvdResult s = truncated_svd(m, 5);
    const DenseMatrix proj = s.u * s.u.transpose();
    EXPECT_LE((proj * proj - proj).norm(), 1e-12);
}

TEST(TruncatedSvd, RejectsBadInput) {
    DenseMatrix m = DenseMatrix::Ones(3, 3);
    EXPECT_THROW(truncated_svd(m, 0), InvalidArgument);
    EXPECT_THROW(truncated_svd(m, 4), InvalidArgument);
    m(1, 1) = std::nan("");
    EXPECT_THROW(truncated_svd(m, 1), InvalidArgument);
    EXPECT_THROW(truncated_svd(DenseMatrix(0, 0), 1), InvalidArgument);
}

TEST(SpectralNorm, ZeroAndDiagonal) {
    EXPECT_EQ(spectral_norm(DenseMatrix::Zero(4, 3)), 0.0);
    DenseMatrix d = DenseMatrix::Zero(2, 2);
    d(0, 0) = 5;
    d(1, 1) = 1;
    EXPECT_NEAR(spectral_norm(d), 5.0, 1e-14);
}

TEST(SpectralNorm, EqualsLeadingSingularValue) {
    Rng rng(16, 0);
    const DenseMatrix m = gaussian(10, 10, rng);
    EXPECT_NEAR(spectral_norm(m), truncated_svd(m, 1).l(0), 1e-9);
}

TEST(SpectralNorm, WeylInequality) {
    Rng rng(17, 0);
    for (int rep = 0; rep < 10; ++rep) {
        const DenseMatrix a = gaussian(15, 12, rng);
        const DenseMatrix e = 0.1 * gaussian(15, 12, rng);
        const Vector la = singular_values(a, 12);
        const Vector lb = singular_values(a + e, 12);
        const double bound = spectral_norm(e);
        for (Index i = 0; i < 12; ++i) EXPECT_LE(std::abs(la(i) - lb(i)), bound + 1e-12);
    }
}

TEST(Norms, SmallCases) {
    MatrixNorms n = norms(DenseMatrix::Identity(2, 2));
    EXPECT_NEAR(n.fro, std::sqrt(2.0), 1e-15);
    EXPECT_EQ(n.l1, 2.0);
    EXPECT_EQ(n.l1_inf, 1.0);
    DenseMatrix m(2, 2);
    m << 1, -1, 2, 0;
    n = norms(m);
    EXPECT_NEAR(n.fro, std::sqrt(6.0), 1e-15);
    EXPECT_EQ(n.l1, 4.0);
    EXPECT_EQ(n.l1_inf, 2.0);
}

TEST(Norms, RowStochastic) {
    Rng rng(18, 0);
    const DenseMatrix w = gen_w_uniform(50, 4, rng);
    const MatrixNorms n = norms(w);
    EXPECT_NEAR(n.l1, 50.0, 1e-12);
    EXPECT_NEAR(n.l1_inf, 1.0, 1e-12);
}

TEST(ConditionNumber, SimpleCases) {
    EXPECT_NEAR(condition_number(DenseMatrix::Identity(4, 4), 4), 1.0, 1e-14);
    DenseMatrix d = DenseMatrix::Zero(2, 2);
    d(0, 0) = 4;
    d(1, 1) = 2;
    EXPECT_NEAR(condition_number(d, 2), 2.0, 1e-14);
}

TEST(ConditionNumber, MatchesReferenceOnGeneratedW) {
    Rng rng(19, 0);
    Vector alpha(3);
    alpha << 0.1, 0.15, 0.2;
    const DenseMatrix w = gen_w_dirichlet(30, 3, alpha, rng);
    const Eigen::VectorXd ref = verify::oracle::jacobi_singular_values(w);
    EXPECT_NEAR(condition_number(w, 3), ref(0) / ref(2), 1e-9);
}

TEST(ConditionNumber, RankDeficientThrows) {
    EXPECT_THROW(condition_number(DenseMatrix::Ones(3, 3), 2), SingularityError);
}
