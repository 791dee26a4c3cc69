#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "spoc/experiment.hpp"
#include "spoc/io.hpp"
#include "spoc/spoc.hpp"
#include "spoc/synth.hpp"

using namespace spoc;

namespace {

std::string temp_path(const std::string& name) {
    return (std::filesystem::temp_directory_path() / ("spoc_test_" + name)).string();
}

} // namespace

TEST(MatrixMarket, ReadsAndSumsDuplicates) {
    std::istringstream in("%%MatrixMarket matrix coordinate integer general\n% comment\n2 3 3\n1 1 2\n2 3 5\n1 1 1\n");
    const DenseMatrix m = io::read_matrix_market(in);
    EXPECT_EQ(m.rows(), 2);
    EXPECT_EQ(m.cols(), 3);
    EXPECT_EQ(m(0, 0), 3.0);
    EXPECT_EQ(m(1, 2), 5.0);
    EXPECT_EQ(m.sum(), 8.0);
}

TEST(MatrixMarket, NegativeCountNamesCell) {
    std::istringstream in("%%MatrixMarket matrix coordinate integer general\n3 3 1\n2 3 -4\n");
    try {
        io::read_matrix_market(in, "corpus.mtx");
        FAIL();
    } catch (const InvalidArgument& e) {
        EXPECT_NE(std::string(e.what()).find("row 2, col 3"), std::string::npos) << e.what();
    }
}

TEST(MatrixMarket, Malformed) {
    auto parse = [](const std::string& s) {
        std::istringstream in(s);
        return io::read_matrix_market(in);
    };
    EXPECT_THROW(parse(""), InvalidArgument);
    EXPECT_THROW(parse("%%MatrixMarket matrix array real general\n1 1\n1\n"), InvalidArgument);
    EXPECT_THROW(parse("%%MatrixMarket matrix coordinate integer general\n2 2 1\n3 1 1\n"), InvalidArgument);
    EXPECT_THROW(parse("%%MatrixMarket matrix coordinate integer general\n2 2 2\n1 1 1\n"), InvalidArgument);
    EXPECT_THROW(parse("%%MatrixMarket matrix coordinate real general\n2 2 1\n1 1 0.5\n"), InvalidArgument);
}

TEST(MatrixMarket, RoundTripFitEqualsInMemoryFit) {
    Rng rng(81, 0);
    Vector alpha(3);
    alpha << 0.1, 0.15, 0.2;
    const TopicModelTruth t = make_truth(gen_w_dirichlet(80, 3, alpha, rng), gen_a_anchor(3, 120, rng));
    const CorpusSample s = sample_corpus(t, 60, rng);
    const DenseMatrix counts = (s.x * 60.0).array().round().matrix();
    const std::string path = temp_path("roundtrip.mtx");
    {
        std::ofstream out(path);
        io::write_matrix_market(out, counts);
    }
    const DenseMatrix back = io::read_count_matrix(path);
    std::remove(path.c_str());
    EXPECT_EQ(back, counts);
    const io::NormalizedCorpus c = io::normalize_counts(back);
    EXPECT_EQ(c.x, s.x);
    EXPECT_DOUBLE_EQ(c.effective_length(), 60.0);
    EXPECT_EQ(fit_w(c.x, 3).w_hat, fit_w(s.x, 3).w_hat);
}

TEST(DenseCsv, ReadAndCountChecks) {
    const std::string path = temp_path("counts.csv");
    {
        std::ofstream out(path);
        out << "# counts\n1,2,0\n0,3,4\n";
    }
    const DenseMatrix m = io::read_count_matrix(path);
    EXPECT_EQ(m.rows(), 2);
    EXPECT_EQ(m(1, 2), 4.0);
    {
        std::ofstream out(path);
        out << "1,2,0\n0,1.5,4\n";
    }
    try {
        io::read_count_matrix(path);
        FAIL();
    } catch (const InvalidArgument& e) {
        EXPECT_NE(std::string(e.what()).find("row 2, col 2"), std::string::npos) << e.what();
    }
    {
        std::ofstream out(path);
        out << "1,2\n0,1,4\n";
    }
    EXPECT_THROW(io::read_count_matrix(path), InvalidArgument);
    std::remove(path.c_str());
    EXPECT_THROW(io::read_count_matrix(path), InvalidArgument);
}

TEST(NormalizeCounts, EmptyDocumentsAndMinimumLength) {
    DenseMatrix c(3, 2);
    c << 3, 1, 0, 0, 1, 1;
    EXPECT_THROW(io::normalize_counts(c), InvalidArgument);
    const io::NormalizedCorpus kept = io::normalize_counts(c, 3);
    EXPECT_EQ(kept.kept, (std::vector<Index>{0}));
    EXPECT_EQ(kept.dropped, (std::vector<Index>{1, 2}));
    EXPECT_EQ(kept.x(0, 0), 0.75);
    EXPECT_THROW(io::normalize_counts(c, 10), InvalidArgument);
    DenseMatrix h(2, 2);
    h << 1, 1, 3, 3;
    EXPECT_DOUBLE_EQ(io::normalize_counts(h).effective_length(), 2.0 / (0.5 + 1.0 / 6.0));
}

TEST(FormatDouble, RoundTrips) {
    for (double v : {0.1, 1.0 / 3.0, 1e-300, 123456789.125, -2.5}) EXPECT_EQ(std::stod(io::format_double(v)), v);
    EXPECT_EQ(io::format_double(0.5), "0.5");
}

TEST(TopWords, TwoTopicExample) {
    DenseMatrix a(2, 2);
    a << 0.9, 0.1, 0.1, 0.9;
    const auto tw = top_words(a, {"alpha", "beta"}, 1);
    ASSERT_EQ(tw.size(), 2u);
    EXPECT_EQ(tw[0].words, (std::vector<std::string>{"alpha"}));
    EXPECT_NEAR(tw[0].scores[0], 0.8, 1e-15);
    EXPECT_EQ(tw[1].words, (std::vector<std::string>{"beta"}));
}

TEST(TopWords, IdenticalRowsTieByIndex) {
    const DenseMatrix a = DenseMatrix::Constant(2, 3, 1.0 / 3.0);
    const auto tw = top_words(a, {"x", "y", "z"}, 3);
    for (const auto& t : tw) {
        EXPECT_EQ(t.word_index, (std::vector<std::size_t>{0, 1, 2}));
        for (double s : t.scores) EXPECT_EQ(s, 0.0);
    }
}

TEST(TopWords, AgreesWithDirectScoring) {
    Rng rng(82, 0);
    const DenseMatrix a = gen_a_anchor(3, 50, rng);
    std::vector<std::string> vocab;
    for (int j = 0; j < 50; ++j) vocab.push_back("w" + std::to_string(j));
    const auto tw = top_words(a, vocab, 7);
    for (Index k = 0; k < 3; ++k) {
        // Score every word, then select the 7 best by repeated linear scans.
        std::vector<double> score(50);
        for (Index j = 0; j < 50; ++j) {
            double other = -1e300;
            for (Index s = 0; s < 3; ++s)
                if (s != k) other = std::max(other, a(s, j));
            score[static_cast<std::size_t>(j)] = a(k, j) - other;
        }
        std::vector<bool> used(50, false);
        for (std::size_t r = 0; r < 7; ++r) {
            std::size_t best = 50;
            for (std::size_t j = 0; j < 50; ++j)
                if (!used[j] && (best == 50 || score[j] > score[best])) best = j;
            used[best] = true;
            EXPECT_EQ(tw[static_cast<std::size_t>(k)].word_index[r], best);
            EXPECT_EQ(tw[static_cast<std::size_t>(k)].scores[r], score[best]);
        }
    }
}

TEST(TopWords, Errors) {
    EXPECT_THROW(top_words(DenseMatrix::Ones(2, 3), {"a", "b"}, 1), InvalidArgument);
    EXPECT_THROW(top_words(DenseMatrix::Ones(2, 2), {"a", "b"}, 0), InvalidArgument);
}
