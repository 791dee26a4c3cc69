#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "spoc/experiment.hpp"
#include "spoc/io.hpp"
#include "spoc/spoc.hpp"
#include "spoc/verify.hpp"

namespace {

using json = nlohmann::ordered_json;

constexpr int kOk = 0;
constexpr int kInputError = 1;
constexpr int kVerifyFailed = 2;

json matrix_json(const spoc::DenseMatrix& m) {
    json rows = json::array();
    for (spoc::Index i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (spoc::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        rows.push_back(std::move(row));
    }
    return rows;
}

spoc::DenseMatrix matrix_from_json(const json& rows, const std::string& where) {
    if (!rows.is_array() || rows.empty() || !rows[0].is_array())
        throw spoc::InvalidArgument(where + ": expected a nonempty array of rows");
    const auto n = static_cast<spoc::Index>(rows.size());
    const auto p = static_cast<spoc::Index>(rows[0].size());
    spoc::DenseMatrix m(n, p);
    for (spoc::Index i = 0; i < n; ++i) {
        const json& row = rows[static_cast<std::size_t>(i)];
        if (!row.is_array() || static_cast<spoc::Index>(row.size()) != p)
            throw spoc::InvalidArgument(where + ": ragged row " + std::to_string(i + 1));
        for (spoc::Index j = 0; j < p; ++j) m(i, j) = row[static_cast<std::size_t>(j)].get<double>();
    }
    return m;
}

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw spoc::InvalidArgument("cannot write '" + path + "'");
    return out;
}

void write_text(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text;
    } else {
        open_out(path) << text;
    }
}

std::vector<spoc::Index> parse_values(const std::string& s) {
    std::vector<spoc::Index> out;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        try {
            std::size_t used = 0;
            const long long v = std::stoll(tok, &used);
            if (used != tok.size()) throw std::invalid_argument(tok);
            out.push_back(static_cast<spoc::Index>(v));
        } catch (const std::exception&) {
            throw spoc::InvalidArgument("--values: cannot parse '" + tok + "' as an integer");
        }
    }
    return out;
}

std::vector<std::string> split(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ',')) out.push_back(tok);
    return out;
}

std::optional<std::uint64_t> env_seed() {
    const char* v = std::getenv("SPOC_SEED");
    if (!v || !*v) return std::nullopt;
    try {
        std::size_t used = 0;
        const unsigned long long s = std::stoull(v, &used);
        if (used != std::string(v).size()) throw std::invalid_argument(v);
        return s;
    } catch (const std::exception&) {
        throw spoc::InvalidArgument(std::string("SPOC_SEED: cannot parse '") + v + "'");
    }
}

struct SweepArgs {
    std::string preset, sweep, values, alpha, estimator = "spoc", metrics = "fro", out = "-", summary;
    std::optional<long long> n, p, N, K;
    bool uniform = false, scaled = false, preconditioned = false, clip = false, timing = false;
    long long trials = 10;
    std::uint64_t seed = 42;
    double threshold_const = 4.0;
    int jobs = 1;
};

int run_sweep(const SweepArgs& a, CLI::App& cmd) {
    spoc::ExperimentConfig cfg = a.preset.empty() ? spoc::ExperimentConfig{} : spoc::preset(a.preset);
    if (!a.sweep.empty()) cfg.sweep_variable = spoc::parse_sweep_variable(a.sweep);
    if (!a.values.empty()) cfg.sweep_values = parse_values(a.values);
    if (a.n) cfg.fixed.n = *a.n;
    if (a.p) cfg.fixed.p = *a.p;
    if (a.N) cfg.fixed.N = *a.N;
    if (a.K) cfg.fixed.K = *a.K;
    if (a.uniform) cfg.uniform_w = true;
    if (!a.alpha.empty()) {
        cfg.alpha.clear();
        for (const auto& t : split(a.alpha)) cfg.alpha.push_back(std::stod(t));
    }
    if (a.scaled) cfg.anchor_style = spoc::AnchorWordStyle::scaled;
    cfg.trials = a.trials;
    cfg.seed = {env_seed().value_or(a.seed), 0};
    cfg.estimator = spoc::parse_estimator(a.estimator);
    if (cmd.count("--preconditioned") && cfg.estimator == spoc::Estimator::spoc)
        cfg.estimator = spoc::Estimator::spoc_preconditioned;
    if (cmd.count("--no-preconditioned") && cfg.estimator == spoc::Estimator::spoc_preconditioned)
        cfg.estimator = spoc::Estimator::spoc;
    cfg.metrics = split(a.metrics);
    cfg.clip = a.clip;
    cfg.threshold_const = a.threshold_const;
    cfg.jobs = a.jobs;
    cfg.record_timing = a.timing;

    const spoc::RunRecord rec = spoc::run_experiment(cfg);
    std::ostringstream csv;
    spoc::write_sweep_csv(csv, rec);
    write_text(a.out, csv.str());
    if (!a.summary.empty()) {
        std::ostringstream s;
        spoc::write_summary_csv(s, rec);
        write_text(a.summary, s.str());
    }
    return kOk;
}

struct FitArgs {
    std::string matrix, vocab, out = "-", w_csv, a_csv;
    std::optional<long long> k;
    double min_words = 0.0, threshold_const = 4.0;
    bool clip = false, preconditioned = false;
    std::uint64_t seed = 0x5eed;
    long long top = 10;
};

int run_fit(const FitArgs& a) {
    const spoc::DenseMatrix counts = spoc::io::read_count_matrix(a.matrix);
    std::vector<std::string> vocab;
    if (!a.vocab.empty()) {
        vocab = spoc::io::read_vocab(a.vocab);
        if (static_cast<spoc::Index>(vocab.size()) != counts.cols())
            throw spoc::InvalidArgument(a.vocab + ": " + std::to_string(vocab.size()) + " tokens but the matrix has " +
                                        std::to_string(counts.cols()) + " columns");
    }
    const spoc::io::NormalizedCorpus corpus = spoc::io::normalize_counts(counts, a.min_words);
    if (!corpus.dropped.empty())
        std::cerr << "warning: dropped " << corpus.dropped.size() << " document(s) with fewer than " << a.min_words
                  << " words\n";

    spoc::SpocOptions opts;
    opts.preconditioned = a.preconditioned;
    opts.clip_to_simplex = a.clip;
    opts.threshold_const = a.threshold_const;
    opts.svd.seed = {env_seed().value_or(a.seed), 0};
    const double n_words = corpus.effective_length();
    const spoc::SpocEstimate est =
        a.k ? spoc::fit_w(corpus.x, *a.k, opts) : spoc::fit_adaptive(corpus.x, n_words, opts);

    json j;
    j["n_documents"] = corpus.x.rows();
    j["n_words_vocab"] = corpus.x.cols();
    j["k"] = est.k_used;
    j["k_mode"] = a.k ? "fixed" : "adaptive";
    j["effective_doc_length"] = n_words;
    j["preconditioned"] = est.preconditioned;
    j["clipped"] = est.clipped;
    json anchors = json::array();
    for (spoc::Index i : est.anchors.indices) anchors.push_back(corpus.kept[static_cast<std::size_t>(i)]);
    j["anchor_documents"] = anchors;
    j["kept_documents"] = corpus.kept;
    j["dropped_documents"] = corpus.dropped;
    j["singular_values"] = std::vector<double>(est.l_hat.data(), est.l_hat.data() + est.l_hat.size());
    j["w_hat"] = matrix_json(est.w_hat);
    j["a_hat"] = matrix_json(est.a_hat);
    if (!vocab.empty()) {
        json topics = json::array();
        for (const auto& t : spoc::top_words(est.a_hat, vocab, a.top)) topics.push_back(t.words);
        j["top_words"] = topics;
    }
    write_text(a.out, j.dump(2) + "\n");
    if (!a.w_csv.empty()) {
        auto f = open_out(a.w_csv);
        spoc::io::write_csv(f, est.w_hat);
    }
    if (!a.a_csv.empty()) {
        auto f = open_out(a.a_csv);
        spoc::io::write_csv(f, est.a_hat);
    }
    return kOk;
}

struct TopArgs {
    std::string a_hat, vocab, out = "-";
    long long m = 10;
};

int run_top_words(const TopArgs& a) {
    spoc::DenseMatrix a_hat;
    if (spoc::io::ends_with(a.a_hat, ".json")) {
        std::ifstream in(a.a_hat);
        if (!in) throw spoc::InvalidArgument("cannot open '" + a.a_hat + "'");
        json j;
        try {
            in >> j;
        } catch (const json::exception& e) {
            throw spoc::InvalidArgument(a.a_hat + ": " + e.what());
        }
        if (!j.contains("a_hat")) throw spoc::InvalidArgument(a.a_hat + ": no a_hat field");
        a_hat = matrix_from_json(j["a_hat"], a.a_hat);
    } else {
        a_hat = spoc::io::read_dense_csv(a.a_hat);
    }
    const auto vocab = spoc::io::read_vocab(a.vocab);
    std::ostringstream os;
    os << "topic,rank,word,score\n";
    const auto topics = spoc::top_words(a_hat, vocab, a.m);
    for (std::size_t t = 0; t < topics.size(); ++t)
        for (std::size_t r = 0; r < topics[t].words.size(); ++r)
            os << t << ',' << r + 1 << ',' << spoc::detail::csv_quote(topics[t].words[r]) << ','
               << spoc::io::format_double(topics[t].scores[r]) << '\n';
    write_text(a.out, os.str());
    return kOk;
}

struct VerifyArgs {
    std::string suite = "invariants", out = "-";
    double budget = 600.0;
};

int run_verify(const VerifyArgs& a) {
    const auto results = spoc::verify::run_suite(spoc::verify::parse_suite(a.suite), a.budget);
    bool all = true;
    json crit = json::array();
    for (const auto& r : results) {
        all = all && r.passed;
        crit.push_back({{"id", r.id},
                        {"name", r.name},
                        {"passed", r.passed},
                        {"skipped", r.skipped},
                        {"seconds", r.seconds},
                        {"time_limit", r.time_limit},
                        {"detail", r.detail}});
    }
    json j;
    j["suite"] = a.suite;
    j["passed"] = all;
    j["criteria"] = crit;
    write_text(a.out, j.dump(2) + "\n");
    return all ? kOk : kVerifyFailed;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"SPOC topic-model estimation: synthetic sweeps, fitting, top words and verification"};
    app.require_subcommand(1);

    SweepArgs sw;
    auto* sweep = app.add_subcommand("synth-sweep", "Run a synthetic sweep and write per-trial CSV");
    sweep->add_option("--preset", sw.preset, "fig1 | fig2 | fig3 | fig4");
    sweep->add_option("--sweep", sw.sweep, "Swept variable: n, p, N or K");
    sweep->add_option("--values", sw.values, "Comma-separated sweep values");
    sweep->add_option("--n", sw.n, "Number of documents");
    sweep->add_option("--p", sw.p, "Vocabulary size");
    sweep->add_option("--N", sw.N, "Words per document");
    sweep->add_option("--K", sw.K, "Number of topics");
    sweep->add_option("--alpha", sw.alpha, "Comma-separated Dirichlet parameter for W");
    sweep->add_flag("--uniform", sw.uniform, "Uniform-then-normalised rows of W");
    sweep->add_flag("--scaled-anchors", sw.scaled, "Anchor word weight drawn per topic");
    sweep->add_option("--trials", sw.trials, "Trials per sweep value")->check(CLI::PositiveNumber);
    sweep->add_option("--seed", sw.seed, "Base seed (SPOC_SEED overrides)");
    sweep->add_option("--estimator", sw.estimator, "spoc | spoc_preconditioned | spoc_adaptive");
    sweep->add_option("--metrics", sw.metrics, "Comma-separated: fro, l1, l1_inf, a_fro, k_hat");
    auto* pre = sweep->add_flag("--preconditioned", sw.preconditioned, "Use the MVEE-preconditioned SPA");
    sweep->add_flag("--no-preconditioned", "Use plain SPA (default)")->excludes(pre);
    sweep->add_flag("--clip", sw.clip, "Project rows of Ŵ onto the simplex");
    sweep->add_option("--threshold-const", sw.threshold_const, "Constant of the adaptive K threshold");
    sweep->add_option("--jobs", sw.jobs, "Worker threads")->check(CLI::PositiveNumber);
    sweep->add_flag("--timing", sw.timing, "Record wall-clock seconds (makes output nondeterministic)");
    sweep->add_option("--out", sw.out, "Per-trial CSV path, '-' for stdout");
    sweep->add_option("--summary", sw.summary, "Optional per-point summary CSV path");

    FitArgs fa;
    auto* fit = app.add_subcommand("fit", "Fit SPOC to a document-term count matrix");
    fit->add_option("--matrix", fa.matrix, "MatrixMarket or dense CSV counts (documents × words)")->required();
    fit->add_option("--vocab", fa.vocab, "Vocabulary file, one token per line");
    fit->add_option("--k", fa.k, "Number of topics; estimated from the data when omitted");
    fit->add_option("--min-words", fa.min_words, "Drop documents with fewer words");
    fit->add_flag("--clip", fa.clip, "Project rows of Ŵ onto the simplex");
    fit->add_flag("--preconditioned,!--no-preconditioned", fa.preconditioned, "Use the MVEE-preconditioned SPA");
    fit->add_option("--threshold-const", fa.threshold_const, "Constant of the adaptive K threshold");
    fit->add_option("--seed", fa.seed, "Seed for the randomized SVD (SPOC_SEED overrides)");
    fit->add_option("--top", fa.top, "Top words per topic in the JSON when --vocab is given");
    fit->add_option("--out", fa.out, "JSON output path, '-' for stdout");
    fit->add_option("--w-csv", fa.w_csv, "Write Ŵ as CSV");
    fit->add_option("--a-csv", fa.a_csv, "Write Â as CSV");

    TopArgs ta;
    auto* top = app.add_subcommand("top-words", "Rank the most distinctive words of each topic");
    top->add_option("--a-hat", ta.a_hat, "Â as CSV, or the JSON written by fit")->required();
    top->add_option("--vocab", ta.vocab, "Vocabulary file, one token per line")->required();
    top->add_option("--m", ta.m, "Words per topic")->check(CLI::PositiveNumber);
    top->add_option("--out", ta.out, "CSV output path, '-' for stdout");

    VerifyArgs va;
    auto* ver = app.add_subcommand("verify", "Run the statistical verification suite and print a JSON verdict");
    ver->add_option("--suite", va.suite, "invariants | concentration | rates | all");
    ver->add_option("--budget", va.budget, "Seconds after which remaining checks are skipped");
    ver->add_option("--out", va.out, "JSON output path, '-' for stdout");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kInputError;
    }

    try {
        if (*sweep) return run_sweep(sw, *sweep);
        if (*fit) return run_fit(fa);
        if (*top) return run_top_words(ta);
        if (*ver) return run_verify(va);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kInputError;
    }
    return kOk;
}
