#ifndef SPOC_EXPERIMENT_HPP
#define SPOC_EXPERIMENT_HPP

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "spoc/errors.hpp"
#include "spoc/io.hpp"
#include "spoc/linalg.hpp"
#include "spoc/metrics.hpp"
#include "spoc/random.hpp"
#include "spoc/spoc.hpp"
#include "spoc/synth.hpp"

namespace spoc {

enum class SweepVariable { n, p, N, K };
enum class Estimator { spoc, spoc_preconditioned, spoc_adaptive };

inline const char* to_string(SweepVariable v) {
    switch (v) {
    case SweepVariable::n: return "n";
    case SweepVariable::p: return "p";
    case SweepVariable::N: return "N";
    case SweepVariable::K: return "K";
    }
    return "?";
}

inline SweepVariable parse_sweep_variable(const std::string& s) {
    if (s == "n") return SweepVariable::n;
    if (s == "p") return SweepVariable::p;
    if (s == "N") return SweepVariable::N;
    if (s == "K") return SweepVariable::K;
    throw InvalidArgument("unknown sweep variable '" + s + "' (expected n, p, N or K)");
}

inline const char* to_string(Estimator e) {
    switch (e) {
    case Estimator::spoc: return "spoc";
    case Estimator::spoc_preconditioned: return "spoc_preconditioned";
    case Estimator::spoc_adaptive: return "spoc_adaptive";
    }
    return "?";
}

inline Estimator parse_estimator(const std::string& s) {
    if (s == "spoc") return Estimator::spoc;
    if (s == "spoc_preconditioned") return Estimator::spoc_preconditioned;
    if (s == "spoc_adaptive") return Estimator::spoc_adaptive;
    throw InvalidArgument("unknown estimator '" + s + "'");
}

/// Metric names accepted in ExperimentConfig::metrics.
///   fro, l1, l1_inf : permutation-minimised error of Ŵ
///   a_fro           : permutation-minimised Frobenius error of Â (rows)
///   k_hat           : number of topics used by the fit
inline bool known_metric(const std::string& m) {
    return m == "fro" || m == "l1" || m == "l1_inf" || m == "a_fro" || m == "k_hat";
}

struct ModelSize {
    Index n = 1000;
    Index p = 5000;
    Index N = 200;
    Index K = 3;
};

struct ExperimentConfig {
    SweepVariable sweep_variable = SweepVariable::n;
    std::vector<Index> sweep_values{250, 500, 1000, 2000};
    ModelSize fixed{};
    /// Dirichlet parameter for non-anchor rows of W; ignored when uniform_w.
    std::vector<double> alpha{0.1, 0.15, 0.2};
    bool uniform_w = false;
    AnchorWordStyle anchor_style = AnchorWordStyle::proportional;
    Index trials = 10;
    RngSeed seed{42, 0};
    Estimator estimator = Estimator::spoc;
    std::vector<std::string> metrics{"fro"};
    bool clip = false;
    double threshold_const = 4.0;
    int jobs = 1;
    /// Wall-clock seconds are nondeterministic; without this flag the
    /// seconds column holds NA so output is byte-reproducible.
    bool record_timing = false;

    void validate() const {
        if (sweep_values.empty()) throw InvalidArgument("experiment: sweep_values must be nonempty");
        for (std::size_t i = 1; i < sweep_values.size(); ++i)
            if (sweep_values[i] <= sweep_values[i - 1])
                throw InvalidArgument("experiment: sweep_values must be strictly increasing");
        if (trials < 1) throw InvalidArgument("experiment: trials must be at least 1");
        if (jobs < 1) throw InvalidArgument("experiment: jobs must be at least 1");
        if (metrics.empty()) throw InvalidArgument("experiment: no metrics requested");
        for (const auto& m : metrics)
            if (!known_metric(m)) throw InvalidArgument("experiment: unknown metric '" + m + "'");
        if (!(threshold_const > 0.0)) throw InvalidArgument("experiment: threshold_const must be positive");
        for (Index v : sweep_values) {
            const ModelSize s = size_at(v);
            if (s.K < 2 || s.n < s.K || s.p < s.K || s.N < 1)
                throw InvalidArgument("experiment: invalid model size at sweep value " + std::to_string(v));
            if (!uniform_w && static_cast<Index>(alpha.size()) != s.K)
                throw InvalidArgument("experiment: alpha has " + std::to_string(alpha.size()) +
                                      " components but K = " + std::to_string(s.K));
        }
    }

    [[nodiscard]] ModelSize size_at(Index value) const {
        ModelSize s = fixed;
        switch (sweep_variable) {
        case SweepVariable::n: s.n = value; break;
        case SweepVariable::p: s.p = value; break;
        case SweepVariable::N: s.N = value; break;
        case SweepVariable::K: s.K = value; break;
        }
        return s;
    }

    /// Canonical one-line description; also the input of the run id.
    [[nodiscard]] std::string describe() const {
        std::ostringstream os;
        os << "sweep=" << to_string(sweep_variable) << " values=";
        for (std::size_t i = 0; i < sweep_values.size(); ++i) os << (i ? "," : "") << sweep_values[i];
        os << " n=" << fixed.n << " p=" << fixed.p << " N=" << fixed.N << " K=" << fixed.K;
        if (uniform_w) {
            os << " w=uniform";
        } else {
            os << " alpha=";
            for (std::size_t i = 0; i < alpha.size(); ++i) os << (i ? "," : "") << io::format_double(alpha[i]);
        }
        os << " anchors=" << (anchor_style == AnchorWordStyle::scaled ? "scaled" : "proportional");
        os << " trials=" << trials << " seed=" << seed.seed << ":" << seed.stream;
        os << " estimator=" << to_string(estimator) << " clip=" << clip
           << " threshold_const=" << io::format_double(threshold_const) << " metrics=";
        for (std::size_t i = 0; i < metrics.size(); ++i) os << (i ? "," : "") << metrics[i];
        return os.str();
    }

    [[nodiscard]] std::string run_id() const {
        std::uint64_t h = 0xcbf29ce484222325ULL;
        for (unsigned char c : describe()) h = (h ^ c) * 0x100000001b3ULL;
        char buf[17];
        std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
        return buf;
    }
};

/// Named configurations mirroring the published simulation protocols.
inline ExperimentConfig preset(const std::string& name) {
    ExperimentConfig c;
    if (name == "fig1") {
        c.sweep_variable = SweepVariable::n;
        c.sweep_values = {250, 500, 1000, 2000};
        c.fixed = {1000, 5000, 200, 3};
    } else if (name == "fig2") {
        c.sweep_variable = SweepVariable::N;
        c.sweep_values = {100, 200, 400, 800};
        c.fixed = {1000, 5000, 200, 3};
    } else if (name == "fig3") {
        c.sweep_variable = SweepVariable::p;
        c.sweep_values = {1000, 2000, 5000, 10000};
        c.fixed = {1000, 5000, 200, 3};
    } else if (name == "fig4") {
        c.sweep_variable = SweepVariable::K;
        c.sweep_values = {2, 4, 6, 8, 10};
        c.fixed = {1000, 5000, 5000, 3};
        c.uniform_w = true;
    } else {
        throw InvalidArgument("unknown preset '" + name + "' (expected fig1, fig2, fig3 or fig4)");
    }
    return c;
}

struct TrialResult {
    std::size_t sweep_index = 0;
    Index sweep_value = 0;
    Index trial = 0;
    /// One entry per requested metric, in request order; NaN when failed.
    std::vector<double> values;
    double seconds = 0.0;
    std::string failure; ///< empty on success
};

struct SweepSummary {
    Index sweep_value = 0;
    std::string metric;
    double mean = 0.0;
    double sd = 0.0;
    Index succeeded = 0;
};

struct RunRecord {
    ExperimentConfig config;
    std::vector<TrialResult> trials; ///< sorted by (sweep_index, trial)
    std::vector<SweepSummary> summary;

    [[nodiscard]] const SweepSummary& at(Index sweep_value, const std::string& metric) const {
        for (const auto& s : summary)
            if (s.sweep_value == sweep_value && s.metric == metric) return s;
        throw InvalidArgument("RunRecord: no summary for " + metric + " at " + std::to_string(sweep_value));
    }
};

/// Generates the ground truth of one trial from its own random stream.
inline TopicModelTruth generate_truth(const ExperimentConfig& cfg, const ModelSize& s, Rng& rng) {
    DenseMatrix w;
    if (cfg.uniform_w) {
        w = gen_w_uniform(s.n, s.K, rng);
    } else {
        w = gen_w_dirichlet(s.n, s.K, Eigen::Map<const Vector>(cfg.alpha.data(), s.K), rng);
    }
    DenseMatrix a = gen_a_anchor(s.K, s.p, rng, cfg.anchor_style);
    return make_truth(std::move(w), std::move(a));
}

/// Substream of trial `trial` at sweep point `sweep_index`.
inline RngSeed trial_seed(const RngSeed& base, std::size_t sweep_index, Index trial) {
    return {base.seed, hash_combine(base.stream, hash_combine(sweep_index, static_cast<std::uint64_t>(trial)))};
}

inline TrialResult run_trial(const ExperimentConfig& cfg, std::size_t sweep_index, Index trial) {
    TrialResult r;
    r.sweep_index = sweep_index;
    r.sweep_value = cfg.sweep_values[sweep_index];
    r.trial = trial;
    r.values.assign(cfg.metrics.size(), std::nan(""));
    const ModelSize s = cfg.size_at(r.sweep_value);
    const RngSeed seed = trial_seed(cfg.seed, sweep_index, trial);
    Rng rng(seed);
    try {
        const TopicModelTruth truth = generate_truth(cfg, s, rng);
        const CorpusSample sample = sample_corpus(truth, s.N, rng);

        SpocOptions opts;
        opts.preconditioned = cfg.estimator != Estimator::spoc;
        opts.clip_to_simplex = cfg.clip;
        opts.threshold_const = cfg.threshold_const;
        opts.svd.seed = {seed.seed, hash_combine(seed.stream, 0x5fd)};

        const auto start = std::chrono::steady_clock::now();
        const SpocEstimate est = cfg.estimator == Estimator::spoc_adaptive
                                     ? fit_adaptive(sample.x, static_cast<double>(s.N), opts)
                                     : fit_w(sample.x, s.K, opts);
        r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

        const bool k_matches = est.k_used == s.K;
        for (std::size_t m = 0; m < cfg.metrics.size(); ++m) {
            const std::string& name = cfg.metrics[m];
            if (name == "k_hat") {
                r.values[m] = static_cast<double>(est.k_used);
            } else if (!k_matches) {
                r.failure = "estimated K = " + std::to_string(est.k_used) + " differs from true K = " + std::to_string(s.K);
            } else if (name == "a_fro") {
                r.values[m] = perm_min_error(est.a_hat.transpose(), truth.a.transpose(), ErrorNorm::fro).fro;
            } else {
                r.values[m] = perm_min_error(est.w_hat, truth.w, parse_error_norm(name)).value();
            }
        }
    } catch (const Error& e) {
        r.failure = e.what();
        std::fill(r.values.begin(), r.values.end(), std::nan(""));
    }
    return r;
}

/// Runs every (sweep value, trial) pair, optionally on a worker pool.
/// Results do not depend on the number of workers.
inline RunRecord run_experiment(const ExperimentConfig& cfg) {
    cfg.validate();
    RunRecord rec;
    rec.config = cfg;
    const std::size_t points = cfg.sweep_values.size();
    const auto trials = static_cast<std::size_t>(cfg.trials);
    const std::size_t total = points * trials;
    rec.trials.resize(total);

    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t t = next++; t < total; t = next++)
            rec.trials[t] = run_trial(cfg, t / trials, static_cast<Index>(t % trials));
    };
    const auto workers = std::min<std::size_t>(static_cast<std::size_t>(cfg.jobs), total);
    if (workers <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (std::size_t i = 0; i < workers; ++i) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }

    for (std::size_t sp = 0; sp < points; ++sp) {
        for (std::size_t m = 0; m < cfg.metrics.size(); ++m) {
            SweepSummary s;
            s.sweep_value = cfg.sweep_values[sp];
            s.metric = cfg.metrics[m];
            std::vector<double> ok;
            for (std::size_t t = 0; t < trials; ++t) {
                const double v = rec.trials[sp * trials + t].values[m];
                if (!std::isnan(v)) ok.push_back(v);
            }
            s.succeeded = static_cast<Index>(ok.size());
            if (!ok.empty()) {
                double sum = 0.0;
                for (double v : ok) sum += v;
                s.mean = sum / static_cast<double>(ok.size());
                double ss = 0.0;
                for (double v : ok) ss += (v - s.mean) * (v - s.mean);
                s.sd = ok.size() > 1 ? std::sqrt(ss / static_cast<double>(ok.size() - 1)) : 0.0;
            } else {
                s.mean = s.sd = std::nan("");
            }
            rec.summary.push_back(std::move(s));
        }
    }
    return rec;
}

inline constexpr const char* kSweepCsvHeader = "run_id,sweep_var,sweep_value,trial,estimator,metric,value,seconds,reason";

namespace detail {

inline std::string csv_quote(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c == '\n' ? ' ' : c;
    }
    return out + "\"";
}

} // namespace detail

/// One line per (sweep point, trial, metric). Failed values print as NA
/// with the failure in the reason column.
inline void write_sweep_csv(std::ostream& out, const RunRecord& rec) {
    const ExperimentConfig& cfg = rec.config;
    const std::string id = cfg.run_id();
    out << kSweepCsvHeader << '\n';
    for (const auto& t : rec.trials) {
        for (std::size_t m = 0; m < cfg.metrics.size(); ++m) {
            out << id << ',' << to_string(cfg.sweep_variable) << ',' << t.sweep_value << ',' << t.trial << ','
                << to_string(cfg.estimator) << ',' << cfg.metrics[m] << ',';
            if (std::isnan(t.values[m]))
                out << "NA";
            else
                out << io::format_double(t.values[m]);
            out << ',';
            if (cfg.record_timing)
                out << io::format_double(t.seconds);
            else
                out << "NA";
            out << ',' << (std::isnan(t.values[m]) ? detail::csv_quote(t.failure) : std::string{}) << '\n';
        }
    }
}

inline void write_summary_csv(std::ostream& out, const RunRecord& rec) {
    out << "run_id,sweep_var,sweep_value,estimator,metric,mean,sd,succeeded,trials\n";
    const std::string id = rec.config.run_id();
    for (const auto& s : rec.summary) {
        out << id << ',' << to_string(rec.config.sweep_variable) << ',' << s.sweep_value << ','
            << to_string(rec.config.estimator) << ',' << s.metric << ','
            << (std::isnan(s.mean) ? std::string("NA") : io::format_double(s.mean)) << ','
            << (std::isnan(s.sd) ? std::string("NA") : io::format_double(s.sd)) << ',' << s.succeeded << ','
            << rec.config.trials << '\n';
    }
}

/// Per-topic ranking by score(k, j) = Â_kj − max_{k'≠k} Â_k'j.
struct TopicWords {
    std::vector<std::size_t> word_index;
    std::vector<std::string> words;
    std::vector<double> scores;
};

inline std::vector<TopicWords> top_words(const DenseMatrix& a_hat, const std::vector<std::string>& vocab, Index m) {
    require_finite(a_hat, "top_words");
    if (static_cast<Index>(vocab.size()) != a_hat.cols())
        throw InvalidArgument("top_words: vocabulary has " + std::to_string(vocab.size()) + " tokens but Â has " +
                              std::to_string(a_hat.cols()) + " columns");
    if (m < 1) throw InvalidArgument("top_words: m must be at least 1");
    const Index k = a_hat.rows();
    const Index p = a_hat.cols();
    std::vector<TopicWords> out(static_cast<std::size_t>(k));
    std::vector<std::pair<double, Index>> scored(static_cast<std::size_t>(p));
    for (Index t = 0; t < k; ++t) {
        for (Index j = 0; j < p; ++j) {
            double other = -std::numeric_limits<double>::infinity();
            for (Index s = 0; s < k; ++s)
                if (s != t) other = std::max(other, a_hat(s, j));
            const double score = k > 1 ? a_hat(t, j) - other : a_hat(t, j);
            scored[static_cast<std::size_t>(j)] = {score, j};
        }
        const auto take = static_cast<std::size_t>(std::min(m, p));
        std::partial_sort(scored.begin(), scored.begin() + static_cast<std::ptrdiff_t>(take), scored.end(),
                          [](const auto& a, const auto& b) {
                              return a.first > b.first || (a.first == b.first && a.second < b.second);
                          });
        auto& tw = out[static_cast<std::size_t>(t)];
        for (std::size_t r = 0; r < take; ++r) {
            const auto j = static_cast<std::size_t>(scored[r].second);
            tw.word_index.push_back(j);
            tw.words.push_back(vocab[j]);
            tw.scores.push_back(scored[r].first);
        }
    }
    return out;
}

} // namespace spoc

#endif // SPOC_EXPERIMENT_HPP
