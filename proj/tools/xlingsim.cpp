// xlingsim: cross-language textual similarity benchmark driver.
//
// Subcommands: train-ibm1, evaluate, fingerprint, correlate, report.
// Exit codes: 0 success, 1 runtime failure, 2 usage/validation error.

#include <atomic>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <thread>

#include <CLI11.hpp>

#include "xling/analysis.hpp"
#include "xling/config.hpp"
#include "xling/corpus.hpp"
#include "xling/evalproto.hpp"
#include "xling/lexres.hpp"
#include "xling/methods.hpp"
#include "xling/rng.hpp"

namespace {

using namespace xling;

// Invalid input or configuration; maps to exit code 2.
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string fmt6(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6f", v);
    return buf;
}

std::vector<AlignedCorpus> load_corpora(const RunConfig& config) {
    std::vector<AlignedCorpus> corpora;
    for (const std::filesystem::path& manifest : config.manifests) {
        AlignedCorpus corpus;
        try {
            corpus = load_manifest_corpus(manifest);
        } catch (const std::exception& e) {
            throw UsageError(e.what());
        }
        if (!config.gran_filter.empty() && !config.gran_filter.count(corpus.gran)) continue;
        if (!config.pair_filter.empty() &&
            !config.pair_filter.count(pair_label(corpus.src_lang, corpus.tgt_lang)))
            continue;
        if (corpus.empty())
            throw UsageError("manifest yields an empty corpus: " + manifest.string());
        corpora.push_back(std::move(corpus));
    }
    return corpora;
}

// Loaded resources are shared across configurations touching the same file.
struct ResourceCache {
    std::map<std::string, std::shared_ptr<const BilingualLexicon>> lexicons;
    std::map<std::string, std::shared_ptr<const TranslationTable>> tables;
    std::map<std::string, std::shared_ptr<const ConceptIndex>> concepts;
    std::map<std::string, LengthStats> length_stats;
};

// Builds the scorer for (method, corpus direction), or returns nullptr with
// the skip reason filled in when a needed resource is not configured.
std::shared_ptr<const Scorer> make_scorer(const MethodConfig& mc, const AlignedCorpus& corpus,
                                          const std::shared_ptr<const IdfIndex>& idf,
                                          std::uint64_t run_seed, ResourceCache& cache,
                                          std::string& reason) {
    const std::string pair = pair_label(corpus.src_lang, corpus.tgt_lang);
    const auto missing = [&](const std::string& kind) {
        reason = "no " + kind + " configured for pair " + pair;
        return nullptr;
    };

    if (mc.id == "c3g") return std::make_shared<C3gScorer>(idf);
    if (mc.id == "rand")
        return std::make_shared<RandomScorer>(mix_seed(run_seed, fnv1a64("rand")));
    if (mc.id == "oracle") return std::make_shared<OracleScorer>();

    if (mc.id == "len") {
        const auto* path = mc.resource("stats", pair);
        if (!path) return missing("stats");
        auto [it, fresh] = cache.length_stats.try_emplace(path->string());
        if (fresh) it->second = load_length_stats(*path);
        return std::make_shared<LengthModelScorer>(it->second);
    }
    if (mc.id == "cts") {
        const auto* path = mc.resource("lexicon", pair);
        if (!path) return missing("lexicon");
        const std::string key = path->string() + "|" + pair;
        auto it = cache.lexicons.find(key);
        if (it == cache.lexicons.end())
            it = cache.lexicons
                     .emplace(key, std::make_shared<BilingualLexicon>(
                                       load_lexicon(*path, corpus.src_lang, corpus.tgt_lang)))
                     .first;
        return std::make_shared<CtsScorer>(it->second);
    }
    if (mc.id == "tma") {
        if (const auto* path = mc.resource("lexicon", pair)) {
            const std::string key = path->string() + "|" + pair;
            auto it = cache.lexicons.find(key);
            if (it == cache.lexicons.end())
                it = cache.lexicons
                         .emplace(key, std::make_shared<BilingualLexicon>(
                                           load_lexicon(*path, corpus.src_lang, corpus.tgt_lang)))
                         .first;
            return std::make_shared<TmaScorer>(it->second);
        }
        if (const auto* path = mc.resource("table", pair)) {
            const std::string key = path->string() + "|" + pair;
            auto it = cache.tables.find(key);
            if (it == cache.tables.end())
                it = cache.tables
                         .emplace(key, std::make_shared<TranslationTable>(
                                           load_table(*path, corpus.src_lang, corpus.tgt_lang)))
                         .first;
            return std::make_shared<TmaScorer>(*it->second, mc.tma_top_k);
        }
        return missing("lexicon or table");
    }
    if (mc.id == "asa") {
        const auto* table_path = mc.resource("table", pair);
        const auto* stats_path = mc.resource("stats", pair);
        if (!table_path) return missing("table");
        if (!stats_path) return missing("stats");
        // p(source-unit word | target-unit word): rows keyed by the target
        // language, so the table file direction is tgt -> src.
        const std::string key = table_path->string() + "|" + pair + "|asa";
        auto it = cache.tables.find(key);
        if (it == cache.tables.end())
            it = cache.tables
                     .emplace(key, std::make_shared<TranslationTable>(
                                       load_table(*table_path, corpus.tgt_lang, corpus.src_lang)))
                     .first;
        auto [sit, fresh] = cache.length_stats.try_emplace(stats_path->string());
        if (fresh) sit->second = load_length_stats(*stats_path);
        return std::make_shared<AsaScorer>(it->second, sit->second);
    }
    if (mc.id == "esa") {
        const auto* path = mc.resource("concepts", pair);
        if (!path) return missing("concepts");
        auto it = cache.concepts.find(path->string());
        if (it == cache.concepts.end())
            it = cache.concepts
                     .emplace(path->string(), std::make_shared<ConceptIndex>(
                                                  build_concept_index(load_manifest_corpus(*path))))
                     .first;
        return std::make_shared<EsaScorer>(it->second);
    }
    reason = "unknown method '" + mc.id + "'";
    return nullptr;
}

std::shared_ptr<const IdfIndex> build_run_idf(const std::vector<AlignedCorpus>& corpora) {
    std::vector<TextUnit> units;
    for (const AlignedCorpus& corpus : corpora)
        for (const AlignedPair& pair : corpus.pairs) {
            units.push_back(pair.source);
            units.push_back(pair.target);
        }
    return std::make_shared<IdfIndex>(build_idf(units, "run:" + std::to_string(corpora.size())));
}

template <typename Work>
void parallel_tasks(std::size_t n, int jobs, Work&& work) {
    if (jobs <= 1 || n < 2) {
        for (std::size_t i = 0; i < n; ++i) work(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    const auto runner = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= n) return;
            work(i);
        }
    };
    std::vector<std::thread> threads;
    const std::size_t count = std::min<std::size_t>(static_cast<std::size_t>(jobs), n);
    for (std::size_t t = 0; t < count; ++t) threads.emplace_back(runner);
    for (std::thread& t : threads) t.join();
}

int cmd_evaluate(const RunConfig& config, int jobs, bool dump_matrices) {
    const std::vector<AlignedCorpus> corpora = load_corpora(config);
    if (corpora.empty())
        throw UsageError("no corpora selected (check manifests and pair/granularity filters)");
    if (config.m == 1)
        std::cerr << "warning: m = 1 is a degenerate protocol (rows have no distractors; "
                     "every F1 is trivially 1)\n";

    const bool need_idf = std::any_of(config.methods.begin(), config.methods.end(),
                                      [](const MethodConfig& mc) { return mc.id == "c3g"; });
    const std::shared_ptr<const IdfIndex> idf = need_idf ? build_run_idf(corpora) : nullptr;

    struct Task {
        const AlignedCorpus* corpus;
        std::shared_ptr<const Scorer> scorer;
        std::string method;
    };
    std::vector<Task> tasks;
    ResourceCache cache;
    std::size_t skipped = 0;
    for (const AlignedCorpus& corpus : corpora) {
        for (const MethodConfig& mc : config.methods) {
            std::string reason;
            std::shared_ptr<const Scorer> scorer =
                make_scorer(mc, corpus, idf, config.seed, cache, reason);
            if (!scorer) {
                ++skipped;
                std::cerr << "skip: " << mc.id << " on " << corpus.subcorpus << " "
                          << pair_label(corpus.src_lang, corpus.tgt_lang) << " "
                          << to_string(corpus.gran) << ": " << reason << "\n";
                continue;
            }
            tasks.push_back({&corpus, std::move(scorer), mc.id});
        }
    }
    if (tasks.empty()) {
        std::cerr << "error: all " << skipped << " configurations were skipped\n";
        return 1;
    }

    std::vector<EvalResult> results(tasks.size());
    const int inner_jobs = tasks.size() > 1 ? 1 : jobs;
    parallel_tasks(tasks.size(), jobs, [&](std::size_t i) {
        results[i] = run_folds(*tasks[i].corpus, *tasks[i].scorer, config.m, config.folds,
                               config.seed, inner_jobs);
    });

    std::filesystem::create_directories(config.out_dir);
    const std::filesystem::path csv_path = config.out_dir / "results.csv";
    const bool fresh = !std::filesystem::exists(csv_path);
    std::ofstream out(csv_path, std::ios::app | std::ios::binary);
    if (!out)
        throw std::runtime_error("cannot write " + csv_path.string());
    if (fresh)
        out << "method,subcorpus,src,tgt,granularity,threshold,precision,recall,f1_mean,f1_ci\n";
    for (std::size_t i = 0; i < tasks.size(); ++i) {
        const AlignedCorpus& corpus = *tasks[i].corpus;
        const EvalResult& r = results[i];
        const std::string line = tasks[i].method + "," + corpus.subcorpus + "," +
                                 corpus.src_lang.code() + "," + corpus.tgt_lang.code() + "," +
                                 std::string(to_string(corpus.gran)) + "," + fmt6(r.threshold) + "," +
                                 fmt6(r.precision) + "," + fmt6(r.recall) + "," + fmt6(r.mean_f1) +
                                 "," + fmt6(r.ci_half_width);
        out << line << '\n';
        std::cout << line << '\n';
    }
    if (!out)
        throw std::runtime_error("write failed: " + csv_path.string());
    std::cerr << "wrote " << csv_path.string() << " (" << tasks.size() << " configurations, "
              << skipped << " skipped)\n";

    if (dump_matrices) {
        for (const Task& task : tasks) {
            const AlignedCorpus& corpus = *task.corpus;
            const ScoreMatrix matrix =
                build_matrix(corpus, *task.scorer, config.m, mix_seed(config.seed, 0), jobs);
            const std::string name = "matrix_" + task.method + "_" + corpus.subcorpus + "_" +
                                     pair_label(corpus.src_lang, corpus.tgt_lang) + "_" +
                                     std::string(to_string(corpus.gran)) + ".csv";
            std::ofstream mout(config.out_dir / name, std::ios::binary);
            if (!mout)
                throw std::runtime_error("cannot write " + (config.out_dir / name).string());
            dump_matrix_csv(matrix, mout);
        }
        std::cerr << "dumped " << tasks.size() << " fold-0 matrices\n";
    }
    return 0;
}

int cmd_fingerprint(const RunConfig& config, bool svg) {
    std::vector<AlignedCorpus> corpora;
    for (AlignedCorpus& corpus : [&] {
             std::vector<AlignedCorpus> all = load_corpora(config);
             return all;
         }())
        if (corpus.gran == Granularity::Sentence) corpora.push_back(std::move(corpus));
    if (corpora.empty())
        throw UsageError("fingerprint needs sentence-granularity corpora");
    const std::string pair = pair_label(corpora.front().src_lang, corpora.front().tgt_lang);
    for (const AlignedCorpus& corpus : corpora)
        if (pair_label(corpus.src_lang, corpus.tgt_lang) != pair)
            throw UsageError("fingerprint corpora must share one language pair; found " + pair +
                             " and " + pair_label(corpus.src_lang, corpus.tgt_lang));

    const bool need_idf = std::any_of(config.methods.begin(), config.methods.end(),
                                      [](const MethodConfig& mc) { return mc.id == "c3g"; });
    const std::shared_ptr<const IdfIndex> idf = need_idf ? build_run_idf(corpora) : nullptr;

    std::filesystem::create_directories(config.out_dir);
    ResourceCache cache;
    std::ostringstream summary_csv, summary_md;
    summary_csv << "method,threshold,precision,recall,f1\n";
    summary_md << "| Method | T | P | R | F1 |\n|---|---|---|---|---|\n";
    std::size_t ran = 0;
    for (const MethodConfig& mc : config.methods) {
        std::string reason;
        const std::shared_ptr<const Scorer> scorer =
            make_scorer(mc, corpora.front(), idf, config.seed, cache, reason);
        if (!scorer) {
            std::cerr << "skip: " << mc.id << ": " << reason << "\n";
            continue;
        }
        Fingerprint fp;
        try {
            fp = fingerprint(corpora, *scorer, config.pairs_per_corpus, config.folds, config.seed);
        } catch (const std::invalid_argument& e) {
            throw UsageError(e.what());
        }
        ++ran;
        const std::filesystem::path csv_path = config.out_dir / ("fingerprint_" + mc.id + ".csv");
        std::ofstream out(csv_path, std::ios::binary);
        if (!out)
            throw std::runtime_error("cannot write " + csv_path.string());
        out << fingerprint_csv(fp);
        if (svg) {
            const std::filesystem::path svg_path = config.out_dir / ("fingerprint_" + mc.id + ".svg");
            std::ofstream sout(svg_path, std::ios::binary);
            if (!sout)
                throw std::runtime_error("cannot write " + svg_path.string());
            sout << fingerprint_svg(fp);
        }
        summary_csv << mc.id << ',' << fmt6(fp.best.threshold) << ',' << fmt6(fp.best.precision)
                    << ',' << fmt6(fp.best.recall) << ',' << fmt6(fp.best.f1) << '\n';
        summary_md << "| " << method_display_name(mc.id) << " | " << fmt6(fp.best.threshold) << " | "
                   << fmt6(fp.best.precision) << " | " << fmt6(fp.best.recall) << " | "
                   << fmt6(fp.best.f1) << " |\n";
        std::cout << "fingerprint " << mc.id << ": T=" << fmt6(fp.best.threshold)
                  << " P=" << fmt6(fp.best.precision) << " R=" << fmt6(fp.best.recall)
                  << " F1=" << fmt6(fp.best.f1) << '\n';
    }
    if (ran == 0) {
        std::cerr << "error: every method was skipped\n";
        return 1;
    }
    for (const auto& [name, text] : {std::pair<std::string, std::string>{"fingerprint_summary.csv",
                                                                         summary_csv.str()},
                                     {"fingerprint_summary.md", summary_md.str()}}) {
        std::ofstream out(config.out_dir / name, std::ios::binary);
        if (!out)
            throw std::runtime_error("cannot write " + (config.out_dir / name).string());
        out << text;
    }
    return 0;
}

ResultGrid load_grid_checked(const std::filesystem::path& results) {
    try {
        return load_grid_csv(results);
    } catch (const std::exception& e) {
        throw UsageError(e.what());
    }
}

int cmd_correlate(const std::filesystem::path& results, const std::filesystem::path& out_dir) {
    const ResultGrid grid = load_grid_checked(results);
    std::filesystem::create_directories(out_dir);
    std::size_t written = 0;
    for (Granularity g : grid.granularities()) {
        CorrelationReport report;
        try {
            report = correlate_language_pairs(grid, g);
        } catch (const std::invalid_argument& e) {
            std::cerr << "skip " << to_string(g) << " correlations: " << e.what() << "\n";
            continue;
        }
        const std::filesystem::path path =
            out_dir / ("corr_pairs_" + std::string(to_string(g)) + ".csv");
        std::ofstream out(path, std::ios::binary);
        if (!out)
            throw std::runtime_error("cannot write " + path.string());
        out << correlation_matrix_csv(report);
        ++written;
        std::cout << "wrote " << path.string() << '\n';
    }
    try {
        const GranularityCorrelation gc = correlate_granularities(grid);
        for (const auto& [name, text] :
             {std::pair<std::string, std::string>{"corr_granularities_by_pair.csv",
                                                  labelled_values_csv("pair", gc.by_pair)},
              {"corr_granularities_by_method.csv", labelled_values_csv("method", gc.by_method)}}) {
            std::ofstream out(out_dir / name, std::ios::binary);
            if (!out)
                throw std::runtime_error("cannot write " + (out_dir / name).string());
            out << text;
            ++written;
            std::cout << "wrote " << (out_dir / name).string() << '\n';
        }
    } catch (const std::invalid_argument& e) {
        std::cerr << "skip cross-granularity correlations: " << e.what() << "\n";
    }
    if (written == 0)
        throw UsageError("results do not support any correlation analysis");
    return 0;
}

int cmd_report(const std::filesystem::path& results, const std::filesystem::path& out_dir) {
    const ResultGrid grid = load_grid_checked(results);
    std::vector<std::filesystem::path> written;
    try {
        written = emit_reports(grid, out_dir);
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
    for (const std::filesystem::path& p : written) std::cout << "wrote " << p.string() << '\n';
    return 0;
}

struct TrainArgs {
    std::string src_file;
    std::string tgt_file;
    std::string src_lang;
    std::string tgt_lang;
    int iterations = 5;
    std::size_t prune_top_k = 0; // 0 = no pruning
    double prune_min_prob = 0.0;
    std::string out;
    std::string length_stats_out;
};

int cmd_train_ibm1(const TrainArgs& args) {
    for (const std::string& f : {args.src_file, args.tgt_file})
        if (!std::filesystem::exists(f))
            throw UsageError("input file does not exist: " + f);
    if (args.iterations < 1)
        throw UsageError("--iterations must be >= 1");

    CorpusDescriptor desc;
    try {
        desc.src_lang = LanguageTag(args.src_lang);
        desc.tgt_lang = LanguageTag(args.tgt_lang);
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
    desc.gran = Granularity::Sentence;
    desc.subcorpus = "train";

    AlignedCorpus corpus;
    try {
        corpus = load_corpus(args.src_file, args.tgt_file, desc);
    } catch (const std::exception& e) {
        throw UsageError(e.what());
    }
    if (corpus.empty())
        throw UsageError("training corpus is empty after dropping blank pairs");
    std::cerr << "training on " << corpus.size() << " pairs (" << corpus.dropped_pairs
              << " blank pairs dropped)\n";

    std::vector<double> ll;
    TranslationTable table = train_ibm1(corpus, args.iterations, &ll);
    for (std::size_t i = 0; i < ll.size(); ++i)
        std::cout << "iteration " << i + 1 << ": log-likelihood = " << fmt6(ll[i]) << '\n';

    if (args.prune_top_k > 0 || args.prune_min_prob > 0.0) {
        const std::size_t top_k = args.prune_top_k > 0 ? args.prune_top_k : kKeepAllTargets;
        table = prune_table(table, top_k, args.prune_min_prob);
    }
    save_table(table, args.out);
    std::cerr << "wrote " << args.out << " (" << table.source_count() << " source words)\n";

    if (!args.length_stats_out.empty()) {
        LengthStats stats;
        try {
            stats = estimate_length_stats(corpus);
        } catch (const std::invalid_argument& e) {
            throw UsageError(e.what());
        }
        save_length_stats(stats, args.length_stats_out);
        std::cerr << "wrote " << args.length_stats_out << " (mu=" << fmt6(stats.mu)
                  << ", sigma=" << fmt6(stats.sigma) << ")\n";
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"cross-language textual similarity benchmark"};
    app.require_subcommand(1);
    app.fallthrough();

    std::string config_path;
    std::string out_override;
    std::uint64_t seed_override = 0;
    bool seed_given = false;
    int jobs = 1;
    app.add_option("--config", config_path, "run configuration file");
    app.add_option("--seed", seed_override, "override the config seed")
        ->each([&](const std::string&) { seed_given = true; });
    app.add_option("--jobs", jobs, "parallel worker count")->check(CLI::Range(1, 1024));
    app.add_option("--out", out_override, "override the output directory");

    CLI::App* evaluate = app.add_subcommand("evaluate", "run the distance-matrix protocol");
    bool dump_matrices = false;
    evaluate->add_flag("--dump-matrices", dump_matrices,
                       "also write each configuration's fold-0 score matrix");
    bool svg = false;
    CLI::App* fingerprint_cmd =
        app.add_subcommand("fingerprint", "match/mismatch histogram experiment");
    fingerprint_cmd->add_flag("--svg", svg, "also write histogram SVGs");

    std::string results_path;
    CLI::App* correlate = app.add_subcommand("correlate", "correlation analyses over results");
    correlate->add_option("--results", results_path, "results CSV")->required();
    CLI::App* report = app.add_subcommand("report", "render all report tables from results");
    report->add_option("--results", results_path, "results CSV")->required();

    TrainArgs train_args;
    CLI::App* train = app.add_subcommand("train-ibm1", "train a translation table by EM");
    train->add_option("--src", train_args.src_file, "source-language training file")->required();
    train->add_option("--tgt", train_args.tgt_file, "target-language training file")->required();
    train->add_option("--src-lang", train_args.src_lang, "source language tag")->required();
    train->add_option("--tgt-lang", train_args.tgt_lang, "target language tag")->required();
    train->add_option("--iterations", train_args.iterations, "EM iterations (default 5)");
    train->add_option("--prune-top-k", train_args.prune_top_k, "keep top-k targets per source");
    train->add_option("--prune-min-prob", train_args.prune_min_prob, "drop entries below this");
    train->add_option("--table-out", train_args.out, "output table TSV")->required();
    train->add_option("--length-stats", train_args.length_stats_out,
                      "also estimate and write length statistics");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (train->parsed()) return cmd_train_ibm1(train_args);

        if (correlate->parsed() || report->parsed()) {
            const std::filesystem::path out_dir = out_override.empty() ? "reports" : out_override;
            return correlate->parsed() ? cmd_correlate(results_path, out_dir)
                                       : cmd_report(results_path, out_dir);
        }

        if (config_path.empty())
            throw UsageError("--config is required for this command");
        RunConfig config;
        try {
            config = load_run_config(config_path);
        } catch (const std::invalid_argument& e) {
            throw UsageError(e.what());
        }
        if (seed_given) config.seed = seed_override;
        if (!out_override.empty()) config.out_dir = out_override;

        if (evaluate->parsed()) return cmd_evaluate(config, jobs, dump_matrices);
        if (fingerprint_cmd->parsed()) return cmd_fingerprint(config, svg);
        throw UsageError("no subcommand selected");
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
