#include "xling/evalproto.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "xling/rng.hpp"

namespace xling {

namespace {

std::string fmt(const char* spec, double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), spec, v);
    return buf;
}

// A scorer failure must not hole the matrix: the cell scores 0 and the
// diagnostic counter ticks.
ScoreResult safe_score(const Scorer& scorer, const TextUnit& a, const TextUnit& b) {
    try {
        ScoreResult r = scorer.score(a, b);
        if (!(r.value >= 0.0 && r.value <= 1.0)) return {0.0, true};
        return r;
    } catch (const std::exception&) {
        return {0.0, true};
    }
}

template <typename Work>
void parallel_for(std::size_t n, int jobs, Work&& work) {
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
    threads.reserve(count);
    for (std::size_t t = 0; t < count; ++t) threads.emplace_back(runner);
    for (std::thread& t : threads) t.join();
}

double sample_std(std::span<const double> xs) {
    const double n = static_cast<double>(xs.size());
    double mean = 0.0;
    for (double x : xs) mean += x;
    mean /= n;
    double ss = 0.0;
    for (double x : xs) ss += (x - mean) * (x - mean);
    return std::sqrt(ss / (n - 1.0));
}

} // namespace

double student_t_975(int df) {
    static constexpr double table[31] = {0,     12.706, 4.303, 3.182, 2.776, 2.571, 2.447, 2.365,
                                         2.306, 2.262,  2.228, 2.201, 2.179, 2.160, 2.145, 2.131,
                                         2.120, 2.110,  2.101, 2.093, 2.086, 2.080, 2.074, 2.069,
                                         2.064, 2.060,  2.056, 2.052, 2.048, 2.045, 2.042};
    if (df < 1)
        throw std::invalid_argument("student_t_975: df must be >= 1");
    if (df <= 30) return table[df];
    if (df <= 40) return 2.021;
    if (df <= 60) return 2.000;
    if (df <= 120) return 1.980;
    return 1.960;
}

ScoreMatrix build_matrix(const AlignedCorpus& corpus, const Scorer& scorer, std::size_t m,
                         std::uint64_t seed, int jobs) {
    if (corpus.empty())
        throw std::invalid_argument("build_matrix: corpus is empty");
    if (m == 0)
        throw std::invalid_argument("build_matrix: m must be >= 1");

    ScoreMatrix matrix;
    matrix.m = m;
    matrix.seed = seed;
    matrix.rows.resize(corpus.size());
    std::atomic<std::size_t> degenerate{0};

    const std::size_t n = corpus.size();
    parallel_for(n, jobs, [&](std::size_t i) {
        const TextUnit& src = corpus.pairs[i].source;
        std::vector<MatrixCell>& row = matrix.rows[i];
        row.reserve(m);

        const TextUnit& aligned = corpus.pairs[i].target;
        ScoreResult r = safe_score(scorer, src, aligned);
        if (r.degenerate) degenerate.fetch_add(1);
        row.push_back({aligned.id, r.value, true});

        // m-1 distractors drawn uniformly with replacement from the OTHER
        // target units; the aligned one is excluded by rejection (except in
        // a single-pair corpus, where there is nothing else to draw).
        Rng rng(seed ^ static_cast<std::uint64_t>(i));
        for (std::size_t k = 0; k + 1 < m; ++k) {
            std::size_t j = i;
            if (n > 1)
                do {
                    j = static_cast<std::size_t>(rng.below(n));
                } while (j == i);
            const TextUnit& distractor = corpus.pairs[j].target;
            r = safe_score(scorer, src, distractor);
            if (r.degenerate) degenerate.fetch_add(1);
            row.push_back({distractor.id, r.value, false});
        }
    });
    matrix.degenerate_cells = degenerate.load();
    return matrix;
}

FoldOutcome sweep_cells(std::span<const std::pair<double, bool>> cells) {
    if (cells.empty())
        throw std::invalid_argument("sweep_cells: no cells");

    std::vector<std::pair<double, bool>> sorted(cells.begin(), cells.end());
    std::sort(sorted.begin(), sorted.end(),
              [](const auto& a, const auto& b) { return a.first > b.first; });

    std::size_t n_pos = 0;
    for (const auto& cell : sorted) n_pos += cell.second;

    // Distinct score groups in descending order with cumulative counts.
    struct Group {
        double score;
        std::size_t tp;
        std::size_t fp;
    };
    std::vector<Group> groups;
    std::size_t tp = 0, fp = 0;
    for (std::size_t i = 0; i < sorted.size();) {
        const double s = sorted[i].first;
        while (i < sorted.size() && sorted[i].first == s) {
            if (sorted[i].second)
                ++tp;
            else
                ++fp;
            ++i;
        }
        groups.push_back({s, tp, fp});
    }

    const auto evaluate = [&](std::size_t tp_k, std::size_t fp_k) {
        const double p = (tp_k + fp_k) ? static_cast<double>(tp_k) / static_cast<double>(tp_k + fp_k) : 0.0;
        const double r = n_pos ? static_cast<double>(tp_k) / static_cast<double>(n_pos) : 0.0;
        const double f1 = (p + r > 0.0) ? 2.0 * p * r / (p + r) : 0.0;
        return FoldOutcome{0.0, p, r, f1};
    };

    // Candidates in descending order: 1, midpoints between consecutive
    // distinct scores, 0. Strict improvement keeps the largest optimum.
    FoldOutcome best;
    bool have_best = false;
    const auto consider = [&](double threshold, std::size_t tp_k, std::size_t fp_k) {
        FoldOutcome o = evaluate(tp_k, fp_k);
        o.threshold = threshold;
        if (!have_best || o.f1 > best.f1) {
            best = o;
            have_best = true;
        }
    };

    if (groups.front().score >= 1.0)
        consider(1.0, groups.front().tp, groups.front().fp);
    else
        consider(1.0, 0, 0);
    for (std::size_t k = 0; k + 1 < groups.size(); ++k)
        consider((groups[k].score + groups[k + 1].score) / 2.0, groups[k].tp, groups[k].fp);
    consider(0.0, groups.back().tp, groups.back().fp);
    return best;
}

EvalResult sweep_threshold(const ScoreMatrix& matrix) {
    if (matrix.rows.empty())
        throw std::invalid_argument("sweep_threshold: empty matrix");
    std::vector<std::pair<double, bool>> cells;
    std::size_t total = 0;
    for (const auto& row : matrix.rows) total += row.size();
    cells.reserve(total);
    for (const auto& row : matrix.rows)
        for (const MatrixCell& cell : row) cells.emplace_back(cell.score, cell.relevant);
    const FoldOutcome o = sweep_cells(cells);
    EvalResult result;
    result.threshold = o.threshold;
    result.precision = o.precision;
    result.recall = o.recall;
    result.f1 = o.f1;
    result.fold_f1s = {o.f1};
    result.mean_f1 = o.f1;
    result.ci_half_width = 0.0;
    return result;
}

EvalResult run_folds(const AlignedCorpus& corpus, const Scorer& scorer, std::size_t m, int folds,
                     std::uint64_t base_seed, int jobs) {
    if (folds < 1)
        throw std::invalid_argument("run_folds: folds must be >= 1");
    EvalResult result;
    result.fold_f1s.reserve(folds);
    double sum_t = 0.0, sum_p = 0.0, sum_r = 0.0, sum_f = 0.0;
    for (int k = 0; k < folds; ++k) {
        const ScoreMatrix matrix =
            build_matrix(corpus, scorer, m, mix_seed(base_seed, static_cast<std::uint64_t>(k)), jobs);
        const EvalResult fold = sweep_threshold(matrix);
        result.fold_f1s.push_back(fold.f1);
        sum_t += fold.threshold;
        sum_p += fold.precision;
        sum_r += fold.recall;
        sum_f += fold.f1;
    }
    const double n = static_cast<double>(folds);
    result.threshold = sum_t / n;
    result.precision = sum_p / n;
    result.recall = sum_r / n;
    result.f1 = sum_f / n;
    result.mean_f1 = result.f1;
    result.ci_half_width =
        folds > 1 ? student_t_975(folds - 1) * sample_std(result.fold_f1s) / std::sqrt(n) : 0.0;
    return result;
}

Fingerprint fingerprint(std::span<const AlignedCorpus> subcorpora, const Scorer& scorer,
                        std::size_t pairs_per_corpus, int folds, std::uint64_t seed) {
    if (subcorpora.empty())
        throw std::invalid_argument("fingerprint: no sub-corpora");
    if (pairs_per_corpus < 1)
        throw std::invalid_argument("fingerprint: pairs_per_corpus must be >= 1");
    if (folds < 1)
        throw std::invalid_argument("fingerprint: folds must be >= 1");
    for (const AlignedCorpus& corpus : subcorpora)
        if (corpus.size() < pairs_per_corpus + 1)
            throw std::invalid_argument("fingerprint: sub-corpus '" + corpus.subcorpus + "' has " +
                                        std::to_string(corpus.size()) + " pairs, needs at least " +
                                        std::to_string(pairs_per_corpus + 1));

    Fingerprint fp;
    const auto bin_of = [](double score) {
        const int b = static_cast<int>(std::floor(score * 100.0));
        return static_cast<std::size_t>(std::clamp(b, 0, 99));
    };

    double sum_t = 0.0, sum_p = 0.0, sum_r = 0.0, sum_f = 0.0;
    std::vector<std::pair<double, bool>> cells;
    for (int f = 0; f < folds; ++f) {
        cells.clear();
        const std::uint64_t fold_seed = mix_seed(seed, static_cast<std::uint64_t>(f));
        for (std::size_t c = 0; c < subcorpora.size(); ++c) {
            const AlignedCorpus& corpus = subcorpora[c];
            const std::size_t n = corpus.size();
            Rng rng(mix_seed(fold_seed, c));

            // pairs_per_corpus distinct pairs: partial Fisher-Yates.
            std::vector<std::size_t> order(n);
            std::iota(order.begin(), order.end(), std::size_t{0});
            for (std::size_t k = 0; k < pairs_per_corpus; ++k)
                std::swap(order[k], order[k + rng.below(n - k)]);

            for (std::size_t k = 0; k < pairs_per_corpus; ++k) {
                const std::size_t i = order[k];
                const TextUnit& src = corpus.pairs[i].source;

                const double pos = safe_score(scorer, src, corpus.pairs[i].target).value;
                ++fp.pos_hist[bin_of(pos)];
                ++fp.n_pos;
                cells.emplace_back(pos, true);

                std::size_t j;
                do {
                    j = rng.below(n);
                } while (j == i);
                const double neg = safe_score(scorer, src, corpus.pairs[j].target).value;
                ++fp.neg_hist[bin_of(neg)];
                ++fp.n_neg;
                cells.emplace_back(neg, false);
            }
        }
        const FoldOutcome o = sweep_cells(cells);
        sum_t += o.threshold;
        sum_p += o.precision;
        sum_r += o.recall;
        sum_f += o.f1;
    }
    const double n = static_cast<double>(folds);
    fp.best = {sum_t / n, sum_p / n, sum_r / n, sum_f / n};
    return fp;
}

void dump_matrix_csv(const ScoreMatrix& matrix, std::ostream& out) {
    out << "row_id,col_rank,target_id,score,is_relevant\n";
    for (std::size_t i = 0; i < matrix.rows.size(); ++i)
        for (std::size_t r = 0; r < matrix.rows[i].size(); ++r) {
            const MatrixCell& cell = matrix.rows[i][r];
            out << i << ',' << r << ',' << cell.target_id << ',' << fmt("%.12g", cell.score) << ','
                << (cell.relevant ? 1 : 0) << '\n';
        }
}

std::string fingerprint_csv(const Fingerprint& fp) {
    std::ostringstream out;
    out << "bin,pos_count,neg_count\n";
    for (std::size_t b = 0; b < 100; ++b)
        out << b << ',' << fp.pos_hist[b] << ',' << fp.neg_hist[b] << '\n';
    out << "summary,threshold=" << fmt("%.6f", fp.best.threshold)
        << ";precision=" << fmt("%.6f", fp.best.precision) << ";recall=" << fmt("%.6f", fp.best.recall)
        << ";f1=" << fmt("%.6f", fp.best.f1) << ",n_pos=" << fp.n_pos << ";n_neg=" << fp.n_neg << '\n';
    return out.str();
}

std::string fingerprint_svg(const Fingerprint& fp) {
    const int bar_w = 7, half_h = 160, margin = 24;
    const int width = margin * 2 + 100 * bar_w;
    const int height = margin * 2 + half_h * 2;
    std::uint64_t peak = 1;
    for (std::size_t b = 0; b < 100; ++b) peak = std::max({peak, fp.pos_hist[b], fp.neg_hist[b]});

    std::ostringstream out;
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
        << "\">\n";
    out << "<rect width=\"" << width << "\" height=\"" << height << "\" fill=\"white\"/>\n";
    const int axis_y = margin + half_h;
    for (std::size_t b = 0; b < 100; ++b) {
        const int x = margin + static_cast<int>(b) * bar_w;
        const int up = static_cast<int>(static_cast<double>(fp.pos_hist[b]) / static_cast<double>(peak) *
                                        half_h);
        const int down = static_cast<int>(static_cast<double>(fp.neg_hist[b]) /
                                          static_cast<double>(peak) * half_h);
        if (up > 0)
            out << "<rect x=\"" << x << "\" y=\"" << axis_y - up << "\" width=\"" << bar_w - 1
                << "\" height=\"" << up << "\" fill=\"white\" stroke=\"black\"/>\n";
        if (down > 0)
            out << "<rect x=\"" << x << "\" y=\"" << axis_y << "\" width=\"" << bar_w - 1
                << "\" height=\"" << down << "\" fill=\"black\"/>\n";
    }
    out << "<line x1=\"" << margin << "\" y1=\"" << axis_y << "\" x2=\"" << width - margin
        << "\" y2=\"" << axis_y << "\" stroke=\"black\"/>\n";
    out << "<text x=\"" << margin << "\" y=\"" << height - 6 << "\" font-size=\"12\">0</text>\n";
    out << "<text x=\"" << width - margin - 24 << "\" y=\"" << height - 6
        << "\" font-size=\"12\">100</text>\n";
    out << "</svg>\n";
    return out.str();
}

} // namespace xling
