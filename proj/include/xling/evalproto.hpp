#pragma once

#include <array>
#include <cstdint>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "xling/corpus.hpp"
#include "xling/methods.hpp"

namespace xling {

struct MatrixCell {
    std::string target_id;
    double score = 0.0;
    bool relevant = false;
};

// One row per source unit: the aligned target (rank 0, flagged relevant)
// followed by m-1 distractors sampled with replacement from the other
// target units. Row i samples with seed ^ i, so rows are reproducible
// independently of evaluation order.
struct ScoreMatrix {
    std::vector<std::vector<MatrixCell>> rows;
    std::size_t m = 0;
    std::uint64_t seed = 0;
    std::size_t degenerate_cells = 0; // cells scored 0 for degenerate input or scorer error
};

ScoreMatrix build_matrix(const AlignedCorpus& corpus, const Scorer& scorer, std::size_t m,
                         std::uint64_t seed, int jobs = 1);

// Best threshold and the scores it reaches, for one fold.
struct FoldOutcome {
    double threshold = 0.0;
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
};

// Threshold sweep over (score, is_relevant) cells. Candidate thresholds are
// the midpoints between consecutive distinct scores plus 0 and 1; a cell is
// predicted when score >= threshold; ties break toward the larger threshold.
FoldOutcome sweep_cells(std::span<const std::pair<double, bool>> cells);

struct EvalResult {
    // Fold means when several folds ran, the single fold's values otherwise.
    double threshold = 0.0;
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    std::vector<double> fold_f1s;
    double mean_f1 = 0.0;
    double ci_half_width = 0.0; // Student-t 95% half-width; 0 for one fold
};

EvalResult sweep_threshold(const ScoreMatrix& matrix);

// Fold k rebuilds the matrix with a seed derived from (base_seed, k), then
// sweeps. Deterministic for fixed inputs regardless of jobs.
EvalResult run_folds(const AlignedCorpus& corpus, const Scorer& scorer, std::size_t m, int folds,
                     std::uint64_t base_seed, int jobs = 1);

// Paired histograms of match vs mismatch scores (bin = floor(score*100),
// 1.0 lands in bin 99), accumulated over folds, plus the fold-averaged best
// threshold/precision/recall/F1.
struct Fingerprint {
    std::array<std::uint64_t, 100> pos_hist{};
    std::array<std::uint64_t, 100> neg_hist{};
    std::uint64_t n_pos = 0;
    std::uint64_t n_neg = 0;
    FoldOutcome best;
};

// Per fold, per sub-corpus: draws pairs_per_corpus distinct pairs; each
// source unit is scored against its aligned target (match) and one other
// randomly chosen target (mismatch). Throws when a sub-corpus has fewer
// than pairs_per_corpus + 1 pairs, naming it.
Fingerprint fingerprint(std::span<const AlignedCorpus> subcorpora, const Scorer& scorer,
                        std::size_t pairs_per_corpus = 200, int folds = 10, std::uint64_t seed = 0);

// CSV: row_id,col_rank,target_id,score,is_relevant
void dump_matrix_csv(const ScoreMatrix& matrix, std::ostream& out);

// CSV: bin,pos_count,neg_count rows then a summary row.
std::string fingerprint_csv(const Fingerprint& fp);

// Histogram figure, matches above the axis, mismatches mirrored below.
std::string fingerprint_svg(const Fingerprint& fp);

// Two-sided 95% Student-t critical value for the given degrees of freedom.
double student_t_975(int df);

} // namespace xling
