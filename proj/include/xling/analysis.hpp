#pragma once

#include <filesystem>
#include <istream>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "xling/corpus.hpp"

namespace xling {

// Sample Pearson correlation coefficient. Throws std::invalid_argument on
// length mismatch, fewer than 2 points, or zero variance on either side
// (an undefined correlation is an error, never a silent 0).
double pearson(std::span<const double> x, std::span<const double> y);

std::string pair_label(const LanguageTag& src, const LanguageTag& tgt);

// F1 results keyed by (method, language pair, granularity, sub-corpus),
// with a per-cell weight (pair count) for the size-weighted overall.
// The "Overall" aggregate per (method, pair, granularity) is either set
// explicitly (e.g. when loading published numbers) or computed on demand.
class ResultGrid {
public:
    struct Cell {
        double f1 = 0.0;
        double weight = 1.0;
    };

    void set(const std::string& method, const std::string& pair, Granularity gran,
             const std::string& subcorpus, double f1, double weight = 1.0);
    void set_overall(const std::string& method, const std::string& pair, Granularity gran, double f1);

    // Weighted mean of the sub-corpus F1s unless an explicit overall exists;
    // use_weights(false) switches to the unweighted macro mean.
    std::optional<double> overall(const std::string& method, const std::string& pair,
                                  Granularity gran) const;

    void use_weights(bool on) { use_weights_ = on; }

    bool empty() const { return cells_.empty() && overalls_.empty(); }
    std::set<std::string> methods(Granularity gran) const;
    std::set<std::string> pairs(Granularity gran) const;
    std::set<Granularity> granularities() const;
    std::set<std::string> subcorpora(Granularity gran) const;
    std::optional<double> cell(const std::string& method, const std::string& pair, Granularity gran,
                               const std::string& subcorpus) const;

private:
    using Key = std::tuple<std::string, std::string, int, std::string>; // method, pair, gran, sub
    std::map<Key, Cell> cells_;
    std::map<std::tuple<std::string, std::string, int>, double> overalls_;
    bool use_weights_ = true;
};

// Symmetric Pearson matrix over labelled vectors, unit diagonal, plus the
// mean off-diagonal coefficient per label.
struct CorrelationReport {
    std::vector<std::string> labels;
    std::vector<std::vector<double>> r;
    std::vector<double> mean_r;
};

// One vector of method-wise overall F1s per language pair; pairwise Pearson.
// Throws std::invalid_argument listing missing (method, pair) keys.
CorrelationReport correlate_language_pairs(const ResultGrid& grid, Granularity gran);

// Chunk-vs-sentence correlations: per language pair (over method vectors)
// and per method (over pair vectors).
struct GranularityCorrelation {
    std::map<std::string, double> by_pair;
    std::map<std::string, double> by_method;
};

GranularityCorrelation correlate_granularities(const ResultGrid& grid);

struct Ranking {
    std::vector<std::string> methods;
    bool has_tie = false;
};

// Methods sorted by overall F1 descending, truncated to k; ties break
// alphabetically and set has_tie.
Ranking top_k_methods(const ResultGrid& grid, const std::string& pair, Granularity gran,
                      std::size_t k = 3);

// Reads result rows (the schema cmd_evaluate appends). Requires columns
// method, src, tgt, granularity, subcorpus, f1_mean; extra columns are
// ignored; duplicate keys keep the last row. Rows whose subcorpus is
// "Overall" set the explicit overall. Throws naming a missing column.
ResultGrid load_grid_csv(std::istream& in, const std::string& origin);
ResultGrid load_grid_csv(const std::filesystem::path& path);

// Writes CSV + Markdown renderings (overall F1 matrix, pair correlations,
// top-3 rankings, cross-granularity correlations) to out_dir. Byte
// deterministic; skips analyses the grid cannot support; throws on an
// empty grid before creating anything.
std::vector<std::filesystem::path> emit_reports(const ResultGrid& grid,
                                                const std::filesystem::path& out_dir);

// Canonical display name of a method id (c3g -> CL-C3G, ...).
std::string method_display_name(const std::string& id);

// CSV rendering of a correlation matrix: label column, one column per
// label, trailing mean-off-diagonal column.
std::string correlation_matrix_csv(const CorrelationReport& report);

// CSV rendering of labelled coefficients: "<key_header>,correlation".
std::string labelled_values_csv(std::string_view key_header,
                                const std::map<std::string, double>& values);

} // namespace xling
