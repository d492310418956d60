#pragma once

#include <cstdint>
#include <filesystem>
#include <limits>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "xling/corpus.hpp"

namespace xling {

// Source word used for the IBM-1 empty alignment. The tokenizer strips '<'
// and '>' at token boundaries, so no real token can ever collide with it.
inline constexpr std::string_view kNullToken = "<NULL>";

// Maps a source word to the set of its target-language translations.
// Lookup of an absent word returns the empty set, never an error.
class BilingualLexicon {
public:
    BilingualLexicon() = default;
    BilingualLexicon(LanguageTag src, LanguageTag tgt) : src_lang_(src), tgt_lang_(tgt) {}

    void add(std::string_view src_word, std::string_view tgt_word);
    const std::set<std::string>& lookup(std::string_view word) const;

    const LanguageTag& src_lang() const { return src_lang_; }
    const LanguageTag& tgt_lang() const { return tgt_lang_; }
    std::size_t size() const { return entries_.size(); }
    const std::map<std::string, std::set<std::string>, std::less<>>& entries() const { return entries_; }

private:
    std::map<std::string, std::set<std::string>, std::less<>> entries_;
    LanguageTag src_lang_;
    LanguageTag tgt_lang_;
};

// Unigram translation probabilities p(target | source). Rows of a freshly
// trained table sum to 1 (within 1e-6); pruning may leave them below 1.
class TranslationTable {
public:
    using Row = std::map<std::string, double, std::less<>>;

    TranslationTable() = default;
    TranslationTable(LanguageTag src, LanguageTag tgt) : src_lang_(src), tgt_lang_(tgt) {}

    void set(std::string_view src_word, std::string_view tgt_word, double p);
    double prob(std::string_view src_word, std::string_view tgt_word) const;
    const Row* row(std::string_view src_word) const;

    const LanguageTag& src_lang() const { return src_lang_; }
    const LanguageTag& tgt_lang() const { return tgt_lang_; }
    bool pruned() const { return pruned_; }
    void mark_pruned() { pruned_ = true; }
    std::size_t source_count() const { return probs_.size(); }
    const std::map<std::string, Row, std::less<>>& rows() const { return probs_; }

private:
    std::map<std::string, Row, std::less<>> probs_;
    LanguageTag src_lang_;
    LanguageTag tgt_lang_;
    bool pruned_ = false;
};

// Gaussian statistics of the target/source character-length ratio.
struct LengthStats {
    double mu = 1.0;
    double sigma = 1e-6;
};

// IBM Model 1 expectation-maximization over the aligned pairs, including a
// NULL source token. Deterministic; no randomness anywhere. If log_likelihood
// is given it receives one entry per iteration, measured after that
// iteration's update (non-decreasing by EM).
TranslationTable train_ibm1(const AlignedCorpus& parallel, int iterations,
                            std::vector<double>* log_likelihood = nullptr);

inline constexpr std::size_t kKeepAllTargets = std::numeric_limits<std::size_t>::max();

// Keeps per source word the top_k most probable targets with p >= min_prob.
// Probabilities are kept as-is (no renormalization); ties break by word.
TranslationTable prune_table(const TranslationTable& table, std::size_t top_k, double min_prob);

// TSV: source_word<TAB>target_word, one pair per line, '#' comments ignored.
BilingualLexicon load_lexicon(const std::filesystem::path& path, LanguageTag src, LanguageTag tgt);

// TSV: source_word<TAB>target_word<TAB>probability, 12 significant digits.
// load_table flags the result as pruned when some row sums below 1.
void save_table(const TranslationTable& table, const std::filesystem::path& path);
TranslationTable load_table(const std::filesystem::path& path, LanguageTag src, LanguageTag tgt);

// mu/sigma of target/source char-length ratios over >= 2 pairs; sigma is the
// sample standard deviation floored at 1e-6.
LengthStats estimate_length_stats(const AlignedCorpus& parallel);

void save_length_stats(const LengthStats& stats, const std::filesystem::path& path);
LengthStats load_length_stats(const std::filesystem::path& path);

} // namespace xling
