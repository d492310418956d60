#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "xling/corpus.hpp"
#include "xling/lexres.hpp"

namespace xling {

// Score plus a degenerate-input marker (unit too short to represent, nothing
// indexed, ...). Degenerate inputs score 0 rather than erroring so that
// protocol matrices stay total; the marker feeds a diagnostic counter.
struct ScoreResult {
    double value = 0.0;
    bool degenerate = false;
};

// Document-frequency statistics over a unit collection. Terms for the
// character 3-gram method are the 3-grams of the normalized text.
struct IdfIndex {
    struct StringHash {
        using is_transparent = void;
        std::size_t operator()(std::string_view s) const { return std::hash<std::string_view>{}(s); }
    };
    std::unordered_map<std::string, std::size_t, StringHash, std::equal_to<>> df;
    std::size_t n_docs = 0;
    std::string scope;

    // ln(n_docs / df), df clamped to >= 1 so unseen terms stay finite.
    double idf(std::string_view term) const;
};

// df counts units containing each character 3-gram of the normalized text
// at least once. Throws on an empty collection.
IdfIndex build_idf(std::span<const TextUnit> units, std::string scope);

// Aligned document pairs serving as the concept space: one concept id per
// pair, shared by both language sides; per-language inverted index with
// tf.idf weights (zero weights are not stored).
class ConceptIndex {
public:
    using Postings = std::vector<std::pair<std::uint32_t, double>>; // (concept, weight), sorted

    ConceptIndex() = default;

    std::size_t concept_count() const { return n_concepts_; }
    const LanguageTag& src_lang() const { return src_lang_; }
    const LanguageTag& tgt_lang() const { return tgt_lang_; }

    // Concept vector of a unit: sum of its tokens' postings on the unit's
    // language side, sorted by concept id. Throws if the unit's language is
    // not covered.
    std::vector<std::pair<std::uint32_t, double>> unit_vector(const TextUnit& unit) const;

    friend ConceptIndex build_concept_index(const AlignedCorpus& concept_pairs);

private:
    using Side = std::unordered_map<std::string, Postings, IdfIndex::StringHash, std::equal_to<>>;
    const Side& side_for(const LanguageTag& lang) const;

    Side src_index_;
    Side tgt_index_;
    LanguageTag src_lang_;
    LanguageTag tgt_lang_;
    std::size_t n_concepts_ = 0;
};

ConceptIndex build_concept_index(const AlignedCorpus& concept_pairs);

// --- the seven scoring functions ---------------------------------------

// Cosine over tf.idf vectors of character 3-grams of the normalized texts.
// Symmetric; 0 (degenerate) when a normalized text is shorter than 3 chars.
ScoreResult c3g_score(const TextUnit& a, const TextUnit& b, const IdfIndex& idf);

// Fuzzy Jaccard between the bag of a's dictionary translations and b's
// token set. Two words fuzzy-match iff equal, or edit distance <= 1 with
// both lengths >= 5; the matching is greedy over sorted order.
ScoreResult cts_score(const TextUnit& a, const TextUnit& b, const BilingualLexicon& lex);

// Gaussian length factor times the averaged translation-probability mass
// sum_{x in a} sum_{y in b} p(x|y) / (|a||b|), clamped to [0,1]. The table
// holds p(a-side word | b-side word), i.e. rows are keyed by b's language.
ScoreResult asa_score(const TextUnit& a, const TextUnit& b, const TranslationTable& table,
                      const LengthStats& len_stats);

// Cosine of the two concept vectors. Symmetric; 0 when a unit hits nothing.
ScoreResult esa_score(const TextUnit& a, const TextUnit& b, const ConceptIndex& index);

// Strict Jaccard between the pseudo-translation of a (tokens replaced by
// their translation sets; kept as-is when absent) and b's token set.
ScoreResult tma_score(const TextUnit& a, const TextUnit& b, const BilingualLexicon& lex);

// exp(-((len(b)/len(a) - mu) / sigma)^2 / 2) over character lengths.
ScoreResult length_model_score(const TextUnit& a, const TextUnit& b, const LengthStats& len_stats);

// Uniform in [0,1), a pure function of (seed, a.id, b.id).
ScoreResult random_score(const TextUnit& a, const TextUnit& b, std::uint64_t seed);

// --- scorer objects ------------------------------------------------------

// A scorer is frozen at construction and safe for concurrent score() calls.
class Scorer {
public:
    virtual ~Scorer() = default;
    virtual ScoreResult score(const TextUnit& a, const TextUnit& b) const = 0;
    virtual std::string_view name() const = 0;
};

class C3gScorer final : public Scorer {
public:
    explicit C3gScorer(std::shared_ptr<const IdfIndex> idf) : idf_(std::move(idf)) {}
    ScoreResult score(const TextUnit& a, const TextUnit& b) const override { return c3g_score(a, b, *idf_); }
    std::string_view name() const override { return "c3g"; }

private:
    std::shared_ptr<const IdfIndex> idf_;
};

class CtsScorer final : public Scorer {
public:
    explicit CtsScorer(std::shared_ptr<const BilingualLexicon> lex) : lex_(std::move(lex)) {}
    ScoreResult score(const TextUnit& a, const TextUnit& b) const override { return cts_score(a, b, *lex_); }
    std::string_view name() const override { return "cts"; }

private:
    std::shared_ptr<const BilingualLexicon> lex_;
};

class AsaScorer final : public Scorer {
public:
    AsaScorer(std::shared_ptr<const TranslationTable> table, LengthStats stats)
        : table_(std::move(table)), stats_(stats) {}
    ScoreResult score(const TextUnit& a, const TextUnit& b) const override {
        return asa_score(a, b, *table_, stats_);
    }
    std::string_view name() const override { return "asa"; }

private:
    std::shared_ptr<const TranslationTable> table_;
    LengthStats stats_;
};

class EsaScorer final : public Scorer {
public:
    explicit EsaScorer(std::shared_ptr<const ConceptIndex> index) : index_(std::move(index)) {}
    ScoreResult score(const TextUnit& a, const TextUnit& b) const override { return esa_score(a, b, *index_); }
    std::string_view name() const override { return "esa"; }

private:
    std::shared_ptr<const ConceptIndex> index_;
};

class TmaScorer final : public Scorer {
public:
    explicit TmaScorer(std::shared_ptr<const BilingualLexicon> lex) : lex_(std::move(lex)) {}
    // Builds the translation sets from a probability table instead, keeping
    // the top_k most likely targets per source word.
    TmaScorer(const TranslationTable& table, std::size_t top_k);
    ScoreResult score(const TextUnit& a, const TextUnit& b) const override { return tma_score(a, b, *lex_); }
    std::string_view name() const override { return "tma"; }

private:
    std::shared_ptr<const BilingualLexicon> lex_;
};

class LengthModelScorer final : public Scorer {
public:
    explicit LengthModelScorer(LengthStats stats) : stats_(stats) {}
    ScoreResult score(const TextUnit& a, const TextUnit& b) const override {
        return length_model_score(a, b, stats_);
    }
    std::string_view name() const override { return "len"; }

private:
    LengthStats stats_;
};

class RandomScorer final : public Scorer {
public:
    explicit RandomScorer(std::uint64_t seed) : seed_(seed) {}
    ScoreResult score(const TextUnit& a, const TextUnit& b) const override {
        return random_score(a, b, seed_);
    }
    std::string_view name() const override { return "rand"; }

private:
    std::uint64_t seed_;
};

// Synthetic validation scorer: 1 for a unit and its aligned counterpart,
// 0 otherwise. Relies on the loader's id convention (<stem>.s / <stem>.t).
class OracleScorer final : public Scorer {
public:
    ScoreResult score(const TextUnit& a, const TextUnit& b) const override;
    std::string_view name() const override { return "oracle"; }
};

// Byte-level Levenshtein distance <= 1 test (shared with tests).
bool within_edit_distance_one(std::string_view a, std::string_view b);

} // namespace xling
