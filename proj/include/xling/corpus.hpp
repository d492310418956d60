#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace xling {

// Two-letter language code (en, fr, es). Case-insensitive: tags are stored
// lower-cased, so comparisons and map lookups just work.
class LanguageTag {
public:
    LanguageTag() = default;
    explicit LanguageTag(std::string_view code);

    const std::string& code() const { return code_; }
    bool empty() const { return code_.empty(); }

    friend bool operator==(const LanguageTag&, const LanguageTag&) = default;
    friend auto operator<=>(const LanguageTag&, const LanguageTag&) = default;

private:
    std::string code_;
};

enum class Granularity { Document, Sentence, Chunk };

Granularity parse_granularity(std::string_view s);
std::string_view to_string(Granularity g);

// One textual unit (document, sentence or noun chunk). raw is stored
// whitespace-trimmed; char_len counts Unicode code points, not bytes.
struct TextUnit {
    std::string id;
    LanguageTag lang;
    Granularity gran = Granularity::Sentence;
    std::string raw;
    std::size_t char_len = 0;
};

// Trims, measures and validates; throws std::invalid_argument on blank text.
TextUnit make_unit(std::string id, LanguageTag lang, Granularity gran, std::string_view raw);

struct AlignedPair {
    TextUnit source;
    TextUnit target;
    std::string subcorpus;
};

struct CorpusDescriptor {
    LanguageTag src_lang;
    LanguageTag tgt_lang;
    Granularity gran = Granularity::Sentence;
    std::string subcorpus;
};

// A sub-corpus of aligned cross-language unit pairs at one granularity.
// Immutable once built; safe to share across threads.
struct AlignedCorpus {
    std::vector<AlignedPair> pairs;
    LanguageTag src_lang;
    LanguageTag tgt_lang;
    Granularity gran = Granularity::Sentence;
    std::string subcorpus;
    std::size_t dropped_pairs = 0; // blank pairs dropped during ingestion

    std::size_t size() const { return pairs.size(); }
    bool empty() const { return pairs.empty(); }
};

// Builds a corpus from already-split line pairs. A pair whose source or
// target line is blank after trimming is dropped whole (never one side
// alone) and counted in dropped_pairs.
AlignedCorpus corpus_from_lines(const std::vector<std::pair<std::string, std::string>>& lines,
                                const CorpusDescriptor& meta);

// Reads two line-aligned UTF-8 files (LF, trailing newline optional).
// Throws std::runtime_error on unreadable files or mismatched line counts
// ("N vs M" appears in the message).
AlignedCorpus load_corpus(const std::filesystem::path& src_file,
                          const std::filesystem::path& tgt_file,
                          const CorpusDescriptor& meta);

// Manifest: key = value lines with keys src_lang, tgt_lang, granularity,
// subcorpus, src_file, tgt_file. Relative file paths resolve against the
// manifest's directory.
struct CorpusManifest {
    CorpusDescriptor desc;
    std::filesystem::path src_file;
    std::filesystem::path tgt_file;
};

CorpusManifest read_manifest(const std::filesystem::path& path);
AlignedCorpus load_manifest_corpus(const std::filesystem::path& path);

// Draws m-1 target-unit indices uniformly with replacement, fully determined
// by seed. Throws std::invalid_argument on empty corpus or m == 0.
std::vector<std::size_t> sample_units(const AlignedCorpus& corpus, std::size_t m, std::uint64_t seed);

// Lower-cases and keeps only [a-z0-9 ]; every other byte is deleted (so
// accented letters disappear rather than transliterate), space runs collapse
// to one, ends trimmed. Idempotent.
std::string normalize_c3g(std::string_view text);

// Lower-cases ASCII, splits on whitespace, strips ASCII punctuation at token
// boundaries only (internal apostrophes and hyphens survive), drops empties.
std::vector<std::string> tokenize_words(std::string_view text);

std::size_t count_codepoints(std::string_view s);
std::string trim(std::string_view s);

} // namespace xling
