#pragma once

#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "xling/corpus.hpp"
#include "xling/rng.hpp"

namespace testutil {

// Scratch directory under the system temp root, removed on destruction.
class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        static std::uint64_t counter = 0;
        path_ = std::filesystem::temp_directory_path() /
                ("xling_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const { return path_; }
    std::filesystem::path file(const std::string& name) const { return path_ / name; }

    std::filesystem::path write(const std::string& name, const std::string& content) const {
        const std::filesystem::path p = path_ / name;
        std::ofstream out(p, std::ios::binary);
        out << content;
        return p;
    }

private:
    std::filesystem::path path_;
};

inline xling::TextUnit unit(const std::string& id, const std::string& lang, const std::string& raw) {
    return xling::make_unit(id, xling::LanguageTag(lang), xling::Granularity::Sentence, raw);
}

// Aligned corpus over explicit (source, target) line pairs.
inline xling::AlignedCorpus corpus_of(const std::vector<std::pair<std::string, std::string>>& lines,
                                      const std::string& src = "fr", const std::string& tgt = "en",
                                      const std::string& label = "toy") {
    xling::CorpusDescriptor desc;
    desc.src_lang = xling::LanguageTag(src);
    desc.tgt_lang = xling::LanguageTag(tgt);
    desc.gran = xling::Granularity::Sentence;
    desc.subcorpus = label;
    return xling::corpus_from_lines(lines, desc);
}

// Random text mixing ASCII words, accents, punctuation and a few multi-byte
// code points; never all-whitespace.
inline std::string random_text(xling::Rng& rng, std::size_t max_words = 8) {
    static const std::vector<std::string> pieces = {
        "maison", "house",  "chat",  "cat",   "fleur", "flower", "rouge",  "red",
        "livre",  "book",   "eau",   "water", "soleil", "sun",   "lune",   "moon",
        "\xc3\xa9" "cole",  "\xc3\xaa" "tre", "ni\xc3\xb1o",     "se\xc3\xb1or",
        "\xe6\x97\xa5\xe6\x9c\xac", "\xf0\x9f\x99\x82", "don't", "it's",  "co-op", "123",
        "A1",     "Z9"};
    static const std::vector<std::string> junk = {"", ",", ".", "!", "?", "--", "...", "\"", "(", ")"};
    const std::size_t n = 1 + rng.below(max_words);
    std::string text;
    for (std::size_t i = 0; i < n; ++i) {
        if (i) text += ' ';
        text += junk[rng.below(junk.size())];
        text += pieces[rng.below(pieces.size())];
        text += junk[rng.below(junk.size())];
    }
    return text;
}

inline xling::TextUnit random_unit(xling::Rng& rng, const std::string& lang, const std::string& id) {
    return unit(id, lang, random_text(rng));
}

} // namespace testutil
