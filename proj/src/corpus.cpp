#include "xling/corpus.hpp"

#include <cctype>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

#include "xling/rng.hpp"

namespace xling {

namespace {

bool is_space_byte(unsigned char c) {
    return c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == '\f' || c == '\v';
}

char ascii_lower(unsigned char c) {
    return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : static_cast<char>(c);
}

bool ascii_punct(unsigned char c) {
    return c < 128 && std::ispunct(c);
}

} // namespace

std::string trim(std::string_view s) {
    std::size_t b = 0, e = s.size();
    while (b < e && is_space_byte(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && is_space_byte(static_cast<unsigned char>(s[e - 1]))) --e;
    return std::string(s.substr(b, e - b));
}

std::size_t count_codepoints(std::string_view s) {
    std::size_t n = 0;
    for (unsigned char c : s)
        if ((c & 0xc0) != 0x80) ++n;
    return n;
}

LanguageTag::LanguageTag(std::string_view code) {
    if (code.size() != 2 || !std::isalpha(static_cast<unsigned char>(code[0])) ||
        !std::isalpha(static_cast<unsigned char>(code[1])))
        throw std::invalid_argument("language tag must be two letters, got '" + std::string(code) + "'");
    code_ = {ascii_lower(static_cast<unsigned char>(code[0])),
             ascii_lower(static_cast<unsigned char>(code[1]))};
}

Granularity parse_granularity(std::string_view s) {
    std::string t;
    for (char c : s) t += ascii_lower(static_cast<unsigned char>(c));
    if (t == "document") return Granularity::Document;
    if (t == "sentence") return Granularity::Sentence;
    if (t == "chunk") return Granularity::Chunk;
    throw std::invalid_argument("unknown granularity '" + std::string(s) + "'");
}

std::string_view to_string(Granularity g) {
    switch (g) {
        case Granularity::Document: return "document";
        case Granularity::Sentence: return "sentence";
        case Granularity::Chunk: return "chunk";
    }
    return "?";
}

TextUnit make_unit(std::string id, LanguageTag lang, Granularity gran, std::string_view raw) {
    TextUnit u;
    u.id = std::move(id);
    u.lang = lang;
    u.gran = gran;
    u.raw = trim(raw);
    if (u.raw.empty())
        throw std::invalid_argument("text unit '" + u.id + "' is blank");
    u.char_len = count_codepoints(u.raw);
    return u;
}

AlignedCorpus corpus_from_lines(const std::vector<std::pair<std::string, std::string>>& lines,
                                const CorpusDescriptor& meta) {
    if (meta.src_lang == meta.tgt_lang)
        throw std::invalid_argument("aligned corpus needs two distinct languages, got '" +
                                    meta.src_lang.code() + "' twice");
    AlignedCorpus corpus;
    corpus.src_lang = meta.src_lang;
    corpus.tgt_lang = meta.tgt_lang;
    corpus.gran = meta.gran;
    corpus.subcorpus = meta.subcorpus;
    corpus.pairs.reserve(lines.size());
    for (std::size_t i = 0; i < lines.size(); ++i) {
        const std::string src = trim(lines[i].first);
        const std::string tgt = trim(lines[i].second);
        if (src.empty() || tgt.empty()) {
            ++corpus.dropped_pairs;
            continue;
        }
        const std::string stem = meta.subcorpus + "#" + std::to_string(i + 1);
        AlignedPair pair;
        pair.source = make_unit(stem + ".s", meta.src_lang, meta.gran, src);
        pair.target = make_unit(stem + ".t", meta.tgt_lang, meta.gran, tgt);
        pair.subcorpus = meta.subcorpus;
        corpus.pairs.push_back(std::move(pair));
    }
    return corpus;
}

namespace {

std::vector<std::string> read_lines(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("cannot open corpus file: " + path.string());
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) lines.push_back(line);
    return lines;
}

} // namespace

AlignedCorpus load_corpus(const std::filesystem::path& src_file,
                          const std::filesystem::path& tgt_file,
                          const CorpusDescriptor& meta) {
    std::vector<std::string> src = read_lines(src_file);
    std::vector<std::string> tgt = read_lines(tgt_file);
    if (src.size() != tgt.size())
        throw std::runtime_error("aligned files differ in line count: " + std::to_string(src.size()) +
                                 " vs " + std::to_string(tgt.size()) + " (" + src_file.string() + ", " +
                                 tgt_file.string() + ")");
    std::vector<std::pair<std::string, std::string>> lines;
    lines.reserve(src.size());
    for (std::size_t i = 0; i < src.size(); ++i)
        lines.emplace_back(std::move(src[i]), std::move(tgt[i]));
    return corpus_from_lines(lines, meta);
}

CorpusManifest read_manifest(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("cannot open manifest: " + path.string());
    std::map<std::string, std::string> kv;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        const std::size_t eq = t.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error(path.string() + ":" + std::to_string(lineno) +
                                     ": expected 'key = value'");
        const std::string key = trim(t.substr(0, eq));
        const std::string value = trim(t.substr(eq + 1));
        if (!kv.emplace(key, value).second)
            throw std::runtime_error(path.string() + ":" + std::to_string(lineno) + ": duplicate key '" +
                                     key + "'");
    }
    const auto require = [&](const std::string& key) -> const std::string& {
        auto it = kv.find(key);
        if (it == kv.end())
            throw std::runtime_error(path.string() + ": missing manifest key '" + key + "'");
        return it->second;
    };
    static const std::set<std::string> known = {"src_lang", "tgt_lang", "granularity",
                                                "subcorpus", "src_file", "tgt_file"};
    for (const auto& [key, value] : kv)
        if (!known.count(key))
            throw std::runtime_error(path.string() + ": unknown manifest key '" + key + "'");

    CorpusManifest m;
    m.desc.src_lang = LanguageTag(require("src_lang"));
    m.desc.tgt_lang = LanguageTag(require("tgt_lang"));
    m.desc.gran = parse_granularity(require("granularity"));
    m.desc.subcorpus = require("subcorpus");
    const std::filesystem::path base = path.parent_path();
    const auto resolve = [&](const std::string& p) {
        std::filesystem::path fp(p);
        return fp.is_absolute() ? fp : base / fp;
    };
    m.src_file = resolve(require("src_file"));
    m.tgt_file = resolve(require("tgt_file"));
    return m;
}

AlignedCorpus load_manifest_corpus(const std::filesystem::path& path) {
    const CorpusManifest m = read_manifest(path);
    return load_corpus(m.src_file, m.tgt_file, m.desc);
}

std::vector<std::size_t> sample_units(const AlignedCorpus& corpus, std::size_t m, std::uint64_t seed) {
    if (corpus.empty())
        throw std::invalid_argument("sample_units: corpus is empty");
    if (m == 0)
        throw std::invalid_argument("sample_units: m must be >= 1");
    std::vector<std::size_t> picks;
    picks.reserve(m - 1);
    Rng rng(seed);
    for (std::size_t k = 0; k + 1 < m; ++k)
        picks.push_back(static_cast<std::size_t>(rng.below(corpus.size())));
    return picks;
}

std::string normalize_c3g(std::string_view text) {
    std::string out;
    out.reserve(text.size());
    for (unsigned char c : text) {
        const char lc = ascii_lower(c);
        const bool keep = (lc >= 'a' && lc <= 'z') || (lc >= '0' && lc <= '9') || lc == ' ';
        if (!keep) continue;
        if (lc == ' ' && (out.empty() || out.back() == ' ')) continue;
        out += lc;
    }
    if (!out.empty() && out.back() == ' ') out.pop_back();
    return out;
}

std::vector<std::string> tokenize_words(std::string_view text) {
    std::vector<std::string> tokens;
    std::size_t i = 0;
    const std::size_t n = text.size();
    while (i < n) {
        while (i < n && is_space_byte(static_cast<unsigned char>(text[i]))) ++i;
        std::size_t j = i;
        while (j < n && !is_space_byte(static_cast<unsigned char>(text[j]))) ++j;
        if (j > i) {
            std::size_t b = i, e = j;
            while (b < e && ascii_punct(static_cast<unsigned char>(text[b]))) ++b;
            while (e > b && ascii_punct(static_cast<unsigned char>(text[e - 1]))) --e;
            if (e > b) {
                std::string tok;
                tok.reserve(e - b);
                for (std::size_t k = b; k < e; ++k)
                    tok += ascii_lower(static_cast<unsigned char>(text[k]));
                tokens.push_back(std::move(tok));
            }
        }
        i = j;
    }
    return tokens;
}

} // namespace xling
