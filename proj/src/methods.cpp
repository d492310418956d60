#include "xling/methods.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <stdexcept>

#include "xling/rng.hpp"

namespace xling {

namespace {

std::uint32_t pack_gram(const char* p) {
    return (static_cast<std::uint32_t>(static_cast<unsigned char>(p[0])) << 16) |
           (static_cast<std::uint32_t>(static_cast<unsigned char>(p[1])) << 8) |
           static_cast<std::uint32_t>(static_cast<unsigned char>(p[2]));
}

void unpack_gram(std::uint32_t key, char* out) {
    out[0] = static_cast<char>((key >> 16) & 0xff);
    out[1] = static_cast<char>((key >> 8) & 0xff);
    out[2] = static_cast<char>(key & 0xff);
}

// Cosine over key-sorted sparse vectors. Exactly 1 for identical vectors and
// exactly symmetric: the merged iteration order and the commutativity of
// IEEE multiplication make score(a,b) and score(b,a) the same bit pattern.
template <typename K>
double cosine_sorted(const std::vector<std::pair<K, double>>& u,
                     const std::vector<std::pair<K, double>>& v) {
    if (u.empty() || v.empty()) return 0.0;
    if (u == v) return 1.0;
    double dot = 0.0;
    std::size_t i = 0, j = 0;
    while (i < u.size() && j < v.size()) {
        if (u[i].first < v[j].first)
            ++i;
        else if (v[j].first < u[i].first)
            ++j;
        else {
            dot += u[i].second * v[j].second;
            ++i;
            ++j;
        }
    }
    if (dot <= 0.0) return 0.0;
    double qu = 0.0, qv = 0.0;
    for (const auto& e : u) qu += e.second * e.second;
    for (const auto& e : v) qv += e.second * e.second;
    return std::clamp(dot / std::sqrt(qu * qv), 0.0, 1.0);
}

std::vector<std::pair<std::uint32_t, double>> c3g_vector(const std::string& normalized,
                                                         const IdfIndex& idf) {
    std::map<std::uint32_t, int> tf;
    for (std::size_t i = 0; i + 3 <= normalized.size(); ++i)
        ++tf[pack_gram(normalized.data() + i)];
    std::vector<std::pair<std::uint32_t, double>> vec;
    vec.reserve(tf.size());
    char gram[3];
    for (const auto& [key, count] : tf) {
        unpack_gram(key, gram);
        const double w = count * idf.idf(std::string_view(gram, 3));
        if (w > 0.0) vec.emplace_back(key, w);
    }
    return vec;
}

// Bag of all available translations; a word without an entry stands for
// itself.
std::set<std::string> translation_bag(const std::vector<std::string>& tokens,
                                      const BilingualLexicon& lex) {
    std::set<std::string> bag;
    for (const std::string& tok : tokens) {
        const auto& translations = lex.lookup(tok);
        if (translations.empty())
            bag.insert(tok);
        else
            bag.insert(translations.begin(), translations.end());
    }
    return bag;
}

bool fuzzy_word_match(const std::string& a, const std::string& b) {
    if (a == b) return true;
    if (a.size() < 5 || b.size() < 5) return false;
    return within_edit_distance_one(a, b);
}

} // namespace

bool within_edit_distance_one(std::string_view a, std::string_view b) {
    if (a.size() > b.size()) std::swap(a, b);
    if (b.size() - a.size() > 1) return false;
    if (a.size() == b.size()) {
        int diffs = 0;
        for (std::size_t i = 0; i < a.size(); ++i)
            if (a[i] != b[i] && ++diffs > 1) return false;
        return true;
    }
    // one insertion into the shorter string
    std::size_t i = 0, j = 0;
    bool skipped = false;
    while (i < a.size() && j < b.size()) {
        if (a[i] == b[j]) {
            ++i;
            ++j;
        } else if (!skipped) {
            skipped = true;
            ++j;
        } else {
            return false;
        }
    }
    return true;
}

double IdfIndex::idf(std::string_view term) const {
    const auto it = df.find(term);
    const std::size_t d = std::max<std::size_t>(it == df.end() ? 1 : it->second, 1);
    return std::log(static_cast<double>(n_docs) / static_cast<double>(d));
}

IdfIndex build_idf(std::span<const TextUnit> units, std::string scope) {
    if (units.empty())
        throw std::invalid_argument("build_idf: empty unit collection");
    IdfIndex index;
    index.n_docs = units.size();
    index.scope = std::move(scope);
    std::set<std::uint32_t> seen;
    char gram[3];
    for (const TextUnit& unit : units) {
        const std::string norm = normalize_c3g(unit.raw);
        seen.clear();
        for (std::size_t i = 0; i + 3 <= norm.size(); ++i)
            seen.insert(pack_gram(norm.data() + i));
        for (std::uint32_t key : seen) {
            unpack_gram(key, gram);
            ++index.df[std::string(gram, 3)];
        }
    }
    return index;
}

const ConceptIndex::Side& ConceptIndex::side_for(const LanguageTag& lang) const {
    if (lang == src_lang_) return src_index_;
    if (lang == tgt_lang_) return tgt_index_;
    throw std::invalid_argument("concept index does not cover language '" + lang.code() + "'");
}

std::vector<std::pair<std::uint32_t, double>> ConceptIndex::unit_vector(const TextUnit& unit) const {
    const Side& side = side_for(unit.lang);
    std::map<std::uint32_t, double> acc;
    for (const std::string& tok : tokenize_words(unit.raw)) {
        const auto it = side.find(tok);
        if (it == side.end()) continue;
        for (const auto& [cid, weight] : it->second) acc[cid] += weight;
    }
    return {acc.begin(), acc.end()};
}

ConceptIndex build_concept_index(const AlignedCorpus& concept_pairs) {
    if (concept_pairs.empty())
        throw std::invalid_argument("build_concept_index: empty concept collection");
    ConceptIndex index;
    index.src_lang_ = concept_pairs.src_lang;
    index.tgt_lang_ = concept_pairs.tgt_lang;
    index.n_concepts_ = concept_pairs.size();

    const auto build_side = [&](bool source_side) {
        const std::size_t n = concept_pairs.size();
        std::vector<std::map<std::string, int>> tf(n);
        std::map<std::string, std::size_t> df;
        for (std::size_t c = 0; c < n; ++c) {
            const TextUnit& doc =
                source_side ? concept_pairs.pairs[c].source : concept_pairs.pairs[c].target;
            for (const std::string& tok : tokenize_words(doc.raw)) ++tf[c][tok];
        }
        for (std::size_t c = 0; c < n; ++c)
            for (const auto& [word, count] : tf[c]) ++df[word];
        ConceptIndex::Side side;
        for (std::size_t c = 0; c < n; ++c) {
            for (const auto& [word, count] : tf[c]) {
                const double w =
                    count * std::log(static_cast<double>(n) / static_cast<double>(df[word]));
                if (w > 0.0) side[word].emplace_back(static_cast<std::uint32_t>(c), w);
            }
        }
        return side;
    };
    index.src_index_ = build_side(true);
    index.tgt_index_ = build_side(false);
    return index;
}

ScoreResult c3g_score(const TextUnit& a, const TextUnit& b, const IdfIndex& idf) {
    const std::string na = normalize_c3g(a.raw);
    const std::string nb = normalize_c3g(b.raw);
    if (na.size() < 3 || nb.size() < 3) return {0.0, true};
    return {cosine_sorted(c3g_vector(na, idf), c3g_vector(nb, idf)), false};
}

ScoreResult cts_score(const TextUnit& a, const TextUnit& b, const BilingualLexicon& lex) {
    const std::vector<std::string> toks_a = tokenize_words(a.raw);
    const std::vector<std::string> toks_b = tokenize_words(b.raw);
    if (toks_a.empty() || toks_b.empty()) return {0.0, true};
    const std::set<std::string> bag_a = translation_bag(toks_a, lex);
    const std::set<std::string> bag_b(toks_b.begin(), toks_b.end());

    const std::vector<std::string> sa(bag_a.begin(), bag_a.end());
    const std::vector<std::string> sb(bag_b.begin(), bag_b.end());
    std::vector<bool> used(sb.size(), false);
    std::size_t matched = 0;
    for (const std::string& w : sa) {
        for (std::size_t j = 0; j < sb.size(); ++j) {
            if (used[j] || !fuzzy_word_match(w, sb[j])) continue;
            used[j] = true;
            ++matched;
            break;
        }
    }
    const std::size_t uni = sa.size() + sb.size() - matched;
    return {uni == 0 ? 0.0 : static_cast<double>(matched) / static_cast<double>(uni), false};
}

ScoreResult asa_score(const TextUnit& a, const TextUnit& b, const TranslationTable& table,
                      const LengthStats& len_stats) {
    const std::vector<std::string> toks_a = tokenize_words(a.raw);
    const std::vector<std::string> toks_b = tokenize_words(b.raw);
    if (toks_a.empty() || toks_b.empty()) return {0.0, true};

    double mass = 0.0;
    for (const std::string& y : toks_b) {
        const TranslationTable::Row* row = table.row(y);
        if (!row) continue;
        for (const std::string& x : toks_a) {
            const auto it = row->find(x);
            if (it != row->end()) mass += it->second;
        }
    }
    const double translation_factor =
        std::clamp(mass / (static_cast<double>(toks_a.size()) * static_cast<double>(toks_b.size())),
                   0.0, 1.0);
    const double ratio = static_cast<double>(a.char_len) / static_cast<double>(b.char_len);
    const double z = (ratio - len_stats.mu) / len_stats.sigma;
    return {std::exp(-0.5 * z * z) * translation_factor, false};
}

ScoreResult esa_score(const TextUnit& a, const TextUnit& b, const ConceptIndex& index) {
    const auto va = index.unit_vector(a);
    const auto vb = index.unit_vector(b);
    if (va.empty() || vb.empty()) return {0.0, true};
    return {cosine_sorted(va, vb), false};
}

ScoreResult tma_score(const TextUnit& a, const TextUnit& b, const BilingualLexicon& lex) {
    const std::vector<std::string> toks_a = tokenize_words(a.raw);
    const std::vector<std::string> toks_b = tokenize_words(b.raw);
    if (toks_a.empty() || toks_b.empty()) return {0.0, true};
    const std::set<std::string> pseudo = translation_bag(toks_a, lex);
    const std::set<std::string> bag_b(toks_b.begin(), toks_b.end());
    std::size_t inter = 0;
    for (const std::string& w : pseudo) inter += bag_b.count(w);
    const std::size_t uni = pseudo.size() + bag_b.size() - inter;
    return {uni == 0 ? 0.0 : static_cast<double>(inter) / static_cast<double>(uni), false};
}

ScoreResult length_model_score(const TextUnit& a, const TextUnit& b, const LengthStats& len_stats) {
    if (a.char_len == 0) return {0.0, true};
    const double ratio = static_cast<double>(b.char_len) / static_cast<double>(a.char_len);
    const double z = (ratio - len_stats.mu) / len_stats.sigma;
    return {std::exp(-0.5 * z * z), false};
}

ScoreResult random_score(const TextUnit& a, const TextUnit& b, std::uint64_t seed) {
    Rng outer(seed ^ fnv1a64(a.id));
    Rng inner(outer.next() ^ fnv1a64(b.id));
    return {inner.unit(), false};
}

TmaScorer::TmaScorer(const TranslationTable& table, std::size_t top_k) {
    const TranslationTable top = prune_table(table, top_k, 0.0);
    auto lex = std::make_shared<BilingualLexicon>(table.src_lang(), table.tgt_lang());
    for (const auto& [src, row] : top.rows())
        for (const auto& [tgt, p] : row) lex->add(src, tgt);
    lex_ = std::move(lex);
}

ScoreResult OracleScorer::score(const TextUnit& a, const TextUnit& b) const {
    const auto stem = [](std::string_view id) {
        if (id.size() > 2 && id[id.size() - 2] == '.' &&
            (id.back() == 's' || id.back() == 't'))
            return id.substr(0, id.size() - 2);
        return id;
    };
    return {stem(a.id) == stem(b.id) ? 1.0 : 0.0, false};
}

} // namespace xling
