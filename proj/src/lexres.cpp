#include "xling/lexres.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace xling {

namespace {

std::string ascii_lower_copy(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    for (unsigned char c : s)
        out += (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : static_cast<char>(c);
    return out;
}

std::string format_prob(double p) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.12g", p);
    return buf;
}

std::vector<std::string> split_tabs(const std::string& line) {
    std::vector<std::string> fields;
    std::size_t start = 0;
    for (;;) {
        const std::size_t tab = line.find('\t', start);
        if (tab == std::string::npos) {
            fields.push_back(line.substr(start));
            return fields;
        }
        fields.push_back(line.substr(start, tab - start));
        start = tab + 1;
    }
}

} // namespace

void BilingualLexicon::add(std::string_view src_word, std::string_view tgt_word) {
    if (src_word.empty() || tgt_word.empty())
        throw std::invalid_argument("lexicon words must be non-empty");
    entries_[ascii_lower_copy(src_word)].insert(ascii_lower_copy(tgt_word));
}

const std::set<std::string>& BilingualLexicon::lookup(std::string_view word) const {
    static const std::set<std::string> empty;
    const auto it = entries_.find(word);
    return it == entries_.end() ? empty : it->second;
}

void TranslationTable::set(std::string_view src_word, std::string_view tgt_word, double p) {
    if (!(p > 0.0 && p <= 1.0))
        throw std::invalid_argument("translation probability out of range (0,1]: " + format_prob(p));
    probs_[std::string(src_word)][std::string(tgt_word)] = p;
}

double TranslationTable::prob(std::string_view src_word, std::string_view tgt_word) const {
    const auto row_it = probs_.find(src_word);
    if (row_it == probs_.end()) return 0.0;
    const auto it = row_it->second.find(tgt_word);
    return it == row_it->second.end() ? 0.0 : it->second;
}

const TranslationTable::Row* TranslationTable::row(std::string_view src_word) const {
    const auto it = probs_.find(src_word);
    return it == probs_.end() ? nullptr : &it->second;
}

TranslationTable train_ibm1(const AlignedCorpus& parallel, int iterations,
                            std::vector<double>* log_likelihood) {
    if (parallel.empty())
        throw std::invalid_argument("train_ibm1: corpus is empty");
    if (iterations < 1)
        throw std::invalid_argument("train_ibm1: iterations must be >= 1");

    // Integer vocabularies; source id 0 is the NULL word.
    std::map<std::string, int> src_ids, tgt_ids;
    std::vector<std::string> src_names{std::string(kNullToken)}, tgt_names;
    const auto intern = [](std::map<std::string, int>& ids, std::vector<std::string>& names,
                           const std::string& w) {
        const auto [it, inserted] = ids.emplace(w, static_cast<int>(names.size()));
        if (inserted) names.push_back(w);
        return it->second;
    };

    struct Sentence {
        std::vector<std::pair<int, int>> src; // (word id, count), id-sorted
        std::vector<std::pair<int, int>> tgt;
        int src_tokens = 0;
    };
    const auto bag = [](std::vector<int>& ids) {
        std::sort(ids.begin(), ids.end());
        std::vector<std::pair<int, int>> out;
        for (int id : ids) {
            if (!out.empty() && out.back().first == id)
                ++out.back().second;
            else
                out.emplace_back(id, 1);
        }
        return out;
    };

    std::vector<Sentence> sentences;
    sentences.reserve(parallel.size());
    for (const AlignedPair& pair : parallel.pairs) {
        std::vector<int> s, t;
        for (const std::string& w : tokenize_words(pair.source.raw))
            s.push_back(intern(src_ids, src_names, w));
        for (const std::string& w : tokenize_words(pair.target.raw))
            t.push_back(intern(tgt_ids, tgt_names, w));
        if (s.empty() || t.empty()) continue;
        Sentence sent;
        sent.src_tokens = static_cast<int>(s.size());
        sent.src = bag(s);
        sent.tgt = bag(t);
        sentences.push_back(std::move(sent));
    }
    if (sentences.empty())
        throw std::invalid_argument("train_ibm1: corpus has no tokenizable pairs");

    const int n_src = static_cast<int>(src_names.size());
    const int n_tgt = static_cast<int>(tgt_names.size());

    // Co-occurrence structure (CSR): per source word, the sorted distinct
    // target words it can translate to. NULL co-occurs with everything.
    std::vector<std::vector<int>> cooc(n_src);
    {
        std::vector<std::set<int>> sets(n_src);
        for (const Sentence& sent : sentences)
            for (const auto& s : sent.src)
                for (const auto& t : sent.tgt) sets[s.first].insert(t.first);
        for (int t = 0; t < n_tgt; ++t) cooc[0].push_back(t);
        for (int s = 1; s < n_src; ++s) cooc[s].assign(sets[s].begin(), sets[s].end());
    }

    std::vector<std::vector<double>> prob(n_src), count(n_src);
    for (int s = 0; s < n_src; ++s) {
        prob[s].assign(cooc[s].size(), cooc[s].empty() ? 0.0 : 1.0 / static_cast<double>(cooc[s].size()));
        count[s].assign(cooc[s].size(), 0.0);
    }

    const auto prob_at = [&](int s, int t) -> double {
        const auto& ids = cooc[s];
        const auto it = std::lower_bound(ids.begin(), ids.end(), t);
        if (it == ids.end() || *it != t) return 0.0;
        return prob[s][static_cast<std::size_t>(it - ids.begin())];
    };
    const auto slot_of = [&](int s, int t) -> std::size_t {
        const auto& ids = cooc[s];
        return static_cast<std::size_t>(std::lower_bound(ids.begin(), ids.end(), t) - ids.begin());
    };

    if (log_likelihood) log_likelihood->clear();
    for (int iter = 0; iter < iterations; ++iter) {
        for (auto& row : count) std::fill(row.begin(), row.end(), 0.0);

        for (const Sentence& sent : sentences) {
            for (const auto& [t, tc] : sent.tgt) {
                double denom = prob_at(0, t);
                for (const auto& [s, sc] : sent.src) denom += sc * prob_at(s, t);
                if (denom <= 0.0) continue;
                const double scale = tc / denom;
                count[0][slot_of(0, t)] += prob_at(0, t) * scale;
                for (const auto& [s, sc] : sent.src)
                    count[s][slot_of(s, t)] += sc * prob_at(s, t) * scale;
            }
        }

        for (int s = 0; s < n_src; ++s) {
            double total = 0.0;
            for (double c : count[s]) total += c;
            if (total <= 0.0) continue; // word only seen in untokenizable pairs
            for (std::size_t j = 0; j < count[s].size(); ++j) prob[s][j] = count[s][j] / total;
        }

        if (log_likelihood) {
            double ll = 0.0;
            for (const Sentence& sent : sentences) {
                const double log_len = std::log(static_cast<double>(sent.src_tokens + 1));
                for (const auto& [t, tc] : sent.tgt) {
                    double denom = prob_at(0, t);
                    for (const auto& [s, sc] : sent.src) denom += sc * prob_at(s, t);
                    if (denom > 0.0) ll += tc * (std::log(denom) - log_len);
                }
            }
            log_likelihood->push_back(ll);
        }
    }

    TranslationTable table(parallel.src_lang, parallel.tgt_lang);
    for (int s = 0; s < n_src; ++s)
        for (std::size_t j = 0; j < cooc[s].size(); ++j)
            if (prob[s][j] > 0.0) table.set(src_names[s], tgt_names[cooc[s][j]], prob[s][j]);
    return table;
}

TranslationTable prune_table(const TranslationTable& table, std::size_t top_k, double min_prob) {
    if (top_k < 1)
        throw std::invalid_argument("prune_table: top_k must be >= 1");
    if (!(min_prob >= 0.0 && min_prob < 1.0))
        throw std::invalid_argument("prune_table: min_prob must be in [0,1)");
    TranslationTable out(table.src_lang(), table.tgt_lang());
    for (const auto& [src, row] : table.rows()) {
        std::vector<std::pair<std::string, double>> kept;
        for (const auto& [tgt, p] : row)
            if (p >= min_prob) kept.emplace_back(tgt, p);
        std::sort(kept.begin(), kept.end(), [](const auto& a, const auto& b) {
            if (a.second != b.second) return a.second > b.second;
            return a.first < b.first;
        });
        if (kept.size() > top_k) kept.resize(top_k);
        for (const auto& [tgt, p] : kept) out.set(src, tgt, p);
    }
    out.mark_pruned();
    return out;
}

BilingualLexicon load_lexicon(const std::filesystem::path& path, LanguageTag src, LanguageTag tgt) {
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("cannot open lexicon: " + path.string());
    BilingualLexicon lex(src, tgt);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        const std::vector<std::string> fields = split_tabs(line);
        if (fields.size() != 2 || trim(fields[0]).empty() || trim(fields[1]).empty())
            throw std::runtime_error(path.string() + ":" + std::to_string(lineno) +
                                     ": expected 'source<TAB>target'");
        lex.add(trim(fields[0]), trim(fields[1]));
    }
    return lex;
}

void save_table(const TranslationTable& table, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("cannot write table: " + path.string());
    for (const auto& [src, row] : table.rows())
        for (const auto& [tgt, p] : row)
            out << src << '\t' << tgt << '\t' << format_prob(p) << '\n';
    if (!out)
        throw std::runtime_error("write failed: " + path.string());
}

TranslationTable load_table(const std::filesystem::path& path, LanguageTag src, LanguageTag tgt) {
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("cannot open table: " + path.string());
    TranslationTable table(src, tgt);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        const std::vector<std::string> fields = split_tabs(line);
        const auto fail = [&](const std::string& why) {
            throw std::runtime_error(path.string() + ":" + std::to_string(lineno) + ": " + why);
        };
        if (fields.size() != 3) fail("expected 'source<TAB>target<TAB>probability'");
        const std::string sw = trim(fields[0]), tw = trim(fields[1]), ps = trim(fields[2]);
        if (sw.empty() || tw.empty() || ps.empty()) fail("empty field");
        char* end = nullptr;
        const double p = std::strtod(ps.c_str(), &end);
        if (end != ps.c_str() + ps.size()) fail("malformed probability '" + ps + "'");
        if (!(p > 0.0 && p <= 1.0)) fail("probability out of range (0,1]: " + ps);
        if (table.prob(sw, tw) != 0.0) fail("duplicate entry '" + sw + "' -> '" + tw + "'");
        table.set(sw, tw, p);
    }
    for (const auto& [src_word, row] : table.rows()) {
        double sum = 0.0;
        for (const auto& [tgt_word, p] : row) sum += p;
        if (sum < 1.0 - 1e-6) {
            table.mark_pruned();
            break;
        }
    }
    return table;
}

LengthStats estimate_length_stats(const AlignedCorpus& parallel) {
    if (parallel.size() < 2)
        throw std::invalid_argument("estimate_length_stats: need at least 2 pairs, got " +
                                    std::to_string(parallel.size()));
    std::vector<double> ratios;
    ratios.reserve(parallel.size());
    for (const AlignedPair& pair : parallel.pairs)
        ratios.push_back(static_cast<double>(pair.target.char_len) /
                         static_cast<double>(pair.source.char_len));
    double mu = 0.0;
    for (double r : ratios) mu += r;
    mu /= static_cast<double>(ratios.size());
    double ss = 0.0;
    for (double r : ratios) ss += (r - mu) * (r - mu);
    const double sigma = std::sqrt(ss / static_cast<double>(ratios.size() - 1));
    return LengthStats{mu, std::max(sigma, 1e-6)};
}

void save_length_stats(const LengthStats& stats, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("cannot write length stats: " + path.string());
    out << "mu=" << format_prob(stats.mu) << "\nsigma=" << format_prob(stats.sigma) << "\n";
    if (!out)
        throw std::runtime_error("write failed: " + path.string());
}

LengthStats load_length_stats(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("cannot open length stats: " + path.string());
    LengthStats stats;
    bool have_mu = false, have_sigma = false;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        const std::size_t eq = t.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error(path.string() + ":" + std::to_string(lineno) +
                                     ": expected 'mu=...' or 'sigma=...'");
        const std::string key = trim(t.substr(0, eq));
        const std::string value = trim(t.substr(eq + 1));
        char* end = nullptr;
        const double v = std::strtod(value.c_str(), &end);
        if (end != value.c_str() + value.size())
            throw std::runtime_error(path.string() + ":" + std::to_string(lineno) +
                                     ": malformed number '" + value + "'");
        if (key == "mu") {
            stats.mu = v;
            have_mu = true;
        } else if (key == "sigma") {
            stats.sigma = v;
            have_sigma = true;
        } else {
            throw std::runtime_error(path.string() + ":" + std::to_string(lineno) + ": unknown key '" +
                                     key + "'");
        }
    }
    if (!have_mu || !have_sigma)
        throw std::runtime_error(path.string() + ": missing mu or sigma");
    if (!(stats.sigma > 0.0))
        throw std::runtime_error(path.string() + ": sigma must be positive");
    return stats;
}

} // namespace xling
