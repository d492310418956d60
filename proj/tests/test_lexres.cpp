#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>

#include "helpers.hpp"
#include "xling/lexres.hpp"
#include "xling/rng.hpp"

using namespace xling;
using testutil::TempDir;

namespace {

// Independent IBM-1 EM oracle: string-keyed maps, token-level loops, no
// shared code with the production trainer.
using OracleTable = std::map<std::string, std::map<std::string, double>>;

OracleTable oracle_ibm1(const std::vector<std::pair<std::string, std::string>>& lines, int iters) {
    const std::string null_word(kNullToken);
    std::vector<std::pair<std::vector<std::string>, std::vector<std::string>>> sents;
    for (const auto& [src, tgt] : lines)
        sents.emplace_back(tokenize_words(src), tokenize_words(tgt));

    std::map<std::string, std::set<std::string>> cooc;
    for (const auto& [src, tgt] : sents)
        for (const std::string& t : tgt) {
            cooc[null_word].insert(t);
            for (const std::string& s : src) cooc[s].insert(t);
        }

    OracleTable p;
    for (const auto& [s, ts] : cooc)
        for (const std::string& t : ts) p[s][t] = 1.0 / static_cast<double>(ts.size());

    for (int it = 0; it < iters; ++it) {
        OracleTable counts;
        for (const auto& [src, tgt] : sents) {
            for (const std::string& t : tgt) {
                double denom = p[null_word][t];
                for (const std::string& s : src) denom += p[s][t];
                counts[null_word][t] += p[null_word][t] / denom;
                for (const std::string& s : src) counts[s][t] += p[s][t] / denom;
            }
        }
        for (auto& [s, row] : counts) {
            double total = 0.0;
            for (const auto& [t, c] : row) total += c;
            for (auto& [t, c] : row) p[s][t] = c / total;
        }
    }
    return p;
}

AlignedCorpus random_parallel_corpus(Rng& rng, std::size_t pairs) {
    std::vector<std::pair<std::string, std::string>> lines;
    for (std::size_t i = 0; i < pairs; ++i)
        lines.emplace_back(testutil::random_text(rng, 5), testutil::random_text(rng, 5));
    return testutil::corpus_of(lines);
}

} // namespace

TEST_CASE("train_ibm1 concentrates probability on the repeated translation") {
    const AlignedCorpus corpus =
        testutil::corpus_of({{"la maison", "the house"}, {"la fleur", "the flower"}});
    const TranslationTable table = train_ibm1(corpus, 5);
    CHECK(table.prob("la", "the") > 0.5);
    CHECK(table.prob("la", "the") > table.prob("la", "house"));

    const OracleTable expected = oracle_ibm1({{"la maison", "the house"}, {"la fleur", "the flower"}}, 5);
    for (const auto& [s, row] : expected)
        for (const auto& [t, p] : row)
            CHECK(table.prob(s, t) == doctest::Approx(p).epsilon(1e-12));
}

TEST_CASE("train_ibm1 single co-occurrence goes to certainty") {
    const AlignedCorpus corpus = testutil::corpus_of({{"a", "x"}});
    const TranslationTable table = train_ibm1(corpus, 1);
    CHECK(table.prob("a", "x") == 1.0);
    CHECK(table.prob(kNullToken, "x") == 1.0);
}

TEST_CASE("train_ibm1 rows stay normalized") {
    Rng rng(7);
    const AlignedCorpus corpus = random_parallel_corpus(rng, 200);
    const TranslationTable table = train_ibm1(corpus, 3);
    for (const auto& [src, row] : table.rows()) {
        double sum = 0.0;
        for (const auto& [tgt, p] : row) {
            CHECK(p > 0.0);
            CHECK(p <= 1.0);
            sum += p;
        }
        CHECK(sum == doctest::Approx(1.0).epsilon(1e-6));
    }
}

TEST_CASE("train_ibm1 log-likelihood is non-decreasing") {
    Rng rng(11);
    const AlignedCorpus corpus = random_parallel_corpus(rng, 60);
    std::vector<double> ll;
    train_ibm1(corpus, 6, &ll);
    REQUIRE(ll.size() == 6);
    for (std::size_t i = 1; i < ll.size(); ++i) CHECK(ll[i] >= ll[i - 1] - 1e-9);
}

TEST_CASE("train_ibm1 is insensitive to pair order") {
    Rng rng(13);
    std::vector<std::pair<std::string, std::string>> lines;
    for (int i = 0; i < 40; ++i)
        lines.emplace_back(testutil::random_text(rng, 4), testutil::random_text(rng, 4));
    const TranslationTable a = train_ibm1(testutil::corpus_of(lines), 4);

    std::vector<std::pair<std::string, std::string>> shuffled = lines;
    for (std::size_t i = shuffled.size(); i > 1; --i)
        std::swap(shuffled[i - 1], shuffled[rng.below(i)]);
    const TranslationTable b = train_ibm1(testutil::corpus_of(shuffled), 4);

    REQUIRE(a.rows().size() == b.rows().size());
    for (const auto& [src, row] : a.rows())
        for (const auto& [tgt, p] : row)
            CHECK(b.prob(src, tgt) == doctest::Approx(p).epsilon(1e-9));
}

TEST_CASE("train_ibm1 validates inputs") {
    const AlignedCorpus empty;
    CHECK_THROWS_AS(train_ibm1(empty, 5), std::invalid_argument);
    const AlignedCorpus corpus = testutil::corpus_of({{"a", "x"}});
    CHECK_THROWS_AS(train_ibm1(corpus, 0), std::invalid_argument);
}

TEST_CASE("prune_table keeps the top targets") {
    TranslationTable table(LanguageTag("fr"), LanguageTag("en"));
    table.set("a", "x", 0.7);
    table.set("a", "y", 0.3);

    const TranslationTable top1 = prune_table(table, 1, 0.0);
    CHECK(top1.prob("a", "x") == 0.7);
    CHECK(top1.prob("a", "y") == 0.0);
    CHECK(top1.pruned());

    const TranslationTable identity = prune_table(table, kKeepAllTargets, 0.0);
    CHECK(identity.prob("a", "x") == 0.7);
    CHECK(identity.prob("a", "y") == 0.3);

    TranslationTable three(LanguageTag("fr"), LanguageTag("en"));
    three.set("a", "x", 0.5);
    three.set("a", "y", 0.3);
    three.set("a", "z", 0.2);
    const TranslationTable both = prune_table(three, 2, 0.4);
    CHECK(both.prob("a", "x") == 0.5);
    CHECK(both.prob("a", "y") == 0.0);
    CHECK(both.prob("a", "z") == 0.0);

    CHECK_THROWS_AS(prune_table(table, 0, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(prune_table(table, 1, 1.0), std::invalid_argument);
}

TEST_CASE("lexicon TSV loading") {
    TempDir dir("lexicon");
    const auto path = dir.write("lex.tsv",
                                "# comment line\n"
                                "chat\tcat\n"
                                "chat\tcat\n"
                                "chat\tkitty\n"
                                "Maison\tHouse\n");
    const BilingualLexicon lex = load_lexicon(path, LanguageTag("fr"), LanguageTag("en"));
    CHECK(lex.lookup("chat") == std::set<std::string>{"cat", "kitty"});
    CHECK(lex.lookup("maison") == std::set<std::string>{"house"}); // lower-cased
    CHECK(lex.lookup("absent").empty());                           // total lookup, never an error

    const auto bad = dir.write("bad.tsv", "chat\tcat\nmaison\n");
    try {
        load_lexicon(bad, LanguageTag("fr"), LanguageTag("en"));
        FAIL("expected parse error");
    } catch (const std::runtime_error& e) {
        CHECK(std::string(e.what()).find(":2") != std::string::npos);
    }
}

TEST_CASE("translation table TSV round trip") {
    TranslationTable table(LanguageTag("fr"), LanguageTag("en"));
    table.set("la", "the", 0.75);
    table.set("la", "a", 0.25);
    table.set("maison", "house", 1.0);

    TempDir dir("table");
    const auto path = dir.file("t.tsv");
    save_table(table, path);
    const TranslationTable loaded = load_table(path, LanguageTag("fr"), LanguageTag("en"));
    CHECK(loaded.prob("la", "the") == 0.75);
    CHECK(loaded.prob("la", "a") == 0.25);
    CHECK(loaded.prob("maison", "house") == 1.0);
    CHECK_FALSE(loaded.pruned()); // rows sum to 1

    // byte-stable second generation
    const auto path2 = dir.file("t2.tsv");
    save_table(loaded, path2);
    std::ifstream f1(path), f2(path2);
    const std::string b1((std::istreambuf_iterator<char>(f1)), std::istreambuf_iterator<char>());
    const std::string b2((std::istreambuf_iterator<char>(f2)), std::istreambuf_iterator<char>());
    CHECK(b1 == b2);
}

TEST_CASE("trained tables survive serialization within formatting precision") {
    Rng rng(17);
    const AlignedCorpus corpus = random_parallel_corpus(rng, 50);
    const TranslationTable table = train_ibm1(corpus, 3);
    TempDir dir("table");
    const auto path = dir.file("t.tsv");
    save_table(table, path);
    const TranslationTable loaded = load_table(path, LanguageTag("fr"), LanguageTag("en"));
    for (const auto& [src, row] : table.rows())
        for (const auto& [tgt, p] : row)
            CHECK(loaded.prob(src, tgt) == doctest::Approx(p).epsilon(1e-9));
}

TEST_CASE("pruned tables are recognized on load") {
    TranslationTable table(LanguageTag("fr"), LanguageTag("en"));
    table.set("la", "the", 0.75);
    table.set("la", "a", 0.25);
    TempDir dir("table");
    const auto path = dir.file("t.tsv");
    save_table(prune_table(table, 1, 0.0), path);
    CHECK(load_table(path, LanguageTag("fr"), LanguageTag("en")).pruned());
}

TEST_CASE("table TSV validation errors carry line numbers") {
    TempDir dir("table");
    const auto bad_prob = dir.write("p.tsv", "la\tthe\t1.5\n");
    try {
        load_table(bad_prob, LanguageTag("fr"), LanguageTag("en"));
        FAIL("expected validation error");
    } catch (const std::runtime_error& e) {
        const std::string msg = e.what();
        CHECK(msg.find(":1") != std::string::npos);
        CHECK(msg.find("(0,1]") != std::string::npos);
    }
    const auto bad_fields = dir.write("f.tsv", "la\tthe\n");
    CHECK_THROWS_AS(load_table(bad_fields, LanguageTag("fr"), LanguageTag("en")), std::runtime_error);
    const auto bad_number = dir.write("n.tsv", "la\tthe\tx\n");
    CHECK_THROWS_AS(load_table(bad_number, LanguageTag("fr"), LanguageTag("en")), std::runtime_error);
}

TEST_CASE("length statistics") {
    // equal ratios: sigma hits the floor
    const AlignedCorpus flat = testutil::corpus_of({{"aaaa", "bbbb"}, {"cccccc", "dddddd"}});
    const LengthStats s1 = estimate_length_stats(flat);
    CHECK(s1.mu == doctest::Approx(1.0));
    CHECK(s1.sigma == 1e-6);

    // ratios 0.8 and 1.2: sample standard deviation of two points
    const AlignedCorpus two =
        testutil::corpus_of({{"aaaaaaaaaa", "bbbbbbbb"}, {"cccccccccc", "dddddddddddd"}});
    const LengthStats s2 = estimate_length_stats(two);
    CHECK(s2.mu == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(s2.sigma == doctest::Approx(std::sqrt(0.08)).epsilon(1e-12)); // 0.282842...

    const AlignedCorpus one = testutil::corpus_of({{"a", "b"}});
    CHECK_THROWS_AS(estimate_length_stats(one), std::invalid_argument);
}

TEST_CASE("length stats file round trip") {
    TempDir dir("stats");
    const LengthStats stats{1.0625, 0.1875};
    const auto path = dir.file("len.txt");
    save_length_stats(stats, path);
    const LengthStats loaded = load_length_stats(path);
    CHECK(loaded.mu == stats.mu);
    CHECK(loaded.sigma == stats.sigma);

    const auto bad = dir.write("bad.txt", "mu=1.0\nsigma=0\n");
    CHECK_THROWS_AS(load_length_stats(bad), std::runtime_error);
    const auto missing = dir.write("missing.txt", "mu=1.0\n");
    CHECK_THROWS_AS(load_length_stats(missing), std::runtime_error);
}
