#include <doctest.h>

#include <set>

#include "helpers.hpp"
#include "xling/corpus.hpp"
#include "xling/rng.hpp"

using namespace xling;
using testutil::TempDir;

TEST_CASE("language tags are case-insensitive two-letter codes") {
    CHECK(LanguageTag("EN") == LanguageTag("en"));
    CHECK(LanguageTag("Fr").code() == "fr");
    CHECK_THROWS_AS(LanguageTag("eng"), std::invalid_argument);
    CHECK_THROWS_AS(LanguageTag("e1"), std::invalid_argument);
    CHECK_THROWS_AS(LanguageTag(""), std::invalid_argument);
}

TEST_CASE("granularity parsing") {
    CHECK(parse_granularity("sentence") == Granularity::Sentence);
    CHECK(parse_granularity("Chunk") == Granularity::Chunk);
    CHECK(parse_granularity("DOCUMENT") == Granularity::Document);
    CHECK_THROWS_AS(parse_granularity("paragraph"), std::invalid_argument);
    CHECK(to_string(Granularity::Chunk) == "chunk");
}

TEST_CASE("text units trim and count code points") {
    const TextUnit u = testutil::unit("u1", "fr", "  h\xc3\xa9llo  ");
    CHECK(u.raw == "h\xc3\xa9llo");
    CHECK(u.char_len == 5); // bytes: 6
    CHECK_THROWS_AS(testutil::unit("u2", "fr", "   "), std::invalid_argument);
}

TEST_CASE("load_corpus builds aligned pairs line by line") {
    TempDir dir("corpus");
    const auto src = dir.write("a.txt", "the house\n");
    const auto tgt = dir.write("b.txt", "la maison\n");
    CorpusDescriptor desc;
    desc.src_lang = LanguageTag("en");
    desc.tgt_lang = LanguageTag("fr");
    desc.gran = Granularity::Sentence;
    desc.subcorpus = "toy";

    const AlignedCorpus corpus = load_corpus(src, tgt, desc);
    REQUIRE(corpus.size() == 1);
    CHECK(corpus.pairs[0].source.raw == "the house");
    CHECK(corpus.pairs[0].target.raw == "la maison");
    CHECK(corpus.pairs[0].source.lang == LanguageTag("en"));
    CHECK(corpus.pairs[0].target.lang == LanguageTag("fr"));
    CHECK(corpus.dropped_pairs == 0);
}

TEST_CASE("load_corpus reports mismatched line counts with both counts") {
    TempDir dir("corpus");
    const auto src = dir.write("a.txt", "one\ntwo\nthree\n");
    const auto tgt = dir.write("b.txt", "un\ndeux\n");
    CorpusDescriptor desc;
    desc.src_lang = LanguageTag("en");
    desc.tgt_lang = LanguageTag("fr");
    try {
        load_corpus(src, tgt, desc);
        FAIL("expected an alignment error");
    } catch (const std::runtime_error& e) {
        const std::string msg = e.what();
        CHECK(msg.find("3 vs 2") != std::string::npos);
    }
}

TEST_CASE("load_corpus drops blank pairs whole and stays lossless") {
    TempDir dir("corpus");
    const auto src = dir.write("a.txt", "a\n\nc\n");
    const auto tgt = dir.write("b.txt", "x\n\nz\n");
    CorpusDescriptor desc;
    desc.src_lang = LanguageTag("en");
    desc.tgt_lang = LanguageTag("fr");
    const AlignedCorpus corpus = load_corpus(src, tgt, desc);
    CHECK(corpus.size() == 2);
    CHECK(corpus.dropped_pairs == 1);
    CHECK(corpus.size() + corpus.dropped_pairs == 3);

    // one side blank drops the pair too, never one side alone
    const auto src2 = dir.write("c.txt", "a\nb\n");
    const auto tgt2 = dir.write("d.txt", "x\n   \n");
    const AlignedCorpus corpus2 = load_corpus(src2, tgt2, desc);
    CHECK(corpus2.size() == 1);
    CHECK(corpus2.dropped_pairs == 1);
}

TEST_CASE("load_corpus accepts a missing trailing newline") {
    TempDir dir("corpus");
    const auto src = dir.write("a.txt", "one\ntwo");
    const auto tgt = dir.write("b.txt", "un\ndeux\n");
    CorpusDescriptor desc;
    desc.src_lang = LanguageTag("en");
    desc.tgt_lang = LanguageTag("fr");
    CHECK(load_corpus(src, tgt, desc).size() == 2);
}

TEST_CASE("load_corpus names the unreadable file") {
    CorpusDescriptor desc;
    desc.src_lang = LanguageTag("en");
    desc.tgt_lang = LanguageTag("fr");
    try {
        load_corpus("/nonexistent/nope.txt", "/nonexistent/nope2.txt", desc);
        FAIL("expected an I/O error");
    } catch (const std::runtime_error& e) {
        CHECK(std::string(e.what()).find("/nonexistent/nope.txt") != std::string::npos);
    }
}

TEST_CASE("unit ids are unique within a corpus") {
    const AlignedCorpus corpus = testutil::corpus_of({{"a b", "x y"}, {"c d", "z w"}});
    std::set<std::string> ids;
    for (const AlignedPair& p : corpus.pairs) {
        ids.insert(p.source.id);
        ids.insert(p.target.id);
    }
    CHECK(ids.size() == 2 * corpus.size());
}

TEST_CASE("sample_units: m=1 yields no distractors") {
    const AlignedCorpus corpus = testutil::corpus_of({{"a", "b"}});
    CHECK(sample_units(corpus, 1, 7).empty());
}

TEST_CASE("sample_units: single-candidate corpus always picks it") {
    const AlignedCorpus corpus = testutil::corpus_of({{"a", "b"}});
    CHECK(sample_units(corpus, 4, 123) == std::vector<std::size_t>{0, 0, 0});
}

TEST_CASE("sample_units is reproducible and in range") {
    const AlignedCorpus corpus = testutil::corpus_of({{"a", "1"}, {"b", "2"}, {"c", "3"}});
    const auto first = sample_units(corpus, 1000, 42);
    const auto second = sample_units(corpus, 1000, 42);
    CHECK(first == second);
    CHECK(first.size() == 999);
    for (std::size_t idx : first) CHECK(idx < corpus.size());
    CHECK(sample_units(corpus, 1000, 43) != first);
}

TEST_CASE("sample_units rejects bad inputs") {
    const AlignedCorpus empty;
    CHECK_THROWS_AS(sample_units(empty, 5, 1), std::invalid_argument);
    const AlignedCorpus corpus = testutil::corpus_of({{"a", "b"}});
    CHECK_THROWS_AS(sample_units(corpus, 0, 1), std::invalid_argument);
}

TEST_CASE("normalize_c3g keeps only lower-cased alphanumerics and spaces") {
    CHECK(normalize_c3g("The CAT!") == "the cat");
    CHECK(normalize_c3g("a---b  c") == "ab c");
    CHECK(normalize_c3g("\xc3\x89" "coute") == "coute"); // accented letter deleted, not transliterated
    CHECK(normalize_c3g("") == "");
    CHECK(normalize_c3g("!!!") == "");
    CHECK(normalize_c3g("  a  ") == "a");
}

TEST_CASE("normalize_c3g is idempotent on arbitrary input") {
    Rng rng(2024);
    for (int i = 0; i < 500; ++i) {
        std::string text = testutil::random_text(rng);
        // splice in some raw bytes
        if (rng.below(2)) text += static_cast<char>(rng.below(256));
        const std::string once = normalize_c3g(text);
        CHECK(normalize_c3g(once) == once);
    }
}

TEST_CASE("tokenize_words strips boundary punctuation only") {
    CHECK(tokenize_words("La maison, rouge.") == std::vector<std::string>{"la", "maison", "rouge"});
    CHECK(tokenize_words("").empty());
    CHECK(tokenize_words("don't stop") == std::vector<std::string>{"don't", "stop"});
    CHECK(tokenize_words("'hello'") == std::vector<std::string>{"hello"});
    CHECK(tokenize_words("co-op...") == std::vector<std::string>{"co-op"});
    CHECK(tokenize_words("--- !!!").empty());
}

TEST_CASE("tokenize_words word view is idempotent") {
    Rng rng(99);
    for (int i = 0; i < 500; ++i) {
        const std::vector<std::string> tokens = tokenize_words(testutil::random_text(rng));
        std::string joined;
        for (const std::string& t : tokens) {
            if (!joined.empty()) joined += ' ';
            joined += t;
        }
        CHECK(tokenize_words(joined) == tokens);
    }
}

TEST_CASE("manifest loading resolves relative paths and validates keys") {
    TempDir dir("manifest");
    dir.write("s.txt", "the house\nthe cat\n");
    dir.write("t.txt", "la maison\nle chat\n");
    const auto manifest = dir.write("toy.manifest",
                                    "# toy corpus\n"
                                    "src_lang = en\n"
                                    "tgt_lang = fr\n"
                                    "granularity = sentence\n"
                                    "subcorpus = TOY\n"
                                    "src_file = s.txt\n"
                                    "tgt_file = t.txt\n");
    const AlignedCorpus corpus = load_manifest_corpus(manifest);
    CHECK(corpus.size() == 2);
    CHECK(corpus.subcorpus == "TOY");
    CHECK(corpus.gran == Granularity::Sentence);

    const auto bad = dir.write("bad.manifest", "src_lang = en\nbogus = 1\n");
    CHECK_THROWS_AS(read_manifest(bad), std::runtime_error);
    const auto incomplete = dir.write("inc.manifest", "src_lang = en\n");
    CHECK_THROWS_AS(read_manifest(incomplete), std::runtime_error);
}

TEST_CASE("corpus_from_lines rejects same-language pairs") {
    CorpusDescriptor desc;
    desc.src_lang = LanguageTag("en");
    desc.tgt_lang = LanguageTag("en");
    CHECK_THROWS_AS(corpus_from_lines({{"a", "b"}}, desc), std::invalid_argument);
}
