#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>

#include "oracles.hpp"
#include "synthetic.hpp"
#include "topicseg/text.hpp"

using namespace topicseg;

TEST_CASE("utf8 round trip") {
    const std::string s = "Kirsch-Auwärter ΣΟΦΊΑ Москва";
    CHECK(text::encode_utf8(text::decode_utf8(s)) == s);
    CHECK(text::length("Auwärter") == 8);
    CHECK(text::decode_utf8("a\xff" "b") == U"aÿb");
}

TEST_CASE("case folding beyond ASCII") {
    CHECK(text::fold_case("MIGRATION") == "migration");
    CHECK(text::fold_case("ÄÖÜ Straße") == "äöü straße");
    CHECK(text::fold_case("ΣΟΦΊΑ") == "σοφία");
    CHECK(text::fold_case("МОСКВА") == "москва");
    CHECK(text::fold_case("Łódź") == "łódź");
}

TEST_CASE("word splitting") {
    CHECK(text::split_words("Many refugees, few data: flight-related") ==
          std::vector<std::string>{"many", "refugees", "few", "data", "flight", "related"});
    CHECK(text::split_words("  ") .empty());
    CHECK(text::split_words("Jugendhilfe/Migranten") == std::vector<std::string>{"jugendhilfe", "migranten"});
}

TEST_CASE("content terms") {
    const auto sw = text::StopWords::defaults();
    CHECK(text::content_terms("migrant youth welfare sector", sw) ==
          std::vector<std::string>{"migrant", "youth", "welfare", "sector"});
    CHECK(text::content_terms("the of a", sw).empty());
    CHECK(text::content_terms("Bildung und Erziehung der Kinder", sw) ==
          std::vector<std::string>{"bildung", "erziehung", "kinder"});
    // length counts code points, not bytes
    CHECK(text::content_terms("Öl Ähre", text::StopWords{}) == std::vector<std::string>{"ähre"});
}

TEST_CASE("shipped stop-word files match the built-in lists") {
    const auto en = text::StopWords::load(std::string(TOPICSEG_DATA_DIR) + "/stopwords/en.txt");
    const auto de = text::StopWords::load(std::string(TOPICSEG_DATA_DIR) + "/stopwords/de.txt");
    CHECK(en.size() == text::StopWords::english().size());
    CHECK(de.size() == text::StopWords::german().size());
    for (const auto& w : oracle::stop_words()) CHECK(text::StopWords::defaults().contains(w));
}

TEST_CASE("stop-word file with comments and blanks") {
    const auto path = std::filesystem::temp_directory_path() / "topicseg_stop.txt";
    {
        std::ofstream out(path);
        out << "# custom list\n\nFoo\nbar\n";
    }
    const auto sw = text::StopWords::load(path);
    CHECK(sw.size() == 2);
    CHECK(sw.contains("foo"));
    CHECK(!sw.contains("# custom list"));
    std::filesystem::remove(path);
}

TEST_CASE("levenshtein on known pairs") {
    CHECK(text::levenshtein("migrant", "migrants") == 1);
    CHECK(text::levenshtein("term", "term") == 0);
    CHECK(text::levenshtein("facebook", "instagram") == oracle::levenshtein("facebook", "instagram"));
    CHECK(text::levenshtein("facebook", "instagram") > 2);
    CHECK(text::levenshtein("", "abc") == 3);
    CHECK(text::levenshtein("kitten", "sitting") == 3);
    CHECK(text::levenshtein("Straße", "strasse") == 3);  // 'S'/'s', 'ß'/'s', inserted 's'
}

TEST_CASE("levenshtein agrees with the full-table oracle") {
    synth::Rng rng(7);
    const std::u32string alphabet = U"abcäöσд";
    for (int iter = 0; iter < 2000; ++iter) {
        std::u32string a, b;
        const auto na = synth::pick(rng, 0, 9), nb = synth::pick(rng, 0, 9);
        for (std::size_t i = 0; i < na; ++i) a += alphabet[synth::pick(rng, 0, alphabet.size() - 1)];
        for (std::size_t i = 0; i < nb; ++i) b += alphabet[synth::pick(rng, 0, alphabet.size() - 1)];
        const auto expected = oracle::levenshtein(a, b);
        REQUIRE(text::levenshtein(a, b) == expected);
        REQUIRE(text::levenshtein(text::encode_utf8(a), text::encode_utf8(b)) == expected);
        for (std::size_t bound = 0; bound <= 4; ++bound) {
            REQUIRE(text::within_edit_distance(a, b, bound) == (expected <= bound));
        }
    }
}

TEST_CASE("levenshtein is a metric") {
    synth::Rng rng(11);
    const auto& words = synth::query_words();
    for (int iter = 0; iter < 500; ++iter) {
        const auto& a = words[synth::pick(rng, 0, words.size() - 1)];
        const auto& b = words[synth::pick(rng, 0, words.size() - 1)];
        const auto& c = words[synth::pick(rng, 0, words.size() - 1)];
        CHECK(text::levenshtein(a, b) == text::levenshtein(b, a));
        CHECK(text::levenshtein(a, c) <= text::levenshtein(a, b) + text::levenshtein(b, c));
        CHECK((text::levenshtein(a, b) == 0) == (a == b));
    }
}
