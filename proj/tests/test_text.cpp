#include <doctest.h>

#include <filesystem>

#include "tlr/common.hpp"
#include "tlr/stemmer.hpp"
#include "tlr/text.hpp"

using namespace tlr;

namespace {

Preprocessor english_pre() { return {Language::english, TLR_DATA_DIR}; }
Preprocessor italian_pre() { return {Language::italian, TLR_DATA_DIR}; }

}  // namespace

TEST_CASE("tokenizer splits punctuation, digits, underscores and camelCase") {
    CHECK(tokenize("getUserName_fast") ==
          std::vector<std::string>{"get", "user", "name", "fast"});
    CHECK(tokenize("utf8Decode") == std::vector<std::string>{"utf", "decode"});
    CHECK(tokenize("XMLParser") == std::vector<std::string>{"xml", "parser"});
    CHECK(tokenize("foo.bar(baz)") == std::vector<std::string>{"foo", "bar", "baz"});
    CHECK(tokenize("") == std::vector<std::string>{});
    CHECK(tokenize("  \t\n ") == std::vector<std::string>{});
    CHECK(tokenize("a1b2") == std::vector<std::string>{"a", "b"});
}

TEST_CASE("porter stemmer canonical forms") {
    CHECK(porter_stem("caresses") == "caress");
    CHECK(porter_stem("ponies") == "poni");
    CHECK(porter_stem("ties") == "ti");
    CHECK(porter_stem("cats") == "cat");
    CHECK(porter_stem("feed") == "feed");
    CHECK(porter_stem("agreed") == "agre");
    CHECK(porter_stem("plastered") == "plaster");
    CHECK(porter_stem("motoring") == "motor");
    CHECK(porter_stem("sing") == "sing");
    CHECK(porter_stem("conflated") == "conflat");
    CHECK(porter_stem("sized") == "size");
    CHECK(porter_stem("hopping") == "hop");
    CHECK(porter_stem("filing") == "file");
    CHECK(porter_stem("failing") == "fail");
    CHECK(porter_stem("happy") == "happi");
    CHECK(porter_stem("sky") == "sky");
    CHECK(porter_stem("rational") == "ration");
    CHECK(porter_stem("generalization") == "gener");
    CHECK(porter_stem("oscillators") == "oscil");
    CHECK(porter_stem("name") == "name");
}

TEST_CASE("italian stemmer strips common suffixes") {
    // hand-traced through the algorithm's step tables
    CHECK(italian_stem("gestione") == "gestion");
    CHECK(italian_stem("abbandonata") == "abbandon");
    CHECK(italian_stem("pagamento") == "pag");
    CHECK(italian_stem("nazionale") == "nazional");
    CHECK(italian_stem("cliente") == "client");
    CHECK(italian_stem("ordini") == "ordin");
    // acute accents normalize to grave before stripping
    CHECK(italian_stem("perché") == italian_stem("perchè"));
}

TEST_CASE("stemming is idempotent over a broad vocabulary") {
    const Preprocessor en = english_pre();
    const Preprocessor it = italian_pre();
    const std::vector<std::string> english_words{
        "user",   "name",   "fast",    "payment", "account",  "controller",
        "valid",  "update", "manage",  "session", "database", "transaction",
        "happy",  "relational", "singing", "connection", "oscillators"};
    for (const auto& w : english_words) {
        const auto once = en.stem(w);
        CHECK(en.stem(once) == once);
    }
    const std::vector<std::string> italian_words{
        "gestione", "pagamento", "cliente", "ordini", "visita",
        "paziente", "registrare", "sistema", "prenotazione"};
    for (const auto& w : italian_words) {
        const auto once = it.stem(w);
        CHECK(it.stem(once) == once);
    }
}

TEST_CASE("preprocess applies the five stages in order") {
    const Preprocessor en = english_pre();
    // "get" is not in the shipped stoplist, so it survives
    CHECK(en.preprocess("getUserName_fast") ==
          std::vector<std::string>{"get", "user", "name", "fast"});
    CHECK(en.preprocess("") == std::vector<std::string>{});
    CHECK(en.preprocess("public static void") == std::vector<std::string>{});
    CHECK(en.preprocess("the The THE") == std::vector<std::string>{});
    // stemming happens after stopword removal
    CHECK(en.preprocess("payments") == std::vector<std::string>{"payment"});
}

TEST_CASE("java keywords are removed for both languages") {
    const Preprocessor it = italian_pre();
    CHECK(it.preprocess("class ordine extends cliente") ==
          std::vector<std::string>{italian_stem("ordine"), italian_stem("cliente")});
}

TEST_CASE("word list loading verifies checksums") {
    CHECK_THROWS_AS(load_word_list(std::filesystem::path(TLR_DATA_DIR) / "stopwords_en.txt",
                                   0xdeadbeefULL),
                    DataError);
    CHECK(load_word_list(std::filesystem::path(TLR_DATA_DIR) / "stopwords_en.txt", 0)
              .count("the") == 1);
}

TEST_CASE("unknown language is a configuration error") {
    CHECK_THROWS_AS(parse_language("klingon"), ConfigError);
    CHECK(parse_language("en") == Language::english);
    CHECK(parse_language("italian") == Language::italian);
}
