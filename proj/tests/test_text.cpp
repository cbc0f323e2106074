#include <doctest.h>

#include <algorithm>
#include <random>
#include <sstream>

#include "poshan/errors.hpp"
#include "poshan/text.hpp"
#include "toy_corpus.hpp"

using namespace poshan;

using Tokens = std::vector<std::string>;

TEST_CASE("tokenize") {
    CHECK(tokenize("US Will Have 100 Million") == Tokens{"us", "will", "have", "100", "million"});
    CHECK(tokenize("").empty());
    CHECK(tokenize("   ").empty());
    CHECK(tokenize("$1.2 million!") == Tokens{"$", "1.2", "million", "!"});
    CHECK(tokenize("Raised 1,000,000.50 dollars.") == Tokens{"raised", "1,000,000.50", "dollars", "."});
    CHECK(tokenize("\"Quoted\" (text)") == Tokens{"\"", "quoted", "\"", "(", "text", ")"});
    CHECK(tokenize("don't stop") == Tokens{"don't", "stop"});
}

TEST_CASE("tokenize is idempotent on its own output") {
    std::mt19937_64 rng(99);
    const std::string alphabet = "abcXYZ019 .,!?$%()'\"-:;\t";
    std::uniform_int_distribution<std::size_t> pick(0, alphabet.size() - 1);
    std::uniform_int_distribution<int> len(0, 40);
    for (int trial = 0; trial < 500; ++trial) {
        std::string text;
        for (int i = len(rng); i > 0; --i) text += alphabet[pick(rng)];
        auto once = tokenize(text);
        std::string joined;
        for (const auto& t : once) joined += (joined.empty() ? "" : " ") + t;
        CHECK(tokenize(joined) == once);
    }
}

TEST_CASE("numeric tokens") {
    CHECK(is_numeric_token("100"));
    CHECK(is_numeric_token("1.2"));
    CHECK(is_numeric_token("1,000"));
    CHECK(is_numeric_token("12,345.67"));
    CHECK_FALSE(is_numeric_token("1,00"));
    CHECK_FALSE(is_numeric_token("abc"));
    CHECK_FALSE(is_numeric_token("1."));
}

TEST_CASE("split_sentences") {
    CHECK(split_sentences("A b. C d.") == Tokens{"A b.", "C d."});
    CHECK(split_sentences("").empty());
    CHECK(split_sentences("Mr. Smith left. He ran.") == Tokens{"Mr. Smith left.", "He ran."});
    CHECK(split_sentences("Really?! Yes. no terminator") == Tokens{"Really?!", "Yes.", "no terminator"});
    CHECK(split_sentences("The U.S. economy grew 3.5 percent. Good.") ==
          Tokens{"The U.S. economy grew 3.5 percent.", "Good."});
    CHECK(split_sentences("  .  ") == Tokens{"."});
}

TEST_CASE("fallback tagger") {
    FallbackTagger tagger;
    auto tagged = tagger.tag({"loan", "1", "million"});
    REQUIRE(tagged.size() == 3);
    CHECK(tagged[0].pos == "NN");
    CHECK(tagged[1].pos == "CD");
    CHECK(tagged[2].pos == "CD");
    CHECK(tagger.tag({}).empty());
    CHECK(tagger.tag_token("five") == "CD");
    CHECK(tagger.tag_token("twenty-five") == "CD");
    CHECK(tagger.tag_token("ways") == "NNS");
    CHECK(tagger.tag_token("to") == "TO");
    CHECK(tagger.tag_token("running") == "VBG");
    CHECK(tagger.tag_token("!") == ".");
    for (const auto& t : tagger.tag(tokenize("What the $5 million loan says about 3 banks, quickly!"))) {
        CHECK(is_penn_tag(t.pos));
    }
}

TEST_CASE("sidecar tagger") {
    std::istringstream in(
        R"({"id":"r1","headline_tags":["NN","CD","CD"],"body_tags":[["DT","NN","."]]})"
        "\n"
        R"({"id":"r2","headline_tags":["NN","CD","CD"],"body_tags":[]})"
        "\n");
    auto sidecar = SidecarTagger::parse(in);
    CHECK(sidecar.size() == 2);
    auto tagged = sidecar.tag_headline("r1", {"loan", "1", "million"});
    CHECK(tagged[1].pos == "CD");
    CHECK_THROWS_AS(sidecar.tag_headline("r1", {"a", "b", "c", "d"}), TaggingError);
    try {
        sidecar.tag_headline("missing", {"a"});
        FAIL("expected TaggingError");
    } catch (const TaggingError& e) {
        CHECK(std::string(e.what()).find("missing") != std::string::npos);
    }
    RawRecord raw{"r1", "Loan 1 million", "The loan. Extra sentence.", Label::Incongruent};
    CHECK_THROWS_AS(featurize(raw, sidecar), TaggingError);

    std::istringstream bad("{\"id\": \"x\"}\nnot json\n");
    CHECK_THROWS_AS(SidecarTagger::parse(bad), DataError);

    std::istringstream unknown(R"({"id":"r3","headline_tags":["NOPE"]})");
    auto s2 = SidecarTagger::parse(unknown);
    CHECK_THROWS_AS(s2.tag_headline("r3", {"x"}), TaggingError);
}

TEST_CASE("extract_cardinal_features") {
    TaggedSentence loan{{"loan", "NN"}, {"1", "CD"}, {"million", "CD"}};
    auto f = extract_cardinal_features(loan);
    REQUIRE(f.patterns.size() == 2);
    CHECK(f.patterns[0].str() == "NN:CD:CD");
    CHECK(f.patterns[1].str() == "CD:CD:EOS");
    CHECK(f.phrases[0] == CardinalPhrase{"loan", "1", "million"});
    CHECK(f.phrases[1] == CardinalPhrase{"1", "million", "<eos>"});

    auto none = extract_cardinal_features({{"no", "DT"}, {"numbers", "NNS"}});
    CHECK(none.patterns.empty());
    CHECK(none.phrases.empty());

    auto boundary = extract_cardinal_features({{"5", "CD"}, {"ways", "NNS"}, {"to", "TO"}});
    REQUIRE(boundary.patterns.size() == 1);
    CHECK(boundary.patterns[0].str() == "BOS:CD:NNS");
    CHECK(boundary.phrases[0] == CardinalPhrase{"<bos>", "5", "ways"});
}

TEST_CASE("pattern count equals CD count on random headlines") {
    std::mt19937_64 rng(17);
    const std::vector<std::string> tags{"NN", "CD", "JJ", "VB", "DT", "IN", "CD", "NNS"};
    std::uniform_int_distribution<std::size_t> pick(0, tags.size() - 1);
    std::uniform_int_distribution<int> len(0, 15);
    for (int trial = 0; trial < 1000; ++trial) {
        TaggedSentence s;
        std::size_t cds = 0;
        for (int i = len(rng); i > 0; --i) {
            auto t = tags[pick(rng)];
            cds += t == "CD";
            s.push_back({"w" + std::to_string(i), t});
        }
        auto f = extract_cardinal_features(s);
        CHECK(f.patterns.size() == cds);
        CHECK(f.phrases.size() == cds);
        for (const auto& p : f.patterns) CHECK(p.mid == "CD");
    }
}

TEST_CASE("derive_dataset matches the filter oracle") {
    FallbackTagger tagger;
    auto corpus = testing::ten_record_corpus();
    auto derivation = derive_dataset(corpus, tagger);

    std::vector<std::string> expected_ids;
    for (const auto& r : corpus) {
        bool any_cd = false;
        for (const auto& tok : tokenize(r.headline)) any_cd = any_cd || tagger.tag_token(tok) == "CD";
        if (any_cd) expected_ids.push_back(r.id);
    }
    std::vector<std::string> got_ids;
    for (const auto& r : derivation.records) got_ids.push_back(r.id);
    CHECK(got_ids == expected_ids);
    CHECK(got_ids == std::vector<std::string>{"n1", "n2", "n4", "n5", "n7", "n9"});
    CHECK(derivation.summary.incongruent.kept == 3);
    CHECK(derivation.summary.incongruent.dropped == 2);
    CHECK(derivation.summary.congruent.kept == 3);
    CHECK(derivation.summary.congruent.dropped == 2);

    for (const auto& r : derivation.records) {
        std::size_t cds = 0;
        for (const auto& t : r.headline) cds += t.pos == "CD";
        CHECK(r.patterns.size() == cds);
        CHECK(r.phrases.size() == r.patterns.size());
        CHECK_FALSE(r.body.empty());
    }

    std::ostringstream tsv;
    derivation.summary.write_tsv(tsv);
    CHECK(tsv.str() == "label\tkept\tdropped\nincongruent\t3\t2\ncongruent\t3\t2\ntotal\t6\t4\n");

    std::vector<RawRecord> no_numbers{{"a", "No numbers here", "Body.", Label::Congruent}};
    CHECK(derive_dataset(no_numbers, tagger).records.empty());
}

TEST_CASE("derive_dataset equals the CD filter on random corpora") {
    FallbackTagger tagger;
    std::mt19937_64 rng(8);
    const std::vector<std::string> words{"loan", "bank", "five", "12", "grows", "the", "of", "record", "3.5"};
    std::uniform_int_distribution<std::size_t> pick(0, words.size() - 1);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<RawRecord> corpus;
        for (int i = 0; i < 12; ++i) {
            std::string headline;
            for (int w = 0; w < 4; ++w) headline += words[pick(rng)] + " ";
            corpus.push_back({"r" + std::to_string(i), headline, "Some body text.",
                              i % 2 ? Label::Incongruent : Label::Congruent});
        }
        auto derived = derive_dataset(corpus, tagger).records;
        std::vector<std::string> oracle;
        for (const auto& r : corpus) {
            auto toks = tokenize(r.headline);
            if (std::any_of(toks.begin(), toks.end(), [&](auto& t) { return tagger.tag_token(t) == "CD"; })) {
                oracle.push_back(r.id);
            }
        }
        REQUIRE(derived.size() == oracle.size());
        for (std::size_t i = 0; i < oracle.size(); ++i) CHECK(derived[i].id == oracle[i]);
    }
}

TEST_CASE("replicate_for_training") {
    FallbackTagger tagger;
    auto record = featurize({"x", "Loan 1 million", "A body. Another one.", Label::Incongruent}, tagger);
    REQUIRE(record.patterns.size() == 2);
    auto copies = replicate_for_training(record);
    REQUIRE(copies.size() == 2);
    CHECK(copies[0].active_cardinal == 0u);
    CHECK(copies[1].active_cardinal == 1u);
    auto stripped = copies[1];
    stripped.active_cardinal.reset();
    CHECK(stripped == record);

    auto single = featurize({"y", "5 ways to win", "Body.", Label::Congruent}, tagger);
    auto one = replicate_for_training(single);
    REQUIRE(one.size() == 1);
    CHECK(one[0].active_cardinal == 0u);

    auto none = featurize({"z", "No numbers", "Body.", Label::Congruent}, tagger);
    CHECK_THROWS_AS(replicate_for_training(none), NoCardinalError);

    auto all = replicate_all({record, single});
    CHECK(all.size() == 3);
}

TEST_CASE("split_dataset is stratified and deterministic") {
    FallbackTagger tagger;
    std::vector<RawRecord> corpus;
    for (int i = 0; i < 100; ++i) {
        corpus.push_back({"id" + std::to_string(i), "Headline " + std::to_string(i), "Body.",
                          i < 40 ? Label::Incongruent : Label::Congruent});
    }
    auto derived = derive_dataset(corpus, tagger).records;
    auto a = split_dataset(derived, 5);
    auto b = split_dataset(derived, 5);
    CHECK(a.train == b.train);
    CHECK(a.train.size() == 28 + 42);
    CHECK(a.validation.size() == 4 + 6);
    CHECK(a.test.size() == 8 + 12);
    auto c = split_dataset(derived, 6);
    CHECK_FALSE(c.train == a.train);
}

TEST_CASE("jsonl round trip and errors") {
    FallbackTagger tagger;
    auto derived = derive_dataset(testing::ten_record_corpus(), tagger).records;
    derived[0].active_cardinal = 0;
    std::stringstream buf;
    write_dataset(buf, derived);
    CHECK(read_dataset(buf) == derived);

    std::istringstream corpus(R"({"id":"a","headline":"h 1","body":"b.","label":"incongruent"})"
                              "\n\n"
                              R"({"id":"b","headline":"h","body":"b.","label":"bogus"})");
    try {
        read_corpus(corpus, "corpus.jsonl");
        FAIL("expected DataError");
    } catch (const DataError& e) {
        CHECK(std::string(e.what()).find("corpus.jsonl:3") != std::string::npos);
    }
    std::istringstream dup(R"({"id":"a","headline":"h","body":"b","label":"congruent"})"
                           "\n"
                           R"({"id":"a","headline":"h","body":"b","label":"congruent"})");
    CHECK_THROWS_AS(read_corpus(dup), DataError);
}
