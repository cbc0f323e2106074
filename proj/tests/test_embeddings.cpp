#include <doctest.h>

#include <sstream>

#include "poshan/embeddings.hpp"
#include "poshan/errors.hpp"
#include "poshan/log.hpp"

using namespace poshan;

namespace {

TaggedSentence tagged(std::vector<std::string> tokens) {
    TaggedSentence out;
    for (auto& t : tokens) out.push_back({t, "NN"});
    return out;
}

DatasetRecord record_with(std::vector<std::string> headline, std::vector<std::vector<std::string>> body = {}) {
    DatasetRecord r;
    r.id = "r";
    r.headline = tagged(std::move(headline));
    for (auto& s : body) r.body.push_back(tagged(std::move(s)));
    return r;
}

Parameter table_param(std::size_t rows, std::size_t cols, std::vector<double> data) {
    return Parameter{"emb", Tensor::matrix(rows, cols, std::move(data)), true};
}

}  // namespace

TEST_CASE("build_vocab") {
    Rng rng(1);
    SUBCASE("min-count filter") {
        auto table = build_vocab({record_with({"a", "a", "b"})}, 2, 4, rng);
        CHECK(table.vocab.rows() == std::vector<std::string>{"a", kUnkToken, kPadToken});
        CHECK(table.vocab.row("b") == table.vocab.unk_row());
        CHECK(table.vocab.row("a") == 0);
        CHECK(table.matrix.rows() == 3);
        for (double v : table.matrix.row(table.vocab.pad_row())) CHECK(v == 0.0);
        for (double v : table.matrix.row(0)) {
            CHECK(v >= -0.05);
            CHECK(v <= 0.05);
        }
    }
    SUBCASE("empty corpus") { CHECK_THROWS_AS(build_vocab({}, 1, 4, rng), DataError); }
    SUBCASE("min-count zero") { CHECK_THROWS_AS(build_vocab({record_with({"a"})}, 0, 4, rng), ConfigError); }
    SUBCASE("deterministic per seed") {
        std::vector<DatasetRecord> corpus{record_with({"x", "y"}, {{"z", "x"}})};
        Rng r1(9), r2(9);
        auto t1 = build_vocab(corpus, 1, 8, r1);
        auto t2 = build_vocab(corpus, 1, 8, r2);
        CHECK(t1.vocab.rows() == t2.vocab.rows());
        CHECK(t1.matrix == t2.matrix);
    }
    SUBCASE("sentinels resolve to the pad row") {
        auto table = build_vocab({record_with({"a"})}, 1, 2, rng);
        CHECK(table.vocab.row(kBosToken) == table.vocab.pad_row());
        CHECK(table.vocab.row(kEosToken) == table.vocab.pad_row());
        CHECK(table.vocab.row(kPadToken) == table.vocab.pad_row());
    }
}

TEST_CASE("load_pretrained") {
    SUBCASE("round trip") {
        std::istringstream in("cat 1 2 3 4\ndog 0 0 0 1\nfish -1 0.5 2 0\n");
        auto table = load_pretrained(in, 4, false);
        CHECK(table.vocab.size() == 5);
        CHECK(table.mode == EmbeddingMode::PreloadedFrozen);
        CHECK(table.matrix.at(0, 1) == 2.0);
        CHECK(table.matrix.at(2, 0) == -1.0);
        CHECK(table.vocab.row("dog") == 1);
        SUBCASE("unk is the mean of the loaded rows") {
            const auto unk = table.matrix.row(table.vocab.unk_row());
            const double expected[] = {0.0, 2.5 / 3.0, 5.0 / 3.0, 5.0 / 3.0};
            for (int c = 0; c < 4; ++c) CHECK(unk[c] == doctest::Approx(expected[c]).epsilon(1e-15));
            CHECK(table.vocab.row("whale") == table.vocab.unk_row());
        }
        for (double v : table.matrix.row(table.vocab.pad_row())) CHECK(v == 0.0);
    }
    SUBCASE("malformed line names its number") {
        std::istringstream in("cat 1 2 3 4\ndog 1 2 3\n");
        try {
            load_pretrained(in, 4, true, "vec.txt");
            FAIL("expected DataError");
        } catch (const DataError& e) {
            CHECK(std::string(e.what()).find("vec.txt:2") != std::string::npos);
        }
    }
    SUBCASE("non-numeric value") {
        std::istringstream in("cat 1 2 x 4\n");
        CHECK_THROWS_AS(load_pretrained(in, 4, true), DataError);
    }
    SUBCASE("missing file") { CHECK_THROWS_AS(load_pretrained_file("/nonexistent/vec.txt", 4, true), DataError); }
}

TEST_CASE("headline_vector") {
    WordVocabulary vocab({"a", "b", "c"});
    // rows: a, b, c, <unk>, <pad>
    Parameter emb = table_param(5, 2, {1, 0, 0, 2, 3, 3, 0.5, 0.5, 0, 0});
    Graph g;
    CHECK(headline_vector(g, {"a"}, vocab, emb).value() == Tensor::vector({1, 0}));
    CHECK(headline_vector(g, {"a", "b"}, vocab, emb).value() == Tensor::vector({1, 2}));
    CHECK(headline_vector(g, {"a", "b", "c", "zzz"}, vocab, emb).value() ==
          headline_vector(g, {"zzz", "c", "b", "a"}, vocab, emb).value());
    CHECK(headline_vector(g, {"a", kPadToken}, vocab, emb).value() == Tensor::vector({1, 0}));
    CHECK(headline_vector(g, {"zzz"}, vocab, emb).value() == Tensor::vector({0.5, 0.5}));

    std::vector<std::string> warnings;
    auto prev = set_warning_sink([&](const std::string& m) { warnings.push_back(m); });
    CHECK(headline_vector(g, {}, vocab, emb).value() == Tensor::vector({0, 0}));
    set_warning_sink(prev);
    CHECK(warnings.size() == 1);
}

TEST_CASE("cardinal_phrase_vector") {
    WordVocabulary vocab({"five", "loan", "million", "1", "ways"});
    Parameter emb = table_param(7, 2, {1, 1, 2, 0, 0, 3, 4, 4, 0.25, 0.5, 9, 9, 0, 0});
    Graph g;
    CHECK(cardinal_phrase_vector(g, {kBosToken, "five", "ways"}, vocab, emb).value() == Tensor::vector({1.25, 1.5}));
    CHECK(cardinal_phrase_vector(g, {"loan", "1", "million"}, vocab, emb).value() == Tensor::vector({6, 7}));

    SUBCASE("sentinel rows never receive gradient") {
        Graph h;
        auto loss = h.sum_elements(cardinal_phrase_vector(h, {"five", "ways", kEosToken}, vocab, emb));
        auto grads = h.backward(loss);
        const auto& gm = grads.at("emb");
        CHECK(gm.at(6, 0) == 0.0);
        CHECK(gm.at(0, 0) == 1.0);
        CHECK(gm.at(4, 1) == 1.0);
        CHECK(gm.at(1, 0) == 0.0);
    }
}

TEST_CASE("pattern_query") {
    PatternVocabulary vocab({"BOS:CD:NNS", "NN:CD:CD"});
    Parameter emb = table_param(3, 2, {2, 5, 0, 1, 7, 7});
    DatasetRecord r;
    r.patterns = {{"BOS", "CD", "NNS"}, {"NN", "CD", "CD"}};
    Graph g;
    SUBCASE("one pattern: both modes agree") {
        std::vector<CardinalPattern> one{r.patterns[0]};
        auto a = pattern_query(g, one, 0, vocab, emb, QueryMode::Active).value();
        auto m = pattern_query(g, one, std::nullopt, vocab, emb, QueryMode::MeanPool).value();
        CHECK(a == Tensor::vector({2, 5}));
        CHECK(a == m);
    }
    SUBCASE("mean pool") {
        CHECK(pattern_query(g, r.patterns, std::nullopt, vocab, emb, QueryMode::MeanPool).value()[0] == 1.0);
        CHECK(pattern_query(g, r.patterns, 1, vocab, emb, QueryMode::Active).value() == Tensor::vector({0, 1}));
    }
    SUBCASE("k copies of one pattern pool to that pattern") {
        for (std::size_t k = 1; k <= 7; ++k) {
            std::vector<CardinalPattern> copies(k, r.patterns[1]);
            CHECK(pattern_query(g, copies, std::nullopt, vocab, emb, QueryMode::MeanPool).value() ==
                  Tensor::vector({0, 1}));
        }
    }
    SUBCASE("unseen pattern uses the unk row") {
        std::vector<CardinalPattern> odd{{"JJ", "CD", "EOS"}};
        CHECK(pattern_query(g, odd, 0, vocab, emb, QueryMode::Active).value() == Tensor::vector({7, 7}));
    }
    SUBCASE("errors") {
        CHECK_THROWS_AS(pattern_query(g, {}, std::nullopt, vocab, emb, QueryMode::MeanPool), NoCardinalError);
        CHECK_THROWS_AS(pattern_query(g, r.patterns, std::nullopt, vocab, emb, QueryMode::Active), ConfigError);
    }
    SUBCASE("gradient touches only the patterns used") {
        Graph h;
        auto loss = h.sum_elements(pattern_query(h, {r.patterns[1]}, 0, vocab, emb, QueryMode::Active));
        auto grads = h.backward(loss);
        const auto& gm = grads.at("emb");
        CHECK(gm.at(1, 0) == 1.0);
        CHECK(gm.at(1, 1) == 1.0);
        CHECK(gm.at(0, 0) == 0.0);
        CHECK(gm.at(2, 1) == 0.0);
    }
}

TEST_CASE("build_pattern_table") {
    DatasetRecord a, b;
    a.patterns = {{"NN", "CD", "CD"}, {"CD", "CD", "EOS"}};
    b.patterns = {{"NN", "CD", "CD"}};
    Rng rng(3);
    auto table = build_pattern_table({a, b}, kPatternDim, rng);
    CHECK(table.vocab.rows() == std::vector<std::string>{"CD:CD:EOS", "NN:CD:CD", kUnkPattern});
    CHECK(table.matrix.cols() == 100);
    for (double v : table.matrix.values()) {
        CHECK(v >= -0.05);
        CHECK(v <= 0.05);
    }
}

TEST_CASE("embedding mode names") {
    for (auto m : {EmbeddingMode::PreloadedFrozen, EmbeddingMode::PreloadedTrainable, EmbeddingMode::RandomTrainable}) {
        CHECK(parse_embedding_mode(embedding_mode_name(m)) == m);
    }
    CHECK_THROWS_AS(parse_embedding_mode("bert"), ConfigError);
}
