#include "poshan/gradcheck_suite.hpp"

#include "poshan/baselines.hpp"

namespace poshan {

std::vector<DatasetRecord> gradcheck_records() {
    FallbackTagger tagger;
    auto make = [&](const char* id, const char* headline, const char* body, Label label) {
        return featurize(RawRecord{id, headline, body, label}, tagger);
    };
    auto a = make("g1", "loan of 1 million", "bank loan. paid 1 million", Label::Incongruent);
    auto b = make("g2", "5 ways to win", "five ways. win 5 prizes", Label::Congruent);
    a.active_cardinal = 1;
    return {a, b};
}

Model gradcheck_model(ModelKind kind, std::uint64_t seed) {
    TrainConfig config;
    config.seed = seed;
    config.word_dim = 4;
    config.hidden_size = 3;
    config.attention_size = 3;
    config.posat_init = PosAtInit::Random;
    const auto records = gradcheck_records();
    Rng rng(seed);
    auto words = build_vocab(records, 1, config.word_dim, rng);
    // Larger rows than the default init so every score path is well exercised.
    words.matrix = uniform_tensor(words.matrix.shape(), -1.0, 1.0, rng);
    for (auto& v : words.matrix.row(words.vocab.pad_row())) v = 0.0;
    auto patterns = build_pattern_table(records, config.pattern_dim, rng);
    Model model = Model::create(kind, config, std::move(words), std::move(patterns), rng);
    if (kind == ModelKind::PosAt) {
        // A random draw can leave every relu unit dead, which zeroes all
        // gradients and makes the check vacuous. Keep each unit well inside
        // the live region, further than epsilon from the kink.
        model.params().get("posat.w").value = uniform_tensor({kNumPosCategories}, 0.25, 1.0, rng);
        model.params().get("posat.b").value = Tensor::vector({0.1});
    }
    return model;
}

GradcheckReport run_gradcheck(ModelKind kind, std::uint64_t seed, const GradcheckOptions& options) {
    Model model = gradcheck_model(kind, seed);
    std::vector<Document> docs;
    for (const auto& r : gradcheck_records()) docs.push_back(make_document(r, model.config()));
    // Pad the second document so masked positions are on the checked path.
    pad_document(docs[1], 3, 4);
    GradcheckOptions opts = options;
    opts.seed = seed;
    auto report = finite_difference_check(
        [&](Graph& g) {
            std::vector<Var> losses;
            for (const auto& d : docs) losses.push_back(model.loss(g, d, QueryMode::Active));
            return g.sum_elements(g.stack(losses));
        },
        model.params(), opts);
    // The toys are built so every group lies on the loss path; an all-zero
    // gradient means the comparison proved nothing.
    for (auto& e : report.entries) {
        if (e.max_abs_gradient == 0.0) {
            e.passed = false;
            report.passed = false;
        }
    }
    return report;
}

}  // namespace poshan
