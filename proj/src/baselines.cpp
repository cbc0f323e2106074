#include "poshan/baselines.hpp"

#include <array>

namespace poshan {

const char* pos_category_name(PosCategory c) {
    static constexpr std::array<const char*, kNumPosCategories> names{"noun",    "verb",     "adjective", "pronoun",
                                                                      "adverb",  "cardinal", "other"};
    return names[static_cast<std::size_t>(c)];
}

PosCategory pos_category(std::string_view tag) {
    if (tag == "NN" || tag == "NNS" || tag == "NNP" || tag == "NNPS") return PosCategory::Noun;
    if (tag == "VB" || tag == "VBD" || tag == "VBG" || tag == "VBN" || tag == "VBP" || tag == "VBZ") {
        return PosCategory::Verb;
    }
    if (tag == "JJ" || tag == "JJR" || tag == "JJS") return PosCategory::Adjective;
    if (tag == "WP") return PosCategory::Pronoun;
    if (tag == "WRB") return PosCategory::Adverb;
    if (tag == "CD") return PosCategory::Cardinal;
    return PosCategory::Other;
}

void init_posat(ParameterSet& params, PosAtInit init, Rng& rng) {
    if (init == PosAtInit::NearZero) {
        params.add("posat.w", uniform_tensor({kNumPosCategories}, 0.0, 0.01, rng));
        params.add("posat.b", uniform_tensor({1}, 0.0, 0.01, rng));
    } else {
        params.add("posat.w", uniform_tensor({kNumPosCategories}, -1.0, 1.0, rng));
        params.add("posat.b", uniform_tensor({1}, -1.0, 1.0, rng));
    }
}

Var posat_theta(Graph& g, ParameterSet& params, PosCategory category) {
    Var w = g.parameter(params.get("posat.w"));
    Var b = g.parameter(params.get("posat.b"));
    return g.relu(g.add(g.pick(w, static_cast<std::size_t>(category)), b));
}

}  // namespace poshan
