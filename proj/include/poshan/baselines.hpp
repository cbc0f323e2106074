#pragma once

#include <cstddef>
#include <string>
#include <string_view>

#include "poshan/config.hpp"
#include "poshan/graph.hpp"

namespace poshan {

enum class PosCategory { Noun = 0, Verb, Adjective, Pronoun, Adverb, Cardinal, Other };
inline constexpr std::size_t kNumPosCategories = 7;

const char* pos_category_name(PosCategory c);
// Total: tags outside the six chunk lists map to Other.
PosCategory pos_category(std::string_view tag);

// theta = relu(w . onehot(category) + b), with w in R^7 and b in R^1 stored as
// "posat.w" and "posat.b".
void init_posat(ParameterSet& params, PosAtInit init, Rng& rng);
Var posat_theta(Graph& g, ParameterSet& params, PosCategory category);

}  // namespace poshan
