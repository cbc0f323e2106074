#include "poshan/attention.hpp"

#include <cmath>

#include "poshan/errors.hpp"

namespace poshan {

AdditiveAttention::AdditiveAttention(std::string prefix, std::size_t state_dim, std::size_t query_dim,
                                     std::size_t proj_dim)
    : prefix_(std::move(prefix)), state_dim_(state_dim), query_dim_(query_dim), proj_dim_(proj_dim) {
    if (state_dim_ == 0 || query_dim_ == 0 || proj_dim_ == 0) throw ConfigError(prefix_ + ": dimensions must be positive");
}

void AdditiveAttention::init(ParameterSet& params, Rng& rng) const {
    auto glorot = [&](std::size_t fan_out, std::size_t fan_in) {
        return std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
    };
    const double bh = glorot(proj_dim_, state_dim_);
    const double bq = glorot(proj_dim_, query_dim_);
    const double bv = glorot(1, proj_dim_);
    params.add(prefix_ + ".v", uniform_tensor({proj_dim_}, -bv, bv, rng));
    params.add(prefix_ + ".W_h", uniform_tensor({proj_dim_, state_dim_}, -bh, bh, rng));
    params.add(prefix_ + ".W_q", uniform_tensor({proj_dim_, query_dim_}, -bq, bq, rng));
    params.add(prefix_ + ".b", Tensor::zeros(proj_dim_));
}

Var AdditiveAttention::score(Graph& g, ParameterSet& params, Var state, Var query) const {
    Var v = g.parameter(params.get(prefix_ + ".v"));
    Var W_h = g.parameter(params.get(prefix_ + ".W_h"));
    Var W_q = g.parameter(params.get(prefix_ + ".W_q"));
    Var b = g.parameter(params.get(prefix_ + ".b"));
    return g.dot(v, g.tanh(g.add(g.matvec(W_h, state), g.affine(query, W_q, b))));
}

AttentionResult AdditiveAttention::attend(Graph& g, ParameterSet& params, std::span<const Var> states,
                                          const Mask& mask, Var query) const {
    if (states.size() != mask.size()) {
        throw DimensionError(prefix_ + ": " + std::to_string(states.size()) + " states but mask of length " +
                             std::to_string(mask.size()));
    }
    Var v = g.parameter(params.get(prefix_ + ".v"));
    Var W_h = g.parameter(params.get(prefix_ + ".W_h"));
    Var projected_query = g.affine(query, g.parameter(params.get(prefix_ + ".W_q")), g.parameter(params.get(prefix_ + ".b")));
    std::vector<Var> scores;
    scores.reserve(states.size());
    Var masked_score;
    for (std::size_t t = 0; t < states.size(); ++t) {
        if (!mask[t]) {
            if (!masked_score.valid()) masked_score = g.constant(Tensor::scalar(0.0));
            scores.push_back(masked_score);
            continue;
        }
        scores.push_back(g.dot(v, g.tanh(g.add(g.matvec(W_h, states[t]), projected_query))));
    }
    Var weights = g.masked_softmax(g.stack(scores), mask);
    return {weights, g.weighted_sum(weights, states)};
}

Var fuse_weights(Graph& g, std::span<const Var> weights, const Mask& mask) {
    if (weights.empty()) throw DimensionError("fuse_weights needs at least one weight vector");
    for (auto w : weights) {
        if (w.size() != mask.size()) {
            throw DimensionError("fuse_weights: weight vector of length " + std::to_string(w.size()) +
                                 " vs mask of length " + std::to_string(mask.size()));
        }
        for (std::size_t t = 0; t < mask.size(); ++t) {
            if (!mask[t] && w.value()[t] != 0.0) {
                throw DimensionError("fuse_weights: nonzero weight at masked position " + std::to_string(t));
            }
        }
    }
    return g.mean_vectors(weights);
}

}  // namespace poshan
