#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "poshan/graph.hpp"

namespace poshan {

struct AttentionResult {
    Var weights;  // simplex over unmasked positions
    Var context;  // sum of weights[t] * states[t]
};

// Additive scorer e = v . tanh(W_h hs + W_q q + b). Parameters are stored as
// "<prefix>.v", "<prefix>.W_h", "<prefix>.W_q", "<prefix>.b".
class AdditiveAttention {
public:
    AdditiveAttention() = default;
    AdditiveAttention(std::string prefix, std::size_t state_dim, std::size_t query_dim, std::size_t proj_dim);

    void init(ParameterSet& params, Rng& rng) const;

    Var score(Graph& g, ParameterSet& params, Var state, Var query) const;
    AttentionResult attend(Graph& g, ParameterSet& params, std::span<const Var> states, const Mask& mask,
                           Var query) const;

    const std::string& prefix() const { return prefix_; }
    std::size_t state_dim() const { return state_dim_; }
    std::size_t query_dim() const { return query_dim_; }
    std::size_t proj_dim() const { return proj_dim_; }

private:
    std::string prefix_;
    std::size_t state_dim_ = 0;
    std::size_t query_dim_ = 0;
    std::size_t proj_dim_ = 0;
};

// Elementwise mean of the weight vectors. Every input must be zero wherever
// `mask` is false.
Var fuse_weights(Graph& g, std::span<const Var> weights, const Mask& mask);

}  // namespace poshan
