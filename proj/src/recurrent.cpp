#include "poshan/recurrent.hpp"

#include <algorithm>
#include <cmath>

#include "poshan/errors.hpp"

namespace poshan {

std::string cell_type_name(CellType cell) {
    switch (cell) {
        case CellType::LstmBi: return "lstm-bi";
        case CellType::GruBi: return "gru-bi";
        case CellType::LstmUni: return "lstm-uni";
    }
    return "lstm-bi";
}

CellType parse_cell_type(std::string_view text) {
    if (text == "lstm-bi") return CellType::LstmBi;
    if (text == "gru-bi") return CellType::GruBi;
    if (text == "lstm-uni") return CellType::LstmUni;
    throw ConfigError("unknown cell type: " + std::string(text) + " (expected lstm-bi, gru-bi or lstm-uni)");
}

LstmState lstm_step(Graph& g, Var x, const LstmState& prev, const LstmWeights& w) {
    auto gate = [&](Var W, Var U, Var b) { return g.add(g.affine(x, W, b), g.matvec(U, prev.h)); };
    Var i = g.sigmoid(gate(w.W_i, w.U_i, w.b_i));
    Var f = g.sigmoid(gate(w.W_f, w.U_f, w.b_f));
    Var o = g.sigmoid(gate(w.W_o, w.U_o, w.b_o));
    Var cand = g.tanh(gate(w.W_g, w.U_g, w.b_g));
    Var c = g.add(g.hadamard(f, prev.c), g.hadamard(i, cand));
    Var h = g.hadamard(o, g.tanh(c));
    return {h, c};
}

Var gru_step(Graph& g, Var x, Var h_prev, const GruWeights& w) {
    Var z = g.sigmoid(g.add(g.affine(x, w.W_z, w.b_z), g.matvec(w.U_z, h_prev)));
    Var r = g.sigmoid(g.add(g.affine(x, w.W_r, w.b_r), g.matvec(w.U_r, h_prev)));
    Var n = g.tanh(g.add(g.affine(x, w.W_n, w.b_n), g.matvec(w.U_n, g.hadamard(r, h_prev))));
    // h = (1 - z) * n + z * h_prev  ==  n + z * (h_prev - n)
    return g.add(n, g.hadamard(z, g.sub(h_prev, n)));
}

RecurrentEncoder::RecurrentEncoder(std::string prefix, CellType cell, std::size_t input_dim, std::size_t hidden)
    : prefix_(std::move(prefix)), cell_(cell), input_dim_(input_dim), hidden_(hidden) {
    if (input_dim_ == 0 || hidden_ == 0) throw ConfigError("encoder dimensions must be positive");
}

void RecurrentEncoder::init(ParameterSet& params, Rng& rng) const {
    const double bound = 1.0 / std::sqrt(static_cast<double>(hidden_));
    const std::vector<std::string> gates =
        cell_ == CellType::GruBi ? std::vector<std::string>{"z", "r", "n"} : std::vector<std::string>{"i", "f", "o", "g"};
    std::vector<std::string> dirs{"fwd"};
    if (bidirectional()) dirs.push_back("bwd");
    for (const auto& dir : dirs) {
        const std::string base = prefix_ + "." + dir + ".";
        for (const auto& gate : gates) params.add(base + "W_" + gate, uniform_tensor({hidden_, input_dim_}, -bound, bound, rng));
        for (const auto& gate : gates) params.add(base + "U_" + gate, uniform_tensor({hidden_, hidden_}, -bound, bound, rng));
        for (const auto& gate : gates) {
            Tensor b = uniform_tensor({hidden_}, -bound, bound, rng);
            if (gate == "f") b.fill(1.0);
            params.add(base + "b_" + gate, std::move(b));
        }
    }
}

std::vector<Var> RecurrentEncoder::run_direction(Graph& g, ParameterSet& params, const std::string& dir,
                                                 const std::vector<Var>& inputs) const {
    const std::string base = prefix_ + "." + dir + ".";
    auto p = [&](const std::string& name) { return g.parameter(params.get(base + name)); };
    std::vector<Var> states;
    states.reserve(inputs.size());
    if (cell_ == CellType::GruBi) {
        GruWeights w{p("W_z"), p("W_r"), p("W_n"), p("U_z"), p("U_r"), p("U_n"), p("b_z"), p("b_r"), p("b_n")};
        Var h = g.zeros(hidden_);
        for (auto x : inputs) {
            h = gru_step(g, x, h, w);
            states.push_back(h);
        }
        return states;
    }
    LstmWeights w{p("W_i"), p("W_f"), p("W_o"), p("W_g"), p("U_i"), p("U_f"),
                  p("U_o"), p("U_g"), p("b_i"), p("b_f"), p("b_o"), p("b_g")};
    LstmState s{g.zeros(hidden_), g.zeros(hidden_)};
    for (auto x : inputs) {
        s = lstm_step(g, x, s, w);
        states.push_back(s.h);
    }
    return states;
}

RecurrentEncoder::Run RecurrentEncoder::run(Graph& g, ParameterSet& params, std::span<const Var> sequence,
                                            const Mask& mask) const {
    if (sequence.empty()) throw DimensionError(prefix_ + ": cannot encode an empty sequence");
    if (mask.size() != sequence.size()) {
        throw DimensionError(prefix_ + ": mask length " + std::to_string(mask.size()) + " vs sequence length " +
                             std::to_string(sequence.size()));
    }
    Run out;
    std::vector<Var> inputs;
    for (std::size_t t = 0; t < sequence.size(); ++t) {
        if (!mask[t]) continue;
        if (sequence[t].size() != input_dim_) {
            throw DimensionError(prefix_ + ": input of size " + std::to_string(sequence[t].size()) + ", expected " +
                                 std::to_string(input_dim_));
        }
        inputs.push_back(sequence[t]);
        out.positions.push_back(t);
    }
    if (inputs.empty()) return out;
    out.forward = run_direction(g, params, "fwd", inputs);
    if (bidirectional()) {
        std::vector<Var> reversed(inputs.rbegin(), inputs.rend());
        auto back = run_direction(g, params, "bwd", reversed);
        out.backward.assign(back.rbegin(), back.rend());
    }
    return out;
}

std::vector<Var> RecurrentEncoder::encode(Graph& g, ParameterSet& params, std::span<const Var> sequence,
                                          const Mask& mask) const {
    Run r = run(g, params, sequence, mask);
    std::vector<Var> out(sequence.size());
    Var zero;
    for (std::size_t k = 0; k < r.positions.size(); ++k) {
        out[r.positions[k]] = bidirectional() ? g.concat(r.forward[k], r.backward[k]) : r.forward[k];
    }
    for (auto& v : out) {
        if (!v.valid()) {
            if (!zero.valid()) zero = g.zeros(output_dim());
            v = zero;
        }
    }
    return out;
}

Var RecurrentEncoder::encode_final(Graph& g, ParameterSet& params, std::span<const Var> sequence,
                                   const Mask& mask) const {
    Run r = run(g, params, sequence, mask);
    if (r.positions.empty()) throw EmptyAttentionError(prefix_ + ": every position is masked");
    if (!bidirectional()) return r.forward.back();
    return g.concat(r.forward.back(), r.backward.front());
}

}  // namespace poshan
