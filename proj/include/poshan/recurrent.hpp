#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "poshan/graph.hpp"

namespace poshan {

enum class CellType { LstmBi, GruBi, LstmUni };

std::string cell_type_name(CellType cell);
CellType parse_cell_type(std::string_view text);

// One direction's LSTM weights, bound to a graph.
struct LstmWeights {
    Var W_i, W_f, W_o, W_g;
    Var U_i, U_f, U_o, U_g;
    Var b_i, b_f, b_o, b_g;
};

struct GruWeights {
    Var W_z, W_r, W_n;
    Var U_z, U_r, U_n;
    Var b_z, b_r, b_n;
};

struct LstmState {
    Var h;
    Var c;
};

LstmState lstm_step(Graph& g, Var x, const LstmState& prev, const LstmWeights& w);
Var gru_step(Graph& g, Var x, Var h_prev, const GruWeights& w);

// Word- or sentence-level recurrent encoder. Parameters live in a
// ParameterSet under "<prefix>.fwd.*" and "<prefix>.bwd.*".
class RecurrentEncoder {
public:
    RecurrentEncoder() = default;
    RecurrentEncoder(std::string prefix, CellType cell, std::size_t input_dim, std::size_t hidden);

    // Uniform [-1/sqrt(h), 1/sqrt(h)] weights; LSTM forget-gate bias +1.
    void init(ParameterSet& params, Rng& rng) const;

    std::size_t output_dim() const { return bidirectional() ? 2 * hidden_ : hidden_; }
    std::size_t hidden() const { return hidden_; }
    std::size_t input_dim() const { return input_dim_; }
    CellType cell() const { return cell_; }
    bool bidirectional() const { return cell_ != CellType::LstmUni; }
    const std::string& prefix() const { return prefix_; }

    // One state per position; masked positions yield zero vectors and never
    // influence unmasked ones.
    std::vector<Var> encode(Graph& g, ParameterSet& params, std::span<const Var> sequence, const Mask& mask) const;

    // Forward state after the last unmasked position concatenated with the
    // backward state after the first one (forward state only when unidirectional).
    Var encode_final(Graph& g, ParameterSet& params, std::span<const Var> sequence, const Mask& mask) const;

private:
    struct Run {
        std::vector<Var> forward;   // per unmasked position, in order
        std::vector<Var> backward;  // per unmasked position, in order
        std::vector<std::size_t> positions;
    };
    Run run(Graph& g, ParameterSet& params, std::span<const Var> sequence, const Mask& mask) const;
    std::vector<Var> run_direction(Graph& g, ParameterSet& params, const std::string& dir,
                                   const std::vector<Var>& inputs) const;

    std::string prefix_;
    CellType cell_ = CellType::LstmBi;
    std::size_t input_dim_ = 0;
    std::size_t hidden_ = 0;
};

}  // namespace poshan
