#pragma once

#include <cstddef>
#include <span>
#include <unordered_map>
#include <vector>

#include "poshan/parameters.hpp"
#include "poshan/tensor.hpp"

namespace poshan {

class Graph;

// Handle to a node recorded on a Graph. Cheap to copy; only valid while the
// owning graph is alive.
class Var {
public:
    Var() = default;

    const Tensor& value() const;
    double item() const;
    std::size_t size() const { return value().size(); }
    std::size_t id() const { return id_; }
    Graph* graph() const { return graph_; }
    bool valid() const { return graph_ != nullptr; }

private:
    friend class Graph;
    Var(Graph* graph, std::size_t id) : graph_(graph), id_(id) {}

    Graph* graph_ = nullptr;
    std::size_t id_ = 0;
};

enum class OpKind {
    Constant,
    Parameter,
    ParameterRow,
    MatVec,
    Affine,
    Add,
    Sub,
    Hadamard,
    Scale,
    Tanh,
    Sigmoid,
    Relu,
    Concat,
    SumVectors,
    MeanVectors,
    WeightedSum,
    MaskedSoftmax,
    Dot,
    Stack,
    Pick,
    ScaleBy,
    SumElements,
    SoftmaxCrossEntropy,
};

const char* op_name(OpKind kind);

using Mask = std::vector<bool>;

// Define-by-run tape. Nodes are appended in evaluation order, so reverse
// insertion order is a valid reverse topological order for backward.
class Graph {
public:
    Graph() = default;
    Graph(const Graph&) = delete;
    Graph& operator=(const Graph&) = delete;

    Var constant(Tensor value);
    Var zeros(std::size_t n) { return constant(Tensor::zeros(n)); }

    // Non-trainable parameters are recorded as constants.
    Var parameter(Parameter& p);
    Var parameter_row(Parameter& p, std::size_t row);

    Var matvec(Var W, Var x);
    Var affine(Var x, Var W, Var b);
    Var add(Var a, Var b);
    Var sub(Var a, Var b);
    Var hadamard(Var a, Var b);
    Var scale(Var a, double factor);
    Var tanh(Var a);
    Var sigmoid(Var a);
    Var relu(Var a);
    Var concat(Var a, Var b);
    Var sum_vectors(std::span<const Var> vectors);
    // Sum of the vectors divided by their count.
    Var mean_vectors(std::span<const Var> vectors);
    Var weighted_sum(Var weights, std::span<const Var> vectors);
    Var masked_softmax(Var scores, const Mask& mask);
    Var dot(Var a, Var b);
    Var stack(std::span<const Var> scalars);
    Var pick(Var a, std::size_t index);
    Var scale_by(Var a, Var scalar);
    Var sum_elements(Var a);
    Var softmax_cross_entropy(Var logits, std::size_t label);

    // Reverse-mode pass from a scalar loss. Every trainable parameter that was
    // recorded on this graph gets an entry, zero when off the loss path.
    Gradients backward(Var loss);
    // Same, but adds weight * gradient into an existing accumulator.
    void accumulate_gradients(Var loss, Gradients& into, double weight = 1.0);

    // Node gradient after backward; zeros when the node was not reached.
    Tensor grad(Var v) const;

    std::size_t node_count() const { return nodes_.size(); }
    OpKind kind(Var v) const { return nodes_.at(v.id_).kind; }
    const Tensor& value(std::size_t id) const { return nodes_[id].value; }

private:
    struct Node {
        OpKind kind = OpKind::Constant;
        std::vector<std::size_t> inputs;
        Tensor value;
        Tensor grad;
        Parameter* param = nullptr;
        std::size_t index = 0;
        double factor = 0.0;
        Mask mask;
    };

    Var push(Node node);
    Node& node(Var v);
    const Node& node(Var v) const;
    void check_owned(Var v) const;
    Tensor& grad_of(std::size_t id);
    void run_backward(Var loss);
    void backprop_node(std::size_t id);

    std::vector<Node> nodes_;
    std::unordered_map<const Parameter*, std::size_t> param_leaves_;
    std::vector<Parameter*> recorded_params_;
};

}  // namespace poshan
