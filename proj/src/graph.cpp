#include "poshan/graph.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "poshan/errors.hpp"

namespace poshan {

namespace {

void require_vector(const Tensor& t, const char* op) {
    if (t.rank() != 1) {
        throw DimensionError(std::string(op) + ": expected a vector, got " + shape_string(t.shape()));
    }
}

void require_same(const Tensor& a, const Tensor& b, const char* op) {
    if (!a.same_shape(b)) {
        throw DimensionError(std::string(op) + ": shape mismatch " + shape_string(a.shape()) +
                             " vs " + shape_string(b.shape()));
    }
}

double stable_sigmoid(double x) {
    if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
    double e = std::exp(x);
    return e / (1.0 + e);
}

}  // namespace

const char* op_name(OpKind kind) {
    switch (kind) {
        case OpKind::Constant: return "constant";
        case OpKind::Parameter: return "parameter";
        case OpKind::ParameterRow: return "parameter_row";
        case OpKind::MatVec: return "matvec";
        case OpKind::Affine: return "affine";
        case OpKind::Add: return "add";
        case OpKind::Sub: return "sub";
        case OpKind::Hadamard: return "hadamard";
        case OpKind::Scale: return "scale";
        case OpKind::Tanh: return "tanh";
        case OpKind::Sigmoid: return "sigmoid";
        case OpKind::Relu: return "relu";
        case OpKind::Concat: return "concat";
        case OpKind::SumVectors: return "sum_vectors";
        case OpKind::MeanVectors: return "mean_vectors";
        case OpKind::WeightedSum: return "weighted_sum";
        case OpKind::MaskedSoftmax: return "masked_softmax";
        case OpKind::Dot: return "dot";
        case OpKind::Stack: return "stack";
        case OpKind::Pick: return "pick";
        case OpKind::ScaleBy: return "scale_by";
        case OpKind::SumElements: return "sum_elements";
        case OpKind::SoftmaxCrossEntropy: return "softmax_cross_entropy";
    }
    return "unknown";
}

const Tensor& Var::value() const {
    if (!graph_) throw Error("use of an unbound Var");
    return graph_->value(id_);
}

double Var::item() const {
    const auto& v = value();
    if (v.size() != 1) throw NonScalarLossError("item() on non-scalar " + shape_string(v.shape()));
    return v[0];
}

Var Graph::push(Node n) {
    nodes_.push_back(std::move(n));
    return Var(this, nodes_.size() - 1);
}

void Graph::check_owned(Var v) const {
    if (v.graph_ != this || v.id_ >= nodes_.size()) throw Error("Var does not belong to this graph");
}

Graph::Node& Graph::node(Var v) {
    check_owned(v);
    return nodes_[v.id_];
}

const Graph::Node& Graph::node(Var v) const {
    check_owned(v);
    return nodes_[v.id_];
}

Var Graph::constant(Tensor value) {
    Node n;
    n.kind = OpKind::Constant;
    n.value = std::move(value);
    return push(std::move(n));
}

Var Graph::parameter(Parameter& p) {
    if (!p.trainable) return constant(p.value);
    if (auto it = param_leaves_.find(&p); it != param_leaves_.end()) return Var(this, it->second);
    Node n;
    n.kind = OpKind::Parameter;
    n.value = p.value;
    n.param = &p;
    Var v = push(std::move(n));
    param_leaves_.emplace(&p, v.id_);
    recorded_params_.push_back(&p);
    return v;
}

Var Graph::parameter_row(Parameter& p, std::size_t row) {
    if (p.value.rank() != 2 || row >= p.value.rows()) {
        throw DimensionError("parameter_row: row " + std::to_string(row) + " outside " + p.name + " " +
                             shape_string(p.value.shape()));
    }
    auto r = p.value.row(row);
    Tensor value({r.size()}, std::vector<double>(r.begin(), r.end()));
    if (!p.trainable) return constant(std::move(value));
    Node n;
    n.kind = OpKind::ParameterRow;
    n.value = std::move(value);
    n.param = &p;
    n.index = row;
    if (std::find(recorded_params_.begin(), recorded_params_.end(), &p) == recorded_params_.end()) {
        recorded_params_.push_back(&p);
    }
    return push(std::move(n));
}

Var Graph::matvec(Var W, Var x) {
    const auto& w = node(W).value;
    const auto& xv = node(x).value;
    require_vector(xv, "matvec");
    if (w.rank() != 2 || w.cols() != xv.size()) {
        throw DimensionError("matvec: cannot multiply " + shape_string(w.shape()) + " by " +
                             shape_string(xv.shape()));
    }
    Tensor out = Tensor::zeros(w.rows());
    for (std::size_t i = 0; i < w.rows(); ++i) {
        double s = 0.0;
        auto r = w.row(i);
        for (std::size_t j = 0; j < r.size(); ++j) s += r[j] * xv[j];
        out[i] = s;
    }
    Node n;
    n.kind = OpKind::MatVec;
    n.inputs = {W.id_, x.id_};
    n.value = std::move(out);
    return push(std::move(n));
}

Var Graph::affine(Var x, Var W, Var b) {
    const auto& w = node(W).value;
    const auto& xv = node(x).value;
    const auto& bv = node(b).value;
    require_vector(xv, "affine");
    require_vector(bv, "affine");
    if (w.rank() != 2 || w.cols() != xv.size() || w.rows() != bv.size()) {
        throw DimensionError("affine: W " + shape_string(w.shape()) + " incompatible with x " +
                             shape_string(xv.shape()) + " and b " + shape_string(bv.shape()));
    }
    Tensor out = Tensor::zeros(w.rows());
    for (std::size_t i = 0; i < w.rows(); ++i) {
        double s = 0.0;
        auto r = w.row(i);
        for (std::size_t j = 0; j < r.size(); ++j) s += r[j] * xv[j];
        out[i] = s + bv[i];
    }
    Node n;
    n.kind = OpKind::Affine;
    n.inputs = {x.id_, W.id_, b.id_};
    n.value = std::move(out);
    return push(std::move(n));
}

Var Graph::add(Var a, Var b) {
    const auto& av = node(a).value;
    const auto& bv = node(b).value;
    require_same(av, bv, "add");
    Tensor out = av;
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += bv[i];
    Node n;
    n.kind = OpKind::Add;
    n.inputs = {a.id_, b.id_};
    n.value = std::move(out);
    return push(std::move(n));
}

Var Graph::sub(Var a, Var b) {
    const auto& av = node(a).value;
    const auto& bv = node(b).value;
    require_same(av, bv, "sub");
    Tensor out = av;
    for (std::size_t i = 0; i < out.size(); ++i) out[i] -= bv[i];
    Node n;
    n.kind = OpKind::Sub;
    n.inputs = {a.id_, b.id_};
    n.value = std::move(out);
    return push(std::move(n));
}

Var Graph::hadamard(Var a, Var b) {
    const auto& av = node(a).value;
    const auto& bv = node(b).value;
    require_same(av, bv, "hadamard");
    Tensor out = av;
    for (std::size_t i = 0; i < out.size(); ++i) out[i] *= bv[i];
    Node n;
    n.kind = OpKind::Hadamard;
    n.inputs = {a.id_, b.id_};
    n.value = std::move(out);
    return push(std::move(n));
}

Var Graph::scale(Var a, double factor) {
    Tensor out = node(a).value;
    for (auto& v : out.data()) v *= factor;
    Node n;
    n.kind = OpKind::Scale;
    n.inputs = {a.id_};
    n.factor = factor;
    n.value = std::move(out);
    return push(std::move(n));
}

Var Graph::tanh(Var a) {
    Tensor out = node(a).value;
    for (auto& v : out.data()) v = std::tanh(v);
    Node n;
    n.kind = OpKind::Tanh;
    n.inputs = {a.id_};
    n.value = std::move(out);
    return push(std::move(n));
}

Var Graph::sigmoid(Var a) {
    Tensor out = node(a).value;
    for (auto& v : out.data()) v = stable_sigmoid(v);
    Node n;
    n.kind = OpKind::Sigmoid;
    n.inputs = {a.id_};
    n.value = std::move(out);
    return push(std::move(n));
}

Var Graph::relu(Var a) {
    Tensor out = node(a).value;
    for (auto& v : out.data()) v = v > 0.0 ? v : 0.0;
    Node n;
    n.kind = OpKind::Relu;
    n.inputs = {a.id_};
    n.value = std::move(out);
    return push(std::move(n));
}

Var Graph::concat(Var a, Var b) {
    const auto& av = node(a).value;
    const auto& bv = node(b).value;
    require_vector(av, "concat");
    require_vector(bv, "concat");
    std::vector<double> data(av.values());
    data.insert(data.end(), bv.values().begin(), bv.values().end());
    Node n;
    n.kind = OpKind::Concat;
    n.inputs = {a.id_, b.id_};
    n.value = Tensor::vector(std::move(data));
    return push(std::move(n));
}

Var Graph::sum_vectors(std::span<const Var> vectors) {
    if (vectors.empty()) throw DimensionError("sum_vectors: no inputs");
    Tensor out = node(vectors[0]).value;
    Node n;
    n.kind = OpKind::SumVectors;
    n.inputs.push_back(vectors[0].id_);
    for (std::size_t k = 1; k < vectors.size(); ++k) {
        const auto& v = node(vectors[k]).value;
        require_same(out, v, "sum_vectors");
        for (std::size_t i = 0; i < out.size(); ++i) out[i] += v[i];
        n.inputs.push_back(vectors[k].id_);
    }
    n.value = std::move(out);
    return push(std::move(n));
}

Var Graph::mean_vectors(std::span<const Var> vectors) {
    if (vectors.empty()) throw DimensionError("mean_vectors: no inputs");
    Tensor out = node(vectors[0]).value;
    Node n;
    n.kind = OpKind::MeanVectors;
    n.inputs.push_back(vectors[0].id_);
    for (std::size_t k = 1; k < vectors.size(); ++k) {
        const auto& v = node(vectors[k]).value;
        require_same(out, v, "mean_vectors");
        for (std::size_t i = 0; i < out.size(); ++i) out[i] += v[i];
        n.inputs.push_back(vectors[k].id_);
    }
    const double count = static_cast<double>(vectors.size());
    for (auto& v : out.data()) v /= count;
    n.value = std::move(out);
    return push(std::move(n));
}

Var Graph::weighted_sum(Var weights, std::span<const Var> vectors) {
    const auto& w = node(weights).value;
    require_vector(w, "weighted_sum");
    if (w.size() != vectors.size()) {
        throw DimensionError("weighted_sum: " + std::to_string(w.size()) + " weights for " +
                             std::to_string(vectors.size()) + " vectors");
    }
    Tensor out = Tensor::zeros(node(vectors[0]).value.size());
    Node n;
    n.kind = OpKind::WeightedSum;
    n.inputs.push_back(weights.id_);
    for (std::size_t k = 0; k < vectors.size(); ++k) {
        const auto& v = node(vectors[k]).value;
        require_same(out, v, "weighted_sum");
        for (std::size_t i = 0; i < out.size(); ++i) out[i] += w[k] * v[i];
        n.inputs.push_back(vectors[k].id_);
    }
    n.value = std::move(out);
    return push(std::move(n));
}

Var Graph::masked_softmax(Var scores, const Mask& mask) {
    const auto& s = node(scores).value;
    require_vector(s, "masked_softmax");
    if (mask.size() != s.size()) {
        throw DimensionError("masked_softmax: mask length " + std::to_string(mask.size()) +
                             " vs scores " + shape_string(s.shape()));
    }
    double peak = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (mask[i]) peak = std::max(peak, s[i]);
    }
    if (peak == -std::numeric_limits<double>::infinity()) {
        throw EmptyAttentionError("masked_softmax: every position is masked");
    }
    Tensor out = Tensor::zeros(s.size());
    double total = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (!mask[i]) continue;
        out[i] = std::exp(s[i] - peak);
        total += out[i];
    }
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (mask[i]) out[i] /= total;
    }
    Node n;
    n.kind = OpKind::MaskedSoftmax;
    n.inputs = {scores.id_};
    n.mask = mask;
    n.value = std::move(out);
    return push(std::move(n));
}

Var Graph::dot(Var a, Var b) {
    const auto& av = node(a).value;
    const auto& bv = node(b).value;
    require_same(av, bv, "dot");
    double s = 0.0;
    for (std::size_t i = 0; i < av.size(); ++i) s += av[i] * bv[i];
    Node n;
    n.kind = OpKind::Dot;
    n.inputs = {a.id_, b.id_};
    n.value = Tensor::scalar(s);
    return push(std::move(n));
}

Var Graph::stack(std::span<const Var> scalars) {
    if (scalars.empty()) throw DimensionError("stack: no inputs");
    std::vector<double> data;
    data.reserve(scalars.size());
    Node n;
    n.kind = OpKind::Stack;
    for (auto s : scalars) {
        const auto& v = node(s).value;
        if (v.size() != 1) throw DimensionError("stack: input " + shape_string(v.shape()) + " is not a scalar");
        data.push_back(v[0]);
        n.inputs.push_back(s.id_);
    }
    n.value = Tensor::vector(std::move(data));
    return push(std::move(n));
}

Var Graph::pick(Var a, std::size_t index) {
    const auto& av = node(a).value;
    if (index >= av.size()) {
        throw DimensionError("pick: index " + std::to_string(index) + " outside " + shape_string(av.shape()));
    }
    Node n;
    n.kind = OpKind::Pick;
    n.inputs = {a.id_};
    n.index = index;
    n.value = Tensor::scalar(av[index]);
    return push(std::move(n));
}

Var Graph::scale_by(Var a, Var scalar) {
    const auto& sv = node(scalar).value;
    if (sv.size() != 1) throw DimensionError("scale_by: factor " + shape_string(sv.shape()) + " is not a scalar");
    Tensor out = node(a).value;
    for (auto& v : out.data()) v *= sv[0];
    Node n;
    n.kind = OpKind::ScaleBy;
    n.inputs = {a.id_, scalar.id_};
    n.value = std::move(out);
    return push(std::move(n));
}

Var Graph::sum_elements(Var a) {
    double s = 0.0;
    for (double v : node(a).value.data()) s += v;
    Node n;
    n.kind = OpKind::SumElements;
    n.inputs = {a.id_};
    n.value = Tensor::scalar(s);
    return push(std::move(n));
}

Var Graph::softmax_cross_entropy(Var logits, std::size_t label) {
    const auto& z = node(logits).value;
    require_vector(z, "softmax_cross_entropy");
    if (label >= z.size()) {
        throw LabelRangeError("label " + std::to_string(label) + " out of range for " +
                              std::to_string(z.size()) + " classes");
    }
    double peak = *std::max_element(z.values().begin(), z.values().end());
    double total = 0.0;
    for (double v : z.data()) total += std::exp(v - peak);
    double loss = std::log(total) + peak - z[label];
    Node n;
    n.kind = OpKind::SoftmaxCrossEntropy;
    n.inputs = {logits.id_};
    n.index = label;
    n.value = Tensor::scalar(loss);
    return push(std::move(n));
}

Tensor& Graph::grad_of(std::size_t id) {
    auto& n = nodes_[id];
    if (n.grad.empty()) n.grad = Tensor(n.value.shape());
    return n.grad;
}

Tensor Graph::grad(Var v) const {
    const auto& n = node(v);
    if (n.grad.empty()) return Tensor(n.value.shape());
    return n.grad;
}

void Graph::run_backward(Var loss) {
    const auto& l = node(loss);
    if (l.value.size() != 1) {
        throw NonScalarLossError("backward requires a scalar loss, got " + shape_string(l.value.shape()));
    }
    for (auto& n : nodes_) n.grad = Tensor();
    grad_of(loss.id_)[0] = 1.0;
    for (std::size_t id = loss.id_ + 1; id-- > 0;) {
        if (!nodes_[id].grad.empty()) backprop_node(id);
    }
}

Gradients Graph::backward(Var loss) {
    Gradients grads;
    accumulate_gradients(loss, grads, 1.0);
    return grads;
}

void Graph::accumulate_gradients(Var loss, Gradients& into, double weight) {
    run_backward(loss);
    for (auto* p : recorded_params_) {
        if (!into.count(p->name)) into.emplace(p->name, Tensor(p->value.shape()));
    }
    for (const auto& n : nodes_) {
        if (n.grad.empty() || !n.param) continue;
        auto& target = into.at(n.param->name);
        if (n.kind == OpKind::Parameter) {
            for (std::size_t i = 0; i < target.size(); ++i) target[i] += weight * n.grad[i];
        } else {
            auto row = target.row(n.index);
            for (std::size_t i = 0; i < row.size(); ++i) row[i] += weight * n.grad[i];
        }
    }
}

void Graph::backprop_node(std::size_t id) {
    // Inputs always precede the node, so writing their grads never aliases g.
    const Node& n = nodes_[id];
    const Tensor& g = n.grad;
    switch (n.kind) {
        case OpKind::Constant:
        case OpKind::Parameter:
        case OpKind::ParameterRow:
            break;
        case OpKind::MatVec: {
            const auto& w = nodes_[n.inputs[0]].value;
            const auto& x = nodes_[n.inputs[1]].value;
            auto& gw = grad_of(n.inputs[0]);
            auto& gx = grad_of(n.inputs[1]);
            for (std::size_t i = 0; i < w.rows(); ++i) {
                auto wr = w.row(i);
                auto gr = gw.row(i);
                for (std::size_t j = 0; j < wr.size(); ++j) {
                    gr[j] += g[i] * x[j];
                    gx[j] += wr[j] * g[i];
                }
            }
            break;
        }
        case OpKind::Affine: {
            const auto& x = nodes_[n.inputs[0]].value;
            const auto& w = nodes_[n.inputs[1]].value;
            auto& gx = grad_of(n.inputs[0]);
            auto& gw = grad_of(n.inputs[1]);
            auto& gb = grad_of(n.inputs[2]);
            for (std::size_t i = 0; i < w.rows(); ++i) {
                auto wr = w.row(i);
                auto gr = gw.row(i);
                for (std::size_t j = 0; j < wr.size(); ++j) {
                    gr[j] += g[i] * x[j];
                    gx[j] += wr[j] * g[i];
                }
                gb[i] += g[i];
            }
            break;
        }
        case OpKind::Add: {
            grad_of(n.inputs[0]).add_inplace(g);
            grad_of(n.inputs[1]).add_inplace(g);
            break;
        }
        case OpKind::Sub: {
            grad_of(n.inputs[0]).add_inplace(g);
            auto& gb = grad_of(n.inputs[1]);
            for (std::size_t i = 0; i < g.size(); ++i) gb[i] -= g[i];
            break;
        }
        case OpKind::Hadamard: {
            const auto& a = nodes_[n.inputs[0]].value;
            const auto& b = nodes_[n.inputs[1]].value;
            auto& ga = grad_of(n.inputs[0]);
            for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i] * b[i];
            auto& gb = grad_of(n.inputs[1]);
            for (std::size_t i = 0; i < g.size(); ++i) gb[i] += g[i] * a[i];
            break;
        }
        case OpKind::Scale: {
            auto& ga = grad_of(n.inputs[0]);
            for (std::size_t i = 0; i < g.size(); ++i) ga[i] += n.factor * g[i];
            break;
        }
        case OpKind::Tanh: {
            const auto& y = n.value;
            auto& ga = grad_of(n.inputs[0]);
            for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i] * (1.0 - y[i] * y[i]);
            break;
        }
        case OpKind::Sigmoid: {
            const auto& y = n.value;
            auto& ga = grad_of(n.inputs[0]);
            for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i] * y[i] * (1.0 - y[i]);
            break;
        }
        case OpKind::Relu: {
            const auto& x = nodes_[n.inputs[0]].value;
            auto& ga = grad_of(n.inputs[0]);
            for (std::size_t i = 0; i < g.size(); ++i) {
                if (x[i] > 0.0) ga[i] += g[i];
            }
            break;
        }
        case OpKind::Concat: {
            auto& ga = grad_of(n.inputs[0]);
            const std::size_t split = ga.size();
            for (std::size_t i = 0; i < split; ++i) ga[i] += g[i];
            auto& gb = grad_of(n.inputs[1]);
            for (std::size_t i = 0; i < gb.size(); ++i) gb[i] += g[split + i];
            break;
        }
        case OpKind::SumVectors: {
            for (auto in : n.inputs) grad_of(in).add_inplace(g);
            break;
        }
        case OpKind::MeanVectors: {
            const double count = static_cast<double>(n.inputs.size());
            for (auto in : n.inputs) {
                auto& gi = grad_of(in);
                for (std::size_t i = 0; i < g.size(); ++i) gi[i] += g[i] / count;
            }
            break;
        }
        case OpKind::WeightedSum: {
            const auto& w = nodes_[n.inputs[0]].value;
            for (std::size_t k = 1; k < n.inputs.size(); ++k) {
                const auto& v = nodes_[n.inputs[k]].value;
                double gw = 0.0;
                for (std::size_t i = 0; i < g.size(); ++i) gw += g[i] * v[i];
                grad_of(n.inputs[0])[k - 1] += gw;
                auto& gv = grad_of(n.inputs[k]);
                for (std::size_t i = 0; i < g.size(); ++i) gv[i] += w[k - 1] * g[i];
            }
            break;
        }
        case OpKind::MaskedSoftmax: {
            const auto& y = n.value;
            double inner = 0.0;
            for (std::size_t i = 0; i < y.size(); ++i) {
                if (n.mask[i]) inner += y[i] * g[i];
            }
            auto& gs = grad_of(n.inputs[0]);
            for (std::size_t i = 0; i < y.size(); ++i) {
                if (n.mask[i]) gs[i] += y[i] * (g[i] - inner);
            }
            break;
        }
        case OpKind::Dot: {
            const auto& a = nodes_[n.inputs[0]].value;
            const auto& b = nodes_[n.inputs[1]].value;
            auto& ga = grad_of(n.inputs[0]);
            for (std::size_t i = 0; i < a.size(); ++i) ga[i] += g[0] * b[i];
            auto& gb = grad_of(n.inputs[1]);
            for (std::size_t i = 0; i < b.size(); ++i) gb[i] += g[0] * a[i];
            break;
        }
        case OpKind::Stack: {
            for (std::size_t k = 0; k < n.inputs.size(); ++k) grad_of(n.inputs[k])[0] += g[k];
            break;
        }
        case OpKind::Pick: {
            grad_of(n.inputs[0])[n.index] += g[0];
            break;
        }
        case OpKind::ScaleBy: {
            const auto& a = nodes_[n.inputs[0]].value;
            const double s = nodes_[n.inputs[1]].value[0];
            auto& ga = grad_of(n.inputs[0]);
            double gs = 0.0;
            for (std::size_t i = 0; i < a.size(); ++i) {
                ga[i] += g[i] * s;
                gs += g[i] * a[i];
            }
            grad_of(n.inputs[1])[0] += gs;
            break;
        }
        case OpKind::SumElements: {
            auto& ga = grad_of(n.inputs[0]);
            for (std::size_t i = 0; i < ga.size(); ++i) ga[i] += g[0];
            break;
        }
        case OpKind::SoftmaxCrossEntropy: {
            const auto& z = nodes_[n.inputs[0]].value;
            double peak = *std::max_element(z.values().begin(), z.values().end());
            double total = 0.0;
            for (double v : z.data()) total += std::exp(v - peak);
            auto& gz = grad_of(n.inputs[0]);
            for (std::size_t i = 0; i < z.size(); ++i) {
                double p = std::exp(z[i] - peak) / total;
                gz[i] += g[0] * (p - (i == n.index ? 1.0 : 0.0));
            }
            break;
        }
    }
}

}  // namespace poshan
