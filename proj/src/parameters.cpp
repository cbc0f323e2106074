#include "poshan/parameters.hpp"

#include <cmath>

#include "poshan/errors.hpp"

namespace poshan {

ParameterSet::ParameterSet(const ParameterSet& other) { *this = other; }

ParameterSet& ParameterSet::operator=(const ParameterSet& other) {
    if (this == &other) return *this;
    params_.clear();
    index_.clear();
    for (const auto& p : other.params_) add(p->name, p->value, p->trainable);
    return *this;
}

Parameter& ParameterSet::add(std::string name, Tensor value, bool trainable) {
    if (contains(name)) throw ConfigError("duplicate parameter name: " + name);
    index_.emplace(name, params_.size());
    params_.push_back(std::make_unique<Parameter>(Parameter{std::move(name), std::move(value), trainable}));
    return *params_.back();
}

Parameter& ParameterSet::get(const std::string& name) {
    auto it = index_.find(name);
    if (it == index_.end()) throw ConfigError("unknown parameter: " + name);
    return *params_[it->second];
}

const Parameter& ParameterSet::get(const std::string& name) const {
    auto it = index_.find(name);
    if (it == index_.end()) throw ConfigError("unknown parameter: " + name);
    return *params_[it->second];
}

std::size_t ParameterSet::total_entries() const {
    std::size_t n = 0;
    for (const auto& p : params_) n += p->value.size();
    return n;
}

std::vector<Parameter*> ParameterSet::all() {
    std::vector<Parameter*> out;
    out.reserve(params_.size());
    for (auto& p : params_) out.push_back(p.get());
    return out;
}

std::vector<const Parameter*> ParameterSet::all() const {
    std::vector<const Parameter*> out;
    out.reserve(params_.size());
    for (const auto& p : params_) out.push_back(p.get());
    return out;
}

Gradients ParameterSet::zero_gradients() const {
    Gradients grads;
    for (const auto& p : params_) {
        if (p->trainable) grads.emplace(p->name, Tensor(p->value.shape()));
    }
    return grads;
}

Tensor uniform_tensor(std::vector<std::size_t> shape, double lo, double hi, Rng& rng) {
    Tensor t(std::move(shape));
    std::uniform_real_distribution<double> dist(lo, hi);
    for (auto& v : t.data()) v = dist(rng);
    return t;
}

double global_norm(const Gradients& grads) {
    double sq = 0.0;
    for (const auto& [name, g] : grads) {
        for (double v : g.data()) sq += v * v;
    }
    return std::sqrt(sq);
}

}  // namespace poshan
