#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <random>
#include <string>
#include <unordered_map>
#include <vector>

#include "poshan/tensor.hpp"

namespace poshan {

struct Parameter {
    std::string name;
    Tensor value;
    bool trainable = true;
};

// Gradient per parameter name. Ordered so iteration is deterministic.
using Gradients = std::map<std::string, Tensor>;

// Owns the model parameters. Addresses are stable for the lifetime of the set,
// so graph leaves may hold raw pointers into it.
class ParameterSet {
public:
    ParameterSet() = default;
    ParameterSet(const ParameterSet& other);
    ParameterSet& operator=(const ParameterSet& other);
    ParameterSet(ParameterSet&&) noexcept = default;
    ParameterSet& operator=(ParameterSet&&) noexcept = default;

    // Throws ConfigError when the name is already taken.
    Parameter& add(std::string name, Tensor value, bool trainable = true);

    Parameter& get(const std::string& name);
    const Parameter& get(const std::string& name) const;
    bool contains(const std::string& name) const { return index_.count(name) != 0; }

    std::size_t size() const { return params_.size(); }
    std::size_t total_entries() const;

    // Insertion order.
    std::vector<Parameter*> all();
    std::vector<const Parameter*> all() const;

    Gradients zero_gradients() const;

private:
    std::vector<std::unique_ptr<Parameter>> params_;
    std::unordered_map<std::string, std::size_t> index_;
};

using Rng = std::mt19937_64;

Tensor uniform_tensor(std::vector<std::size_t> shape, double lo, double hi, Rng& rng);

double global_norm(const Gradients& grads);

}  // namespace poshan
