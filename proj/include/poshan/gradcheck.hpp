#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "poshan/graph.hpp"
#include "poshan/parameters.hpp"

namespace poshan {

// Builds the scalar loss on a fresh graph from the current parameter values.
using LossBuilder = std::function<Var(Graph&)>;

struct GradcheckOptions {
    double epsilon = 1e-5;
    double tolerance = 1e-4;
    // Tensors with more entries than this are checked on a uniform sample.
    std::size_t exhaustive_limit = 4096;
    std::size_t sample_size = 256;
    std::uint64_t seed = 0;
    // Denominator floor of the relative error, so near-zero gradients are
    // compared absolutely.
    double magnitude_floor = 1e-6;
    // Hook applied to the analytic gradients before comparison (fault injection).
    std::function<void(Gradients&)> tamper;
};

struct GradcheckEntry {
    std::string parameter;
    double max_rel_error = 0.0;
    // Largest |analytic| over the checked entries; 0 means the check was vacuous.
    double max_abs_gradient = 0.0;
    std::size_t checked = 0;
    bool passed = true;
};

struct GradcheckReport {
    std::vector<GradcheckEntry> entries;
    double max_rel_error = 0.0;
    bool passed = true;

    void write_tsv(std::ostream& out) const;
    // Names of the entries that failed.
    std::vector<std::string> failures() const;
};

double relative_error(double analytic, double numeric, double floor);

// Central differences (f(θ+ε) - f(θ-ε)) / 2ε against backward() for every
// trainable parameter in `params`. Throws DeterminismError when two evaluations
// at the same point disagree.
GradcheckReport finite_difference_check(const LossBuilder& build, ParameterSet& params,
                                        const GradcheckOptions& options = {});

}  // namespace poshan
