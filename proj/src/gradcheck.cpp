#include "poshan/gradcheck.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>

#include "poshan/errors.hpp"

namespace poshan {

namespace {

double evaluate(const LossBuilder& build) {
    Graph g;
    return build(g).item();
}

std::vector<std::size_t> entries_to_check(std::size_t count, const GradcheckOptions& options, Rng& rng) {
    std::vector<std::size_t> idx(count);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    if (count <= options.exhaustive_limit) return idx;
    std::vector<std::size_t> picked;
    picked.reserve(options.sample_size);
    std::uniform_int_distribution<std::size_t> dist(0, count - 1);
    for (std::size_t i = 0; i < options.sample_size; ++i) picked.push_back(dist(rng));
    return picked;
}

}  // namespace

double relative_error(double analytic, double numeric, double floor) {
    double denom = std::max({std::abs(analytic), std::abs(numeric), floor});
    return std::abs(analytic - numeric) / denom;
}

GradcheckReport finite_difference_check(const LossBuilder& build, ParameterSet& params,
                                        const GradcheckOptions& options) {
    if (!(options.epsilon > 1e-8 && options.epsilon < 1e-2)) {
        throw ConfigError("gradcheck epsilon must lie in (1e-8, 1e-2)");
    }
    GradcheckReport report;
    if (params.size() == 0) return report;

    Gradients analytic;
    double base = 0.0;
    {
        Graph g;
        Var loss = build(g);
        base = loss.item();
        analytic = g.backward(loss);
    }
    if (evaluate(build) != base) {
        throw DeterminismError("forward pass is not deterministic: two evaluations differ");
    }
    if (options.tamper) options.tamper(analytic);

    Rng rng(options.seed);
    for (Parameter* p : params.all()) {
        if (!p->trainable) continue;
        GradcheckEntry entry;
        entry.parameter = p->name;
        const Tensor zero(p->value.shape());
        const Tensor& grad = analytic.count(p->name) ? analytic.at(p->name) : zero;
        for (std::size_t i : entries_to_check(p->value.size(), options, rng)) {
            const double saved = p->value[i];
            p->value[i] = saved + options.epsilon;
            const double up = evaluate(build);
            p->value[i] = saved - options.epsilon;
            const double down = evaluate(build);
            p->value[i] = saved;
            const double numeric = (up - down) / (2.0 * options.epsilon);
            const double err = relative_error(grad[i], numeric, options.magnitude_floor);
            entry.max_rel_error = std::max(entry.max_rel_error, err);
            entry.max_abs_gradient = std::max(entry.max_abs_gradient, std::abs(grad[i]));
            ++entry.checked;
        }
        entry.passed = entry.max_rel_error <= options.tolerance;
        report.max_rel_error = std::max(report.max_rel_error, entry.max_rel_error);
        report.passed = report.passed && entry.passed;
        report.entries.push_back(std::move(entry));
    }
    return report;
}

void GradcheckReport::write_tsv(std::ostream& out) const {
    out << "parameter\tmax_rel_error\tresult\n";
    for (const auto& e : entries) {
        out << e.parameter << '\t' << e.max_rel_error << '\t' << (e.passed ? "pass" : "fail") << '\n';
    }
}

std::vector<std::string> GradcheckReport::failures() const {
    std::vector<std::string> out;
    for (const auto& e : entries) {
        if (!e.passed) out.push_back(e.parameter);
    }
    return out;
}

}  // namespace poshan
