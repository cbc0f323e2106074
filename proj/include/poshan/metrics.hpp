#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "poshan/text.hpp"

namespace poshan {

struct Confusion {
    // Positive class is Incongruent.
    std::size_t tp = 0;
    std::size_t fp = 0;
    std::size_t tn = 0;
    std::size_t fn = 0;
};

Confusion confusion(const std::vector<Label>& predictions, const std::vector<Label>& labels);

// Unweighted mean of per-class F1. A class absent from both inputs scores 0
// and triggers a warning.
double macro_f1(const std::vector<Label>& predictions, const std::vector<Label>& labels);

// P(score_pos > score_neg) + P(tie) / 2 over all positive/negative pairs,
// with Incongruent as positive. Throws MetricError unless both classes occur.
double roc_auc(const std::vector<double>& scores, const std::vector<Label>& labels);

}  // namespace poshan
