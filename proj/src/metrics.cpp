#include "poshan/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "poshan/errors.hpp"
#include "poshan/log.hpp"

namespace poshan {

namespace {

void check_lengths(std::size_t a, std::size_t b, const char* what) {
    if (a != b) {
        throw MetricError(std::string(what) + ": " + std::to_string(a) + " predictions vs " + std::to_string(b) +
                          " labels");
    }
    if (a == 0) throw MetricError(std::string(what) + ": empty input");
}

}  // namespace

Confusion confusion(const std::vector<Label>& predictions, const std::vector<Label>& labels) {
    check_lengths(predictions.size(), labels.size(), "confusion");
    Confusion c;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        const bool pred_pos = predictions[i] == Label::Incongruent;
        const bool true_pos = labels[i] == Label::Incongruent;
        if (pred_pos && true_pos) ++c.tp;
        else if (pred_pos) ++c.fp;
        else if (true_pos) ++c.fn;
        else ++c.tn;
    }
    return c;
}

double macro_f1(const std::vector<Label>& predictions, const std::vector<Label>& labels) {
    check_lengths(predictions.size(), labels.size(), "macro_f1");
    const Confusion c = confusion(predictions, labels);
    auto f1 = [](std::size_t tp, std::size_t fp, std::size_t fn, const char* name) {
        const std::size_t denom = 2 * tp + fp + fn;
        if (denom == 0) {
            warn(std::string("class ") + name + " is absent from predictions and labels; its F1 counts as 0");
            return 0.0;
        }
        return 2.0 * static_cast<double>(tp) / static_cast<double>(denom);
    };
    const double f_incongruent = f1(c.tp, c.fp, c.fn, "incongruent");
    const double f_congruent = f1(c.tn, c.fn, c.fp, "congruent");
    return (f_incongruent + f_congruent) / 2.0;
}

double roc_auc(const std::vector<double>& scores, const std::vector<Label>& labels) {
    check_lengths(scores.size(), labels.size(), "roc_auc");
    std::vector<double> negatives;
    std::vector<double> positives;
    for (std::size_t i = 0; i < scores.size(); ++i) {
        if (std::isnan(scores[i])) throw MetricError("roc_auc: NaN score at index " + std::to_string(i));
        (labels[i] == Label::Incongruent ? positives : negatives).push_back(scores[i]);
    }
    if (positives.empty() || negatives.empty()) {
        throw MetricError("roc_auc is undefined unless both classes are present");
    }
    std::sort(negatives.begin(), negatives.end());
    // Twice the pair statistic, kept in integers so the result is exact up to
    // the final division.
    unsigned long long doubled = 0;
    for (double s : positives) {
        const auto lo = std::lower_bound(negatives.begin(), negatives.end(), s);
        const auto hi = std::upper_bound(lo, negatives.end(), s);
        const auto below = static_cast<unsigned long long>(lo - negatives.begin());
        const auto ties = static_cast<unsigned long long>(hi - lo);
        doubled += 2 * below + ties;
    }
    const double pairs = static_cast<double>(positives.size()) * static_cast<double>(negatives.size());
    return static_cast<double>(doubled) / (2.0 * pairs);
}

}  // namespace poshan
