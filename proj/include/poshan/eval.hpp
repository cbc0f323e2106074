#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "poshan/metrics.hpp"
#include "poshan/train.hpp"

namespace poshan {

struct Prediction {
    std::string id;
    Label label = Label::Congruent;
    Label predicted = Label::Congruent;
    double p_incongruent = 0.0;
};

struct EvalReport {
    double macro_f1 = 0.0;
    // Absent when the records hold a single class.
    std::optional<double> auc;
    Confusion counts;
    std::vector<Prediction> predictions;
};

// Mean-pooled queries; predicted Incongruent iff P(incongruent) > 0.5.
EvalReport predict(Model& model, const std::vector<DatasetRecord>& records);

std::string report_json(const EvalReport& report);

// Word and sentence attention weights for one record (poshan only).
AttentionTrace trace_record(Model& model, const DatasetRecord& record);
std::string trace_json(const AttentionTrace& trace);

// One line per pattern row: pattern string then its embedding values.
void write_pattern_embeddings(std::ostream& out, const Model& model);
// pattern, majority_label, congruent, incongruent; majority is "tie" on equal counts.
void write_pattern_labels(std::ostream& out, const PatternLabelCounts& counts);

}  // namespace poshan
