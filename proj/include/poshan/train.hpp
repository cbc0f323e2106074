#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "poshan/model.hpp"

namespace poshan {

struct EpochRecord {
    std::size_t epoch = 0;
    double train_loss = 0.0;
    double val_loss = 0.0;
    double val_macro_f1 = 0.0;
    bool operator==(const EpochRecord&) const = default;
};

// Pattern string -> occurrence counts by label (congruent, incongruent).
using PatternLabelCounts = std::map<std::string, std::array<std::size_t, 2>>;

struct Checkpoint {
    Model model;
    std::size_t epoch = 0;  // epoch whose parameters are stored
    std::vector<EpochRecord> history;
    PatternLabelCounts pattern_labels;
};

// Adam with bias correction; state is keyed by parameter name.
class Adam {
public:
    explicit Adam(double learning_rate, double beta1 = 0.9, double beta2 = 0.999, double epsilon = 1e-8);
    void step(ParameterSet& params, const Gradients& grads);
    std::size_t steps() const { return t_; }

private:
    double lr_, beta1_, beta2_, eps_;
    std::size_t t_ = 0;
    std::map<std::string, Tensor> m_, v_;
};

// Scales every gradient by threshold / norm when the global L2 norm exceeds
// the threshold. Returns the norm before clipping.
double clip_global_norm(Gradients& grads, double threshold);

// Counts each pattern once per source record: replicated copies other than
// the first are skipped.
PatternLabelCounts count_pattern_labels(const std::vector<DatasetRecord>& records);

struct TrainOptions {
    std::ostream* log = nullptr;  // per-epoch TSV
    // Called after every epoch; returning false ends training early.
    std::function<bool(const EpochRecord&)> on_epoch;
};

void write_log_header(std::ostream& out);
void write_log_row(std::ostream& out, const EpochRecord& row);

// Mean cross-entropy and macro-F1 of `model` over `records` (mean pooling).
std::pair<double, double> validation_metrics(Model& model, const std::vector<DatasetRecord>& records);

// Builds the vocabulary and tables from the training split, initializes the
// model from config.seed and trains it.
Checkpoint train(ModelKind kind, const TrainConfig& config, const std::vector<DatasetRecord>& train_set,
                 const std::vector<DatasetRecord>& val_set, const TrainOptions& options = {});

// Trains an already-initialized model; the returned checkpoint holds the
// parameters of the best validation epoch.
Checkpoint train_model(Model model, const std::vector<DatasetRecord>& train_set,
                       const std::vector<DatasetRecord>& val_set, const TrainOptions& options = {});

// Versioned text archive; doubles are written in hexadecimal so a round trip
// is bit-exact.
void save_checkpoint(std::ostream& out, const Checkpoint& ckpt);
Checkpoint load_checkpoint(std::istream& in, const std::string& source = "<stream>");
void save_checkpoint_file(const std::string& path, const Checkpoint& ckpt);
Checkpoint load_checkpoint_file(const std::string& path);

}  // namespace poshan
