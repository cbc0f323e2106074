#include "poshan/train.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <tuple>

#include "poshan/errors.hpp"
#include "poshan/metrics.hpp"

namespace poshan {

Adam::Adam(double learning_rate, double beta1, double beta2, double epsilon)
    : lr_(learning_rate), beta1_(beta1), beta2_(beta2), eps_(epsilon) {
    if (!(learning_rate > 0.0)) throw ConfigError("learning rate must be positive");
}

void Adam::step(ParameterSet& params, const Gradients& grads) {
    ++t_;
    const double c1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
    const double c2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
    for (const auto& [name, g] : grads) {
        Parameter& p = params.get(name);
        if (!p.trainable) continue;
        auto [mit, m_new] = m_.try_emplace(name, Tensor(p.value.shape()));
        auto [vit, v_new] = v_.try_emplace(name, Tensor(p.value.shape()));
        Tensor& m = mit->second;
        Tensor& v = vit->second;
        for (std::size_t i = 0; i < g.size(); ++i) {
            m[i] = beta1_ * m[i] + (1.0 - beta1_) * g[i];
            v[i] = beta2_ * v[i] + (1.0 - beta2_) * g[i] * g[i];
            const double mh = m[i] / c1;
            const double vh = v[i] / c2;
            p.value[i] -= lr_ * mh / (std::sqrt(vh) + eps_);
        }
    }
}

double clip_global_norm(Gradients& grads, double threshold) {
    if (!(threshold > 0.0)) throw ConfigError("clipping threshold must be positive");
    const double norm = global_norm(grads);
    if (norm > threshold) {
        const double s = threshold / norm;
        for (auto& [name, g] : grads) {
            for (auto& v : g.data()) v *= s;
        }
    }
    return norm;
}

PatternLabelCounts count_pattern_labels(const std::vector<DatasetRecord>& records) {
    PatternLabelCounts counts;
    for (const auto& r : records) {
        if (r.active_cardinal && *r.active_cardinal != 0) continue;
        for (const auto& p : r.patterns) {
            auto& c = counts[p.str()];
            c[static_cast<std::size_t>(r.label)]++;
        }
    }
    return counts;
}

void write_log_header(std::ostream& out) { out << "epoch\ttrain_loss\tval_loss\tval_macro_f1\n"; }

void write_log_row(std::ostream& out, const EpochRecord& row) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "%zu\t%.17g\t%.17g\t%.17g\n", row.epoch, row.train_loss, row.val_loss,
                  row.val_macro_f1);
    out << buf << std::flush;
}

std::pair<double, double> validation_metrics(Model& model, const std::vector<DatasetRecord>& records) {
    if (records.empty()) throw DataError("validation split is empty");
    double total = 0.0;
    std::vector<Label> predictions, labels;
    for (const auto& batch : make_batches(records, model.config(), false, 0)) {
        for (const auto& doc : batch.documents) {
            Graph g;
            Var logits = model.logits(g, doc, QueryMode::MeanPool);
            total += g.softmax_cross_entropy(logits, static_cast<std::size_t>(doc.label)).item();
            const auto p = softmax_pair(logits.value());
            predictions.push_back(p[1] > p[0] ? Label::Incongruent : Label::Congruent);
            labels.push_back(doc.label);
        }
    }
    return {total / static_cast<double>(records.size()), macro_f1(predictions, labels)};
}

Checkpoint train(ModelKind kind, const TrainConfig& config, const std::vector<DatasetRecord>& train_set,
                 const std::vector<DatasetRecord>& val_set, const TrainOptions& options) {
    config.validate();
    if (train_set.empty()) throw DataError("training split is empty");
    if (val_set.empty()) throw DataError("validation split is empty");
    Rng rng(config.seed);
    WordEmbeddingTable words = config.embeddings.empty()
                                   ? build_vocab(train_set, config.min_count, config.word_dim, rng)
                                   : load_pretrained_file(config.embeddings, config.word_dim,
                                                          config.embedding_mode == EmbeddingMode::PreloadedTrainable);
    PatternEmbeddingTable patterns = build_pattern_table(train_set, config.pattern_dim, rng);
    Model model = Model::create(kind, config, std::move(words), std::move(patterns), rng);
    return train_model(std::move(model), train_set, val_set, options);
}

Checkpoint train_model(Model model, const std::vector<DatasetRecord>& train_set,
                       const std::vector<DatasetRecord>& val_set, const TrainOptions& options) {
    if (train_set.empty()) throw DataError("training split is empty");
    if (val_set.empty()) throw DataError("validation split is empty");
    const TrainConfig& config = model.config();
    Checkpoint ckpt;
    ckpt.pattern_labels = count_pattern_labels(train_set);
    Adam adam(config.learning_rate);
    Rng shuffle_rng(config.seed ^ 0x5eed5eed5eed5eedULL);

    double best = std::numeric_limits<double>::infinity();
    ParameterSet best_params = model.params();
    std::size_t stale = 0;
    if (options.log) write_log_header(*options.log);

    for (std::size_t epoch = 1; epoch <= config.max_epochs; ++epoch) {
        const auto batches = make_batches(train_set, config, true, shuffle_rng());
        double loss_sum = 0.0;
        std::size_t count = 0;
        for (std::size_t b = 0; b < batches.size(); ++b) {
            const auto& docs = batches[b].documents;
            Gradients grads = model.params().zero_gradients();
            const double weight = 1.0 / static_cast<double>(docs.size());
            for (const auto& doc : docs) {
                Graph g;
                Var loss = model.loss(g, doc, QueryMode::Active);
                if (!std::isfinite(loss.item())) {
                    throw NonFiniteLossError("non-finite loss in epoch " + std::to_string(epoch) + ", batch " +
                                             std::to_string(b) + " (record " + doc.id + ")");
                }
                loss_sum += loss.item();
                ++count;
                g.accumulate_gradients(loss, grads, weight);
            }
            clip_global_norm(grads, config.grad_clip);
            adam.step(model.params(), grads);
        }

        EpochRecord row;
        row.epoch = epoch;
        row.train_loss = loss_sum / static_cast<double>(count);
        std::tie(row.val_loss, row.val_macro_f1) = validation_metrics(model, val_set);
        ckpt.history.push_back(row);
        if (options.log) write_log_row(*options.log, row);

        if (row.val_loss < best - 1e-4) {
            best = row.val_loss;
            best_params = model.params();
            ckpt.epoch = epoch;
            stale = 0;
        } else if (++stale >= config.early_stop_patience) {
            break;
        }
        if (options.on_epoch && !options.on_epoch(row)) break;
    }
    model.params() = std::move(best_params);
    ckpt.model = std::move(model);
    return ckpt;
}

}  // namespace poshan
