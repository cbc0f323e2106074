#include "poshan/eval.hpp"

#include <cstdio>
#include <ostream>

#include <json.hpp>

#include "poshan/errors.hpp"
#include "poshan/log.hpp"

namespace poshan {

using nlohmann::json;

EvalReport predict(Model& model, const std::vector<DatasetRecord>& records) {
    if (records.empty()) throw DataError("cannot evaluate an empty record list");
    EvalReport report;
    std::vector<Label> predicted, labels;
    std::vector<double> scores;
    for (const auto& batch : make_batches(records, model.config(), false, 0)) {
        for (const auto& doc : batch.documents) {
            const auto p = model.probabilities(doc, QueryMode::MeanPool);
            Prediction pr;
            pr.id = doc.id;
            pr.label = doc.label;
            pr.p_incongruent = p[1];
            pr.predicted = p[1] > 0.5 ? Label::Incongruent : Label::Congruent;
            predicted.push_back(pr.predicted);
            labels.push_back(pr.label);
            scores.push_back(pr.p_incongruent);
            report.predictions.push_back(std::move(pr));
        }
    }
    report.counts = confusion(predicted, labels);
    report.macro_f1 = macro_f1(predicted, labels);
    const bool both = report.counts.tp + report.counts.fn > 0 && report.counts.tn + report.counts.fp > 0;
    if (both) {
        report.auc = roc_auc(scores, labels);
    } else {
        warn("only one class present; AUC is undefined and omitted from the report");
    }
    return report;
}

std::string report_json(const EvalReport& report) {
    json j;
    j["macro_f1"] = report.macro_f1;
    j["auc"] = report.auc ? json(*report.auc) : json(nullptr);
    j["positive_class"] = label_name(Label::Incongruent);
    j["counts"] = {{"tp", report.counts.tp}, {"fp", report.counts.fp}, {"tn", report.counts.tn},
                   {"fn", report.counts.fn}};
    json preds = json::array();
    for (const auto& p : report.predictions) {
        preds.push_back({{"id", p.id},
                         {"label", label_name(p.label)},
                         {"predicted", label_name(p.predicted)},
                         {"p_incongruent", p.p_incongruent}});
    }
    j["predictions"] = std::move(preds);
    return j.dump(2);
}

AttentionTrace trace_record(Model& model, const DatasetRecord& record) {
    if (model.kind() != ModelKind::Poshan) throw ConfigError("attention traces need a poshan checkpoint");
    Document doc = make_document(record, model.config());
    AttentionTrace trace;
    Graph g;
    model.represent(g, doc, QueryMode::MeanPool, &trace);
    return trace;
}

namespace {

json component(const LevelTrace& level, std::size_t q, std::size_t position) {
    const auto& c = level.components[q];
    return c ? json((*c)[position]) : json(nullptr);
}

}  // namespace

std::string trace_json(const AttentionTrace& trace) {
    json j;
    j["id"] = trace.id;
    json sentences = json::array();
    for (std::size_t s = 0; s < trace.words.size(); ++s) {
        const auto& level = trace.words[s];
        json words = json::array();
        std::size_t k = 0;
        for (std::size_t t = 0; t < level.mask.size(); ++t) {
            if (!level.mask[t]) continue;
            words.push_back({{"token", trace.tokens[s][k++]},
                             {"alpha_pattern", component(level, 0, t)},
                             {"alpha_phrase", component(level, 1, t)},
                             {"alpha_headline", component(level, 2, t)},
                             {"alpha_fused", level.fused[t]}});
        }
        sentences.push_back(std::move(words));
    }
    j["sentences"] = std::move(sentences);
    json beta = json::array();
    const auto& level = trace.sentences;
    for (std::size_t t = 0; t < level.mask.size(); ++t) {
        if (!level.mask[t]) continue;
        beta.push_back({{"beta_pattern", component(level, 0, t)},
                        {"beta_phrase", component(level, 1, t)},
                        {"beta_headline", component(level, 2, t)},
                        {"beta_fused", level.fused[t]}});
    }
    j["sentence_weights"] = std::move(beta);
    return j.dump(2);
}

void write_pattern_embeddings(std::ostream& out, const Model& model) {
    if (!model.params().contains("embedding.pattern")) {
        throw ConfigError("checkpoint has no pattern embeddings (pattern attention disabled or baseline model)");
    }
    const Tensor& m = model.params().get("embedding.pattern").value;
    const auto& rows = model.patterns().rows();
    char buf[40];
    for (std::size_t r = 0; r < rows.size(); ++r) {
        out << rows[r];
        for (double v : m.row(r)) {
            std::snprintf(buf, sizeof buf, "\t%.17g", v);
            out << buf;
        }
        out << '\n';
    }
}

void write_pattern_labels(std::ostream& out, const PatternLabelCounts& counts) {
    out << "pattern\tmajority_label\tcongruent\tincongruent\n";
    for (const auto& [pattern, c] : counts) {
        const char* majority = c[0] > c[1] ? "congruent" : c[1] > c[0] ? "incongruent" : "tie";
        out << pattern << '\t' << majority << '\t' << c[0] << '\t' << c[1] << '\n';
    }
}

}  // namespace poshan
