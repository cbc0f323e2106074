#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <sstream>

#include "poshan/errors.hpp"
#include "poshan/eval.hpp"
#include "poshan/gradcheck_suite.hpp"
#include "poshan/train.hpp"

namespace py = pybind11;
using namespace poshan;

namespace {

std::vector<Label> to_labels(const std::vector<std::string>& names) {
    std::vector<Label> out;
    for (const auto& n : names) out.push_back(parse_label(n));
    return out;
}

}  // namespace

PYBIND11_MODULE(_poshan, m) {
    m.doc() = "Cardinal-pattern hierarchical attention for headline incongruence";

    auto base = py::register_exception<Error>(m, "PoshanError");
    py::register_exception<DataError>(m, "DataError", base.ptr());
    py::register_exception<ConfigError>(m, "ConfigError", base.ptr());
    py::register_exception<MetricError>(m, "MetricError", base.ptr());

    m.def("tokenize", [](const std::string& text) { return tokenize(text); });
    m.def("split_sentences", [](const std::string& body) { return split_sentences(body); });

    m.def(
        "fallback_tags",
        [](const std::string& text) {
            std::vector<std::pair<std::string, std::string>> out;
            for (const auto& t : FallbackTagger().tag(tokenize(text))) out.emplace_back(t.text, t.pos);
            return out;
        },
        "Tokenize and tag with the bundled rule tagger; returns (token, tag) pairs.");

    m.def(
        "cardinal_patterns",
        [](const std::string& headline) {
            auto f = extract_cardinal_features(FallbackTagger().tag(tokenize(headline)));
            std::vector<std::string> out;
            for (const auto& p : f.patterns) out.push_back(p.str());
            return out;
        },
        py::arg("headline"));

    m.def(
        "derive",
        [](const std::string& input, const std::string& output, std::optional<std::string> tags) {
            auto raw = read_corpus_file(input);
            auto derived = tags ? derive_dataset(raw, SidecarTagger::load(*tags)) : derive_dataset(raw, FallbackTagger());
            write_dataset_file(output, derived.records);
            py::dict summary;
            for (auto [name, c] : {std::pair{"congruent", derived.summary.congruent},
                                   std::pair{"incongruent", derived.summary.incongruent}}) {
                summary[name] = py::make_tuple(c.kept, c.dropped);
            }
            return summary;
        },
        py::arg("input"), py::arg("output"), py::arg("tags") = py::none(),
        "Derive the cardinal-headline dataset; returns {label: (kept, dropped)}.");

    m.def(
        "macro_f1",
        [](const std::vector<std::string>& predictions, const std::vector<std::string>& labels) {
            return macro_f1(to_labels(predictions), to_labels(labels));
        },
        py::arg("predictions"), py::arg("labels"));
    m.def(
        "roc_auc",
        [](const std::vector<double>& scores, const std::vector<std::string>& labels) {
            return roc_auc(scores, to_labels(labels));
        },
        py::arg("scores"), py::arg("labels"));

    m.def(
        "default_config",
        [] {
            std::ostringstream out;
            write_config(out, TrainConfig{});
            return out.str();
        },
        "Default training configuration as key=value text.");

    m.def(
        "train",
        [](const std::string& model, const std::string& train_path, const std::string& val_path,
           const std::string& out_path, const std::string& config_text) {
            std::istringstream in(config_text);
            TrainConfig config = parse_config(in, "<config>");
            const ModelKind kind = parse_model_kind(model);
            auto train_set = read_dataset_file(train_path);
            if (kind == ModelKind::Poshan) train_set = replicate_all(train_set);
            std::ostringstream log;
            TrainOptions options;
            options.log = &log;
            Checkpoint ckpt;
            {
                py::gil_scoped_release release;
                ckpt = train(kind, config, train_set, read_dataset_file(val_path), options);
            }
            save_checkpoint_file(out_path, ckpt);
            return log.str();
        },
        py::arg("model"), py::arg("train"), py::arg("val"), py::arg("out"), py::arg("config") = "",
        "Train and save a checkpoint; returns the epoch log TSV.");

    m.def(
        "evaluate",
        [](const std::string& ckpt_path, const std::string& test_path) {
            auto ckpt = load_checkpoint_file(ckpt_path);
            return report_json(predict(ckpt.model, read_dataset_file(test_path)));
        },
        py::arg("ckpt"), py::arg("test"), "Evaluation report as a JSON string.");

    m.def(
        "gradcheck",
        [](const std::string& model, std::uint64_t seed) {
            auto report = run_gradcheck(parse_model_kind(model), seed);
            std::vector<std::tuple<std::string, double, bool>> out;
            for (const auto& e : report.entries) out.emplace_back(e.parameter, e.max_rel_error, e.passed);
            return out;
        },
        py::arg("model") = "poshan", py::arg("seed") = 7);
}
