#include "poshan/cli.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "poshan/errors.hpp"
#include "poshan/eval.hpp"
#include "poshan/gradcheck_suite.hpp"
#include "poshan/log.hpp"
#include "poshan/train.hpp"

namespace poshan {

namespace {

// Thrown when the command ran but a check it performs did not hold.
struct CheckFailure {
    std::string message;
};

std::ofstream open_output(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot open " + path + " for writing");
    return out;
}

void finish(std::ofstream& out, const std::string& path) {
    out.flush();
    if (!out) throw DataError("failed writing " + path);
}

// patterns.tsv -> patterns.labels.tsv
std::string labels_path(const std::string& patterns_path) {
    std::filesystem::path p(patterns_path);
    const std::string ext = p.has_extension() ? p.extension().string() : ".tsv";
    p.replace_extension();
    return p.string() + ".labels" + ext;
}

struct Options {
    std::string input, tags, output, out_dir, config, model = "poshan", train, val, out, log, ckpt, test,
        report, data, record_id;
    bool fallback_tagger = false;
    std::uint64_t seed = 0;
};

void cmd_derive(const Options& o, std::ostream& out) {
    auto raw = read_corpus_file(o.input);
    std::unique_ptr<TagProvider> tagger;
    if (o.fallback_tagger) {
        tagger = std::make_unique<FallbackTagger>();
    } else {
        tagger = std::make_unique<SidecarTagger>(SidecarTagger::load(o.tags));
    }
    auto derived = derive_dataset(raw, *tagger);
    write_dataset_file(o.output, derived.records);
    derived.summary.write_tsv(out);
}

void cmd_split(const Options& o, std::ostream& out) {
    auto split = split_dataset(read_dataset_file(o.input), o.seed);
    std::filesystem::create_directories(o.out_dir);
    const std::filesystem::path dir(o.out_dir);
    write_dataset_file((dir / "train.jsonl").string(), split.train);
    write_dataset_file((dir / "val.jsonl").string(), split.validation);
    write_dataset_file((dir / "test.jsonl").string(), split.test);
    out << "split\trecords\n"
        << "train\t" << split.train.size() << '\n'
        << "val\t" << split.validation.size() << '\n'
        << "test\t" << split.test.size() << '\n';
}

void cmd_train(const Options& o, std::ostream& out) {
    const ModelKind kind = parse_model_kind(o.model);
    TrainConfig config = o.config.empty() ? TrainConfig{} : load_config_file(o.config);
    config.validate();
    auto train_set = read_dataset_file(o.train);
    auto val_set = read_dataset_file(o.val);
    // Multi-cardinal headlines become one training copy per cardinal.
    if (kind == ModelKind::Poshan) train_set = replicate_all(train_set);

    const std::string log_path = o.log.empty() ? o.out + ".log.tsv" : o.log;
    auto log = open_output(log_path);
    TrainOptions options;
    options.log = &log;
    auto ckpt = train(kind, config, train_set, val_set, options);
    finish(log, log_path);
    save_checkpoint_file(o.out, ckpt);
    const auto& best = ckpt.history.at(ckpt.epoch - 1);
    out << "best_epoch\t" << ckpt.epoch << "\nval_loss\t" << best.val_loss << "\nval_macro_f1\t"
        << best.val_macro_f1 << '\n';
}

void cmd_eval(const Options& o, std::ostream& out) {
    auto ckpt = load_checkpoint_file(o.ckpt);
    auto report = predict(ckpt.model, read_dataset_file(o.test));
    auto file = open_output(o.report);
    file << report_json(report) << '\n';
    finish(file, o.report);
    out << "macro_f1\t" << report.macro_f1 << "\nauc\t";
    if (report.auc) {
        out << *report.auc << '\n';
    } else {
        out << "NA\n";
    }
}

void cmd_dump_attention(const Options& o, std::ostream&) {
    auto ckpt = load_checkpoint_file(o.ckpt);
    for (const auto& record : read_dataset_file(o.data)) {
        if (record.id != o.record_id) continue;
        auto file = open_output(o.out);
        file << trace_json(trace_record(ckpt.model, record)) << '\n';
        finish(file, o.out);
        return;
    }
    throw DataError("record " + o.record_id + " not found in " + o.data);
}

void cmd_dump_patterns(const Options& o, std::ostream&) {
    auto ckpt = load_checkpoint_file(o.ckpt);
    if (ckpt.model.kind() != ModelKind::Poshan || ckpt.model.patterns().size() == 0) {
        throw ConfigError("checkpoint has no pattern embeddings");
    }
    auto file = open_output(o.out);
    write_pattern_embeddings(file, ckpt.model);
    finish(file, o.out);
    const std::string companion = labels_path(o.out);
    auto labels = open_output(companion);
    write_pattern_labels(labels, ckpt.pattern_labels);
    finish(labels, companion);
}

void cmd_gradcheck(const Options& o, std::ostream& out) {
    auto report = run_gradcheck(parse_model_kind(o.model), o.seed);
    report.write_tsv(out);
    if (!report.passed) {
        std::string names;
        for (const auto& f : report.failures()) names += " " + f;
        throw CheckFailure{"gradient check failed:" + names};
    }
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Cardinal-pattern hierarchical attention for headline incongruence", "poshan"};
    app.require_subcommand(1);
    Options o;

    auto* derive = app.add_subcommand("derive", "Tag a corpus and keep headlines with a cardinal");
    derive->add_option("--input", o.input, "corpus JSON Lines")->required()->check(CLI::ExistingFile);
    auto* tags = derive->add_option("--tags", o.tags, "tag sidecar JSON Lines")->check(CLI::ExistingFile);
    auto* fallback = derive->add_flag("--fallback-tagger", o.fallback_tagger, "use the bundled rule tagger");
    tags->excludes(fallback);
    derive->add_option("--output", o.output, "derived JSON Lines")->required();

    auto* split = app.add_subcommand("split", "Stratified 70/10/20 split");
    split->add_option("--input", o.input)->required()->check(CLI::ExistingFile);
    split->add_option("--seed", o.seed)->required();
    split->add_option("--out-dir", o.out_dir)->required();

    auto* train_cmd = app.add_subcommand("train", "Train a model");
    train_cmd->add_option("--config", o.config, "key=value config file")->check(CLI::ExistingFile);
    train_cmd->add_option("--model", o.model)->check(CLI::IsMember({"poshan", "lstm", "posat"}));
    train_cmd->add_option("--train", o.train)->required()->check(CLI::ExistingFile);
    train_cmd->add_option("--val", o.val)->required()->check(CLI::ExistingFile);
    train_cmd->add_option("--out", o.out, "checkpoint path")->required();
    train_cmd->add_option("--log", o.log, "epoch log TSV (default <out>.log.tsv)");

    auto* eval = app.add_subcommand("eval", "Evaluate a checkpoint");
    eval->add_option("--ckpt", o.ckpt)->required()->check(CLI::ExistingFile);
    eval->add_option("--test", o.test)->required()->check(CLI::ExistingFile);
    eval->add_option("--report", o.report)->required();

    auto* dump_att = app.add_subcommand("dump-attention", "Export attention weights of one record");
    dump_att->add_option("--ckpt", o.ckpt)->required()->check(CLI::ExistingFile);
    dump_att->add_option("--data", o.data, "derived JSON Lines holding the record")
        ->required()
        ->check(CLI::ExistingFile);
    dump_att->add_option("--record-id", o.record_id)->required();
    dump_att->add_option("--out", o.out)->required();

    auto* dump_pat = app.add_subcommand("dump-patterns", "Export pattern embeddings and majority labels");
    dump_pat->add_option("--ckpt", o.ckpt)->required()->check(CLI::ExistingFile);
    dump_pat->add_option("--out", o.out)->required();

    auto* grad = app.add_subcommand("gradcheck", "Finite-difference gradient suite");
    grad->add_option("--model", o.model)->check(CLI::IsMember({"poshan", "lstm", "posat"}));
    grad->add_option("--seed", o.seed);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    }
    if (derive->parsed() && !o.fallback_tagger && o.tags.empty()) {
        err << "error: derive needs --tags or --fallback-tagger\n";
        return kExitUsage;
    }

    auto previous = set_warning_sink([&](const std::string& m) { err << "warning: " << m << '\n'; });
    int code = kExitOk;
    try {
        if (derive->parsed()) cmd_derive(o, out);
        if (split->parsed()) cmd_split(o, out);
        if (train_cmd->parsed()) cmd_train(o, out);
        if (eval->parsed()) cmd_eval(o, out);
        if (dump_att->parsed()) cmd_dump_attention(o, out);
        if (dump_pat->parsed()) cmd_dump_patterns(o, out);
        if (grad->parsed()) cmd_gradcheck(o, out);
    } catch (const CheckFailure& e) {
        err << "error: " << e.message << '\n';
        code = kExitCheck;
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << '\n';
        code = kExitUsage;
    } catch (const NonFiniteLossError& e) {
        err << "error: " << e.what() << '\n';
        code = kExitCheck;
    } catch (const DeterminismError& e) {
        err << "error: " << e.what() << '\n';
        code = kExitCheck;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        code = kExitData;
    }
    set_warning_sink(previous);
    return code;
}

}  // namespace poshan
