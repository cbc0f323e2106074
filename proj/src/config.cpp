#include "poshan/config.hpp"

#include <charconv>
#include <fstream>
#include <ostream>

#include "poshan/errors.hpp"

namespace poshan {

std::string model_kind_name(ModelKind kind) {
    switch (kind) {
        case ModelKind::Poshan: return "poshan";
        case ModelKind::Lstm: return "lstm";
        case ModelKind::PosAt: return "posat";
    }
    return "poshan";
}

ModelKind parse_model_kind(std::string_view text) {
    if (text == "poshan") return ModelKind::Poshan;
    if (text == "lstm") return ModelKind::Lstm;
    if (text == "posat") return ModelKind::PosAt;
    throw ConfigError("unknown model: " + std::string(text) + " (expected poshan, lstm or posat)");
}

std::string posat_init_name(PosAtInit init) { return init == PosAtInit::NearZero ? "near-zero" : "random"; }

PosAtInit parse_posat_init(std::string_view text) {
    if (text == "near-zero") return PosAtInit::NearZero;
    if (text == "random") return PosAtInit::Random;
    throw ConfigError("unknown posat-init: " + std::string(text));
}

std::string format_double(double value) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
    return std::string(buf, ptr);
}

namespace {

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

double parse_double(std::string_view key, std::string_view text) {
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc() || ptr != text.data() + text.size()) {
        throw ConfigError(std::string(key) + ": expected a number, got '" + std::string(text) + "'");
    }
    return v;
}

std::uint64_t parse_uint(std::string_view key, std::string_view text) {
    std::uint64_t v = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc() || ptr != text.data() + text.size()) {
        throw ConfigError(std::string(key) + ": expected a non-negative integer, got '" + std::string(text) + "'");
    }
    return v;
}

bool parse_bool(std::string_view key, std::string_view text) {
    if (text == "true" || text == "1") return true;
    if (text == "false" || text == "0") return false;
    throw ConfigError(std::string(key) + ": expected true or false, got '" + std::string(text) + "'");
}

}  // namespace

void TrainConfig::set(std::string_view key, std::string_view value) {
    if (key == "learning-rate") learning_rate = parse_double(key, value);
    else if (key == "batch-size") batch_size = parse_uint(key, value);
    else if (key == "grad-clip") grad_clip = parse_double(key, value);
    else if (key == "max-epochs") max_epochs = parse_uint(key, value);
    else if (key == "early-stop-patience") early_stop_patience = parse_uint(key, value);
    else if (key == "max-words-per-sentence") max_words_per_sentence = parse_uint(key, value);
    else if (key == "max-sentences") max_sentences = parse_uint(key, value);
    else if (key == "seed") seed = parse_uint(key, value);
    else if (key == "disable-pattern-att") disable_pattern_att = parse_bool(key, value);
    else if (key == "disable-phrase-att") disable_phrase_att = parse_bool(key, value);
    else if (key == "replace-headline-att-with-encoder") replace_headline_att_with_encoder = parse_bool(key, value);
    else if (key == "cell") cell = parse_cell_type(value);
    else if (key == "word-dim") word_dim = parse_uint(key, value);
    else if (key == "hidden-size") hidden_size = parse_uint(key, value);
    else if (key == "attention-size") attention_size = parse_uint(key, value);
    else if (key == "pattern-dim") pattern_dim = parse_uint(key, value);
    else if (key == "min-count") min_count = parse_uint(key, value);
    else if (key == "embeddings") embeddings = std::string(value);
    else if (key == "embedding-mode") embedding_mode = parse_embedding_mode(value);
    else if (key == "posat-init") posat_init = parse_posat_init(value);
    else throw ConfigError("unknown config key: " + std::string(key));
}

void TrainConfig::validate() const {
    auto positive = [](const char* name, double v) {
        if (!(v > 0.0)) throw ConfigError(std::string(name) + " must be positive");
    };
    positive("learning-rate", learning_rate);
    positive("batch-size", static_cast<double>(batch_size));
    positive("grad-clip", grad_clip);
    positive("max-epochs", static_cast<double>(max_epochs));
    positive("early-stop-patience", static_cast<double>(early_stop_patience));
    positive("max-words-per-sentence", static_cast<double>(max_words_per_sentence));
    positive("max-sentences", static_cast<double>(max_sentences));
    positive("word-dim", static_cast<double>(word_dim));
    positive("hidden-size", static_cast<double>(hidden_size));
    positive("pattern-dim", static_cast<double>(pattern_dim));
    positive("min-count", static_cast<double>(min_count));
    if (embedding_mode != EmbeddingMode::RandomTrainable && embeddings.empty()) {
        throw ConfigError("embedding-mode " + embedding_mode_name(embedding_mode) + " requires an embeddings file");
    }
    if (embedding_mode == EmbeddingMode::RandomTrainable && !embeddings.empty()) {
        throw ConfigError("an embeddings file requires embedding-mode preloaded-frozen or preloaded-trainable");
    }
}

TrainConfig parse_config(std::istream& in, const std::string& source) {
    TrainConfig config;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        const std::string body = trim(line);
        if (body.empty()) continue;
        const auto eq = body.find('=');
        if (eq == std::string::npos) {
            throw ConfigError(source + ":" + std::to_string(line_no) + ": expected key=value");
        }
        try {
            config.set(trim(std::string_view(body).substr(0, eq)), trim(std::string_view(body).substr(eq + 1)));
        } catch (const ConfigError& e) {
            throw ConfigError(source + ":" + std::to_string(line_no) + ": " + e.what());
        }
    }
    config.validate();
    return config;
}

TrainConfig load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open config file: " + path);
    return parse_config(in, path);
}

void write_config(std::ostream& out, const TrainConfig& c) {
    auto b = [](bool v) { return v ? "true" : "false"; };
    out << "learning-rate=" << format_double(c.learning_rate) << '\n'
        << "batch-size=" << c.batch_size << '\n'
        << "grad-clip=" << format_double(c.grad_clip) << '\n'
        << "max-epochs=" << c.max_epochs << '\n'
        << "early-stop-patience=" << c.early_stop_patience << '\n'
        << "max-words-per-sentence=" << c.max_words_per_sentence << '\n'
        << "max-sentences=" << c.max_sentences << '\n'
        << "seed=" << c.seed << '\n'
        << "disable-pattern-att=" << b(c.disable_pattern_att) << '\n'
        << "disable-phrase-att=" << b(c.disable_phrase_att) << '\n'
        << "replace-headline-att-with-encoder=" << b(c.replace_headline_att_with_encoder) << '\n'
        << "cell=" << cell_type_name(c.cell) << '\n'
        << "word-dim=" << c.word_dim << '\n'
        << "hidden-size=" << c.hidden_size << '\n'
        << "attention-size=" << c.attention_size << '\n'
        << "pattern-dim=" << c.pattern_dim << '\n'
        << "min-count=" << c.min_count << '\n'
        << "embeddings=" << c.embeddings << '\n'
        << "embedding-mode=" << embedding_mode_name(c.embedding_mode) << '\n'
        << "posat-init=" << posat_init_name(c.posat_init) << '\n';
}

}  // namespace poshan
