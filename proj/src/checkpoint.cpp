#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "poshan/errors.hpp"
#include "poshan/train.hpp"

namespace poshan {

namespace {

constexpr const char* kMagic = "poshan-checkpoint";
constexpr int kVersion = 1;

std::string hex(double v) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%a", v);
    return buf;
}

class Reader {
public:
    Reader(std::istream& in, std::string source) : in_(in), source_(std::move(source)) {}

    std::string line() {
        std::string s;
        if (!std::getline(in_, s)) fail("unexpected end of file");
        ++line_no_;
        if (!s.empty() && s.back() == '\r') s.pop_back();
        return s;
    }

    // "<keyword> <count>" header line.
    std::size_t section(const std::string& keyword) {
        std::istringstream ss(line());
        std::string word;
        std::size_t n = 0;
        if (!(ss >> word >> n) || word != keyword) fail("expected '" + keyword + " <count>'");
        return n;
    }

    double number(const std::string& text) {
        char* end = nullptr;
        const double v = std::strtod(text.c_str(), &end);
        if (text.empty() || *end != '\0') fail("malformed number '" + text + "'");
        return v;
    }

    [[noreturn]] void fail(const std::string& msg) const {
        throw DataError(source_ + ":" + std::to_string(line_no_) + ": " + msg);
    }

private:
    std::istream& in_;
    std::string source_;
    std::size_t line_no_ = 0;
};

}  // namespace

void save_checkpoint(std::ostream& out, const Checkpoint& ckpt) {
    const Model& m = ckpt.model;
    out << kMagic << ' ' << kVersion << '\n';
    out << "kind " << model_kind_name(m.kind()) << '\n';
    out << "epoch " << ckpt.epoch << '\n';

    std::ostringstream cfg;
    write_config(cfg, m.config());
    std::size_t cfg_lines = 0;
    for (char c : cfg.str()) cfg_lines += c == '\n';
    out << "config " << cfg_lines << '\n' << cfg.str();

    out << "embedding-mode " << embedding_mode_name(m.embedding_mode()) << '\n';
    const auto known = m.words().known_tokens();
    out << "words " << known.size() << '\n';
    for (const auto& t : known) out << t << '\n';
    const auto& pattern_rows = m.patterns().rows();
    out << "patterns " << pattern_rows.size() - 1 << '\n';
    for (std::size_t i = 0; i + 1 < pattern_rows.size(); ++i) out << pattern_rows[i] << '\n';

    out << "pattern-labels " << ckpt.pattern_labels.size() << '\n';
    for (const auto& [p, c] : ckpt.pattern_labels) out << p << ' ' << c[0] << ' ' << c[1] << '\n';

    out << "history " << ckpt.history.size() << '\n';
    for (const auto& h : ckpt.history) {
        out << h.epoch << ' ' << hex(h.train_loss) << ' ' << hex(h.val_loss) << ' ' << hex(h.val_macro_f1) << '\n';
    }

    const auto params = m.params().all();
    out << "parameters " << params.size() << '\n';
    for (const auto* p : params) {
        out << p->name << ' ' << (p->trainable ? 1 : 0) << ' ' << p->value.rank();
        for (auto d : p->value.shape()) out << ' ' << d;
        out << '\n';
        bool first = true;
        for (double v : p->value.values()) {
            if (!first) out << ' ';
            out << hex(v);
            first = false;
        }
        out << '\n';
    }
    out << "end\n";
}

Checkpoint load_checkpoint(std::istream& in, const std::string& source) {
    Reader r(in, source);
    {
        std::istringstream ss(r.line());
        std::string magic;
        int version = 0;
        if (!(ss >> magic >> version) || magic != kMagic) r.fail("not a checkpoint file");
        if (version != kVersion) r.fail("unsupported checkpoint version " + std::to_string(version));
    }
    auto keyed = [&](const std::string& key) {
        const std::string s = r.line();
        if (s.rfind(key + " ", 0) != 0) r.fail("expected '" + key + "'");
        return s.substr(key.size() + 1);
    };
    Checkpoint ckpt;
    ModelKind kind{};
    try {
        kind = parse_model_kind(keyed("kind"));
    } catch (const ConfigError& e) {
        r.fail(e.what());
    }
    ckpt.epoch = static_cast<std::size_t>(r.number(keyed("epoch")));

    const std::size_t cfg_lines = r.section("config");
    std::string cfg_text;
    for (std::size_t i = 0; i < cfg_lines; ++i) cfg_text += r.line() + '\n';
    TrainConfig config;
    EmbeddingMode mode{};
    try {
        std::istringstream cfg(cfg_text);
        config = parse_config(cfg, source + " (config)");
        mode = parse_embedding_mode(keyed("embedding-mode"));
    } catch (const ConfigError& e) {
        r.fail(e.what());
    }

    std::vector<std::string> tokens(r.section("words"));
    for (auto& t : tokens) t = r.line();
    std::vector<std::string> patterns(r.section("patterns"));
    for (auto& p : patterns) p = r.line();

    const std::size_t n_labels = r.section("pattern-labels");
    for (std::size_t i = 0; i < n_labels; ++i) {
        std::istringstream ss(r.line());
        std::string p;
        std::array<std::size_t, 2> c{};
        if (!(ss >> p >> c[0] >> c[1])) r.fail("malformed pattern-label line");
        ckpt.pattern_labels[p] = c;
    }

    const std::size_t n_history = r.section("history");
    for (std::size_t i = 0; i < n_history; ++i) {
        std::istringstream ss(r.line());
        EpochRecord h;
        std::string a, b, c;
        if (!(ss >> h.epoch >> a >> b >> c)) r.fail("malformed history line");
        h.train_loss = r.number(a);
        h.val_loss = r.number(b);
        h.val_macro_f1 = r.number(c);
        ckpt.history.push_back(h);
    }

    ParameterSet params;
    const std::size_t n_params = r.section("parameters");
    for (std::size_t i = 0; i < n_params; ++i) {
        std::istringstream head(r.line());
        std::string name;
        int trainable = 0;
        std::size_t rank = 0;
        if (!(head >> name >> trainable >> rank) || rank < 1 || rank > 2) r.fail("malformed parameter header");
        std::vector<std::size_t> shape(rank);
        for (auto& d : shape) {
            if (!(head >> d) || d == 0) r.fail("malformed parameter shape for " + name);
        }
        std::istringstream body(r.line());
        std::vector<double> values;
        std::string v;
        while (body >> v) values.push_back(r.number(v));
        std::size_t expected = 1;
        for (auto d : shape) expected *= d;
        if (values.size() != expected) {
            r.fail("parameter " + name + " has " + std::to_string(values.size()) + " values, expected " +
                   std::to_string(expected));
        }
        try {
            params.add(name, Tensor(shape, std::move(values)), trainable != 0);
        } catch (const ConfigError& e) {
            r.fail(e.what());
        }
    }
    if (r.line() != "end") r.fail("expected 'end'");

    ckpt.model = Model(kind, std::move(config), WordVocabulary(std::move(tokens)), mode,
                       PatternVocabulary(std::move(patterns)), std::move(params));
    return ckpt;
}

void save_checkpoint_file(const std::string& path, const Checkpoint& ckpt) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write checkpoint: " + path);
    save_checkpoint(out, ckpt);
    if (!out) throw DataError("failed writing checkpoint: " + path);
}

Checkpoint load_checkpoint_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open checkpoint: " + path);
    return load_checkpoint(in, path);
}

}  // namespace poshan
