#include "poshan/embeddings.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <sstream>

#include "poshan/errors.hpp"
#include "poshan/log.hpp"

namespace poshan {

std::string embedding_mode_name(EmbeddingMode mode) {
    switch (mode) {
        case EmbeddingMode::PreloadedFrozen: return "preloaded-frozen";
        case EmbeddingMode::PreloadedTrainable: return "preloaded-trainable";
        case EmbeddingMode::RandomTrainable: return "random-trainable";
    }
    return "random-trainable";
}

EmbeddingMode parse_embedding_mode(std::string_view text) {
    if (text == "preloaded-frozen") return EmbeddingMode::PreloadedFrozen;
    if (text == "preloaded-trainable") return EmbeddingMode::PreloadedTrainable;
    if (text == "random-trainable") return EmbeddingMode::RandomTrainable;
    throw ConfigError("unknown embedding mode: " + std::string(text));
}

WordVocabulary::WordVocabulary(std::vector<std::string> tokens) : tokens_(std::move(tokens)) {
    for (std::size_t i = 0; i < tokens_.size(); ++i) {
        const auto& t = tokens_[i];
        if (t == kUnkToken || t == kPadToken || t == kBosToken || t == kEosToken) {
            throw DataError("reserved token in vocabulary: " + t);
        }
        if (!index_.emplace(t, i).second) throw DataError("duplicate vocabulary token: " + t);
    }
    tokens_.emplace_back(kUnkToken);
    tokens_.emplace_back(kPadToken);
}

bool WordVocabulary::is_padding(const std::string& token) const {
    return token == kPadToken || token == kBosToken || token == kEosToken;
}

std::size_t WordVocabulary::row(const std::string& token) const {
    if (is_padding(token)) return pad_row();
    auto it = index_.find(token);
    return it == index_.end() ? unk_row() : it->second;
}

std::vector<std::string> WordVocabulary::known_tokens() const {
    return {tokens_.begin(), tokens_.end() - 2};
}

WordEmbeddingTable build_vocab(const std::vector<DatasetRecord>& corpus, std::size_t min_count, std::size_t dim,
                               Rng& rng) {
    if (min_count < 1) throw ConfigError("min-count must be at least 1");
    if (corpus.empty()) throw DataError("cannot build a vocabulary from an empty corpus");
    std::map<std::string, std::size_t> counts;
    for (const auto& r : corpus) {
        for (const auto& t : r.headline) ++counts[t.text];
        for (const auto& s : r.body) {
            for (const auto& t : s) ++counts[t.text];
        }
    }
    std::vector<std::string> kept;
    for (const auto& [token, n] : counts) {
        if (n >= min_count) kept.push_back(token);
    }
    WordEmbeddingTable table;
    table.vocab = WordVocabulary(std::move(kept));
    table.matrix = uniform_tensor({table.vocab.size(), dim}, -0.05, 0.05, rng);
    for (auto& v : table.matrix.row(table.vocab.pad_row())) v = 0.0;
    table.mode = EmbeddingMode::RandomTrainable;
    return table;
}

WordEmbeddingTable load_pretrained(std::istream& in, std::size_t dim, bool trainable, const std::string& source) {
    std::vector<std::string> tokens;
    std::vector<double> values;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.find_first_not_of(" \t") == std::string::npos) continue;
        std::istringstream fields(line);
        std::string token;
        fields >> token;
        std::vector<double> row;
        std::string num;
        while (fields >> num) {
            double v = 0.0;
            auto [ptr, ec] = std::from_chars(num.data(), num.data() + num.size(), v);
            if (ec != std::errc() || ptr != num.data() + num.size()) {
                throw DataError(source + ":" + std::to_string(line_no) + ": malformed number '" + num + "'");
            }
            row.push_back(v);
        }
        if (row.size() != dim) {
            throw DataError(source + ":" + std::to_string(line_no) + ": malformed line, expected " +
                            std::to_string(dim) + " values but found " + std::to_string(row.size()));
        }
        tokens.push_back(token);
        values.insert(values.end(), row.begin(), row.end());
    }
    if (tokens.empty()) throw DataError(source + ": no vectors found");

    WordEmbeddingTable table;
    try {
        table.vocab = WordVocabulary(tokens);
    } catch (const DataError& e) {
        throw DataError(source + ": " + e.what());
    }
    table.matrix = Tensor::zeros(table.vocab.size(), dim);
    for (std::size_t r = 0; r < tokens.size(); ++r) {
        std::copy_n(values.begin() + r * dim, dim, table.matrix.row(r).begin());
    }
    auto unk = table.matrix.row(table.vocab.unk_row());
    for (std::size_t r = 0; r < tokens.size(); ++r) {
        auto src = table.matrix.row(r);
        for (std::size_t c = 0; c < dim; ++c) unk[c] += src[c];
    }
    for (auto& v : unk) v /= static_cast<double>(tokens.size());
    table.mode = trainable ? EmbeddingMode::PreloadedTrainable : EmbeddingMode::PreloadedFrozen;
    return table;
}

WordEmbeddingTable load_pretrained_file(const std::string& path, std::size_t dim, bool trainable) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open embedding file: " + path);
    return load_pretrained(in, dim, trainable, path);
}

PatternVocabulary::PatternVocabulary(std::vector<std::string> patterns) : patterns_(std::move(patterns)) {
    for (std::size_t i = 0; i < patterns_.size(); ++i) {
        if (patterns_[i] == kUnkPattern) throw DataError("reserved pattern name in vocabulary");
        if (!index_.emplace(patterns_[i], i).second) throw DataError("duplicate pattern: " + patterns_[i]);
    }
    patterns_.emplace_back(kUnkPattern);
}

std::size_t PatternVocabulary::row(const std::string& pattern) const {
    auto it = index_.find(pattern);
    return it == index_.end() ? unk_row() : it->second;
}

PatternEmbeddingTable build_pattern_table(const std::vector<DatasetRecord>& corpus, std::size_t dim, Rng& rng) {
    std::vector<std::string> names;
    for (const auto& r : corpus) {
        for (const auto& p : r.patterns) names.push_back(p.str());
    }
    std::sort(names.begin(), names.end());
    names.erase(std::unique(names.begin(), names.end()), names.end());
    PatternEmbeddingTable table;
    table.vocab = PatternVocabulary(std::move(names));
    table.matrix = uniform_tensor({table.vocab.size(), dim}, -0.05, 0.05, rng);
    return table;
}

Var embed_token(Graph& g, const WordVocabulary& vocab, Parameter& matrix, const std::string& token) {
    const std::size_t r = vocab.row(token);
    if (r == vocab.pad_row()) return g.zeros(matrix.value.cols());
    return g.parameter_row(matrix, r);
}

Var headline_vector(Graph& g, const std::vector<std::string>& headline, const WordVocabulary& vocab,
                    Parameter& matrix) {
    std::vector<Var> rows;
    for (const auto& t : headline) {
        if (vocab.row(t) != vocab.pad_row()) rows.push_back(g.parameter_row(matrix, vocab.row(t)));
    }
    if (rows.empty()) {
        warn("empty headline; using the zero headline vector");
        return g.zeros(matrix.value.cols());
    }
    return g.sum_vectors(rows);
}

Var cardinal_phrase_vector(Graph& g, const CardinalPhrase& phrase, const WordVocabulary& vocab, Parameter& matrix) {
    std::vector<Var> parts{embed_token(g, vocab, matrix, phrase.prev), embed_token(g, vocab, matrix, phrase.num),
                           embed_token(g, vocab, matrix, phrase.next)};
    return g.sum_vectors(parts);
}

Var pattern_query(Graph& g, const std::vector<CardinalPattern>& patterns, std::optional<std::size_t> active,
                  const PatternVocabulary& vocab, Parameter& matrix, QueryMode mode) {
    if (patterns.empty()) throw NoCardinalError("pattern query requires at least one cardinal pattern");
    if (mode == QueryMode::Active) {
        if (!active) throw ConfigError("active pattern query requires an active cardinal index");
        if (*active >= patterns.size()) throw DimensionError("active cardinal index out of range");
        return g.parameter_row(matrix, vocab.row(patterns[*active].str()));
    }
    std::vector<Var> rows;
    for (const auto& p : patterns) rows.push_back(g.parameter_row(matrix, vocab.row(p.str())));
    return g.mean_vectors(rows);
}

Var phrase_query(Graph& g, const std::vector<CardinalPhrase>& phrases, std::optional<std::size_t> active,
                 const WordVocabulary& vocab, Parameter& matrix, QueryMode mode) {
    if (phrases.empty()) throw NoCardinalError("phrase query requires at least one cardinal phrase");
    if (mode == QueryMode::Active) {
        if (!active) throw ConfigError("active phrase query requires an active cardinal index");
        if (*active >= phrases.size()) throw DimensionError("active cardinal index out of range");
        return cardinal_phrase_vector(g, phrases[*active], vocab, matrix);
    }
    if (phrases.size() == 1) return cardinal_phrase_vector(g, phrases[0], vocab, matrix);
    std::vector<Var> rows;
    for (const auto& p : phrases) rows.push_back(cardinal_phrase_vector(g, p, vocab, matrix));
    return g.mean_vectors(rows);
}

}  // namespace poshan
