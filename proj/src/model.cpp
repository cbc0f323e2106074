#include "poshan/model.hpp"

#include <algorithm>
#include <cmath>

#include "poshan/baselines.hpp"
#include "poshan/errors.hpp"
#include "poshan/log.hpp"

namespace poshan {

const char* query_type_name(QueryType q) {
    switch (q) {
        case QueryType::Pattern: return "pattern";
        case QueryType::Phrase: return "phrase";
        case QueryType::Headline: return "headline";
    }
    return "pattern";
}

std::array<double, 2> softmax_pair(const Tensor& logits) {
    if (logits.size() != 2) throw DimensionError("softmax_pair: expected 2 logits, got " + shape_string(logits.shape()));
    const double m = std::max(logits[0], logits[1]);
    const double e0 = std::exp(logits[0] - m);
    const double e1 = std::exp(logits[1] - m);
    return {e0 / (e0 + e1), e1 / (e0 + e1)};
}

namespace {

constexpr const char* kWordTable = "embedding.word";
constexpr const char* kPatternTable = "embedding.pattern";
constexpr const char* kClassifierW = "classifier.W_cl";
constexpr const char* kClassifierB = "classifier.b_cl";

std::string level_prefix(const char* level, QueryType q) {
    return std::string("attention.") + level + "." + query_type_name(q);
}

LevelTrace trace_level(const Mask& mask, const std::array<Var, kNumQueryTypes>& parts, Var fused) {
    LevelTrace t;
    t.mask = mask;
    for (std::size_t q = 0; q < kNumQueryTypes; ++q) {
        if (parts[q].valid()) t.components[q] = parts[q].value();
    }
    t.fused = fused.value();
    return t;
}

}  // namespace

Model::Model(ModelKind kind, TrainConfig config, WordVocabulary words, EmbeddingMode mode, PatternVocabulary patterns,
             ParameterSet params)
    : kind_(kind),
      config_(std::move(config)),
      words_(std::move(words)),
      mode_(mode),
      patterns_(std::move(patterns)),
      params_(std::move(params)) {
    if (!params_.contains(kWordTable)) throw DataError("model is missing " + std::string(kWordTable));
    const Tensor& table = params_.get(kWordTable).value;
    if (table.rank() != 2 || table.rows() != words_.size()) {
        throw DataError("word table " + shape_string(table.shape()) + " does not match a vocabulary of " +
                        std::to_string(words_.size()) + " rows");
    }
    word_dim_ = table.cols();
    if (params_.contains(kPatternTable)) {
        const Tensor& pt = params_.get(kPatternTable).value;
        if (pt.rank() != 2 || pt.rows() != patterns_.size()) {
            throw DataError("pattern table " + shape_string(pt.shape()) + " does not match a vocabulary of " +
                            std::to_string(patterns_.size()) + " rows");
        }
    }
    build_layers();

    ParameterSet expected;
    Rng scratch(0);
    init_layers(expected, scratch);
    for (const auto* p : expected.all()) {
        if (!params_.contains(p->name)) throw DataError("model is missing parameter " + p->name);
        if (params_.get(p->name).value.shape() != p->value.shape()) {
            throw DataError("parameter " + p->name + " has shape " + shape_string(params_.get(p->name).value.shape()) +
                            ", expected " + shape_string(p->value.shape()));
        }
    }
    const std::size_t tables = 1 + (params_.contains(kPatternTable) ? 1 : 0);
    if (params_.size() != expected.size() + tables) throw DataError("model has unexpected extra parameters");
}

Model Model::create(ModelKind kind, const TrainConfig& config, WordEmbeddingTable words,
                    PatternEmbeddingTable patterns, Rng& rng) {
    config.validate();
    if (words.dim() != config.word_dim) {
        throw ConfigError("word-dim " + std::to_string(config.word_dim) + " does not match the embedding table (" +
                          std::to_string(words.dim()) + ")");
    }
    Model m;
    m.kind_ = kind;
    m.config_ = config;
    m.mode_ = words.mode;
    m.word_dim_ = words.dim();
    m.params_.add(kWordTable, std::move(words.matrix), words.trainable());
    m.words_ = std::move(words.vocab);
    if (kind == ModelKind::Poshan && !config.disable_pattern_att) {
        if (patterns.matrix.rank() != 2 || patterns.matrix.cols() != config.pattern_dim ||
            patterns.matrix.rows() != patterns.vocab.size()) {
            throw ConfigError("pattern table does not match pattern-dim " + std::to_string(config.pattern_dim));
        }
        m.params_.add(kPatternTable, std::move(patterns.matrix), patterns.trainable);
        m.patterns_ = std::move(patterns.vocab);
    } else {
        m.patterns_ = PatternVocabulary(std::vector<std::string>{});
    }
    m.build_layers();
    m.init_layers(m.params_, rng);
    return m;
}

void Model::build_layers() {
    const std::size_t h = config_.hidden_size;
    word_attention_ = {};
    sentence_attention_ = {};
    if (kind_ != ModelKind::Poshan) {
        sequence_encoder_ = RecurrentEncoder("encoder.sequence", config_.cell, word_dim_, h);
        return;
    }
    word_encoder_ = RecurrentEncoder("encoder.word", config_.cell, word_dim_, h);
    sentence_encoder_ = RecurrentEncoder("encoder.sentence", config_.cell, word_encoder_.output_dim(), h);
    const std::size_t word_proj = config_.attention_size ? config_.attention_size : word_encoder_.output_dim();
    const std::size_t sent_proj = config_.attention_size ? config_.attention_size : sentence_encoder_.output_dim();
    auto enable = [&](QueryType q, std::size_t query_dim) {
        const auto i = static_cast<std::size_t>(q);
        word_attention_[i].emplace(level_prefix("word", q), word_encoder_.output_dim(), query_dim, word_proj);
        sentence_attention_[i].emplace(level_prefix("sentence", q), sentence_encoder_.output_dim(), query_dim,
                                       sent_proj);
    };
    if (!config_.disable_pattern_att) enable(QueryType::Pattern, config_.pattern_dim);
    if (!config_.disable_phrase_att) enable(QueryType::Phrase, word_dim_);
    if (!config_.replace_headline_att_with_encoder) enable(QueryType::Headline, word_dim_);
    if (!word_attention_[0] && !word_attention_[1] && !word_attention_[2]) {
        throw ConfigError("every attention type is disabled");
    }
}

void Model::init_layers(ParameterSet& params, Rng& rng) const {
    if (kind_ != ModelKind::Poshan) {
        sequence_encoder_.init(params, rng);
        if (kind_ == ModelKind::PosAt) init_posat(params, config_.posat_init, rng);
    } else {
        word_encoder_.init(params, rng);
        sentence_encoder_.init(params, rng);
        for (const auto& a : word_attention_) {
            if (a) a->init(params, rng);
        }
        for (const auto& a : sentence_attention_) {
            if (a) a->init(params, rng);
        }
    }
    const std::size_t in = representation_dim();
    const double bound = std::sqrt(6.0 / static_cast<double>(in + kNumClasses));
    params.add(kClassifierW, uniform_tensor({kNumClasses, in}, -bound, bound, rng));
    params.add(kClassifierB, Tensor::zeros(kNumClasses));
}

std::size_t Model::representation_dim() const {
    if (kind_ != ModelKind::Poshan) return sequence_encoder_.output_dim();
    std::size_t d = sentence_encoder_.output_dim();
    if (config_.replace_headline_att_with_encoder) d += word_encoder_.output_dim();
    return d;
}

std::vector<QueryType> Model::available_queries(const Document& doc) const {
    std::vector<QueryType> out;
    if (word_attention_[0] && !doc.patterns.empty()) out.push_back(QueryType::Pattern);
    if (word_attention_[1] && !doc.phrases.empty()) out.push_back(QueryType::Phrase);
    if (word_attention_[2]) out.push_back(QueryType::Headline);
    return out;
}

Var Model::represent(Graph& g, const Document& doc, QueryMode mode, AttentionTrace* trace) {
    if (kind_ == ModelKind::Poshan) return poshan_represent(g, doc, mode, trace);
    if (trace) throw ConfigError("attention traces exist only for the poshan model");
    return sequence_represent(g, doc);
}

Var Model::logits(Graph& g, const Document& doc, QueryMode mode, AttentionTrace* trace) {
    Var d = represent(g, doc, mode, trace);
    return g.affine(d, g.parameter(params_.get(kClassifierW)), g.parameter(params_.get(kClassifierB)));
}

Var Model::loss(Graph& g, const Document& doc, QueryMode mode) {
    return g.softmax_cross_entropy(logits(g, doc, mode), static_cast<std::size_t>(doc.label));
}

std::array<double, 2> Model::probabilities(const Document& doc, QueryMode mode) {
    Graph g;
    return softmax_pair(logits(g, doc, mode).value());
}

Var Model::poshan_represent(Graph& g, const Document& doc, QueryMode mode, AttentionTrace* trace) {
    if (doc.sentences.empty() || doc.real_sentences() == 0) throw DataError("record " + doc.id + " has an empty body");
    if (doc.patterns.size() != doc.phrases.size()) {
        throw DataError("record " + doc.id + ": patterns and phrases differ in length");
    }
    const auto available = available_queries(doc);
    if (available.empty()) throw NoCardinalError("record " + doc.id + " has no usable attention query");
    if (doc.patterns.empty() && (word_attention_[0] || word_attention_[1])) {
        warn("record " + doc.id + " has no cardinal feature; fusing the remaining query types only");
    }

    Parameter& E = params_.get(kWordTable);
    const bool active = mode == QueryMode::Active && doc.active_cardinal.has_value();
    const QueryMode effective = active ? QueryMode::Active : QueryMode::MeanPool;
    std::array<Var, kNumQueryTypes> queries;
    for (auto q : available) {
        switch (q) {
            case QueryType::Pattern:
                queries[0] = pattern_query(g, doc.patterns, doc.active_cardinal, patterns_, params_.get(kPatternTable),
                                           effective);
                break;
            case QueryType::Phrase:
                queries[1] = phrase_query(g, doc.phrases, doc.active_cardinal, words_, E, effective);
                break;
            case QueryType::Headline:
                queries[2] = headline_vector(g, doc.headline, words_, E);
                break;
        }
    }

    if (trace) {
        *trace = AttentionTrace{};
        trace->id = doc.id;
    }

    std::vector<Var> sentence_vectors;
    sentence_vectors.reserve(doc.sentences.size());
    Var zero_sentence;
    for (std::size_t j = 0; j < doc.sentences.size(); ++j) {
        if (!doc.sentence_mask[j]) {
            if (!zero_sentence.valid()) zero_sentence = g.zeros(word_encoder_.output_dim());
            sentence_vectors.push_back(zero_sentence);
            continue;
        }
        const auto& words = doc.sentences[j];
        const Mask& mask = doc.word_masks[j];
        std::vector<Var> xs;
        xs.reserve(words.size());
        for (const auto& w : words) xs.push_back(embed_token(g, words_, E, w));
        auto hs = word_encoder_.encode(g, params_, xs, mask);

        std::array<Var, kNumQueryTypes> parts;
        std::vector<Var> weights;
        for (auto q : available) {
            const auto i = static_cast<std::size_t>(q);
            parts[i] = word_attention_[i]->attend(g, params_, hs, mask, queries[i]).weights;
            weights.push_back(parts[i]);
        }
        Var fused = fuse_weights(g, weights, mask);
        sentence_vectors.push_back(g.weighted_sum(fused, hs));
        if (trace) {
            std::vector<std::string> real;
            for (std::size_t t = 0; t < words.size(); ++t) {
                if (mask[t]) real.push_back(words[t]);
            }
            trace->tokens.push_back(std::move(real));
            trace->words.push_back(trace_level(mask, parts, fused));
        }
    }

    auto hs = sentence_encoder_.encode(g, params_, sentence_vectors, doc.sentence_mask);
    std::array<Var, kNumQueryTypes> parts;
    std::vector<Var> weights;
    for (auto q : available) {
        const auto i = static_cast<std::size_t>(q);
        parts[i] = sentence_attention_[i]->attend(g, params_, hs, doc.sentence_mask, queries[i]).weights;
        weights.push_back(parts[i]);
    }
    Var beta = fuse_weights(g, weights, doc.sentence_mask);
    Var D = g.weighted_sum(beta, hs);
    if (trace) trace->sentences = trace_level(doc.sentence_mask, parts, beta);

    if (config_.replace_headline_att_with_encoder) {
        Var encoded;
        std::vector<Var> xs;
        for (const auto& w : doc.headline) xs.push_back(embed_token(g, words_, E, w));
        if (xs.empty()) {
            warn("record " + doc.id + " has an empty headline; using a zero headline encoding");
            encoded = g.zeros(word_encoder_.output_dim());
        } else {
            encoded = word_encoder_.encode_final(g, params_, xs, Mask(xs.size(), true));
        }
        D = g.concat(D, encoded);
    }
    return D;
}

Var Model::sequence_represent(Graph& g, const Document& doc) {
    Parameter& E = params_.get(kWordTable);
    std::vector<Var> xs;
    auto push = [&](const std::string& word, const std::string& tag) {
        Var x = embed_token(g, words_, E, word);
        if (kind_ == ModelKind::PosAt) x = g.scale_by(x, posat_theta(g, params_, pos_category(tag)));
        xs.push_back(x);
    };
    if (doc.headline_tags.size() != doc.headline.size()) {
        throw DimensionError("record " + doc.id + ": headline tags and tokens differ in length");
    }
    for (std::size_t i = 0; i < doc.headline.size(); ++i) push(doc.headline[i], doc.headline_tags[i]);
    for (std::size_t j = 0; j < doc.sentences.size(); ++j) {
        if (!doc.sentence_mask[j]) continue;
        if (doc.tags[j].size() != doc.sentences[j].size()) {
            throw DimensionError("record " + doc.id + ": sentence tags and tokens differ in length");
        }
        for (std::size_t t = 0; t < doc.sentences[j].size(); ++t) {
            if (doc.word_masks[j][t]) push(doc.sentences[j][t], doc.tags[j][t]);
        }
    }
    if (xs.empty()) throw DimensionError("record " + doc.id + ": empty token sequence");
    return sequence_encoder_.encode_final(g, params_, xs, Mask(xs.size(), true));
}

}  // namespace poshan
