#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "poshan/attention.hpp"
#include "poshan/batching.hpp"
#include "poshan/config.hpp"
#include "poshan/embeddings.hpp"
#include "poshan/recurrent.hpp"

namespace poshan {

enum class QueryType { Pattern = 0, Phrase = 1, Headline = 2 };
inline constexpr std::size_t kNumQueryTypes = 3;
const char* query_type_name(QueryType q);

// Weights recorded at one attention level. Component vectors are absent when
// that query type was unavailable or disabled.
struct LevelTrace {
    Mask mask;
    std::array<std::optional<Tensor>, kNumQueryTypes> components;
    Tensor fused;
};

struct AttentionTrace {
    std::string id;
    std::vector<std::vector<std::string>> tokens;  // real words of each real sentence
    std::vector<LevelTrace> words;                 // one per real sentence
    LevelTrace sentences;
};

// POSHAN or one of the sequence baselines, with everything needed to rebuild
// it: configuration, vocabularies and parameter values.
class Model {
public:
    Model() = default;
    // Reassembles a model from stored parts; validates parameter shapes.
    Model(ModelKind kind, TrainConfig config, WordVocabulary words, EmbeddingMode mode, PatternVocabulary patterns,
          ParameterSet params);

    static Model create(ModelKind kind, const TrainConfig& config, WordEmbeddingTable words,
                        PatternEmbeddingTable patterns, Rng& rng);

    ModelKind kind() const { return kind_; }
    const TrainConfig& config() const { return config_; }
    const WordVocabulary& words() const { return words_; }
    EmbeddingMode embedding_mode() const { return mode_; }
    const PatternVocabulary& patterns() const { return patterns_; }
    ParameterSet& params() { return params_; }
    const ParameterSet& params() const { return params_; }
    std::size_t word_dim() const { return word_dim_; }
    std::size_t representation_dim() const;

    // Query types POSHAN would use for this document.
    std::vector<QueryType> available_queries(const Document& doc) const;

    // Active mode uses the document's active cardinal when it has one and
    // falls back to mean pooling otherwise.
    Var logits(Graph& g, const Document& doc, QueryMode mode, AttentionTrace* trace = nullptr);
    // POSHAN's document vector D (with the encoded headline appended under the
    // headline-encoder ablation); the final recurrent state for baselines.
    Var represent(Graph& g, const Document& doc, QueryMode mode, AttentionTrace* trace = nullptr);
    Var loss(Graph& g, const Document& doc, QueryMode mode);
    // softmax(logits) in class order (congruent, incongruent).
    std::array<double, 2> probabilities(const Document& doc, QueryMode mode = QueryMode::MeanPool);

private:
    // Derives layer shapes from the config and table sizes.
    void build_layers();
    // Adds every non-table parameter, in a fixed order.
    void init_layers(ParameterSet& params, Rng& rng) const;
    Var poshan_represent(Graph& g, const Document& doc, QueryMode mode, AttentionTrace* trace);
    Var sequence_represent(Graph& g, const Document& doc);

    ModelKind kind_ = ModelKind::Poshan;
    TrainConfig config_;
    WordVocabulary words_;
    EmbeddingMode mode_ = EmbeddingMode::RandomTrainable;
    PatternVocabulary patterns_;
    ParameterSet params_;

    std::size_t word_dim_ = 0;
    RecurrentEncoder word_encoder_;
    RecurrentEncoder sentence_encoder_;
    RecurrentEncoder sequence_encoder_;
    std::array<std::optional<AdditiveAttention>, kNumQueryTypes> word_attention_;
    std::array<std::optional<AdditiveAttention>, kNumQueryTypes> sentence_attention_;
};

// Softmax of a logit pair, numerically stable.
std::array<double, 2> softmax_pair(const Tensor& logits);

}  // namespace poshan
