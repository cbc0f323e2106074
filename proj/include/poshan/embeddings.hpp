#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <unordered_map>
#include <vector>

#include "poshan/graph.hpp"
#include "poshan/text.hpp"

namespace poshan {

inline constexpr const char* kUnkToken = "<unk>";
inline constexpr const char* kPadToken = "<pad>";
inline constexpr const char* kUnkPattern = "<unk-pattern>";
inline constexpr std::size_t kPatternDim = 100;

enum class EmbeddingMode { PreloadedFrozen, PreloadedTrainable, RandomTrainable };

std::string embedding_mode_name(EmbeddingMode mode);
EmbeddingMode parse_embedding_mode(std::string_view text);

// Token -> row map. Known tokens come first, then <unk>, then <pad>.
// <pad> and the boundary sentinels all resolve to the pad row.
class WordVocabulary {
public:
    WordVocabulary() = default;
    // `tokens` must not contain the reserved names; they are appended.
    explicit WordVocabulary(std::vector<std::string> tokens);

    std::size_t row(const std::string& token) const;
    bool is_padding(const std::string& token) const;
    bool contains(const std::string& token) const { return index_.count(token) != 0; }
    std::size_t unk_row() const { return tokens_.size() - 2; }
    std::size_t pad_row() const { return tokens_.size() - 1; }
    std::size_t size() const { return tokens_.size(); }
    // Known tokens only, in row order.
    std::vector<std::string> known_tokens() const;
    // All row names including the reserved ones.
    const std::vector<std::string>& rows() const { return tokens_; }

private:
    std::vector<std::string> tokens_;
    std::unordered_map<std::string, std::size_t> index_;
};

struct WordEmbeddingTable {
    WordVocabulary vocab;
    Tensor matrix;  // V x d; pad row all zeros
    EmbeddingMode mode = EmbeddingMode::RandomTrainable;

    std::size_t dim() const { return matrix.cols(); }
    bool trainable() const { return mode != EmbeddingMode::PreloadedFrozen; }
};

// Sorted vocabulary over headline and body tokens; tokens seen fewer than
// min_count times map to <unk>. Rows drawn from U[-0.05, 0.05].
WordEmbeddingTable build_vocab(const std::vector<DatasetRecord>& corpus, std::size_t min_count, std::size_t dim,
                               Rng& rng);

// Text vector format: token followed by `dim` floats per line. <unk> is the
// mean of the loaded rows.
WordEmbeddingTable load_pretrained(std::istream& in, std::size_t dim, bool trainable,
                                   const std::string& source = "<stream>");
WordEmbeddingTable load_pretrained_file(const std::string& path, std::size_t dim, bool trainable);

class PatternVocabulary {
public:
    PatternVocabulary() = default;
    explicit PatternVocabulary(std::vector<std::string> patterns);

    std::size_t row(const std::string& pattern) const;
    std::size_t unk_row() const { return patterns_.size() - 1; }
    std::size_t size() const { return patterns_.size(); }
    const std::vector<std::string>& rows() const { return patterns_; }

private:
    std::vector<std::string> patterns_;
    std::unordered_map<std::string, std::size_t> index_;
};

struct PatternEmbeddingTable {
    PatternVocabulary vocab;
    Tensor matrix;  // P x 100
    bool trainable = true;
};

PatternEmbeddingTable build_pattern_table(const std::vector<DatasetRecord>& corpus, std::size_t dim, Rng& rng);

enum class QueryMode { Active, MeanPool };

// Graph-side lookups. `matrix` is the parameter holding the table rows.
Var embed_token(Graph& g, const WordVocabulary& vocab, Parameter& matrix, const std::string& token);
Var headline_vector(Graph& g, const std::vector<std::string>& headline, const WordVocabulary& vocab,
                    Parameter& matrix);
Var cardinal_phrase_vector(Graph& g, const CardinalPhrase& phrase, const WordVocabulary& vocab, Parameter& matrix);
Var pattern_query(Graph& g, const std::vector<CardinalPattern>& patterns, std::optional<std::size_t> active,
                  const PatternVocabulary& vocab, Parameter& matrix, QueryMode mode);
// Cardinal phrase query for records with several cardinals: the active
// phrase in Active mode, the mean of all phrase vectors in MeanPool mode.
Var phrase_query(Graph& g, const std::vector<CardinalPhrase>& phrases, std::optional<std::size_t> active,
                 const WordVocabulary& vocab, Parameter& matrix, QueryMode mode);

}  // namespace poshan
