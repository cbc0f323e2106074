#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>

#include "poshan/embeddings.hpp"
#include "poshan/recurrent.hpp"

namespace poshan {

enum class ModelKind { Poshan, Lstm, PosAt };

std::string model_kind_name(ModelKind kind);
ModelKind parse_model_kind(std::string_view text);

enum class PosAtInit { NearZero, Random };

std::string posat_init_name(PosAtInit init);
PosAtInit parse_posat_init(std::string_view text);

struct TrainConfig {
    double learning_rate = 0.003;
    std::size_t batch_size = 128;
    double grad_clip = 6.0;
    std::size_t max_epochs = 50;
    std::size_t early_stop_patience = 5;
    std::size_t max_words_per_sentence = 45;
    std::size_t max_sentences = 35;
    std::uint64_t seed = 1;

    bool disable_pattern_att = false;
    bool disable_phrase_att = false;
    bool replace_headline_att_with_encoder = false;
    CellType cell = CellType::LstmBi;

    std::size_t word_dim = 64;
    std::size_t hidden_size = 16;
    // 0 means "encoder output size".
    std::size_t attention_size = 0;
    std::size_t pattern_dim = kPatternDim;
    std::size_t min_count = 1;
    std::string embeddings;  // pretrained vector file; empty for a random table
    EmbeddingMode embedding_mode = EmbeddingMode::RandomTrainable;
    PosAtInit posat_init = PosAtInit::NearZero;

    // Throws ConfigError on a non-positive field or inconsistent combination.
    void validate() const;

    // Applies one key=value assignment.
    void set(std::string_view key, std::string_view value);

    bool operator==(const TrainConfig&) const = default;
};

// Flat key=value text; '#' starts a comment. Unknown keys are errors.
TrainConfig parse_config(std::istream& in, const std::string& source = "<stream>");
TrainConfig load_config_file(const std::string& path);
// Every key, in declaration order; parse_config(write_config(c)) == c.
void write_config(std::ostream& out, const TrainConfig& config);

// Shortest text that reads back to the same double.
std::string format_double(double value);

}  // namespace poshan
