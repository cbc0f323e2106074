#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "poshan/config.hpp"
#include "poshan/graph.hpp"
#include "poshan/text.hpp"

namespace poshan {

// A record truncated to the configured limits and padded to a rectangular
// sentence x word grid. Padding cells hold kPadToken and a false mask bit.
struct Document {
    std::string id;
    Label label = Label::Congruent;
    std::vector<std::string> headline;
    std::vector<std::string> headline_tags;
    std::vector<std::vector<std::string>> sentences;
    std::vector<std::vector<std::string>> tags;
    std::vector<Mask> word_masks;
    Mask sentence_mask;
    std::vector<CardinalPattern> patterns;
    std::vector<CardinalPhrase> phrases;
    std::optional<std::size_t> active_cardinal;

    std::size_t real_sentences() const;
};

struct Batch {
    std::vector<Document> documents;
};

// Truncates headline and sentences to `max_words_per_sentence` words and the
// body to `max_sentences` sentences. Throws DataError on an empty body.
Document make_document(const DatasetRecord& record, const TrainConfig& config);

// Pads every document to `sentences` x `words`; both must cover the document.
void pad_document(Document& doc, std::size_t sentences, std::size_t words);

// Shuffled (when `shuffle`) then chunked into batch_size groups, each padded
// to its own largest sentence count and sentence length.
std::vector<Batch> make_batches(const std::vector<DatasetRecord>& records, const TrainConfig& config, bool shuffle,
                                std::uint64_t seed);

// Fisher-Yates permutation of 0..n-1 driven by a seeded mt19937_64.
std::vector<std::size_t> shuffled_indices(std::size_t n, std::uint64_t seed);

}  // namespace poshan
