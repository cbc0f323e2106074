#include "poshan/batching.hpp"

#include <algorithm>
#include <numeric>

#include "poshan/embeddings.hpp"
#include "poshan/errors.hpp"

namespace poshan {

std::size_t Document::real_sentences() const {
    return static_cast<std::size_t>(std::count(sentence_mask.begin(), sentence_mask.end(), true));
}

Document make_document(const DatasetRecord& record, const TrainConfig& config) {
    if (record.body.empty()) throw DataError("record " + record.id + " has an empty body");
    Document doc;
    doc.id = record.id;
    doc.label = record.label;
    const std::size_t l = config.max_words_per_sentence;
    for (std::size_t i = 0; i < record.headline.size() && i < l; ++i) {
        doc.headline.push_back(record.headline[i].text);
        doc.headline_tags.push_back(record.headline[i].pos);
    }
    for (std::size_t j = 0; j < record.body.size() && j < config.max_sentences; ++j) {
        const auto& s = record.body[j];
        if (s.empty()) throw DataError("record " + record.id + " has an empty sentence");
        std::vector<std::string> words, tags;
        for (std::size_t i = 0; i < s.size() && i < l; ++i) {
            words.push_back(s[i].text);
            tags.push_back(s[i].pos);
        }
        doc.word_masks.emplace_back(words.size(), true);
        doc.sentences.push_back(std::move(words));
        doc.tags.push_back(std::move(tags));
        doc.sentence_mask.push_back(true);
    }
    doc.patterns = record.patterns;
    doc.phrases = record.phrases;
    doc.active_cardinal = record.active_cardinal;
    return doc;
}

void pad_document(Document& doc, std::size_t sentences, std::size_t words) {
    if (doc.sentences.size() > sentences) throw DimensionError("pad_document: too many sentences for the target");
    doc.sentences.resize(sentences);
    doc.tags.resize(sentences);
    doc.word_masks.resize(sentences);
    doc.sentence_mask.resize(sentences, false);
    for (std::size_t j = 0; j < sentences; ++j) {
        if (doc.sentences[j].size() > words) throw DimensionError("pad_document: sentence longer than the target");
        doc.sentences[j].resize(words, kPadToken);
        doc.tags[j].resize(words, kPadToken);
        doc.word_masks[j].resize(words, false);
    }
}

std::vector<std::size_t> shuffled_indices(std::size_t n, std::uint64_t seed) {
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    Rng rng(seed);
    for (std::size_t i = n; i > 1; --i) {
        const std::size_t j = static_cast<std::size_t>(rng() % i);
        std::swap(idx[i - 1], idx[j]);
    }
    return idx;
}

std::vector<Batch> make_batches(const std::vector<DatasetRecord>& records, const TrainConfig& config, bool shuffle,
                                std::uint64_t seed) {
    if (config.batch_size == 0) throw ConfigError("batch-size must be positive");
    std::vector<std::size_t> order(records.size());
    if (shuffle) {
        order = shuffled_indices(records.size(), seed);
    } else {
        std::iota(order.begin(), order.end(), std::size_t{0});
    }
    std::vector<Batch> batches;
    for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
        Batch batch;
        const std::size_t end = std::min(order.size(), start + config.batch_size);
        std::size_t max_sentences = 0, max_words = 0;
        for (std::size_t k = start; k < end; ++k) {
            batch.documents.push_back(make_document(records[order[k]], config));
            const auto& d = batch.documents.back();
            max_sentences = std::max(max_sentences, d.sentences.size());
            for (const auto& s : d.sentences) max_words = std::max(max_words, s.size());
        }
        for (auto& d : batch.documents) pad_document(d, max_sentences, max_words);
        batches.push_back(std::move(batch));
    }
    return batches;
}

}  // namespace poshan
