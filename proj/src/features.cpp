#include <algorithm>
#include <cctype>
#include <ostream>

#include "poshan/errors.hpp"
#include "poshan/text.hpp"

namespace poshan {

std::string label_name(Label label) { return label == Label::Incongruent ? "incongruent" : "congruent"; }

Label parse_label(std::string_view text) {
    std::string lowered(text);
    for (auto& c : lowered) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    if (lowered == "congruent") return Label::Congruent;
    if (lowered == "incongruent") return Label::Incongruent;
    throw DataError("unknown label '" + std::string(text) + "' (expected congruent or incongruent)");
}

CardinalFeatures extract_cardinal_features(const TaggedSentence& headline) {
    CardinalFeatures out;
    for (std::size_t i = 0; i < headline.size(); ++i) {
        if (headline[i].pos != kCardinalTag) continue;
        const bool first = i == 0;
        const bool last = i + 1 == headline.size();
        out.patterns.push_back({first ? kBosTag : headline[i - 1].pos, kCardinalTag,
                                last ? kEosTag : headline[i + 1].pos});
        out.phrases.push_back({first ? kBosToken : headline[i - 1].text, headline[i].text,
                               last ? kEosToken : headline[i + 1].text});
    }
    return out;
}

namespace {

DatasetRecord tag_headline_only(const RawRecord& record, const TagProvider& tagger) {
    DatasetRecord out;
    out.id = record.id;
    out.label = record.label;
    out.headline = tagger.tag_headline(record.id, tokenize(record.headline));
    auto features = extract_cardinal_features(out.headline);
    out.patterns = std::move(features.patterns);
    out.phrases = std::move(features.phrases);
    return out;
}

void tag_body(DatasetRecord& out, const RawRecord& record, const TagProvider& tagger) {
    auto sentences = split_sentences(record.body);
    tagger.check_body_length(record.id, sentences.size());
    out.body.reserve(sentences.size());
    for (std::size_t j = 0; j < sentences.size(); ++j) {
        out.body.push_back(tagger.tag_body_sentence(record.id, j, tokenize(sentences[j])));
    }
}

}  // namespace

DatasetRecord featurize(const RawRecord& record, const TagProvider& tagger) {
    auto out = tag_headline_only(record, tagger);
    tag_body(out, record, tagger);
    return out;
}

Derivation derive_dataset(const std::vector<RawRecord>& records, const TagProvider& tagger) {
    Derivation result;
    for (const auto& record : records) {
        auto& counts = record.label == Label::Incongruent ? result.summary.incongruent : result.summary.congruent;
        auto derived = tag_headline_only(record, tagger);
        if (derived.patterns.empty()) {
            ++counts.dropped;
            continue;
        }
        tag_body(derived, record, tagger);
        ++counts.kept;
        result.records.push_back(std::move(derived));
    }
    return result;
}

void DerivationSummary::write_tsv(std::ostream& out) const {
    out << "label\tkept\tdropped\n";
    out << "incongruent\t" << incongruent.kept << '\t' << incongruent.dropped << '\n';
    out << "congruent\t" << congruent.kept << '\t' << congruent.dropped << '\n';
    out << "total\t" << kept() << '\t' << dropped() << '\n';
}

std::vector<DatasetRecord> replicate_for_training(const DatasetRecord& record) {
    if (record.patterns.empty()) {
        throw NoCardinalError("record " + record.id + " has no cardinal pattern and cannot be replicated");
    }
    std::vector<DatasetRecord> out(record.patterns.size(), record);
    for (std::size_t k = 0; k < out.size(); ++k) out[k].active_cardinal = k;
    return out;
}

std::vector<DatasetRecord> replicate_all(const std::vector<DatasetRecord>& records) {
    std::vector<DatasetRecord> out;
    for (const auto& r : records) {
        auto copies = replicate_for_training(r);
        std::move(copies.begin(), copies.end(), std::back_inserter(out));
    }
    return out;
}

std::uint64_t fnv1a64(std::string_view text, std::uint64_t seed) {
    std::uint64_t h = 14695981039346656037ULL;
    auto mix = [&h](unsigned char byte) {
        h ^= byte;
        h *= 1099511628211ULL;
    };
    for (int i = 0; i < 8; ++i) mix(static_cast<unsigned char>(seed >> (8 * i)));
    for (char c : text) mix(static_cast<unsigned char>(c));
    return h;
}

DatasetSplit split_dataset(const std::vector<DatasetRecord>& records, std::uint64_t seed) {
    enum class Part { Train, Validation, Test };
    std::vector<Part> assignment(records.size(), Part::Test);
    for (Label label : {Label::Congruent, Label::Incongruent}) {
        std::vector<std::size_t> members;
        for (std::size_t i = 0; i < records.size(); ++i) {
            if (records[i].label == label) members.push_back(i);
        }
        std::sort(members.begin(), members.end(), [&](std::size_t a, std::size_t b) {
            auto ha = fnv1a64(records[a].id, seed);
            auto hb = fnv1a64(records[b].id, seed);
            return ha != hb ? ha < hb : records[a].id < records[b].id;
        });
        const std::size_t n = members.size();
        const std::size_t n_train = n * 7 / 10;
        const std::size_t n_val = n / 10;
        for (std::size_t k = 0; k < n; ++k) {
            assignment[members[k]] = k < n_train ? Part::Train : (k < n_train + n_val ? Part::Validation : Part::Test);
        }
    }
    DatasetSplit split;
    for (std::size_t i = 0; i < records.size(); ++i) {
        switch (assignment[i]) {
            case Part::Train: split.train.push_back(records[i]); break;
            case Part::Validation: split.validation.push_back(records[i]); break;
            case Part::Test: split.test.push_back(records[i]); break;
        }
    }
    return split;
}

}  // namespace poshan
