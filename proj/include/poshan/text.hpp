#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace poshan {

enum class Label { Congruent = 0, Incongruent = 1 };

constexpr std::size_t kNumClasses = 2;

std::string label_name(Label label);
// Accepts "congruent" / "incongruent".
Label parse_label(std::string_view text);

inline constexpr const char* kBosTag = "BOS";
inline constexpr const char* kEosTag = "EOS";
inline constexpr const char* kBosToken = "<bos>";
inline constexpr const char* kEosToken = "<eos>";
inline constexpr const char* kCardinalTag = "CD";

struct RawRecord {
    std::string id;
    std::string headline;
    std::string body;
    Label label = Label::Congruent;
};

struct TaggedToken {
    std::string text;
    std::string pos;
    bool operator==(const TaggedToken&) const = default;
};

using TaggedSentence = std::vector<TaggedToken>;

struct CardinalPattern {
    std::string left;
    std::string mid = kCardinalTag;
    std::string right;

    std::string str() const { return left + ":" + mid + ":" + right; }
    bool operator==(const CardinalPattern&) const = default;
};

struct CardinalPhrase {
    std::string prev;
    std::string num;
    std::string next;
    bool operator==(const CardinalPhrase&) const = default;
};

struct CardinalFeatures {
    std::vector<CardinalPattern> patterns;
    std::vector<CardinalPhrase> phrases;
};

struct DatasetRecord {
    std::string id;
    TaggedSentence headline;
    std::vector<TaggedSentence> body;
    Label label = Label::Congruent;
    std::vector<CardinalPattern> patterns;
    std::vector<CardinalPhrase> phrases;
    std::optional<std::size_t> active_cardinal;

    bool operator==(const DatasetRecord&) const = default;
};

// --- tokenization -----------------------------------------------------------

std::vector<std::string> tokenize(std::string_view text);
std::vector<std::string> split_sentences(std::string_view body);
bool is_numeric_token(std::string_view token);

// --- tagging ----------------------------------------------------------------

bool is_penn_tag(std::string_view tag);

class TagProvider {
public:
    virtual ~TagProvider() = default;
    virtual TaggedSentence tag_headline(const std::string& record_id,
                                        const std::vector<std::string>& tokens) const = 0;
    virtual TaggedSentence tag_body_sentence(const std::string& record_id, std::size_t sentence,
                                             const std::vector<std::string>& tokens) const = 0;
    // Called once the body has been split; providers with fixed sentence
    // counts reject a disagreement.
    virtual void check_body_length(const std::string& /*record_id*/, std::size_t /*sentences*/) const {}
};

// Deterministic lexicon + suffix tagger bundled for self-contained use.
class FallbackTagger : public TagProvider {
public:
    std::string tag_token(std::string_view token) const;
    TaggedSentence tag(const std::vector<std::string>& tokens) const;

    TaggedSentence tag_headline(const std::string& record_id,
                                const std::vector<std::string>& tokens) const override;
    TaggedSentence tag_body_sentence(const std::string& record_id, std::size_t sentence,
                                     const std::vector<std::string>& tokens) const override;
};

// Precomputed tags read from a JSON Lines sidecar.
class SidecarTagger : public TagProvider {
public:
    struct Entry {
        std::vector<std::string> headline;
        std::vector<std::vector<std::string>> body;
    };

    static SidecarTagger load(const std::string& path);
    static SidecarTagger parse(std::istream& in, const std::string& source = "<stream>");
    void add(std::string id, Entry entry);
    std::size_t size() const { return entries_.size(); }

    TaggedSentence tag_headline(const std::string& record_id,
                                const std::vector<std::string>& tokens) const override;
    TaggedSentence tag_body_sentence(const std::string& record_id, std::size_t sentence,
                                     const std::vector<std::string>& tokens) const override;
    void check_body_length(const std::string& record_id, std::size_t sentences) const override;

private:
    const Entry& lookup(const std::string& record_id) const;
    std::map<std::string, Entry> entries_;
};

// --- cardinal features ------------------------------------------------------

CardinalFeatures extract_cardinal_features(const TaggedSentence& headline);

struct LabelCounts {
    std::size_t kept = 0;
    std::size_t dropped = 0;
};

struct DerivationSummary {
    LabelCounts congruent;
    LabelCounts incongruent;

    std::size_t kept() const { return congruent.kept + incongruent.kept; }
    std::size_t dropped() const { return congruent.dropped + incongruent.dropped; }
    // label<TAB>kept<TAB>dropped rows for each label plus a total row.
    void write_tsv(std::ostream& out) const;
};

struct Derivation {
    std::vector<DatasetRecord> records;
    DerivationSummary summary;
};

// Tags and featurizes a record without filtering.
DatasetRecord featurize(const RawRecord& record, const TagProvider& tagger);

// Keeps the records whose tagged headline contains at least one CD token.
Derivation derive_dataset(const std::vector<RawRecord>& records, const TagProvider& tagger);

std::vector<DatasetRecord> replicate_for_training(const DatasetRecord& record);
std::vector<DatasetRecord> replicate_all(const std::vector<DatasetRecord>& records);

// --- splitting --------------------------------------------------------------

struct DatasetSplit {
    std::vector<DatasetRecord> train;
    std::vector<DatasetRecord> validation;
    std::vector<DatasetRecord> test;
};

// Stratified 70/10/20 by seeded hash of record id.
DatasetSplit split_dataset(const std::vector<DatasetRecord>& records, std::uint64_t seed);

std::uint64_t fnv1a64(std::string_view text, std::uint64_t seed = 0);

// --- JSON Lines -------------------------------------------------------------

std::vector<RawRecord> read_corpus(std::istream& in, const std::string& source = "<stream>");
std::vector<RawRecord> read_corpus_file(const std::string& path);

std::vector<DatasetRecord> read_dataset(std::istream& in, const std::string& source = "<stream>");
std::vector<DatasetRecord> read_dataset_file(const std::string& path);
void write_dataset(std::ostream& out, const std::vector<DatasetRecord>& records);
void write_dataset_file(const std::string& path, const std::vector<DatasetRecord>& records);

}  // namespace poshan
