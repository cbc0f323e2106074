#include <fstream>
#include <set>
#include <string>
#include <unordered_map>

#include <json.hpp>

#include "poshan/errors.hpp"
#include "poshan/text.hpp"

namespace poshan {

namespace {

const std::set<std::string, std::less<>>& penn_tags() {
    static const std::set<std::string, std::less<>> tags = {
        "CC",  "CD",  "DT",   "EX",  "FW",  "IN",  "JJ",  "JJR", "JJS", "LS",  "MD",  "NN",
        "NNS", "NNP", "NNPS", "PDT", "POS", "PRP", "PRP$", "RB", "RBR", "RBS", "RP",  "SYM",
        "TO",  "UH",  "VB",   "VBD", "VBG", "VBN", "VBP", "VBZ", "WDT", "WP",  "WP$", "WRB",
        "$",   "''",  "``",   "(",   ")",   ",",   "--",  ".",   ":",   "#",   "-LRB-", "-RRB-",
        "-NONE-",
        kBosTag, kEosTag,
    };
    return tags;
}

const std::unordered_map<std::string, std::string>& lexicon() {
    static const std::unordered_map<std::string, std::string> words = {
        {"the", "DT"},    {"a", "DT"},      {"an", "DT"},      {"this", "DT"},     {"that", "DT"},
        {"these", "DT"},  {"those", "DT"},  {"all", "DT"},     {"some", "DT"},     {"every", "DT"},
        {"no", "DT"},     {"of", "IN"},     {"in", "IN"},      {"on", "IN"},       {"at", "IN"},
        {"for", "IN"},    {"with", "IN"},   {"by", "IN"},      {"from", "IN"},     {"about", "IN"},
        {"into", "IN"},   {"over", "IN"},   {"after", "IN"},   {"before", "IN"},   {"than", "IN"},
        {"as", "IN"},     {"if", "IN"},     {"because", "IN"}, {"under", "IN"},    {"to", "TO"},
        {"and", "CC"},    {"or", "CC"},     {"but", "CC"},     {"nor", "CC"},      {"i", "PRP"},
        {"you", "PRP"},   {"he", "PRP"},    {"she", "PRP"},    {"it", "PRP"},      {"we", "PRP"},
        {"they", "PRP"},  {"me", "PRP"},    {"him", "PRP"},    {"us", "PRP"},      {"them", "PRP"},
        {"my", "PRP$"},   {"your", "PRP$"}, {"his", "PRP$"},   {"her", "PRP$"},    {"its", "PRP$"},
        {"our", "PRP$"},  {"their", "PRP$"}, {"will", "MD"},   {"would", "MD"},    {"can", "MD"},
        {"could", "MD"},  {"may", "MD"},    {"might", "MD"},   {"shall", "MD"},    {"should", "MD"},
        {"must", "MD"},   {"is", "VBZ"},    {"are", "VBP"},    {"was", "VBD"},     {"were", "VBD"},
        {"be", "VB"},     {"been", "VBN"},  {"being", "VBG"},  {"am", "VBP"},      {"have", "VBP"},
        {"has", "VBZ"},   {"had", "VBD"},   {"do", "VBP"},     {"does", "VBZ"},    {"did", "VBD"},
        {"say", "VBP"},   {"says", "VBZ"},  {"said", "VBD"},   {"get", "VB"},      {"make", "VB"},
        {"what", "WP"},   {"who", "WP"},    {"whom", "WP"},    {"whose", "WP$"},   {"which", "WDT"},
        {"where", "WRB"}, {"when", "WRB"},  {"why", "WRB"},    {"how", "WRB"},     {"not", "RB"},
        {"very", "RB"},   {"also", "RB"},   {"just", "RB"},    {"now", "RB"},      {"there", "EX"},
        {"new", "JJ"},    {"big", "JJ"},    {"good", "JJ"},    {"bad", "JJ"},      {"more", "JJR"},
        {"most", "JJS"},  {"first", "JJ"},  {"last", "JJ"},    {"%", "NN"},        {"percent", "NN"},
    };
    return words;
}

const std::set<std::string, std::less<>>& number_words() {
    static const std::set<std::string, std::less<>> words = {
        "zero",    "one",      "two",      "three",     "four",    "five",    "six",
        "seven",   "eight",    "nine",     "ten",       "eleven",  "twelve",  "thirteen",
        "fourteen", "fifteen", "sixteen",  "seventeen", "eighteen", "nineteen", "twenty",
        "thirty",  "forty",    "fifty",    "sixty",     "seventy", "eighty",  "ninety",
        "hundred", "thousand", "million",  "billion",   "trillion", "dozen",
    };
    return words;
}

bool is_number_word(std::string_view token) {
    if (number_words().count(token)) return true;
    // Hyphenated compounds such as twenty-five.
    auto dash = token.find('-');
    if (dash == std::string_view::npos || dash == 0 || dash + 1 == token.size()) return false;
    return number_words().count(token.substr(0, dash)) && number_words().count(token.substr(dash + 1));
}

bool ends_with(std::string_view s, std::string_view suffix) {
    return s.size() > suffix.size() && s.substr(s.size() - suffix.size()) == suffix;
}

std::string punct_tag(std::string_view token) {
    if (token == "." || token == "!" || token == "?") return ".";
    if (token == ",") return ",";
    if (token == ":" || token == ";" || token == "-") return ":";
    if (token == "$") return "$";
    if (token == "#") return "#";
    if (token == "(" || token == "[" || token == "{") return "(";
    if (token == ")" || token == "]" || token == "}") return ")";
    if (token == "\"" || token == "'") return "''";
    if (token == "`") return "``";
    return "SYM";
}

TaggedSentence zip(const std::vector<std::string>& tokens, const std::vector<std::string>& tags,
                   const std::string& record_id, const std::string& where) {
    if (tokens.size() != tags.size()) {
        throw TaggingError("record " + record_id + ": " + where + " has " + std::to_string(tokens.size()) +
                           " tokens but " + std::to_string(tags.size()) + " tags");
    }
    TaggedSentence out;
    out.reserve(tokens.size());
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        if (!is_penn_tag(tags[i])) {
            throw TaggingError("record " + record_id + ": unknown POS tag '" + tags[i] + "' in " + where);
        }
        out.push_back({tokens[i], tags[i]});
    }
    return out;
}

}  // namespace

bool is_penn_tag(std::string_view tag) { return penn_tags().count(tag) != 0; }

std::string FallbackTagger::tag_token(std::string_view token) const {
    if (token.empty()) return "SYM";
    if (is_numeric_token(token) || is_number_word(token)) return kCardinalTag;
    if (auto it = lexicon().find(std::string(token)); it != lexicon().end()) return it->second;
    if (token.size() == 1 && std::ispunct(static_cast<unsigned char>(token[0]))) return punct_tag(token);
    if (ends_with(token, "ing")) return "VBG";
    if (ends_with(token, "ed")) return "VBD";
    if (ends_with(token, "ly")) return "RB";
    if (ends_with(token, "est")) return "JJS";
    for (std::string_view suffix : {"ous", "ful", "able", "ible", "ive", "ic", "al", "less"}) {
        if (ends_with(token, suffix)) return "JJ";
    }
    if (token.size() > 3 && token.back() == 's' && !ends_with(token, "ss") && !ends_with(token, "us")) {
        return "NNS";
    }
    return "NN";
}

TaggedSentence FallbackTagger::tag(const std::vector<std::string>& tokens) const {
    TaggedSentence out;
    out.reserve(tokens.size());
    for (const auto& t : tokens) out.push_back({t, tag_token(t)});
    return out;
}

TaggedSentence FallbackTagger::tag_headline(const std::string&, const std::vector<std::string>& tokens) const {
    return tag(tokens);
}

TaggedSentence FallbackTagger::tag_body_sentence(const std::string&, std::size_t,
                                                 const std::vector<std::string>& tokens) const {
    return tag(tokens);
}

void SidecarTagger::add(std::string id, Entry entry) { entries_[std::move(id)] = std::move(entry); }

SidecarTagger SidecarTagger::parse(std::istream& in, const std::string& source) {
    SidecarTagger tagger;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
            auto j = nlohmann::json::parse(line);
            Entry entry;
            entry.headline = j.at("headline_tags").get<std::vector<std::string>>();
            if (j.contains("body_tags")) {
                entry.body = j.at("body_tags").get<std::vector<std::vector<std::string>>>();
            }
            tagger.add(j.at("id").get<std::string>(), std::move(entry));
        } catch (const nlohmann::json::exception& e) {
            throw DataError(source + ":" + std::to_string(line_no) + ": malformed tag sidecar line: " + e.what());
        }
    }
    return tagger;
}

SidecarTagger SidecarTagger::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open tag sidecar: " + path);
    return parse(in, path);
}

const SidecarTagger::Entry& SidecarTagger::lookup(const std::string& record_id) const {
    auto it = entries_.find(record_id);
    if (it == entries_.end()) throw TaggingError("record " + record_id + ": missing from tag sidecar");
    return it->second;
}

TaggedSentence SidecarTagger::tag_headline(const std::string& record_id,
                                           const std::vector<std::string>& tokens) const {
    return zip(tokens, lookup(record_id).headline, record_id, "headline");
}

TaggedSentence SidecarTagger::tag_body_sentence(const std::string& record_id, std::size_t sentence,
                                                const std::vector<std::string>& tokens) const {
    const auto& entry = lookup(record_id);
    const std::string where = "body sentence " + std::to_string(sentence);
    if (sentence >= entry.body.size()) {
        throw TaggingError("record " + record_id + ": sidecar has no tags for " + where);
    }
    return zip(tokens, entry.body[sentence], record_id, where);
}

void SidecarTagger::check_body_length(const std::string& record_id, std::size_t sentences) const {
    const auto& entry = lookup(record_id);
    if (entry.body.size() != sentences) {
        throw TaggingError("record " + record_id + ": body has " + std::to_string(sentences) +
                           " sentences but sidecar has tags for " + std::to_string(entry.body.size()));
    }
}

}  // namespace poshan
