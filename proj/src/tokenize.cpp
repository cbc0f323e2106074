#include <algorithm>
#include <array>
#include <cctype>
#include <regex>

#include "poshan/text.hpp"

namespace poshan {

namespace {

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }

// ASCII punctuation only; UTF-8 continuation bytes stay inside words.
bool is_punct(char c) {
    auto u = static_cast<unsigned char>(c);
    return u < 128 && std::ispunct(u) != 0;
}

std::string lower(std::string_view text) {
    std::string out(text);
    for (auto& c : out) {
        auto u = static_cast<unsigned char>(c);
        if (u < 128) c = static_cast<char>(std::tolower(u));
    }
    return out;
}

constexpr std::array<std::string_view, 36> kAbbreviations = {
    "mr.",  "mrs.", "ms.",  "dr.",  "prof.", "sr.",  "jr.",  "st.",  "mt.",
    "u.s.", "u.k.", "u.n.", "e.g.", "i.e.",  "vs.",  "inc.", "corp.", "ltd.",
    "co.",  "jan.", "feb.", "mar.", "apr.",  "aug.", "sep.", "sept.", "oct.",
    "nov.", "dec.", "gen.", "gov.", "sen.",  "rep.", "no.",  "fig.", "approx.",
};

bool is_abbreviation(std::string_view word) {
    std::string w = lower(word);
    // Strip opening quotes/brackets so "(Mr." still matches.
    while (!w.empty() && (w.front() == '"' || w.front() == '(' || w.front() == '\'')) w.erase(0, 1);
    return std::find(kAbbreviations.begin(), kAbbreviations.end(), w) != kAbbreviations.end();
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
    while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
    return s;
}

}  // namespace

bool is_numeric_token(std::string_view token) {
    static const std::regex pattern(R"(^(\d{1,3}(,\d{3})+|\d+)(\.\d+)?$)");
    return std::regex_match(token.begin(), token.end(), pattern);
}

std::vector<std::string> tokenize(std::string_view text) {
    std::vector<std::string> tokens;
    std::size_t i = 0;
    while (i < text.size()) {
        while (i < text.size() && is_space(text[i])) ++i;
        std::size_t end = i;
        while (end < text.size() && !is_space(text[end])) ++end;
        if (end == i) break;
        std::string chunk = lower(text.substr(i, end - i));
        i = end;

        std::size_t b = 0;
        std::size_t e = chunk.size();
        while (b < e && is_punct(chunk[b])) tokens.emplace_back(1, chunk[b++]);
        std::size_t core_end = e;
        while (core_end > b && is_punct(chunk[core_end - 1])) --core_end;
        if (core_end > b) tokens.push_back(chunk.substr(b, core_end - b));
        for (std::size_t k = core_end; k < e; ++k) tokens.emplace_back(1, chunk[k]);
    }
    return tokens;
}

std::vector<std::string> split_sentences(std::string_view body) {
    std::vector<std::string> sentences;
    std::size_t start = 0;
    for (std::size_t i = 0; i < body.size(); ++i) {
        const char c = body[i];
        if (c != '.' && c != '!' && c != '?') continue;
        if (i + 1 < body.size() && !is_space(body[i + 1])) continue;
        std::size_t word_start = i;
        while (word_start > start && !is_space(body[word_start - 1])) --word_start;
        if (c == '.' && is_abbreviation(body.substr(word_start, i + 1 - word_start))) continue;
        auto sentence = trim(body.substr(start, i + 1 - start));
        if (!sentence.empty()) sentences.emplace_back(sentence);
        start = i + 1;
    }
    if (start < body.size()) {
        auto rest = trim(body.substr(start));
        if (!rest.empty()) sentences.emplace_back(rest);
    }
    return sentences;
}

}  // namespace poshan
