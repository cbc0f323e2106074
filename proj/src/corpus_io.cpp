#include <fstream>
#include <istream>
#include <ostream>
#include <set>

#include <json.hpp>

#include "poshan/errors.hpp"
#include "poshan/text.hpp"

namespace poshan {

using nlohmann::json;

namespace {

template <typename Fn>
void for_each_json_line(std::istream& in, const std::string& source, Fn&& fn) {
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        const std::string where = source + ":" + std::to_string(line_no);
        try {
            fn(json::parse(line), where);
        } catch (const json::exception& e) {
            throw DataError(where + ": malformed JSON line: " + e.what());
        } catch (const DataError& e) {
            throw DataError(where + ": " + e.what());
        }
    }
}

TaggedSentence tagged_from_json(const json& tokens, const json& tags) {
    auto tok = tokens.get<std::vector<std::string>>();
    auto tg = tags.get<std::vector<std::string>>();
    if (tok.size() != tg.size()) throw DataError("token/tag arrays differ in length");
    TaggedSentence out;
    for (std::size_t i = 0; i < tok.size(); ++i) out.push_back({tok[i], tg[i]});
    return out;
}

json tokens_json(const TaggedSentence& s) {
    json a = json::array();
    for (const auto& t : s) a.push_back(t.text);
    return a;
}

json tags_json(const TaggedSentence& s) {
    json a = json::array();
    for (const auto& t : s) a.push_back(t.pos);
    return a;
}

}  // namespace

std::vector<RawRecord> read_corpus(std::istream& in, const std::string& source) {
    std::vector<RawRecord> records;
    std::set<std::string> seen;
    for_each_json_line(in, source, [&](const json& j, const std::string&) {
        RawRecord r;
        r.id = j.at("id").get<std::string>();
        r.headline = j.at("headline").get<std::string>();
        r.body = j.at("body").get<std::string>();
        r.label = parse_label(j.at("label").get<std::string>());
        if (!seen.insert(r.id).second) throw DataError("duplicate record id " + r.id);
        records.push_back(std::move(r));
    });
    return records;
}

std::vector<RawRecord> read_corpus_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open corpus: " + path);
    return read_corpus(in, path);
}

std::vector<DatasetRecord> read_dataset(std::istream& in, const std::string& source) {
    std::vector<DatasetRecord> records;
    for_each_json_line(in, source, [&](const json& j, const std::string&) {
        DatasetRecord r;
        r.id = j.at("id").get<std::string>();
        r.label = parse_label(j.at("label").get<std::string>());
        r.headline = tagged_from_json(j.at("headline_tokens"), j.at("headline_tags"));
        const auto& bt = j.at("body_tokens");
        const auto& bg = j.at("body_tags");
        if (bt.size() != bg.size()) throw DataError("body token/tag sentence counts differ");
        for (std::size_t s = 0; s < bt.size(); ++s) r.body.push_back(tagged_from_json(bt[s], bg[s]));
        for (const auto& p : j.at("patterns")) {
            auto parts = p.get<std::vector<std::string>>();
            if (parts.size() != 3) throw DataError("pattern must have 3 tags");
            r.patterns.push_back({parts[0], parts[1], parts[2]});
        }
        for (const auto& p : j.at("phrases")) {
            auto parts = p.get<std::vector<std::string>>();
            if (parts.size() != 3) throw DataError("phrase must have 3 tokens");
            r.phrases.push_back({parts[0], parts[1], parts[2]});
        }
        if (r.patterns.size() != r.phrases.size()) throw DataError("patterns and phrases differ in length");
        if (j.contains("active_cardinal_index") && !j.at("active_cardinal_index").is_null()) {
            auto idx = j.at("active_cardinal_index").get<std::size_t>();
            if (idx >= r.patterns.size()) throw DataError("active_cardinal_index out of range");
            r.active_cardinal = idx;
        }
        records.push_back(std::move(r));
    });
    return records;
}

std::vector<DatasetRecord> read_dataset_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open dataset: " + path);
    return read_dataset(in, path);
}

void write_dataset(std::ostream& out, const std::vector<DatasetRecord>& records) {
    for (const auto& r : records) {
        json j;
        j["id"] = r.id;
        j["label"] = label_name(r.label);
        j["headline_tokens"] = tokens_json(r.headline);
        j["headline_tags"] = tags_json(r.headline);
        json bt = json::array();
        json bg = json::array();
        for (const auto& s : r.body) {
            bt.push_back(tokens_json(s));
            bg.push_back(tags_json(s));
        }
        j["body_tokens"] = std::move(bt);
        j["body_tags"] = std::move(bg);
        json patterns = json::array();
        for (const auto& p : r.patterns) patterns.push_back({p.left, p.mid, p.right});
        json phrases = json::array();
        for (const auto& p : r.phrases) phrases.push_back({p.prev, p.num, p.next});
        j["patterns"] = std::move(patterns);
        j["phrases"] = std::move(phrases);
        j["active_cardinal_index"] = r.active_cardinal ? json(*r.active_cardinal) : json(nullptr);
        out << j.dump() << '\n';
    }
}

void write_dataset_file(const std::string& path, const std::vector<DatasetRecord>& records) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write dataset: " + path);
    write_dataset(out, records);
}

}  // namespace poshan
