#include "dtx/record_json.hpp"

#include <sstream>
#include <stdexcept>

namespace dtx {

namespace {

std::string join_tokens(const std::vector<std::string>& tokens) {
    std::string out;
    for (size_t i = 0; i < tokens.size(); ++i) {
        if (i) out += ' ';
        out += tokens[i];
    }
    return out;
}

std::vector<std::string> split_tokens(const std::string& s) {
    std::vector<std::string> out;
    std::istringstream iss(s);
    std::string tok;
    while (iss >> tok) out.push_back(tok);
    return out;
}

int64_t to_int(const json& v) {
    if (v.is_number_integer()) return v.get<int64_t>();
    if (v.is_number()) return static_cast<int64_t>(v.get<double>());
    if (v.is_string()) {
        try {
            return std::stoll(v.get<std::string>());
        } catch (const std::exception&) {
            return 0;
        }
    }
    return 0;
}

}  // namespace

JsonRecord parse_record_line(const std::string& line, size_t line_no) {
    JsonRecord out;
    try {
        out.raw = json::parse(line);
    } catch (const json::parse_error& e) {
        throw std::runtime_error("records: line " + std::to_string(line_no) +
                                 ": invalid JSON: " + e.what());
    }
    if (!out.raw.is_object())
        throw std::runtime_error("records: line " + std::to_string(line_no) + ": not an object");

    const json& j = out.raw;
    PostRecord& r = out.record;
    if (j.contains("id_str")) {
        r.id_str = j["id_str"].is_string() ? j["id_str"].get<std::string>() : j["id_str"].dump();
    }
    if (j.contains("lang") && j["lang"].is_string()) r.lang = j["lang"].get<std::string>();
    if (j.contains("possibly_sensitive") && j["possibly_sensitive"].is_boolean())
        r.possibly_sensitive = j["possibly_sensitive"].get<bool>();
    if (j.contains("timestamp_ms")) r.timestamp_ms = to_int(j["timestamp_ms"]);
    if (j.contains("user_followers_count")) r.user_followers_count = to_int(j["user_followers_count"]);
    if (j.contains("user_friends_count")) r.user_friends_count = to_int(j["user_friends_count"]);

    const std::string text =
        j.contains("text") && j["text"].is_string() ? j["text"].get<std::string>() : "";
    if (j.contains("original_text") && j["original_text"].is_string()) {
        r.original_text = j["original_text"].get<std::string>();
        r.text = split_tokens(text);
    } else {
        r.original_text = text;
    }
    if (j.contains("classification") && j["classification"].is_string()) {
        const std::string c = j["classification"].get<std::string>();
        if (c == "positive") r.classification = Classification::Positive;
        else if (c == "negative") r.classification = Classification::Negative;
    }
    if (j.contains("alpha")) {
        // Re-ingest previously derived attributes.
        r.hits.alpha = static_cast<int>(to_int(j["alpha"]));
        r.hits.beta = j.contains("beta") ? static_cast<int>(to_int(j["beta"])) : 0;
        r.hits.both = j.contains("both") ? static_cast<int>(to_int(j["both"])) : 0;
        if (j.contains("category_counts") && j["category_counts"].is_object()) {
            for (const auto& [key, value] : j["category_counts"].items())
                r.hits.counts[key] = static_cast<int>(to_int(value));
        }
    }
    return out;
}

std::string record_to_line(const JsonRecord& rec, bool with_attributes, bool with_classification,
                           double score) {
    json j = rec.raw;
    const PostRecord& r = rec.record;
    j["id_str"] = r.id_str;
    j["text"] = join_tokens(r.text);
    j["original_text"] = r.original_text;
    j["lang"] = r.lang;
    j["possibly_sensitive"] = r.possibly_sensitive;
    j["timestamp_ms"] = r.timestamp_ms;
    j["user_followers_count"] = r.user_followers_count;
    j["user_friends_count"] = r.user_friends_count;
    if (with_attributes) {
        j["alpha"] = r.hits.alpha;
        j["beta"] = r.hits.beta;
        j["both"] = r.hits.both;
        json counts = json::object();
        for (const auto& [category, count] : r.hits.counts) counts[category] = count;
        j["category_counts"] = counts;
    }
    if (with_classification) {
        j["classification"] = to_string(r.classification);
        if (score >= 0.0) j["score"] = score;
    }
    return j.dump();
}

std::string labeled_to_line(const LabeledText& t) {
    json j;
    j["id_str"] = t.id_str;
    j["text"] = join_tokens(t.tokens);
    j["label"] = t.label;
    return j.dump();
}

LabeledText labeled_from_line(const std::string& line, size_t line_no) {
    json j;
    try {
        j = json::parse(line);
    } catch (const json::parse_error& e) {
        throw std::runtime_error("labeled records: line " + std::to_string(line_no) +
                                 ": invalid JSON: " + e.what());
    }
    LabeledText t;
    if (j.contains("id_str") && j["id_str"].is_string()) t.id_str = j["id_str"].get<std::string>();
    if (j.contains("text") && j["text"].is_string())
        t.tokens = split_tokens(j["text"].get<std::string>());
    if (j.contains("label")) t.label = static_cast<int>(to_int(j["label"]));
    return t;
}

}  // namespace dtx
