#pragma once

#include <string>

#include <json.hpp>

#include "dtx/corpus.hpp"
#include "dtx/synthgen.hpp"

namespace dtx {

using json = nlohmann::ordered_json;

// One JSONL record. `raw` keeps unknown fields so they pass through opaquely.
struct JsonRecord {
    PostRecord record;
    json raw;
};

// Parses one JSONL line. When `original_text` is present the record is
// treated as already cleaned (text holds space-joined tokens); otherwise
// `text` is the raw text and the token list is left empty.
JsonRecord parse_record_line(const std::string& line, size_t line_no);

// Serializes the record back over its raw object: cleaned text, original
// text, derived attribute fields (alpha, beta, both, per-category counts) and
// classification/score when set.
std::string record_to_line(const JsonRecord& rec, bool with_attributes, bool with_classification,
                           double score = -1.0);

std::string labeled_to_line(const LabeledText& t);
LabeledText labeled_from_line(const std::string& line, size_t line_no);

}  // namespace dtx
