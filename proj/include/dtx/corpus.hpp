#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "dtx/lexicon.hpp"

namespace dtx {

enum class Classification { Unlabeled, Positive, Negative };

const char* to_string(Classification c);

struct PostRecord {
    std::string id_str;
    std::string original_text;
    std::vector<std::string> text;  // cleaned tokens
    std::string lang;
    bool possibly_sensitive = false;
    int64_t timestamp_ms = 0;
    int64_t user_followers_count = 0;
    int64_t user_friends_count = 0;
    KeywordHits hits;
    Classification classification = Classification::Unlabeled;
};

// Stopword set plus contraction expansion table, both loaded from editable
// data files.
struct CleaningRules {
    std::unordered_set<std::string> stopwords;
    std::unordered_map<std::string, std::vector<std::string>> contractions;

    // stopwords: one word per line, '#' comments. contractions: CSV with
    // header `token,expansion`, expansion space-separated.
    static CleaningRules load(const std::string& stopwords_path,
                              const std::string& contractions_path);
};

// Cleans one raw text into tokens. Filters apply in a fixed order: newline
// removal, hashtag removal (whole token), emoji removal, reserved words
// (RT/FAV), URLs, mentions, punctuation, digits, lowercasing, stopwords,
// whitespace collapsing, contraction expansion. Empty output is legal.
std::vector<std::string> clean_text(std::string_view raw, const CleaningRules& rules);

// Per-filter drop counters for the row filters. Mergeable by summation.
struct FunnelReport {
    int64_t input = 0;
    int64_t dropped_empty = 0;
    int64_t dropped_non_english = 0;
    int64_t dropped_no_keyword = 0;

    int64_t output() const {
        return input - dropped_empty - dropped_non_english - dropped_no_keyword;
    }
    FunnelReport& operator+=(const FunnelReport& o) {
        input += o.input;
        dropped_empty += o.dropped_empty;
        dropped_non_english += o.dropped_non_english;
        dropped_no_keyword += o.dropped_no_keyword;
        return *this;
    }
    std::string to_csv() const;  // stage,kept,dropped
};

// True if the record survives the row filters (non-empty cleaned text,
// lang == "en", at least one lexicon keyword); the failing filter is counted
// in `report`.
bool keep_record(const PostRecord& record, const Lexicon& lexicon, FunnelReport& report);

// Drops filtered rows in place. The parallel variant shards the scan across
// OpenMP threads and merges the per-shard counters by summation; output order
// and counts are identical to the serial one.
FunnelReport filter_rows_serial(std::vector<PostRecord>& records, const Lexicon& lexicon);
FunnelReport filter_rows(std::vector<PostRecord>& records, const Lexicon& lexicon);

// Populates hits (including the both flag) via match_keywords; the record is
// otherwise unchanged.
void derive_attributes(PostRecord& record, const Lexicon& lexicon);

// Cleans original_text into text for every record. Parallel variant is
// record-sharded and bit-identical to the serial one.
void clean_records_serial(std::vector<PostRecord>& records, const CleaningRules& rules);
void clean_records(std::vector<PostRecord>& records, const CleaningRules& rules);

struct CandidateSets {
    std::vector<PostRecord> set1;  // both drug and use keywords
    std::vector<PostRecord> set2;  // some single keyword occurring >= 2 times
    std::vector<PostRecord> set3;  // uniform random sample of the remainder
    bool sample_truncated = false;  // set3 smaller than requested
};

// Splits records carrying derived attributes into three disjoint sets.
// set3 is sampled without replacement with the given seed; deterministic
// given (records order, seed).
CandidateSets build_candidate_sets(const std::vector<PostRecord>& records, const Lexicon& lexicon,
                                   size_t sample_size, uint64_t seed);

}  // namespace dtx
