#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace dtx {

enum class KeywordKind { Drug, Use };

const char* to_string(KeywordKind kind);

struct LexiconEntry {
    std::vector<std::string> phrase;  // lowercase tokens, at least one
    std::string category;
    KeywordKind kind;

    std::string phrase_text() const;  // tokens joined with single spaces
};

// One keyword occurrence inside a token sequence.
struct MatchSpan {
    size_t start = 0;
    size_t length = 0;
    size_t entry_index = 0;  // index into Lexicon::entries()
};

// Per-record keyword occurrence counts. alpha/beta are the drug / use totals;
// both flags records that contain at least one of each.
struct KeywordHits {
    std::map<std::string, int> counts;  // category -> occurrences (zero entries omitted)
    int alpha = 0;
    int beta = 0;
    int both = 0;

    int category_count(const std::string& category) const {
        auto it = counts.find(category);
        return it == counts.end() ? 0 : it->second;
    }
};

// Immutable after load; safe for unrestricted concurrent reads.
class Lexicon {
public:
    // CSV with header `category,keyword,kind`, kind in {DRUG, USE}.
    // Keywords are normalized to lowercase. Throws std::runtime_error naming
    // the offending line on malformed rows or duplicate (phrase, kind) pairs.
    static Lexicon load(const std::string& path);

    // Builds a lexicon from rows (category, keyword, kind); used by tests.
    static Lexicon from_rows(
        const std::vector<std::tuple<std::string, std::string, KeywordKind>>& rows);

    const std::vector<LexiconEntry>& entries() const { return entries_; }
    const std::vector<std::string>& drug_categories() const { return drug_categories_; }
    const std::vector<std::string>& use_categories() const { return use_categories_; }

    // Kind of a category name; throws if the category is unknown.
    KeywordKind category_kind(const std::string& category) const;

    // Entry indices whose phrase starts with `token`, ordered longest phrase
    // first (ties: DRUG before USE, then category, then phrase).
    std::span<const size_t> candidates(const std::string& token) const;

    std::vector<std::string> phrases_of_kind(KeywordKind kind) const;

private:
    std::vector<LexiconEntry> entries_;
    std::vector<std::string> drug_categories_;
    std::vector<std::string> use_categories_;
    std::unordered_map<std::string, KeywordKind> category_kinds_;
    std::unordered_map<std::string, std::vector<size_t>> first_token_index_;

    void finalize(const char* source_name);
};

// Counts every keyword occurrence in `tokens` (cleaned, lowercase). Phrases
// are matched greedily longest-first at each position and matched tokens are
// not reused by overlapping matches; at equal length DRUG entries win over
// USE entries. If `spans` is non-null the matched spans are appended in
// order of appearance.
KeywordHits match_keywords(std::span<const std::string> tokens, const Lexicon& lexicon,
                           std::vector<MatchSpan>* spans = nullptr);

// True if any lexicon keyword occurs in `tokens`; stops at the first hit.
bool has_any_keyword(std::span<const std::string> tokens, const Lexicon& lexicon);

}  // namespace dtx
