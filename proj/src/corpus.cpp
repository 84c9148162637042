#include "dtx/corpus.hpp"

#include <omp.h>

#include <algorithm>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "dtx/rng.hpp"

namespace dtx {

const char* to_string(Classification c) {
    switch (c) {
        case Classification::Positive: return "positive";
        case Classification::Negative: return "negative";
        default: return "unlabeled";
    }
}

CleaningRules CleaningRules::load(const std::string& stopwords_path,
                                  const std::string& contractions_path) {
    CleaningRules rules;

    std::ifstream sw(stopwords_path);
    if (!sw) throw std::runtime_error("cleaning rules: cannot open " + stopwords_path);
    std::string line;
    while (std::getline(sw, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        rules.stopwords.insert(line);
    }

    std::ifstream ct(contractions_path);
    if (!ct) throw std::runtime_error("cleaning rules: cannot open " + contractions_path);
    size_t line_no = 0;
    while (std::getline(ct, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line_no == 1) {
            if (line != "token,expansion")
                throw std::runtime_error("cleaning rules: " + contractions_path +
                                         ": expected header token,expansion");
            continue;
        }
        const size_t c = line.find(',');
        if (c == std::string::npos)
            throw std::runtime_error("cleaning rules: " + contractions_path + ":" +
                                     std::to_string(line_no) + ": malformed row");
        std::vector<std::string> expansion;
        std::istringstream iss(line.substr(c + 1));
        std::string tok;
        while (iss >> tok) expansion.push_back(tok);
        rules.contractions.emplace(line.substr(0, c), std::move(expansion));
    }
    return rules;
}

namespace {

bool is_ascii_punct(char c) {
    return (c >= '!' && c <= '/') || (c >= ':' && c <= '@') || (c >= '[' && c <= '`') ||
           (c >= '{' && c <= '~');
}

// Code points kept by the emoji/symbol filter: ASCII, plus the Latin-1 and
// Latin Extended-A letter ranges. Everything else (emoji blocks, symbols,
// non-Latin scripts, supplementary planes) becomes a token separator.
bool keep_code_point(uint32_t cp) {
    if (cp < 0x80) return true;
    if (cp >= 0xC0 && cp <= 0xFF && cp != 0xD7 && cp != 0xF7) return true;
    if (cp >= 0x100 && cp <= 0x17F) return true;
    return false;
}

void encode_utf8(uint32_t cp, std::string& out) {
    if (cp < 0x80) {
        out += static_cast<char>(cp);
    } else if (cp < 0x800) {
        out += static_cast<char>(0xC0 | (cp >> 6));
        out += static_cast<char>(0x80 | (cp & 0x3F));
    } else {
        out += static_cast<char>(0xE0 | (cp >> 12));
        out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
        out += static_cast<char>(0x80 | (cp & 0x3F));
    }
}

// Decodes the next UTF-8 code point; malformed bytes decode as one code point
// each so the scan always advances.
uint32_t next_code_point(std::string_view s, size_t& i) {
    const auto b0 = static_cast<unsigned char>(s[i]);
    size_t len = 1;
    uint32_t cp = b0;
    if (b0 >= 0xF0) {
        len = 4;
        cp = b0 & 0x07;
    } else if (b0 >= 0xE0) {
        len = 3;
        cp = b0 & 0x0F;
    } else if (b0 >= 0xC0) {
        len = 2;
        cp = b0 & 0x1F;
    }
    if (i + len > s.size()) len = 1;
    for (size_t k = 1; k < len; ++k) {
        const auto b = static_cast<unsigned char>(s[i + k]);
        if ((b & 0xC0) != 0x80) {
            len = 1;
            cp = b0;
            break;
        }
        cp = (cp << 6) | (b & 0x3F);
    }
    i += len;
    return cp;
}

// Removes emoji/symbol code points from one token, splitting where they
// separated words; appends the surviving pieces to `out`.
void scrub_token(const std::string& token, std::vector<std::string>& out) {
    std::string piece;
    size_t i = 0;
    while (i < token.size()) {
        const uint32_t cp = next_code_point(token, i);
        if (keep_code_point(cp)) {
            encode_utf8(cp, piece);
        } else if (!piece.empty()) {
            out.push_back(std::move(piece));
            piece.clear();
        }
    }
    if (!piece.empty()) out.push_back(std::move(piece));
}

// ASCII tolower plus the kept Latin ranges (U+00C0-U+00DE maps +0x20,
// Latin Extended-A even code points map +1).
void lowercase_token(std::string& token) {
    std::string out;
    out.reserve(token.size());
    size_t i = 0;
    while (i < token.size()) {
        uint32_t cp = next_code_point(token, i);
        if (cp >= 'A' && cp <= 'Z') {
            cp += 0x20;
        } else if (cp >= 0xC0 && cp <= 0xDE && cp != 0xD7) {
            cp += 0x20;
        } else if (cp >= 0x100 && cp <= 0x17F && (cp & 1) == 0) {
            cp += 1;
        }
        encode_utf8(cp, out);
    }
    token = std::move(out);
}

bool has_prefix(const std::string& s, std::string_view prefix) {
    return s.size() >= prefix.size() && s.compare(0, prefix.size(), prefix) == 0;
}

}  // namespace

std::vector<std::string> clean_text(std::string_view raw, const CleaningRules& rules) {
    // Newline removal + whitespace tokenization.
    std::vector<std::string> tokens;
    std::string cur;
    for (char c : raw) {
        if (c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v') {
            if (!cur.empty()) tokens.push_back(std::move(cur)), cur.clear();
        } else {
            cur += c;
        }
    }
    if (!cur.empty()) tokens.push_back(std::move(cur));

    // Hashtag removal: the whole token goes, '#' prefix included.
    std::erase_if(tokens, [](const std::string& t) { return t[0] == '#'; });

    // Emoji/symbol removal (may split tokens).
    std::vector<std::string> scrubbed;
    scrubbed.reserve(tokens.size());
    for (const std::string& t : tokens) scrub_token(t, scrubbed);

    // Reserved words, URLs, mentions.
    std::erase_if(scrubbed, [](const std::string& t) {
        return t == "RT" || t == "FAV" || has_prefix(t, "http://") || has_prefix(t, "https://") ||
               has_prefix(t, "www.") || t[0] == '@';
    });

    // Punctuation and digit removal, then lowercasing.
    for (std::string& t : scrubbed) {
        std::string kept;
        kept.reserve(t.size());
        for (char c : t) {
            const bool ascii = static_cast<unsigned char>(c) < 0x80;
            if (ascii && (is_ascii_punct(c) || (c >= '0' && c <= '9'))) continue;
            kept += c;
        }
        t = std::move(kept);
        lowercase_token(t);
    }

    // Stopword removal and whitespace collapse (empty tokens).
    std::erase_if(scrubbed,
                  [&](const std::string& t) { return t.empty() || rules.stopwords.count(t) > 0; });

    // Contraction expansion.
    std::vector<std::string> out;
    out.reserve(scrubbed.size());
    for (std::string& t : scrubbed) {
        auto it = rules.contractions.find(t);
        if (it == rules.contractions.end()) {
            out.push_back(std::move(t));
        } else {
            out.insert(out.end(), it->second.begin(), it->second.end());
        }
    }
    return out;
}

std::string FunnelReport::to_csv() const {
    std::ostringstream os;
    int64_t kept = input;
    os << "stage,kept,dropped\n";
    os << "input," << input << ",0\n";
    kept -= dropped_empty;
    os << "empty_text," << kept << "," << dropped_empty << "\n";
    kept -= dropped_non_english;
    os << "non_english," << kept << "," << dropped_non_english << "\n";
    kept -= dropped_no_keyword;
    os << "no_keyword," << kept << "," << dropped_no_keyword << "\n";
    os << "output," << output() << ",0\n";
    return os.str();
}

bool keep_record(const PostRecord& record, const Lexicon& lexicon, FunnelReport& report) {
    report.input += 1;
    if (record.text.empty()) {
        report.dropped_empty += 1;
        return false;
    }
    if (record.lang != "en") {
        report.dropped_non_english += 1;
        return false;
    }
    if (!has_any_keyword(record.text, lexicon)) {
        report.dropped_no_keyword += 1;
        return false;
    }
    return true;
}

FunnelReport filter_rows_serial(std::vector<PostRecord>& records, const Lexicon& lexicon) {
    FunnelReport report;
    size_t w = 0;
    for (size_t r = 0; r < records.size(); ++r) {
        if (keep_record(records[r], lexicon, report)) {
            if (w != r) records[w] = std::move(records[r]);
            ++w;
        }
    }
    records.resize(w);
    return report;
}

FunnelReport filter_rows(std::vector<PostRecord>& records, const Lexicon& lexicon) {
    const auto n = static_cast<int64_t>(records.size());
    std::vector<unsigned char> keep(records.size(), 0);
    FunnelReport report;

#pragma omp parallel
    {
        FunnelReport local;
#pragma omp for schedule(static)
        for (int64_t i = 0; i < n; ++i) {
            keep[i] = keep_record(records[i], lexicon, local) ? 1 : 0;
        }
#pragma omp critical
        report += local;
    }

    size_t w = 0;
    for (size_t r = 0; r < records.size(); ++r) {
        if (keep[r]) {
            if (w != r) records[w] = std::move(records[r]);
            ++w;
        }
    }
    records.resize(w);
    return report;
}

void derive_attributes(PostRecord& record, const Lexicon& lexicon) {
    record.hits = match_keywords(record.text, lexicon);
}

void clean_records_serial(std::vector<PostRecord>& records, const CleaningRules& rules) {
    for (PostRecord& r : records) r.text = clean_text(r.original_text, rules);
}

void clean_records(std::vector<PostRecord>& records, const CleaningRules& rules) {
    const auto n = static_cast<int64_t>(records.size());
#pragma omp parallel for schedule(static)
    for (int64_t i = 0; i < n; ++i) {
        records[i].text = clean_text(records[i].original_text, rules);
    }
}

namespace {

// Multiple occurrences of one keyword; counted per distinct entry, not per
// category, so "pot weed" (two Marijuana keywords) does not qualify.
bool has_repeated_keyword(const PostRecord& record, const Lexicon& lexicon) {
    std::vector<MatchSpan> spans;
    match_keywords(record.text, lexicon, &spans);
    std::unordered_map<size_t, int> per_entry;
    for (const MatchSpan& s : spans) {
        if (++per_entry[s.entry_index] >= 2) return true;
    }
    return false;
}

}  // namespace

CandidateSets build_candidate_sets(const std::vector<PostRecord>& records, const Lexicon& lexicon,
                                   size_t sample_size, uint64_t seed) {
    CandidateSets sets;
    std::vector<const PostRecord*> remainder;
    for (const PostRecord& r : records) {
        if (r.hits.both == 1) {
            sets.set1.push_back(r);
        } else if (has_repeated_keyword(r, lexicon)) {
            sets.set2.push_back(r);
        } else {
            remainder.push_back(&r);
        }
    }

    const size_t k = std::min(sample_size, remainder.size());
    sets.sample_truncated = k < sample_size;
    Rng rng(seed);
    // Partial Fisher-Yates over the remainder.
    for (size_t i = 0; i < k; ++i) {
        const size_t j = i + rng.uniform_index(remainder.size() - i);
        std::swap(remainder[i], remainder[j]);
        sets.set3.push_back(*remainder[i]);
    }
    return sets;
}

}  // namespace dtx
