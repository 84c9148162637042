#include "dtx/lexicon.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

namespace dtx {

namespace {

std::string lowercase(std::string s) {
    for (char& c : s) {
        if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
    }
    return s;
}

std::vector<std::string> split_ws(const std::string& s) {
    std::vector<std::string> out;
    std::istringstream iss(s);
    std::string tok;
    while (iss >> tok) out.push_back(tok);
    return out;
}

}  // namespace

const char* to_string(KeywordKind kind) {
    return kind == KeywordKind::Drug ? "DRUG" : "USE";
}

std::string LexiconEntry::phrase_text() const {
    std::string out;
    for (size_t i = 0; i < phrase.size(); ++i) {
        if (i) out += ' ';
        out += phrase[i];
    }
    return out;
}

Lexicon Lexicon::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("lexicon: cannot open " + path);

    Lexicon lex;
    std::string line;
    size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line_no == 1) {
            if (line != "category,keyword,kind")
                throw std::runtime_error("lexicon: " + path +
                                         ": expected header category,keyword,kind");
            continue;
        }
        const size_t c1 = line.find(',');
        const size_t c2 = line.rfind(',');
        if (c1 == std::string::npos || c2 == c1)
            throw std::runtime_error("lexicon: " + path + ":" + std::to_string(line_no) +
                                     ": malformed row (need category,keyword,kind)");
        const std::string category = line.substr(0, c1);
        const std::string keyword = lowercase(line.substr(c1 + 1, c2 - c1 - 1));
        const std::string kind_str = line.substr(c2 + 1);

        KeywordKind kind;
        if (kind_str == "DRUG") {
            kind = KeywordKind::Drug;
        } else if (kind_str == "USE") {
            kind = KeywordKind::Use;
        } else {
            throw std::runtime_error("lexicon: " + path + ":" + std::to_string(line_no) +
                                     ": kind must be DRUG or USE, got '" + kind_str + "'");
        }

        LexiconEntry entry{split_ws(keyword), category, kind};
        if (entry.phrase.empty() || category.empty())
            throw std::runtime_error("lexicon: " + path + ":" + std::to_string(line_no) +
                                     ": empty category or keyword");
        lex.entries_.push_back(std::move(entry));
    }
    if (line_no == 0) throw std::runtime_error("lexicon: " + path + ": empty file, header required");
    lex.finalize(path.c_str());
    return lex;
}

Lexicon Lexicon::from_rows(
    const std::vector<std::tuple<std::string, std::string, KeywordKind>>& rows) {
    Lexicon lex;
    for (const auto& [category, keyword, kind] : rows) {
        lex.entries_.push_back(LexiconEntry{split_ws(lowercase(keyword)), category, kind});
    }
    lex.finalize("<rows>");
    return lex;
}

void Lexicon::finalize(const char* source_name) {
    std::set<std::pair<std::string, KeywordKind>> seen;
    std::set<std::pair<std::string, KeywordKind>> seen_categories;
    for (size_t i = 0; i < entries_.size(); ++i) {
        const LexiconEntry& e = entries_[i];
        if (!seen.insert({e.phrase_text(), e.kind}).second)
            throw std::runtime_error(std::string("lexicon: ") + source_name +
                                     ": duplicate (" + e.phrase_text() + ", " +
                                     to_string(e.kind) + ")");
        auto kind_it = category_kinds_.find(e.category);
        if (kind_it == category_kinds_.end()) {
            category_kinds_.emplace(e.category, e.kind);
            if (seen_categories.insert({e.category, e.kind}).second) {
                (e.kind == KeywordKind::Drug ? drug_categories_ : use_categories_)
                    .push_back(e.category);
            }
        } else if (kind_it->second != e.kind) {
            throw std::runtime_error(std::string("lexicon: ") + source_name + ": category '" +
                                     e.category + "' used for both DRUG and USE entries");
        }
        first_token_index_[e.phrase.front()].push_back(i);
    }
    // Longest phrase first; at equal length DRUG precedes USE so that
    // cross-kind overlaps resolve deterministically.
    for (auto& [tok, idxs] : first_token_index_) {
        std::sort(idxs.begin(), idxs.end(), [this](size_t a, size_t b) {
            const LexiconEntry& ea = entries_[a];
            const LexiconEntry& eb = entries_[b];
            if (ea.phrase.size() != eb.phrase.size()) return ea.phrase.size() > eb.phrase.size();
            if (ea.kind != eb.kind) return ea.kind == KeywordKind::Drug;
            if (ea.category != eb.category) return ea.category < eb.category;
            return ea.phrase < eb.phrase;
        });
    }
}

KeywordKind Lexicon::category_kind(const std::string& category) const {
    auto it = category_kinds_.find(category);
    if (it == category_kinds_.end())
        throw std::runtime_error("lexicon: unknown category '" + category + "'");
    return it->second;
}

std::span<const size_t> Lexicon::candidates(const std::string& token) const {
    auto it = first_token_index_.find(token);
    if (it == first_token_index_.end()) return {};
    return it->second;
}

std::vector<std::string> Lexicon::phrases_of_kind(KeywordKind kind) const {
    std::vector<std::string> out;
    for (const LexiconEntry& e : entries_) {
        if (e.kind == kind) out.push_back(e.phrase_text());
    }
    return out;
}

namespace {

// Returns the matching candidate entry at `pos`, or entries.size() if none.
size_t match_at(std::span<const std::string> tokens, size_t pos, const Lexicon& lexicon) {
    for (size_t idx : lexicon.candidates(tokens[pos])) {
        const LexiconEntry& e = lexicon.entries()[idx];
        if (pos + e.phrase.size() > tokens.size()) continue;
        bool ok = true;
        for (size_t k = 1; k < e.phrase.size(); ++k) {
            if (tokens[pos + k] != e.phrase[k]) {
                ok = false;
                break;
            }
        }
        if (ok) return idx;
    }
    return lexicon.entries().size();
}

}  // namespace

KeywordHits match_keywords(std::span<const std::string> tokens, const Lexicon& lexicon,
                           std::vector<MatchSpan>* spans) {
    KeywordHits hits;
    size_t pos = 0;
    while (pos < tokens.size()) {
        const size_t idx = match_at(tokens, pos, lexicon);
        if (idx == lexicon.entries().size()) {
            ++pos;
            continue;
        }
        const LexiconEntry& e = lexicon.entries()[idx];
        hits.counts[e.category] += 1;
        (e.kind == KeywordKind::Drug ? hits.alpha : hits.beta) += 1;
        if (spans) spans->push_back(MatchSpan{pos, e.phrase.size(), idx});
        pos += e.phrase.size();
    }
    hits.both = (hits.alpha > 0 && hits.beta > 0) ? 1 : 0;
    return hits;
}

bool has_any_keyword(std::span<const std::string> tokens, const Lexicon& lexicon) {
    for (size_t pos = 0; pos < tokens.size(); ++pos) {
        if (match_at(tokens, pos, lexicon) != lexicon.entries().size()) return true;
    }
    return false;
}

}  // namespace dtx
