#include <doctest.h>

#include <set>

#include "dtx/corpus.hpp"
#include "dtx/rng.hpp"

using namespace dtx;

namespace {

const Lexicon& default_lexicon() {
    static Lexicon lex = Lexicon::load(std::string(DTX_DATA_DIR) + "/lexicon.csv");
    return lex;
}

const CleaningRules& default_rules() {
    static CleaningRules rules = CleaningRules::load(std::string(DTX_DATA_DIR) + "/stopwords.txt",
                                                     std::string(DTX_DATA_DIR) + "/contractions.csv");
    return rules;
}

PostRecord make_record(std::string id, std::string raw, std::string lang = "en") {
    PostRecord r;
    r.id_str = std::move(id);
    r.original_text = std::move(raw);
    r.lang = std::move(lang);
    r.text = clean_text(r.original_text, default_rules());
    return r;
}

std::string join(const std::vector<std::string>& tokens) {
    std::string out;
    for (size_t i = 0; i < tokens.size(); ++i) {
        if (i) out += ' ';
        out += tokens[i];
    }
    return out;
}

// Raw strings with hashtags, urls, mentions, emojis, digits, contractions.
std::string random_raw(Rng& rng) {
    static const std::vector<std::string> pieces = {
        "Smoke",     "WEED",          "everyday!!!", "#blessed",  "http://t.co/x",
        "@user",     "RT",            "420",         "\xF0\x9F\x94\xA5" /* fire emoji */,
        "cant",      "don't",         "i'm",         "special",   "k",
        "hello,",    "world...",      "N0ise",       "tabs",      "shoot",
        "up",        "www.spam.com",  "#tag\xF0\x9F\x98\x80mid",  "caf\xC3\xA9",
        "\xE2\x9C\x85done",           "MiXeD",       "a",         "the"};
    std::string out;
    const size_t len = rng.uniform_index(12);
    for (size_t i = 0; i < len; ++i) {
        if (i) out += rng.uniform_index(4) == 0 ? "  " : " ";
        out += pieces[rng.uniform_index(pieces.size())];
        if (rng.uniform_index(6) == 0) out += "\n";
    }
    return out;
}

}  // namespace

TEST_SUITE("corpus") {

TEST_CASE("clean strips markup down to lowercase tokens") {
    const auto tokens = clean_text("Smoke WEED everyday!!! #blessed http://t.co/x", default_rules());
    CHECK(tokens == std::vector<std::string>{"smoke", "weed", "everyday"});
}

TEST_CASE("clean of empty input is empty") {
    CHECK(clean_text("", default_rules()).empty());
}

TEST_CASE("clean removes mentions, reserved words, digits and emojis") {
    const auto tokens = clean_text("@user RT 420 \xF0\x9F\x94\xA5", default_rules());
    CHECK(tokens.empty());
}

TEST_CASE("clean expands contractions after punctuation stripping") {
    const auto tokens = clean_text("I can't stop", default_rules());
    CHECK(tokens == std::vector<std::string>{"i", "can", "not", "stop"});
}

TEST_CASE("shipped cleaning defaults are self-consistent") {
    const CleaningRules& rules = default_rules();
    CHECK(rules.stopwords.count("rt") == 1);
    for (const auto& [key, expansion] : rules.contractions) {
        CHECK(rules.stopwords.count(key) == 0);
        for (const std::string& word : expansion) {
            // Expansion output must survive a re-clean unchanged.
            CHECK(rules.stopwords.count(word) == 0);
            CHECK(rules.contractions.count(word) == 0);
            for (char c : word) CHECK((c >= 'a' && c <= 'z'));
        }
    }
    // Stopwords must not swallow lexicon keywords.
    for (const auto& e : default_lexicon().entries()) {
        for (const std::string& tok : e.phrase) {
            if (tok == "in" || tok == "the" || tok == "with") continue;  // multiword oddities
            CHECK(rules.stopwords.count(tok) == 0);
        }
    }
}

TEST_CASE("clean is idempotent") {
    Rng rng(23);
    for (int trial = 0; trial < 300; ++trial) {
        const std::string raw = random_raw(rng);
        const auto once = clean_text(raw, default_rules());
        const auto twice = clean_text(join(once), default_rules());
        CAPTURE(raw);
        CHECK(once == twice);
    }
}

TEST_CASE("row filters drop in order and count drops") {
    std::vector<PostRecord> records;
    records.push_back(make_record("1", "fume la weed", "fr"));
    records.push_back(make_record("2", "smoke weed everyday", "en"));
    records.push_back(make_record("3", "hello world", "en"));
    records.push_back(make_record("4", "", "en"));

    FunnelReport report = filter_rows_serial(records, default_lexicon());
    REQUIRE(records.size() == 1);
    CHECK(records[0].id_str == "2");
    CHECK(report.input == 4);
    CHECK(report.dropped_non_english == 1);
    CHECK(report.dropped_no_keyword == 1);
    CHECK(report.dropped_empty == 1);
    CHECK(report.output() == 1);
}

TEST_CASE("funnel counts always reconcile") {
    Rng rng(29);
    for (int trial = 0; trial < 30; ++trial) {
        std::vector<PostRecord> records;
        const size_t n = rng.uniform_index(40);
        for (size_t i = 0; i < n; ++i) {
            const std::string lang = rng.uniform_index(4) == 0 ? "fr" : "en";
            records.push_back(make_record(std::to_string(i), random_raw(rng), lang));
        }
        FunnelReport report = filter_rows(records, default_lexicon());
        CHECK(report.input == static_cast<int64_t>(n));
        CHECK(report.output() == static_cast<int64_t>(records.size()));
        CHECK(report.dropped_empty + report.dropped_non_english + report.dropped_no_keyword ==
              report.input - report.output());
        for (const PostRecord& r : records) {
            const KeywordHits hits = match_keywords(r.text, default_lexicon());
            CHECK(hits.alpha + hits.beta >= 1);
        }
    }
}

TEST_CASE("derive_attributes populates hits") {
    PostRecord r = make_record("1", "snort coke");
    derive_attributes(r, default_lexicon());
    CHECK(r.hits.category_count("snort") == 1);
    CHECK(r.hits.category_count("Cocaine") == 1);
    CHECK(r.hits.both == 1);

    PostRecord weed = make_record("2", "weed weed");
    derive_attributes(weed, default_lexicon());
    CHECK(weed.hits.category_count("Marijuana") == 2);
    CHECK(weed.hits.both == 0);

    PostRecord general = make_record("3", "all drugs should be illegal");
    derive_attributes(general, default_lexicon());
    CHECK(general.hits.category_count("General") == 1);
    CHECK(general.hits.beta == 0);
    CHECK(general.hits.both == 0);
}

TEST_CASE("candidate sets are disjoint and deterministic") {
    std::vector<PostRecord> records;
    records.push_back(make_record("both", "smoke weed everyday"));
    records.push_back(make_record("twice", "weed is my weed"));
    records.push_back(make_record("single1", "i like weed"));
    records.push_back(make_record("single2", "acid trip"));
    records.push_back(make_record("single3", "pure molly"));
    records.push_back(make_record("single4", "more coke please"));
    for (PostRecord& r : records) derive_attributes(r, default_lexicon());

    const CandidateSets sets = build_candidate_sets(records, default_lexicon(), 2, 99);
    REQUIRE(sets.set1.size() == 1);
    CHECK(sets.set1[0].id_str == "both");
    REQUIRE(sets.set2.size() == 1);
    CHECK(sets.set2[0].id_str == "twice");
    CHECK(sets.set3.size() == 2);
    CHECK_FALSE(sets.sample_truncated);

    std::set<std::string> ids;
    for (const auto* set : {&sets.set1, &sets.set2, &sets.set3})
        for (const PostRecord& r : *set) CHECK(ids.insert(r.id_str).second);

    const CandidateSets again = build_candidate_sets(records, default_lexicon(), 2, 99);
    REQUIRE(again.set3.size() == sets.set3.size());
    for (size_t i = 0; i < sets.set3.size(); ++i)
        CHECK(again.set3[i].id_str == sets.set3[i].id_str);

    const CandidateSets other_seed = build_candidate_sets(records, default_lexicon(), 2, 100);
    CHECK(other_seed.set3.size() == 2);
}

TEST_CASE("oversized sample request truncates with a flag") {
    std::vector<PostRecord> records;
    records.push_back(make_record("a", "i like weed"));
    for (PostRecord& r : records) derive_attributes(r, default_lexicon());
    const CandidateSets sets = build_candidate_sets(records, default_lexicon(), 10, 1);
    CHECK(sets.set3.size() == 1);
    CHECK(sets.sample_truncated);
}

}  // TEST_SUITE
