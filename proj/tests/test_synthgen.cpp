#include <doctest.h>

#include "dtx/synthgen.hpp"
#include "test_util.hpp"

using namespace dtx;

namespace {

const Lexicon& default_lexicon() {
    static Lexicon lex = Lexicon::load(std::string(DTX_DATA_DIR) + "/lexicon.csv");
    return lex;
}

// Tokens with every keyword span removed, using freshly matched spans for the
// source and recorded replacement positions for the synthetic.
std::vector<std::string> residual_source(const LabeledText& t, const Lexicon& lex) {
    std::vector<MatchSpan> spans;
    match_keywords(t.tokens, lex, &spans);
    std::vector<std::string> out;
    size_t pos = 0;
    for (const MatchSpan& s : spans) {
        for (; pos < s.start; ++pos) out.push_back(t.tokens[pos]);
        pos += s.length;
    }
    for (; pos < t.tokens.size(); ++pos) out.push_back(t.tokens[pos]);
    return out;
}

std::vector<std::string> residual_synthetic(const SyntheticText& s) {
    std::vector<std::string> out;
    size_t pos = 0;
    for (const Replacement& r : s.replacements) {
        for (; pos < r.out_start; ++pos) out.push_back(s.record.tokens[pos]);
        pos += r.out_length;
    }
    for (; pos < s.record.tokens.size(); ++pos) out.push_back(s.record.tokens[pos]);
    return out;
}

bool phrase_exists_with_kind(const std::string& phrase, KeywordKind kind, const Lexicon& lex) {
    for (const auto& e : lex.entries()) {
        if (e.kind == kind && e.phrase_text() == phrase) return true;
    }
    return false;
}

}  // namespace

TEST_SUITE("synthgen") {

TEST_CASE("labels, kinds and residual tokens are preserved") {
    const Lexicon& lex = default_lexicon();
    std::vector<LabeledText> sources = {
        {"t1", {"smoke", "weed", "everyday"}, 1},
        {"t2", {"special", "k", "is", "wild"}, 1},
        {"t3", {"quiet", "evening", "walk"}, 0},
        {"t4", {"snort", "nose", "candy", "then", "vape"}, 1},
    };
    SynthConfig config;
    config.variants_per_source = 5;
    config.seed = 31;
    const SynthBatch batch = generate_synthetic(sources, config, lex);
    CHECK(batch.synthetics.size() == sources.size() * 5);
    CHECK(batch.sources_without_keywords == 1);  // t3

    for (const SyntheticText& s : batch.synthetics) {
        const auto src = std::find_if(sources.begin(), sources.end(),
                                      [&](const LabeledText& t) { return t.id_str == s.source_id; });
        REQUIRE(src != sources.end());
        CHECK(s.record.label == src->label);
        CHECK(residual_synthetic(s) == residual_source(*src, lex));
        for (const Replacement& r : s.replacements) {
            bool found_orig = false, found_sub = false;
            const KeywordKind orig = kind_of_phrase(r.original, lex, found_orig);
            const KeywordKind sub = kind_of_phrase(r.substitute, lex, found_sub);
            REQUIRE(found_orig);
            REQUIRE(found_sub);
            CHECK(orig == sub);
        }
    }
}

TEST_CASE("replacement differs from the original phrase") {
    const Lexicon& lex = default_lexicon();
    std::vector<LabeledText> sources = {{"t", {"smoke", "weed", "everyday"}, 1}};
    SynthConfig config;
    config.variants_per_source = 50;
    config.seed = 5;
    const SynthBatch batch = generate_synthetic(sources, config, lex);
    for (const SyntheticText& s : batch.synthetics) {
        for (const Replacement& r : s.replacements) CHECK(r.original != r.substitute);
    }
}

TEST_CASE("the published substitution pattern is producible") {
    // Some seed must turn "smoke weed everyday" into snort + cocaine with
    // both keywords substituted independently.
    const Lexicon& lex = default_lexicon();
    std::vector<LabeledText> sources = {{"t", {"smoke", "weed", "everyday"}, 1}};
    SynthConfig config;
    config.variants_per_source = 1;
    bool found = false;
    for (uint64_t seed = 0; seed < 200000 && !found; ++seed) {
        config.seed = seed;
        const SynthBatch batch = generate_synthetic(sources, config, lex);
        const std::vector<std::string>& tokens = batch.synthetics[0].record.tokens;
        found = tokens == std::vector<std::string>{"snort", "cocaine", "everyday"};
    }
    CHECK(found);
}

TEST_CASE("zero variants yields no synthetics") {
    std::vector<LabeledText> sources = {{"t", {"smoke", "weed"}, 1}};
    SynthConfig config;
    config.variants_per_source = 0;
    const SynthBatch batch = generate_synthetic(sources, config, default_lexicon());
    CHECK(batch.synthetics.empty());
    CHECK(batch.originals.size() == 1);
}

TEST_CASE("generation is deterministic in the seed") {
    std::vector<LabeledText> sources = {{"a", {"smoke", "weed"}, 1},
                                        {"b", {"inject", "heroin", "now"}, 1}};
    SynthConfig config;
    config.variants_per_source = 3;
    config.seed = 77;
    const SynthBatch b1 = generate_synthetic(sources, config, default_lexicon());
    const SynthBatch b2 = generate_synthetic(sources, config, default_lexicon());
    REQUIRE(b1.synthetics.size() == b2.synthetics.size());
    for (size_t i = 0; i < b1.synthetics.size(); ++i)
        CHECK(b1.synthetics[i].record.tokens == b2.synthetics[i].record.tokens);
}

TEST_CASE("balance report reproduces the class arithmetic") {
    SynthBatch batch;
    for (int i = 0; i < 372; ++i) batch.originals.push_back({"p", {}, 1});
    for (int i = 0; i < 2289; ++i) batch.originals.push_back({"n", {}, 0});
    const BalanceReport report = balance_report(batch);
    CHECK(report.original_positive == 372);
    CHECK(report.original_negative == 2289);
    CHECK(report.original_positive + report.original_negative == 2661);
    CHECK(report.original_ratio() == doctest::Approx(372.0 / 2289.0).epsilon(1e-12));

    SynthBatch synth_batch;
    for (int i = 0; i < 5352; ++i) synth_batch.originals.push_back({"p", {}, 1});
    for (int i = 0; i < 6790; ++i) synth_batch.originals.push_back({"n", {}, 0});
    const BalanceReport r2 = balance_report(synth_batch);
    CHECK(r2.total_positive + r2.total_negative == 12142);

    SynthBatch even;
    even.originals.push_back({"p", {}, 1});
    even.originals.push_back({"n", {}, 0});
    CHECK(balance_report(even).original_ratio() == doctest::Approx(1.0));
}

}  // TEST_SUITE
