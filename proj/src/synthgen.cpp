#include "dtx/synthgen.hpp"

#include <omp.h>

#include <limits>
#include <sstream>

#include "dtx/rng.hpp"

namespace dtx {

namespace {

std::vector<std::string> split_ws(const std::string& s) {
    std::vector<std::string> out;
    std::istringstream iss(s);
    std::string tok;
    while (iss >> tok) out.push_back(tok);
    return out;
}

// Uniform draw from pool excluding `original`; falls back to the original
// when it is the only pool member.
const std::string& draw_replacement(const std::vector<std::string>& pool,
                                    const std::string& original, Rng& rng) {
    size_t original_idx = pool.size();
    for (size_t i = 0; i < pool.size(); ++i) {
        if (pool[i] == original) {
            original_idx = i;
            break;
        }
    }
    const size_t n = original_idx < pool.size() ? pool.size() - 1 : pool.size();
    if (n == 0) return original;
    size_t pick = rng.uniform_index(n);
    if (original_idx < pool.size() && pick >= original_idx) ++pick;
    return pool[pick];
}

SyntheticText make_variant(const LabeledText& source, const std::vector<MatchSpan>& spans,
                           const Lexicon& lexicon, const SynthConfig& config, Rng& rng,
                           size_t variant_idx) {
    SyntheticText synth;
    synth.source_id = source.id_str;
    synth.record.label = source.label;
    synth.record.id_str = source.id_str + "-s" + std::to_string(variant_idx);

    std::vector<std::string>& out = synth.record.tokens;
    size_t pos = 0;
    for (const MatchSpan& span : spans) {
        for (; pos < span.start; ++pos) out.push_back(source.tokens[pos]);
        const LexiconEntry& entry = lexicon.entries()[span.entry_index];
        const auto& pool =
            entry.kind == KeywordKind::Use ? config.use_pool : config.drug_pool;
        const std::string original = entry.phrase_text();
        const std::string& substitute = draw_replacement(pool, original, rng);
        const std::vector<std::string> sub_tokens = split_ws(substitute);
        synth.replacements.push_back(
            Replacement{original, substitute, entry.kind, out.size(), sub_tokens.size()});
        out.insert(out.end(), sub_tokens.begin(), sub_tokens.end());
        pos += span.length;
    }
    for (; pos < source.tokens.size(); ++pos) out.push_back(source.tokens[pos]);
    return synth;
}

}  // namespace

SynthBatch generate_synthetic(const std::vector<LabeledText>& sources, const SynthConfig& config,
                              const Lexicon& lexicon) {
    SynthConfig cfg = config;
    if (cfg.use_pool.empty()) cfg.use_pool = lexicon.phrases_of_kind(KeywordKind::Use);
    if (cfg.drug_pool.empty()) cfg.drug_pool = lexicon.phrases_of_kind(KeywordKind::Drug);

    SynthBatch batch;
    batch.originals = sources;
    const size_t m = cfg.variants_per_source;
    batch.synthetics.resize(sources.size() * m);

    const auto n = static_cast<int64_t>(sources.size());
    int64_t no_keywords = 0;
#pragma omp parallel for schedule(static) reduction(+ : no_keywords)
    for (int64_t i = 0; i < n; ++i) {
        const LabeledText& source = sources[i];
        std::vector<MatchSpan> spans;
        match_keywords(source.tokens, lexicon, &spans);
        if (spans.empty()) ++no_keywords;
        Rng rng(mix_seed(cfg.seed, static_cast<uint64_t>(i)));
        for (size_t j = 0; j < m; ++j) {
            batch.synthetics[static_cast<size_t>(i) * m + j] =
                make_variant(source, spans, lexicon, cfg, rng, j);
        }
    }
    batch.sources_without_keywords = static_cast<size_t>(no_keywords);
    return batch;
}

double BalanceReport::original_ratio() const {
    if (original_negative == 0) return std::numeric_limits<double>::quiet_NaN();
    return static_cast<double>(original_positive) / static_cast<double>(original_negative);
}

double BalanceReport::total_ratio() const {
    if (total_negative == 0) return std::numeric_limits<double>::quiet_NaN();
    return static_cast<double>(total_positive) / static_cast<double>(total_negative);
}

BalanceReport balance_report(const SynthBatch& batch) {
    BalanceReport report;
    for (const LabeledText& t : batch.originals) {
        (t.label == 1 ? report.original_positive : report.original_negative) += 1;
    }
    report.total_positive = report.original_positive;
    report.total_negative = report.original_negative;
    for (const SyntheticText& s : batch.synthetics) {
        (s.record.label == 1 ? report.total_positive : report.total_negative) += 1;
    }
    return report;
}

}  // namespace dtx
