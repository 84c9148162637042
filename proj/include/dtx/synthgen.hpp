#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dtx/lexicon.hpp"

namespace dtx {

struct LabeledText {
    std::string id_str;
    std::vector<std::string> tokens;
    int label = 0;  // 1 = drug-positive, 0 = drug-negative
};

struct SynthConfig {
    size_t variants_per_source = 4;
    uint64_t seed = 0;

    // Replacement pools; filled from the lexicon when empty.
    std::vector<std::string> use_pool;
    std::vector<std::string> drug_pool;
};

struct Replacement {
    std::string original;     // phrase text replaced
    std::string substitute;   // phrase text inserted
    KeywordKind kind = KeywordKind::Drug;  // pool both phrases were drawn from
    size_t out_start = 0;     // token position in the synthetic text
    size_t out_length = 0;
};

struct SyntheticText {
    LabeledText record;
    std::string source_id;
    std::vector<Replacement> replacements;
};

struct SynthBatch {
    std::vector<LabeledText> originals;
    std::vector<SyntheticText> synthetics;
    size_t sources_without_keywords = 0;
};

// For each source, emits `variants_per_source` synthetic texts in which every
// matched use-keyword span is replaced by a random use keyword and every
// matched drug-keyword span by a random drug keyword (sampled uniformly from
// the pool excluding the original phrase). Non-keyword tokens are copied
// byte-identically; labels are preserved. Each source draws from an
// independent RNG stream derived from (seed, source index), so the output is
// deterministic and independent of scheduling. Sources with no keyword spans
// are emitted unchanged.
SynthBatch generate_synthetic(const std::vector<LabeledText>& sources, const SynthConfig& config,
                              const Lexicon& lexicon);

struct BalanceReport {
    int64_t original_positive = 0;
    int64_t original_negative = 0;
    int64_t total_positive = 0;  // originals + synthetics
    int64_t total_negative = 0;

    double original_ratio() const;  // positive / negative
    double total_ratio() const;
};

BalanceReport balance_report(const SynthBatch& batch);

}  // namespace dtx
