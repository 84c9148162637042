#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "dtx/corpus.hpp"

namespace dtx {

using Transaction = std::vector<std::string>;  // sorted, deduplicated tags

struct TagStats {
    double min = 0, q1 = 0, median = 0, mean = 0, q3 = 0, max = 0;  // tags per transaction
    int64_t dropped_empty = 0;
    std::map<std::string, int64_t> tag_frequency;  // transactions containing each tag

    std::string to_csv() const;
};

// One transaction per classified record: the lowercased parent categories of
// every keyword present plus drug_positive when the classifier said so.
// drug_negative and possibly_sensitive are never emitted; records with empty
// tag sets are dropped and counted.
std::vector<Transaction> build_transactions(const std::vector<PostRecord>& records,
                                            const Lexicon& lexicon, TagStats* stats = nullptr);

struct ItemsetCounts {
    std::map<Transaction, int64_t> counts;  // frequent itemsets (sorted tags) -> count
    int64_t n_transactions = 0;
};

// Level-wise frequent-itemset mining with downward-closure pruning. An
// itemset is frequent iff count / n >= min_support. Results are exact.
// The parallel variant shards support counting over transactions; integer
// count merges make it bit-identical to the serial one.
ItemsetCounts apriori_serial(const std::vector<Transaction>& transactions, double min_support,
                             size_t max_len);
ItemsetCounts apriori(const std::vector<Transaction>& transactions, double min_support,
                      size_t max_len);

struct Rule {
    Transaction antecedent;
    Transaction consequent;
    double support = 0.0;     // count / n
    double confidence = 0.0;  // support(A u C) / support(A)
    double lift = 0.0;        // confidence / support(C)
    int64_t count = 0;

    std::string antecedent_text() const;  // tags joined with ';'
    std::string consequent_text() const;
};

// All rules A -> C with A u C frequent, A and C non-empty and disjoint, and
// confidence >= min_confidence. Sorted by confidence descending (ties:
// support descending, then antecedent, then consequent).
std::vector<Rule> gen_rules(const ItemsetCounts& itemsets, double min_confidence);

// Rule count per (min_support, min_confidence) grid cell.
std::vector<std::vector<int64_t>> sensitivity_sweep(const std::vector<Transaction>& transactions,
                                                    std::span<const double> support_grid,
                                                    std::span<const double> confidence_grid,
                                                    size_t max_len);

struct HitsScores {
    // Ranked descending by score; ties ordered by tag name.
    std::vector<std::pair<std::string, double>> hubs;
    std::vector<std::pair<std::string, double>> authorities;
};

// Tag-level link analysis over the rule set: an edge a -> c for every
// antecedent tag / consequent tag pair, deduplicated. Iterates
// authority = A^T hub, hub = A authority with L2 normalization until the
// largest component change is below 1e-10. Throws on an empty rule set.
HitsScores hits(std::span<const Rule> rules);

}  // namespace dtx
