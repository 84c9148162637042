#include "dtx/rulemine.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

namespace dtx {

namespace {

std::string lowercase(std::string s) {
    for (char& c : s) {
        if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
    }
    return s;
}

// Linear-interpolation quantile over a sorted sample (R type 7).
double quantile(const std::vector<double>& sorted, double p) {
    if (sorted.empty()) return 0.0;
    const double h = p * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<size_t>(h);
    if (lo + 1 >= sorted.size()) return sorted.back();
    return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[lo + 1] - sorted[lo]);
}

}  // namespace

std::string TagStats::to_csv() const {
    std::ostringstream os;
    os << "statistic,tags_per_transaction\n";
    os << "min," << min << "\n";
    os << "q1," << q1 << "\n";
    os << "median," << median << "\n";
    os << "mean," << mean << "\n";
    os << "q3," << q3 << "\n";
    os << "max," << max << "\n";
    return os.str();
}

std::vector<Transaction> build_transactions(const std::vector<PostRecord>& records,
                                            const Lexicon& lexicon, TagStats* stats) {
    std::vector<Transaction> transactions;
    transactions.reserve(records.size());
    int64_t dropped = 0;
    for (const PostRecord& r : records) {
        std::set<std::string> tags;
        for (const auto& [category, count] : r.hits.counts) {
            if (count > 0) tags.insert(lowercase(category));
        }
        if (r.classification == Classification::Positive) tags.insert("drug_positive");
        if (tags.empty()) {
            ++dropped;
            continue;
        }
        transactions.emplace_back(tags.begin(), tags.end());
    }
    (void)lexicon;

    if (stats) {
        stats->dropped_empty = dropped;
        std::vector<double> sizes;
        sizes.reserve(transactions.size());
        double sum = 0.0;
        for (const Transaction& t : transactions) {
            sizes.push_back(static_cast<double>(t.size()));
            sum += static_cast<double>(t.size());
            for (const std::string& tag : t) stats->tag_frequency[tag] += 1;
        }
        std::sort(sizes.begin(), sizes.end());
        stats->min = sizes.empty() ? 0.0 : sizes.front();
        stats->max = sizes.empty() ? 0.0 : sizes.back();
        stats->q1 = quantile(sizes, 0.25);
        stats->median = quantile(sizes, 0.5);
        stats->q3 = quantile(sizes, 0.75);
        stats->mean = sizes.empty() ? 0.0 : sum / static_cast<double>(sizes.size());
    }
    return transactions;
}

namespace {

bool meets_support(int64_t count, int64_t n, double min_support) {
    return static_cast<double>(count) / static_cast<double>(n) >= min_support;
}

// Itemsets as sorted int vectors over a deterministic tag -> id mapping.
struct ItemSpace {
    std::vector<std::string> id_to_tag;  // sorted tag names
    std::unordered_map<std::string, int> tag_to_id;

    explicit ItemSpace(const std::vector<Transaction>& transactions) {
        std::set<std::string> all;
        for (const Transaction& t : transactions)
            for (const std::string& tag : t) all.insert(tag);
        id_to_tag.assign(all.begin(), all.end());
        for (size_t i = 0; i < id_to_tag.size(); ++i)
            tag_to_id.emplace(id_to_tag[i], static_cast<int>(i));
    }
};

bool is_subset(const std::vector<int>& needle, const std::vector<int>& haystack) {
    size_t j = 0;
    for (int item : needle) {
        while (j < haystack.size() && haystack[j] < item) ++j;
        if (j == haystack.size() || haystack[j] != item) return false;
        ++j;
    }
    return true;
}

// Counts candidate occurrences over the transaction shard [begin, end).
void count_shard(const std::vector<std::vector<int>>& transactions,
                 const std::vector<std::vector<int>>& candidates, size_t begin, size_t end,
                 std::vector<int64_t>& counts) {
    for (size_t t = begin; t < end; ++t) {
        for (size_t c = 0; c < candidates.size(); ++c) {
            if (candidates[c].size() <= transactions[t].size() &&
                is_subset(candidates[c], transactions[t]))
                counts[c] += 1;
        }
    }
}

std::vector<int64_t> count_candidates(const std::vector<std::vector<int>>& transactions,
                                      const std::vector<std::vector<int>>& candidates,
                                      bool parallel) {
    std::vector<int64_t> counts(candidates.size(), 0);
    if (!parallel) {
        count_shard(transactions, candidates, 0, transactions.size(), counts);
        return counts;
    }
#pragma omp parallel
    {
        std::vector<int64_t> local(candidates.size(), 0);
        const auto n = static_cast<int64_t>(transactions.size());
#pragma omp for schedule(static)
        for (int64_t t = 0; t < n; ++t) {
            for (size_t c = 0; c < candidates.size(); ++c) {
                if (candidates[c].size() <= transactions[t].size() &&
                    is_subset(candidates[c], transactions[t]))
                    local[c] += 1;
            }
        }
#pragma omp critical
        for (size_t c = 0; c < candidates.size(); ++c) counts[c] += local[c];
    }
    return counts;
}

ItemsetCounts apriori_impl(const std::vector<Transaction>& transactions, double min_support,
                           size_t max_len, bool parallel) {
    if (transactions.empty()) throw std::invalid_argument("apriori: empty transaction list");
    if (min_support <= 0.0 || min_support > 1.0)
        throw std::invalid_argument("apriori: min_support must be in (0, 1]");
    if (max_len < 1) throw std::invalid_argument("apriori: max_len must be >= 1");

    const ItemSpace space(transactions);
    const auto n = static_cast<int64_t>(transactions.size());
    std::vector<std::vector<int>> encoded(transactions.size());
    for (size_t t = 0; t < transactions.size(); ++t) {
        encoded[t].reserve(transactions[t].size());
        for (const std::string& tag : transactions[t])
            encoded[t].push_back(space.tag_to_id.at(tag));
        std::sort(encoded[t].begin(), encoded[t].end());
    }

    ItemsetCounts result;
    result.n_transactions = n;

    // Level 1.
    std::vector<std::vector<int>> frequent;
    {
        std::vector<std::vector<int>> singletons;
        for (int i = 0; i < static_cast<int>(space.id_to_tag.size()); ++i)
            singletons.push_back({i});
        const std::vector<int64_t> counts = count_candidates(encoded, singletons, parallel);
        for (size_t c = 0; c < singletons.size(); ++c) {
            if (meets_support(counts[c], n, min_support)) {
                frequent.push_back(singletons[c]);
                result.counts.emplace(Transaction{space.id_to_tag[singletons[c][0]]}, counts[c]);
            }
        }
    }

    // Levels 2..max_len: join (k-1)-sets sharing a prefix, prune by
    // downward closure, then count.
    for (size_t k = 2; k <= max_len && frequent.size() >= 2; ++k) {
        std::set<std::vector<int>> prev(frequent.begin(), frequent.end());
        std::vector<std::vector<int>> candidates;
        for (size_t a = 0; a < frequent.size(); ++a) {
            for (size_t b = a + 1; b < frequent.size(); ++b) {
                if (!std::equal(frequent[a].begin(), frequent[a].end() - 1, frequent[b].begin(),
                                frequent[b].end() - 1))
                    continue;
                std::vector<int> joined = frequent[a];
                joined.push_back(std::max(frequent[a].back(), frequent[b].back()));
                joined[joined.size() - 2] = std::min(frequent[a].back(), frequent[b].back());

                bool all_subsets_frequent = true;
                std::vector<int> subset(joined.begin() + 1, joined.end());
                for (size_t drop = 0; drop + 1 < joined.size(); ++drop) {
                    // subset currently omits joined[drop]
                    if (!prev.count(subset)) {
                        all_subsets_frequent = false;
                        break;
                    }
                    subset[drop] = joined[drop];
                }
                if (all_subsets_frequent) candidates.push_back(std::move(joined));
            }
        }
        if (candidates.empty()) break;
        std::sort(candidates.begin(), candidates.end());
        candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());

        const std::vector<int64_t> counts = count_candidates(encoded, candidates, parallel);
        frequent.clear();
        for (size_t c = 0; c < candidates.size(); ++c) {
            if (!meets_support(counts[c], n, min_support)) continue;
            frequent.push_back(candidates[c]);
            Transaction named;
            named.reserve(candidates[c].size());
            for (int id : candidates[c]) named.push_back(space.id_to_tag[id]);
            result.counts.emplace(std::move(named), counts[c]);
        }
    }
    return result;
}

}  // namespace

ItemsetCounts apriori_serial(const std::vector<Transaction>& transactions, double min_support,
                             size_t max_len) {
    return apriori_impl(transactions, min_support, max_len, false);
}

ItemsetCounts apriori(const std::vector<Transaction>& transactions, double min_support,
                      size_t max_len) {
    return apriori_impl(transactions, min_support, max_len, true);
}

std::string Rule::antecedent_text() const {
    std::string out;
    for (size_t i = 0; i < antecedent.size(); ++i) {
        if (i) out += ';';
        out += antecedent[i];
    }
    return out;
}

std::string Rule::consequent_text() const {
    std::string out;
    for (size_t i = 0; i < consequent.size(); ++i) {
        if (i) out += ';';
        out += consequent[i];
    }
    return out;
}

std::vector<Rule> gen_rules(const ItemsetCounts& itemsets, double min_confidence) {
    std::vector<Rule> rules;
    const auto n = static_cast<double>(itemsets.n_transactions);

    for (const auto& [itemset, count] : itemsets.counts) {
        const size_t len = itemset.size();
        if (len < 2) continue;
        // Every non-empty proper subset as antecedent.
        for (uint32_t mask = 1; mask + 1 < (1u << len); ++mask) {
            Rule rule;
            for (size_t i = 0; i < len; ++i) {
                ((mask >> i) & 1 ? rule.antecedent : rule.consequent).push_back(itemset[i]);
            }
            const auto a_it = itemsets.counts.find(rule.antecedent);
            const auto c_it = itemsets.counts.find(rule.consequent);
            if (a_it == itemsets.counts.end() || c_it == itemsets.counts.end())
                continue;  // unreachable for exact counts (downward closure)
            rule.count = count;
            rule.support = static_cast<double>(count) / n;
            rule.confidence = static_cast<double>(count) / static_cast<double>(a_it->second);
            if (rule.confidence < min_confidence) continue;
            rule.lift = rule.confidence / (static_cast<double>(c_it->second) / n);
            rules.push_back(std::move(rule));
        }
    }

    std::sort(rules.begin(), rules.end(), [](const Rule& a, const Rule& b) {
        if (a.confidence != b.confidence) return a.confidence > b.confidence;
        if (a.support != b.support) return a.support > b.support;
        if (a.antecedent != b.antecedent) return a.antecedent < b.antecedent;
        return a.consequent < b.consequent;
    });
    return rules;
}

std::vector<std::vector<int64_t>> sensitivity_sweep(const std::vector<Transaction>& transactions,
                                                    std::span<const double> support_grid,
                                                    std::span<const double> confidence_grid,
                                                    size_t max_len) {
    if (support_grid.empty() || confidence_grid.empty())
        throw std::invalid_argument("sweep: empty grid");
    std::vector<std::vector<int64_t>> matrix(support_grid.size(),
                                             std::vector<int64_t>(confidence_grid.size(), 0));
    for (size_t i = 0; i < support_grid.size(); ++i) {
        const ItemsetCounts itemsets = apriori(transactions, support_grid[i], max_len);
        for (size_t j = 0; j < confidence_grid.size(); ++j) {
            matrix[i][j] = static_cast<int64_t>(gen_rules(itemsets, confidence_grid[j]).size());
        }
    }
    return matrix;
}

HitsScores hits(std::span<const Rule> rules) {
    if (rules.empty()) throw std::invalid_argument("hits: empty rule set");

    std::set<std::string> tag_set;
    for (const Rule& r : rules) {
        for (const std::string& t : r.antecedent) tag_set.insert(t);
        for (const std::string& t : r.consequent) tag_set.insert(t);
    }
    std::vector<std::string> tags(tag_set.begin(), tag_set.end());
    std::unordered_map<std::string, size_t> ids;
    for (size_t i = 0; i < tags.size(); ++i) ids.emplace(tags[i], i);

    const size_t n = tags.size();
    std::vector<std::vector<unsigned char>> adj(n, std::vector<unsigned char>(n, 0));
    for (const Rule& r : rules) {
        for (const std::string& a : r.antecedent)
            for (const std::string& c : r.consequent) adj[ids.at(a)][ids.at(c)] = 1;
    }

    auto normalize = [](std::vector<double>& v) {
        double norm = 0.0;
        for (double x : v) norm += x * x;
        norm = std::sqrt(norm);
        if (norm > 0.0)
            for (double& x : v) x /= norm;
    };

    std::vector<double> hub(n, 1.0 / std::sqrt(static_cast<double>(n)));
    std::vector<double> auth(n, 0.0);
    for (int iter = 0; iter < 100000; ++iter) {
        std::vector<double> new_auth(n, 0.0);
        for (size_t i = 0; i < n; ++i) {
            if (hub[i] == 0.0) continue;
            for (size_t j = 0; j < n; ++j)
                if (adj[i][j]) new_auth[j] += hub[i];
        }
        normalize(new_auth);
        std::vector<double> new_hub(n, 0.0);
        for (size_t i = 0; i < n; ++i) {
            for (size_t j = 0; j < n; ++j)
                if (adj[i][j]) new_hub[i] += new_auth[j];
        }
        normalize(new_hub);

        double delta = 0.0;
        for (size_t i = 0; i < n; ++i) {
            delta = std::max(delta, std::abs(new_auth[i] - auth[i]));
            delta = std::max(delta, std::abs(new_hub[i] - hub[i]));
        }
        auth = std::move(new_auth);
        hub = std::move(new_hub);
        if (delta < 1e-10) break;
    }

    HitsScores scores;
    for (size_t i = 0; i < n; ++i) {
        scores.hubs.emplace_back(tags[i], hub[i]);
        scores.authorities.emplace_back(tags[i], auth[i]);
    }
    auto rank = [](std::vector<std::pair<std::string, double>>& v) {
        std::sort(v.begin(), v.end(), [](const auto& a, const auto& b) {
            if (a.second != b.second) return a.second > b.second;
            return a.first < b.first;
        });
    };
    rank(scores.hubs);
    rank(scores.authorities);
    return scores;
}

}  // namespace dtx
