#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <map>
#include <set>

#include "dtx/rng.hpp"
#include "dtx/rulemine.hpp"
#include "test_util.hpp"

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

PostRecord classified(const std::string& raw, Classification c) {
    PostRecord r;
    r.original_text = raw;
    r.lang = "en";
    r.text = clean_text(raw, default_rules());
    derive_attributes(r, default_lexicon());
    r.classification = c;
    return r;
}

// Exhaustive subset counting over all itemsets up to max_len.
std::map<Transaction, int64_t> brute_force_itemsets(const std::vector<Transaction>& transactions,
                                                    double min_support, size_t max_len) {
    std::set<std::string> items;
    for (const Transaction& t : transactions)
        for (const std::string& item : t) items.insert(item);
    const std::vector<std::string> universe(items.begin(), items.end());
    const auto n = static_cast<int64_t>(transactions.size());

    std::map<Transaction, int64_t> result;
    const size_t u = universe.size();
    REQUIRE(u <= 20);
    for (uint32_t mask = 1; mask < (1u << u); ++mask) {
        Transaction itemset;
        for (size_t i = 0; i < u; ++i)
            if ((mask >> i) & 1) itemset.push_back(universe[i]);
        if (itemset.size() > max_len) continue;
        int64_t count = 0;
        for (const Transaction& t : transactions) {
            const std::set<std::string> bag(t.begin(), t.end());
            bool all = true;
            for (const std::string& item : itemset)
                if (!bag.count(item)) {
                    all = false;
                    break;
                }
            if (all) ++count;
        }
        if (static_cast<double>(count) / static_cast<double>(n) >= min_support)
            result.emplace(std::move(itemset), count);
    }
    return result;
}

std::vector<Transaction> random_db(Rng& rng, size_t max_items, size_t max_transactions) {
    const size_t n_items = 2 + rng.uniform_index(max_items - 1);
    const size_t n_transactions = 1 + rng.uniform_index(max_transactions);
    std::vector<Transaction> db;
    for (size_t t = 0; t < n_transactions; ++t) {
        std::set<std::string> items;
        const size_t len = 1 + rng.uniform_index(std::min<size_t>(n_items, 6));
        for (size_t i = 0; i < len; ++i)
            items.insert("i" + std::to_string(rng.uniform_index(n_items)));
        db.emplace_back(items.begin(), items.end());
    }
    return db;
}

}  // namespace

TEST_SUITE("rulemine") {

TEST_CASE("transactions carry parent categories and the positive tag") {
    std::vector<PostRecord> records;
    records.push_back(classified("smoke weed", Classification::Positive));
    records.push_back(classified("all drugs should be illegal", Classification::Negative));
    TagStats stats;
    const auto transactions = build_transactions(records, default_lexicon(), &stats);
    REQUIRE(transactions.size() == 2);
    CHECK(transactions[0] == Transaction{"drug_positive", "marijuana", "smoke"});
    CHECK(transactions[1] == Transaction{"general"});  // drug_negative pruned
    CHECK(stats.dropped_empty == 0);
    CHECK(stats.tag_frequency.at("marijuana") == 1);
}

TEST_CASE("records without tags are dropped and counted") {
    std::vector<PostRecord> records;
    records.push_back(classified("nothing to see", Classification::Negative));
    records.push_back(classified("smoke weed", Classification::Positive));
    TagStats stats;
    const auto transactions = build_transactions(records, default_lexicon(), &stats);
    CHECK(transactions.size() == 1);
    CHECK(stats.dropped_empty == 1);
}

TEST_CASE("single-tag corpus has mean one tag per transaction") {
    std::vector<PostRecord> records;
    for (int i = 0; i < 5; ++i) records.push_back(classified("i like weed", Classification::Negative));
    TagStats stats;
    build_transactions(records, default_lexicon(), &stats);
    CHECK(stats.mean == doctest::Approx(1.0));
    CHECK(stats.min == 1.0);
    CHECK(stats.max == 1.0);
    CHECK(stats.median == 1.0);
}

TEST_CASE("worked frequent-itemset example") {
    const std::vector<Transaction> db = {{"a", "b"}, {"a", "b"}, {"a", "c"}};
    const ItemsetCounts result = apriori_serial(db, 0.5, 5);
    CHECK(result.counts.size() == 3);
    CHECK(result.counts.at({"a"}) == 3);
    CHECK(result.counts.at({"b"}) == 2);
    CHECK(result.counts.at({"a", "b"}) == 2);
    CHECK(result.counts.count({"c"}) == 0);
}

TEST_CASE("full support keeps only universal items") {
    const std::vector<Transaction> db = {{"a", "b"}, {"a"}, {"a", "c"}};
    const ItemsetCounts result = apriori_serial(db, 1.0, 5);
    CHECK(result.counts.size() == 1);
    CHECK(result.counts.at({"a"}) == 3);
}

TEST_CASE("apriori equals exhaustive enumeration on random databases") {
    Rng rng(113);
    for (int trial = 0; trial < 25; ++trial) {
        const std::vector<Transaction> db = random_db(rng, 8, 200);
        const double min_support = 0.05 + 0.05 * static_cast<double>(rng.uniform_index(10));
        const size_t max_len = 1 + rng.uniform_index(5);
        const ItemsetCounts mined = apriori(db, min_support, max_len);
        const auto reference = brute_force_itemsets(db, min_support, max_len);
        CHECK(mined.counts == reference);
    }
}

TEST_CASE("apriori validates its inputs") {
    CHECK_THROWS_AS(apriori({}, 0.5, 5), std::invalid_argument);
    CHECK_THROWS_AS(apriori({{"a"}}, 0.0, 5), std::invalid_argument);
    CHECK_THROWS_AS(apriori({{"a"}}, 0.5, 0), std::invalid_argument);
}

TEST_CASE("rule arithmetic reproduces the published support") {
    // A rule observed 1984 times over 3,696,150 transactions.
    const double support = 1984.0 / 3696150.0;
    CHECK(std::abs(support - 0.0005367749) < 1e-8);
    CHECK(std::abs(support - 0.00053677) < 1e-8);
    // The other published counts reproduce their supports the same way.
    CHECK(std::abs(15292.0 / 3696150.0 - 0.0041372791) < 1e-8);
    CHECK(std::abs(33253.0 / 3696150.0 - 0.0089966611) < 1e-8);
}

TEST_CASE("generated rules satisfy their defining identities") {
    Rng rng(127);
    for (int trial = 0; trial < 10; ++trial) {
        const std::vector<Transaction> db = random_db(rng, 7, 120);
        const ItemsetCounts itemsets = apriori(db, 0.05, 4);
        const auto n = static_cast<double>(itemsets.n_transactions);
        const std::vector<Rule> rules = gen_rules(itemsets, 0.25);
        for (const Rule& rule : rules) {
            CHECK(rule.confidence >= 0.25);
            CHECK(rule.confidence <= 1.0 + 1e-12);
            CHECK(rule.support == doctest::Approx(static_cast<double>(rule.count) / n).epsilon(1e-12));
            // Recompute from raw counts.
            Transaction joined = rule.antecedent;
            joined.insert(joined.end(), rule.consequent.begin(), rule.consequent.end());
            std::sort(joined.begin(), joined.end());
            const int64_t joint = itemsets.counts.at(joined);
            const int64_t antecedent = itemsets.counts.at(rule.antecedent);
            const int64_t consequent = itemsets.counts.at(rule.consequent);
            CHECK(rule.count == joint);
            CHECK(std::abs(rule.confidence -
                           static_cast<double>(joint) / static_cast<double>(antecedent)) < 1e-9);
            CHECK(std::abs(rule.lift -
                           rule.confidence / (static_cast<double>(consequent) / n)) < 1e-9);
            // Antecedent and consequent are disjoint and non-empty.
            CHECK(!rule.antecedent.empty());
            CHECK(!rule.consequent.empty());
            for (const std::string& a : rule.antecedent)
                for (const std::string& c : rule.consequent) CHECK(a != c);
        }
        // Sorted by confidence descending.
        for (size_t i = 1; i < rules.size(); ++i)
            CHECK(rules[i - 1].confidence >= rules[i].confidence - 1e-15);
    }
}

TEST_CASE("ubiquitous consequents pin lift to confidence") {
    const std::vector<Transaction> db = {{"a", "b"}, {"b"}, {"a", "b"}, {"b", "c"}};
    const ItemsetCounts itemsets = apriori_serial(db, 0.25, 3);
    const std::vector<Rule> rules = gen_rules(itemsets, 0.1);
    bool checked = false;
    for (const Rule& rule : rules) {
        if (rule.consequent == Transaction{"b"}) {
            CHECK(rule.lift == doctest::Approx(rule.confidence).epsilon(1e-12));
            checked = true;
        }
    }
    CHECK(checked);
}

TEST_CASE("sweep matrix is monotone and matches per-cell reruns") {
    Rng rng(131);
    const std::vector<Transaction> db = random_db(rng, 6, 80);
    const std::vector<double> supports = {0.05, 0.15, 0.3};
    const std::vector<double> confidences = {0.2, 0.5, 0.8};
    const auto matrix = sensitivity_sweep(db, supports, confidences, 4);

    for (size_t i = 0; i < supports.size(); ++i) {
        for (size_t j = 0; j < confidences.size(); ++j) {
            const ItemsetCounts itemsets = apriori_serial(db, supports[i], 4);
            const auto cell = static_cast<int64_t>(gen_rules(itemsets, confidences[j]).size());
            CHECK(matrix[i][j] == cell);
            if (i > 0) CHECK(matrix[i][j] <= matrix[i - 1][j]);
            if (j > 0) CHECK(matrix[i][j] <= matrix[i][j - 1]);
        }
    }

    const auto single = sensitivity_sweep(db, std::vector<double>{0.1},
                                          std::vector<double>{0.4}, 4);
    const ItemsetCounts itemsets = apriori_serial(db, 0.1, 4);
    CHECK(single[0][0] == static_cast<int64_t>(gen_rules(itemsets, 0.4).size()));
}

TEST_CASE("a single rule yields one hub and one authority") {
    Rule rule;
    rule.antecedent = {"a"};
    rule.consequent = {"b"};
    const HitsScores scores = hits(std::vector<Rule>{rule});
    CHECK(scores.hubs[0] == std::pair<std::string, double>{"a", 1.0});
    CHECK(scores.authorities[0].first == "b");
    CHECK(scores.authorities[0].second == doctest::Approx(1.0));
    CHECK(scores.hubs[1].second == doctest::Approx(0.0));
    CHECK(scores.authorities[1].second == doctest::Approx(0.0));
}

TEST_CASE("a two-node cycle is symmetric") {
    Rule ab, ba;
    ab.antecedent = {"a"};
    ab.consequent = {"b"};
    ba.antecedent = {"b"};
    ba.consequent = {"a"};
    const HitsScores scores = hits(std::vector<Rule>{ab, ba});
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    for (const auto& [tag, score] : scores.hubs) CHECK(score == doctest::Approx(inv_sqrt2));
    for (const auto& [tag, score] : scores.authorities) CHECK(score == doctest::Approx(inv_sqrt2));
}

TEST_CASE("scores match dense power iteration on random graphs") {
    Rng rng(137);
    for (int trial = 0; trial < 20; ++trial) {
        const size_t n = 2 + rng.uniform_index(11);
        Eigen::MatrixXd a = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n),
                                                  static_cast<Eigen::Index>(n));
        std::vector<Rule> rules;
        for (size_t i = 0; i < n; ++i) {
            for (size_t j = 0; j < n; ++j) {
                if (i != j && rng.uniform_index(3) == 0) {
                    a(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = 1.0;
                    Rule r;
                    r.antecedent = {"t" + std::to_string(i)};
                    r.consequent = {"t" + std::to_string(j)};
                    rules.push_back(r);
                }
            }
        }
        if (rules.empty()) continue;

        // Tags sorted lexicographically ("t10" < "t2"), matching hits().
        std::set<std::string> tag_set;
        for (const Rule& r : rules) {
            tag_set.insert(r.antecedent[0]);
            tag_set.insert(r.consequent[0]);
        }
        const std::vector<std::string> tags(tag_set.begin(), tag_set.end());
        const size_t m = tags.size();
        Eigen::MatrixXd adj = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(m),
                                                    static_cast<Eigen::Index>(m));
        auto index_of = [&](const std::string& t) {
            return static_cast<Eigen::Index>(
                std::lower_bound(tags.begin(), tags.end(), t) - tags.begin());
        };
        for (const Rule& r : rules) adj(index_of(r.antecedent[0]), index_of(r.consequent[0])) = 1.0;

        // Dense power iteration with the same update and normalization.
        Eigen::VectorXd hub = Eigen::VectorXd::Constant(
            static_cast<Eigen::Index>(m), 1.0 / std::sqrt(static_cast<double>(m)));
        Eigen::VectorXd auth = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(m));
        for (int iter = 0; iter < 100000; ++iter) {
            Eigen::VectorXd new_auth = adj.transpose() * hub;
            if (new_auth.norm() > 0) new_auth /= new_auth.norm();
            Eigen::VectorXd new_hub = adj * new_auth;
            if (new_hub.norm() > 0) new_hub /= new_hub.norm();
            const double delta = std::max((new_auth - auth).cwiseAbs().maxCoeff(),
                                          (new_hub - hub).cwiseAbs().maxCoeff());
            auth = new_auth;
            hub = new_hub;
            if (delta < 1e-12) break;
        }

        const HitsScores scores = hits(rules);
        std::map<std::string, double> hub_of, auth_of;
        for (const auto& [tag, s] : scores.hubs) hub_of[tag] = s;
        for (const auto& [tag, s] : scores.authorities) auth_of[tag] = s;
        for (size_t i = 0; i < m; ++i) {
            CHECK(std::abs(hub_of.at(tags[i]) - hub(static_cast<Eigen::Index>(i))) < 1e-8);
            CHECK(std::abs(auth_of.at(tags[i]) - auth(static_cast<Eigen::Index>(i))) < 1e-8);
            CHECK(hub_of.at(tags[i]) >= 0.0);
            CHECK(auth_of.at(tags[i]) >= 0.0);
        }
    }
}

TEST_CASE("scores are invariant to rule order") {
    Rule r1, r2, r3;
    r1.antecedent = {"x", "y"};
    r1.consequent = {"z"};
    r2.antecedent = {"z"};
    r2.consequent = {"x"};
    r3.antecedent = {"y"};
    r3.consequent = {"w"};
    const HitsScores a = hits(std::vector<Rule>{r1, r2, r3});
    const HitsScores b = hits(std::vector<Rule>{r3, r1, r2});
    REQUIRE(a.hubs.size() == b.hubs.size());
    for (size_t i = 0; i < a.hubs.size(); ++i) {
        CHECK(a.hubs[i].first == b.hubs[i].first);
        CHECK(a.hubs[i].second == doctest::Approx(b.hubs[i].second).epsilon(1e-12));
    }
}

}  // TEST_SUITE
