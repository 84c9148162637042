#include <doctest.h>

#include <omp.h>

#include <set>

#include "dtx/corpus.hpp"
#include "dtx/nn.hpp"
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

std::vector<PostRecord> sample_records(size_t n) {
    static const std::vector<std::string> texts = {
        "Smoke WEED everyday!!! #blessed",
        "quiet walk in the park",
        "RT @user snort coke now",
        "il fait beau aujourd'hui",
        "",
        "special k and special k",
        "i can't stop drinking coffee \xF0\x9F\x94\xA5",
    };
    std::vector<PostRecord> records;
    for (size_t i = 0; i < n; ++i) {
        PostRecord r;
        r.id_str = std::to_string(i);
        r.original_text = texts[i % texts.size()];
        r.lang = i % 9 == 3 ? "fr" : "en";
        records.push_back(std::move(r));
    }
    return records;
}

}  // namespace

TEST_SUITE("parallel") {

TEST_CASE("record cleaning is bit-identical across thread counts") {
    REQUIRE(omp_get_max_threads() >= 1);
    std::vector<PostRecord> serial = sample_records(500);
    std::vector<PostRecord> parallel = sample_records(500);
    clean_records_serial(serial, default_rules());
    clean_records(parallel, default_rules());
    REQUIRE(serial.size() == parallel.size());
    for (size_t i = 0; i < serial.size(); ++i) CHECK(serial[i].text == parallel[i].text);
}

TEST_CASE("row filtering keeps order and counters across paths") {
    std::vector<PostRecord> serial = sample_records(400);
    std::vector<PostRecord> parallel = sample_records(400);
    clean_records_serial(serial, default_rules());
    clean_records_serial(parallel, default_rules());

    const FunnelReport rs = filter_rows_serial(serial, default_lexicon());
    const FunnelReport rp = filter_rows(parallel, default_lexicon());
    CHECK(rs.input == rp.input);
    CHECK(rs.dropped_empty == rp.dropped_empty);
    CHECK(rs.dropped_non_english == rp.dropped_non_english);
    CHECK(rs.dropped_no_keyword == rp.dropped_no_keyword);
    REQUIRE(serial.size() == parallel.size());
    for (size_t i = 0; i < serial.size(); ++i) CHECK(serial[i].id_str == parallel[i].id_str);
}

TEST_CASE("batch gradients are bit-identical across paths") {
    CnnConfig config;
    config.window_len = 10;
    config.embed_dim = 5;
    config.filter_heights = {2, 3, 4};
    config.filters_per_height = 3;
    config.pos_weight = 1.7;

    Rng rng(19);
    CnnParams params = CnnParams::zeros(config);
    for (double& v : params.values) v = rng.uniform_real(-0.4, 0.4);

    std::vector<EmbeddedWindow> windows;
    std::vector<int> labels;
    for (int i = 0; i < 37; ++i) {  // deliberately not a multiple of the chunk size
        EmbeddedWindow w;
        w.rows = config.window_len;
        w.cols = config.embed_dim;
        w.n_tokens = 1 + rng.uniform_index(config.window_len);
        w.data.assign(w.rows * w.cols, 0.0);
        for (size_t r = 0; r < w.n_tokens; ++r)
            for (size_t c = 0; c < w.cols; ++c) w.at(r, c) = rng.uniform_real(-1.0, 1.0);
        windows.push_back(std::move(w));
        labels.push_back(static_cast<int>(rng.uniform_index(2)));
    }

    const BatchGrad serial = backward_batch_serial(windows, labels, params, config);
    const BatchGrad parallel = backward_batch(windows, labels, params, config);
    CHECK(serial.mean_loss == parallel.mean_loss);
    CHECK(serial.correct == parallel.correct);
    CHECK(serial.grad.values == parallel.grad.values);  // bitwise
}

TEST_CASE("apriori support counting is identical across paths") {
    Rng rng(139);
    std::vector<Transaction> db;
    for (int t = 0; t < 300; ++t) {
        std::set<std::string> items;
        const size_t len = 1 + rng.uniform_index(5);
        for (size_t i = 0; i < len; ++i) items.insert("i" + std::to_string(rng.uniform_index(9)));
        db.emplace_back(items.begin(), items.end());
    }
    const ItemsetCounts serial = apriori_serial(db, 0.02, 4);
    const ItemsetCounts parallel = apriori(db, 0.02, 4);
    CHECK(serial.counts == parallel.counts);
}

}  // TEST_SUITE
