// drugtext: classify short social-media texts as drug-positive or negative
// with a from-scratch convolutional text classifier, augment scarce labels by
// keyword substitution, benchmark classical baselines, and mine association
// rules from the classified corpus.

#include <omp.h>

#include <chrono>
#include <fstream>
#include <iostream>
#include <sstream>
#include <unordered_map>

#include <CLI11.hpp>

#include "dtx/baselines.hpp"
#include "dtx/checkpoint.hpp"
#include "dtx/corpus.hpp"
#include "dtx/embed.hpp"
#include "dtx/eval.hpp"
#include "dtx/lexicon.hpp"
#include "dtx/nn.hpp"
#include "dtx/record_json.hpp"
#include "dtx/rng.hpp"
#include "dtx/rulemine.hpp"
#include "dtx/synthgen.hpp"

namespace {

// Exit codes: 0 ok, 2 usage, 3 unreadable file, 4 malformed data,
// 5 contract violation.
constexpr int kExitUsage = 2;
constexpr int kExitUnreadable = 3;
constexpr int kExitData = 4;
constexpr int kExitContract = 5;

struct GlobalOptions {
    uint64_t seed = 42;
    int threads = 0;  // 0 = library default
    std::string lexicon_path = "data/lexicon.csv";
    std::string stopwords_path = "data/stopwords.txt";
    std::string contractions_path = "data/contractions.csv";
};

std::ifstream open_input(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    return in;
}

std::ofstream open_output(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    return out;
}

std::vector<dtx::JsonRecord> read_records(const std::string& path) {
    std::ifstream in = open_input(path);
    std::vector<dtx::JsonRecord> records;
    std::string line;
    size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        records.push_back(dtx::parse_record_line(line, line_no));
    }
    return records;
}

std::vector<dtx::LabeledText> read_labeled(const std::string& path) {
    std::ifstream in = open_input(path);
    std::vector<dtx::LabeledText> out;
    std::string line;
    size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        out.push_back(dtx::labeled_from_line(line, line_no));
    }
    return out;
}

// Label file: CSV `id_str,label` with label in {0,1}.
std::unordered_map<std::string, int> read_labels_csv(const std::string& path) {
    std::ifstream in = open_input(path);
    std::unordered_map<std::string, int> labels;
    std::string line;
    size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line_no == 1 && line == "id_str,label") continue;
        const size_t c = line.rfind(',');
        if (c == std::string::npos)
            throw std::runtime_error("labels: " + path + ":" + std::to_string(line_no) +
                                     ": malformed row");
        const std::string value = line.substr(c + 1);
        if (value != "0" && value != "1")
            throw std::runtime_error("labels: " + path + ":" + std::to_string(line_no) +
                                     ": label must be 0 or 1");
        labels[line.substr(0, c)] = value == "1" ? 1 : 0;
    }
    return labels;
}

std::vector<double> parse_double_list(const std::string& s) {
    std::vector<double> out;
    std::istringstream iss(s);
    std::string item;
    while (std::getline(iss, item, ',')) out.push_back(std::stod(item));
    return out;
}

std::string format_metric(const std::optional<double>& v) {
    if (!v) return "";
    std::ostringstream os;
    os.precision(6);
    os << std::fixed << *v;
    return os.str();
}

std::string format_double(double v, int precision = 10) {
    std::ostringstream os;
    os.precision(precision);
    os << v;
    return os.str();
}

// ------------------------------------------------------------------ clean

struct CleanArgs {
    std::string in, out, funnel;
    size_t chunk = 8192;
};

int cmd_clean(const CleanArgs& args, const GlobalOptions& global) {
    const dtx::Lexicon lexicon = dtx::Lexicon::load(global.lexicon_path);
    const dtx::CleaningRules rules =
        dtx::CleaningRules::load(global.stopwords_path, global.contractions_path);

    std::ifstream in = open_input(args.in);
    std::ofstream out = open_output(args.out);

    dtx::FunnelReport funnel;
    std::string line;
    size_t line_no = 0;
    int64_t done = 0;
    const auto t0 = std::chrono::steady_clock::now();

    std::vector<dtx::JsonRecord> chunk;
    chunk.reserve(args.chunk);
    auto flush = [&]() {
        if (chunk.empty()) return;
        std::vector<dtx::PostRecord> records(chunk.size());
        for (size_t i = 0; i < chunk.size(); ++i) records[i] = std::move(chunk[i].record);
        dtx::clean_records(records, rules);
        for (size_t i = 0; i < chunk.size(); ++i) {
            if (dtx::keep_record(records[i], lexicon, funnel)) {
                chunk[i].record = std::move(records[i]);
                out << dtx::record_to_line(chunk[i], false, false) << "\n";
            }
        }
        done += static_cast<int64_t>(chunk.size());
        chunk.clear();
        const auto elapsed = std::chrono::duration<double>(
            std::chrono::steady_clock::now() - t0).count();
        std::cerr << "progress records=" << done << " rate="
                  << static_cast<int64_t>(static_cast<double>(done) / std::max(elapsed, 1e-9))
                  << "/s\n";
    };

    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        chunk.push_back(dtx::parse_record_line(line, line_no));
        if (chunk.size() >= args.chunk) flush();
    }
    flush();

    if (!args.funnel.empty()) {
        std::ofstream fout = open_output(args.funnel);
        fout << funnel.to_csv();
    }
    std::cerr << "funnel input=" << funnel.input << " output=" << funnel.output() << "\n";
    return 0;
}

// ------------------------------------------------------------------ attrs

int cmd_attrs(const std::string& in_path, const std::string& out_path,
              const GlobalOptions& global) {
    const dtx::Lexicon lexicon = dtx::Lexicon::load(global.lexicon_path);
    std::vector<dtx::JsonRecord> records = read_records(in_path);
    std::ofstream out = open_output(out_path);
    for (dtx::JsonRecord& rec : records) {
        dtx::derive_attributes(rec.record, lexicon);
        out << dtx::record_to_line(rec, true, false) << "\n";
    }
    return 0;
}

// ------------------------------------------------------------------ sets

struct SetsArgs {
    std::string in, out_dir;
    size_t sample = 1000;
};

int cmd_sets(const SetsArgs& args, const GlobalOptions& global) {
    const dtx::Lexicon lexicon = dtx::Lexicon::load(global.lexicon_path);
    std::vector<dtx::JsonRecord> json_records = read_records(args.in);
    std::vector<dtx::PostRecord> records;
    records.reserve(json_records.size());
    for (dtx::JsonRecord& rec : json_records) {
        dtx::derive_attributes(rec.record, lexicon);
        records.push_back(rec.record);
    }
    const dtx::CandidateSets sets =
        dtx::build_candidate_sets(records, lexicon, args.sample, global.seed);
    if (sets.sample_truncated)
        std::cerr << "warning: remainder smaller than requested sample; set3 truncated to "
                  << sets.set3.size() << " records\n";

    auto write_set = [&](const std::vector<dtx::PostRecord>& set, const std::string& name) {
        std::ofstream out = open_output(args.out_dir + "/" + name);
        for (const dtx::PostRecord& r : set) {
            dtx::JsonRecord jr;
            jr.record = r;
            out << dtx::record_to_line(jr, true, false) << "\n";
        }
    };
    write_set(sets.set1, "set1.jsonl");
    write_set(sets.set2, "set2.jsonl");
    write_set(sets.set3, "set3.jsonl");
    std::cerr << "set1=" << sets.set1.size() << " set2=" << sets.set2.size()
              << " set3=" << sets.set3.size() << "\n";
    return 0;
}

// ------------------------------------------------------------------ synth

struct SynthArgs {
    std::string in, labels, out, balance;
    size_t m = 4;
};

int cmd_synth(const SynthArgs& args, const GlobalOptions& global) {
    const dtx::Lexicon lexicon = dtx::Lexicon::load(global.lexicon_path);
    const std::vector<dtx::JsonRecord> records = read_records(args.in);
    const std::unordered_map<std::string, int> labels = read_labels_csv(args.labels);

    std::vector<dtx::LabeledText> sources;
    for (const dtx::JsonRecord& rec : records) {
        auto it = labels.find(rec.record.id_str);
        if (it == labels.end()) continue;
        sources.push_back(dtx::LabeledText{rec.record.id_str, rec.record.text, it->second});
    }
    if (sources.empty()) throw std::invalid_argument("synth: no records matched the label file");

    dtx::SynthConfig config;
    config.variants_per_source = args.m;
    config.seed = global.seed;
    const dtx::SynthBatch batch = dtx::generate_synthetic(sources, config, lexicon);
    if (batch.sources_without_keywords > 0)
        std::cerr << "warning: " << batch.sources_without_keywords
                  << " source(s) had no keyword spans and were emitted unchanged\n";

    std::ofstream out = open_output(args.out);
    for (const dtx::LabeledText& t : batch.originals) out << dtx::labeled_to_line(t) << "\n";
    for (const dtx::SyntheticText& s : batch.synthetics) {
        dtx::json j;
        j["id_str"] = s.record.id_str;
        std::string text;
        for (size_t i = 0; i < s.record.tokens.size(); ++i) {
            if (i) text += ' ';
            text += s.record.tokens[i];
        }
        j["text"] = text;
        j["label"] = s.record.label;
        j["source_id"] = s.source_id;
        dtx::json reps = dtx::json::array();
        for (const dtx::Replacement& r : s.replacements) {
            reps.push_back({{"original", r.original}, {"substitute", r.substitute}});
        }
        j["replacements"] = reps;
        out << j.dump() << "\n";
    }

    const dtx::BalanceReport report = dtx::balance_report(batch);
    std::ostringstream bal;
    bal << "set,positive,negative,ratio\n";
    bal << "originals," << report.original_positive << "," << report.original_negative << ","
        << format_double(report.original_ratio()) << "\n";
    bal << "with_synthetics," << report.total_positive << "," << report.total_negative << ","
        << format_double(report.total_ratio()) << "\n";
    if (!args.balance.empty()) {
        std::ofstream bout = open_output(args.balance);
        bout << bal.str();
    }
    std::cerr << bal.str();
    return 0;
}

// ------------------------------------------------------------------ train

struct TrainArgs {
    std::string in, vectors, out;
    size_t window_len = 50;
    size_t embed_dim = 400;
    std::string heights = "3,4,5,6,7";
    size_t filters = 64;
    double pos_weight = 0.0;  // 0 = negative/positive class ratio
    double learning_rate = 1e-4;
    size_t batch_size = 64;
    size_t epochs = 10;
    double threshold = 0.5;
    size_t stride = 25;
    std::string pad = "zeros";
    std::string oov = "fresh";
    double val_fraction = 0.0;
};

int cmd_train(const TrainArgs& args, const GlobalOptions& global) {
    std::vector<dtx::LabeledText> dataset = read_labeled(args.in);
    if (dataset.empty()) throw std::invalid_argument("train: empty dataset");
    const dtx::EmbeddingTable table = dtx::EmbeddingTable::load(args.vectors);

    dtx::CnnConfig config;
    config.window_len = args.window_len;
    config.embed_dim = args.embed_dim;
    config.filter_heights.clear();
    for (double h : parse_double_list(args.heights))
        config.filter_heights.push_back(static_cast<size_t>(h));
    config.filters_per_height = args.filters;
    config.learning_rate = args.learning_rate;
    config.batch_size = args.batch_size;
    config.epochs = args.epochs;
    config.seed = global.seed;
    config.threshold = args.threshold;
    config.stride = args.stride;
    config.pad_mode = args.pad == "random" ? dtx::PadMode::Random : dtx::PadMode::Zeros;
    config.oov_mode =
        args.oov == "frozen" ? dtx::OovMode::FrozenPerWord : dtx::OovMode::FreshPerOccurrence;

    if (args.pos_weight > 0.0) {
        config.pos_weight = args.pos_weight;
    } else {
        int64_t pos = 0, neg = 0;
        for (const dtx::LabeledText& t : dataset) (t.label == 1 ? pos : neg) += 1;
        if (pos == 0) throw std::invalid_argument("train: no positive examples");
        config.pos_weight = static_cast<double>(neg) / static_cast<double>(pos);
        std::cerr << "pos_weight=" << config.pos_weight << " (class ratio)\n";
    }

    dtx::TrainOptions options;
    std::vector<dtx::LabeledText> validation;
    if (args.val_fraction > 0.0) {
        const auto n_val = static_cast<size_t>(static_cast<double>(dataset.size()) *
                                               args.val_fraction);
        if (n_val > 0 && n_val < dataset.size()) {
            validation.assign(dataset.end() - static_cast<ptrdiff_t>(n_val), dataset.end());
            dataset.resize(dataset.size() - n_val);
            options.validation = &validation;
        }
    }

    const dtx::TrainResult result = dtx::train(dataset, table, config, options);
    for (size_t e = 0; e < result.trace.epoch_mean_loss.size(); ++e) {
        std::cerr << "epoch=" << e << " loss=" << result.trace.epoch_mean_loss[e]
                  << " train_acc=" << result.trace.epoch_train_accuracy[e];
        if (e < result.trace.epoch_val_accuracy.size())
            std::cerr << " val_acc=" << result.trace.epoch_val_accuracy[e];
        std::cerr << "\n";
    }
    if (options.validation) std::cerr << "best_epoch=" << result.trace.best_epoch << "\n";

    dtx::save_checkpoint(args.out, config, result.params);
    return 0;
}

// ------------------------------------------------------------------ predict

struct PredictArgs {
    std::string in, vectors, model, out;
};

int cmd_predict(const PredictArgs& args, const GlobalOptions& global) {
    const dtx::EmbeddingTable table = dtx::EmbeddingTable::load(args.vectors);
    const dtx::LoadedCheckpoint ck = dtx::load_checkpoint(args.model);
    if (table.dim() != ck.config.embed_dim)
        throw std::invalid_argument("predict: vector dimension does not match checkpoint");

    std::vector<dtx::JsonRecord> records = read_records(args.in);
    std::ofstream out = open_output(args.out);
    size_t empties = 0;
    for (size_t i = 0; i < records.size(); ++i) {
        dtx::Rng rng(dtx::mix_seed(global.seed, i));
        const dtx::Prediction pred =
            dtx::predict(records[i].record.text, ck.params, ck.config, table, rng);
        if (pred.n_windows == 0) ++empties;
        records[i].record.classification = pred.label;
        out << dtx::record_to_line(records[i], true, true, pred.score) << "\n";
    }
    if (empties > 0)
        std::cerr << "warning: " << empties << " record(s) had no tokens; classified negative\n";
    return 0;
}

// ------------------------------------------------------------------ baseline

struct BaselineArgs {
    std::string kind = "svm";
    std::string train, test, vectors, out, metrics;
    size_t pca_dim = 100;
    double learning_rate = 0.1;
    size_t epochs = 500;
    double l2 = 1e-3;
    size_t max_depth = 8;
    size_t min_leaf = 1;
};

int cmd_baseline(const BaselineArgs& args, const GlobalOptions& global) {
    const std::vector<dtx::LabeledText> train_set = read_labeled(args.train);
    const dtx::EmbeddingTable table = dtx::EmbeddingTable::load(args.vectors);

    // The word-vector table itself is what gets reduced.
    std::vector<std::vector<double>> vocabulary;
    {
        std::vector<dtx::LabeledText> all = train_set;
        std::set<std::string> seen;
        for (const dtx::LabeledText& t : all)
            for (const std::string& w : t.tokens)
                if (const std::vector<double>* v = table.find(w); v && seen.insert(w).second)
                    vocabulary.push_back(*v);
    }
    if (vocabulary.size() < 2)
        throw std::invalid_argument("baseline: too few in-vocabulary words to fit the projection");
    const size_t d = std::min(args.pca_dim, std::min(vocabulary.size() - 1, table.dim()));
    if (d != args.pca_dim)
        std::cerr << "warning: pca dim reduced to " << d << " to fit the data\n";

    dtx::BaselineModel model;
    model.kind = args.kind;
    model.pca = dtx::pca_fit(vocabulary, d);

    auto featurize_set = [&](const std::vector<dtx::LabeledText>& set, uint64_t salt,
                             std::vector<std::vector<double>>& X, std::vector<int>& y) {
        for (size_t i = 0; i < set.size(); ++i) {
            dtx::Rng rng(dtx::mix_seed(salt, i));
            X.push_back(dtx::featurize(set[i].tokens, table, model.pca, rng));
            y.push_back(set[i].label);
        }
    };

    std::vector<std::vector<double>> X_train;
    std::vector<int> y_train;
    featurize_set(train_set, dtx::mix_seed(global.seed, 1), X_train, y_train);

    if (args.kind == "tree") {
        model.tree = dtx::train_tree(X_train, y_train, {args.max_depth, args.min_leaf});
    } else {
        const dtx::LinearKind kind =
            args.kind == "logistic" ? dtx::LinearKind::Logistic : dtx::LinearKind::SvmHinge;
        model.linear =
            dtx::train_linear(X_train, y_train, kind,
                              {args.learning_rate, args.epochs, args.l2, global.seed});
    }
    if (!args.out.empty()) dtx::save_baseline(args.out, model);

    if (!args.test.empty()) {
        const std::vector<dtx::LabeledText> test_set = read_labeled(args.test);
        std::vector<std::vector<double>> X_test;
        std::vector<int> y_test;
        featurize_set(test_set, dtx::mix_seed(global.seed, 2), X_test, y_test);

        std::vector<int> predictions;
        std::vector<double> scores;
        for (const auto& x : X_test) {
            if (args.kind == "tree") {
                predictions.push_back(model.tree.predict(x));
                scores.push_back(model.tree.score(x));
            } else {
                predictions.push_back(model.linear.predict(x));
                scores.push_back(model.linear.score(x));
            }
        }
        const dtx::ConfusionMatrix cm = dtx::confusion_from_predictions(y_test, predictions);
        const dtx::Metrics m = dtx::metrics(cm);
        std::optional<double> auc;
        const bool both_classes = cm.tp + cm.fn > 0 && cm.tn + cm.fp > 0;
        if (both_classes) auc = dtx::roc_auc(scores, y_test).auc;

        std::ostringstream row;
        row << "model,accuracy,precision,recall,specificity,f1,auc\n";
        row << args.kind << "," << format_metric(m.accuracy) << "," << format_metric(m.precision)
            << "," << format_metric(m.recall) << "," << format_metric(m.specificity) << ","
            << format_metric(m.f1) << "," << format_metric(auc) << "\n";
        if (!args.metrics.empty()) {
            std::ofstream mout = open_output(args.metrics);
            mout << row.str();
        }
        std::cerr << row.str();
    }
    return 0;
}

// ------------------------------------------------------------------ eval

struct EvalArgs {
    std::string pred, labels, out, roc, confusion;
    std::string model_name = "model";
};

int cmd_eval(const EvalArgs& args, const GlobalOptions&) {
    const std::vector<dtx::JsonRecord> records = read_records(args.pred);
    const std::unordered_map<std::string, int> labels = read_labels_csv(args.labels);

    std::vector<int> y, predictions;
    std::vector<double> scores;
    for (const dtx::JsonRecord& rec : records) {
        auto it = labels.find(rec.record.id_str);
        if (it == labels.end()) continue;
        y.push_back(it->second);
        predictions.push_back(rec.record.classification == dtx::Classification::Positive ? 1 : 0);
        scores.push_back(rec.raw.contains("score") ? rec.raw["score"].get<double>() : 0.0);
    }
    if (y.empty()) throw std::invalid_argument("eval: no records matched the label file");

    const dtx::ConfusionMatrix cm = dtx::confusion_from_predictions(y, predictions);
    const dtx::Metrics m = dtx::metrics(cm);
    std::optional<double> auc;
    if (cm.tp + cm.fn > 0 && cm.tn + cm.fp > 0) {
        const dtx::RocResult roc = dtx::roc_auc(scores, y);
        auc = roc.auc;
        if (!args.roc.empty()) {
            std::ofstream rout = open_output(args.roc);
            rout << "threshold,fpr,tpr\n";
            for (const dtx::RocPoint& p : roc.points)
                rout << format_double(p.threshold) << "," << format_double(p.fpr) << ","
                     << format_double(p.tpr) << "\n";
        }
    }

    std::ostringstream row;
    row << "model,accuracy,precision,recall,specificity,f1,auc\n";
    row << args.model_name << "," << format_metric(m.accuracy) << ","
        << format_metric(m.precision) << "," << format_metric(m.recall) << ","
        << format_metric(m.specificity) << "," << format_metric(m.f1) << ","
        << format_metric(auc) << "\n";
    std::ofstream mout = open_output(args.out);
    mout << row.str();
    std::cerr << row.str();

    if (!args.confusion.empty()) {
        std::ofstream cout_ = open_output(args.confusion);
        cout_ << dtx::confusion_report(cm);
    }
    return 0;
}

// ------------------------------------------------------------------ mine / sweep

struct MineArgs {
    std::string in, rules, tag_stats, hits;
    double min_support = 0.0003;
    double min_confidence = 0.3;
    size_t max_len = 5;
};

int cmd_mine(const MineArgs& args, const GlobalOptions& global) {
    const dtx::Lexicon lexicon = dtx::Lexicon::load(global.lexicon_path);
    const std::vector<dtx::JsonRecord> json_records = read_records(args.in);
    std::vector<dtx::PostRecord> records;
    records.reserve(json_records.size());
    for (const dtx::JsonRecord& r : json_records) records.push_back(r.record);

    dtx::TagStats stats;
    const std::vector<dtx::Transaction> transactions =
        dtx::build_transactions(records, lexicon, &stats);
    if (transactions.empty()) throw std::invalid_argument("mine: no non-empty transactions");
    if (!args.tag_stats.empty()) {
        std::ofstream sout = open_output(args.tag_stats);
        sout << stats.to_csv();
        sout << "\ntag,transactions\n";
        for (const auto& [tag, count] : stats.tag_frequency)
            sout << tag << "," << count << "\n";
    }

    const dtx::ItemsetCounts itemsets =
        dtx::apriori(transactions, args.min_support, args.max_len);
    const std::vector<dtx::Rule> rules = dtx::gen_rules(itemsets, args.min_confidence);

    std::ofstream rout = open_output(args.rules);
    rout << "antecedent,consequent,support,confidence,lift,count\n";
    for (const dtx::Rule& r : rules) {
        rout << r.antecedent_text() << "," << r.consequent_text() << ","
             << format_double(r.support) << "," << format_double(r.confidence) << ","
             << format_double(r.lift) << "," << r.count << "\n";
    }
    std::cerr << "transactions=" << transactions.size() << " rules=" << rules.size() << "\n";

    if (!args.hits.empty() && !rules.empty()) {
        const dtx::HitsScores scores = dtx::hits(rules);
        std::unordered_map<std::string, double> hub_of;
        for (const auto& [tag, score] : scores.hubs) hub_of[tag] = score;
        std::ofstream hout = open_output(args.hits);
        hout << "tag,hub,authority\n";
        for (const auto& [tag, authority] : scores.authorities)
            hout << tag << "," << format_double(hub_of[tag]) << "," << format_double(authority)
                 << "\n";
    }
    return 0;
}

struct SweepArgs {
    std::string in, out;
    std::string supports = "0.0003,0.001,0.01";
    std::string confidences = "0.3,0.5,0.7";
    size_t max_len = 5;
};

int cmd_sweep(const SweepArgs& args, const GlobalOptions& global) {
    const dtx::Lexicon lexicon = dtx::Lexicon::load(global.lexicon_path);
    const std::vector<dtx::JsonRecord> json_records = read_records(args.in);
    std::vector<dtx::PostRecord> records;
    records.reserve(json_records.size());
    for (const dtx::JsonRecord& r : json_records) records.push_back(r.record);
    const std::vector<dtx::Transaction> transactions =
        dtx::build_transactions(records, lexicon, nullptr);
    if (transactions.empty()) throw std::invalid_argument("sweep: no non-empty transactions");

    const std::vector<double> supports = parse_double_list(args.supports);
    const std::vector<double> confidences = parse_double_list(args.confidences);
    const auto matrix = dtx::sensitivity_sweep(transactions, supports, confidences, args.max_len);

    std::ofstream out = open_output(args.out);
    out << "min_support";
    for (double c : confidences) out << "," << format_double(c);
    out << "\n";
    for (size_t i = 0; i < supports.size(); ++i) {
        out << format_double(supports[i]);
        for (int64_t count : matrix[i]) out << "," << count;
        out << "\n";
    }
    return 0;
}

// ------------------------------------------------------------------ kappa

int cmd_kappa(const std::string& ratings_path, const std::string& out_path) {
    std::ifstream in = open_input(ratings_path);
    std::vector<std::vector<std::string>> cells;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<std::string> row;
        std::istringstream iss(line);
        std::string cell;
        while (std::getline(iss, cell, ',')) row.push_back(cell);
        cells.push_back(std::move(row));
    }
    const dtx::RatingTable table = dtx::RatingTable::from_labels(cells);
    const dtx::FleissResult result = dtx::fleiss_kappa(table);

    std::ostringstream os;
    os << "kappa,p_bar,p_e\n";
    os << format_double(result.kappa) << "," << format_double(result.p_bar) << ","
       << format_double(result.p_e) << "\n";
    if (!out_path.empty()) {
        std::ofstream out = open_output(out_path);
        out << os.str();
    }
    std::cout << os.str();
    return 0;
}

// ------------------------------------------------------------------ report

int cmd_report(const std::vector<std::string>& inputs, const std::string& out_path) {
    std::ofstream out = open_output(out_path);
    out << "model,accuracy,precision,recall,specificity,f1,auc\n";
    for (const std::string& path : inputs) {
        std::ifstream in = open_input(path);
        std::string line;
        size_t line_no = 0;
        while (std::getline(in, line)) {
            ++line_no;
            if (line.empty()) continue;
            if (line_no == 1) {
                if (line != "model,accuracy,precision,recall,specificity,f1,auc")
                    throw std::runtime_error("report: " + path + ": unexpected header");
                continue;
            }
            out << line << "\n";
        }
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"drug-related text classification and rule-mining toolkit"};
    app.require_subcommand(1);
    app.set_config("--config", "", "key-value config file; command line takes precedence");
    app.allow_config_extras(CLI::config_extras_mode::ignore_all);

    GlobalOptions global;
    app.add_option("--seed", global.seed, "global RNG seed")->capture_default_str();
    app.add_option("--threads", global.threads, "worker threads (0 = library default)")
        ->capture_default_str();
    app.add_option("--lexicon", global.lexicon_path, "keyword lexicon CSV")->capture_default_str();
    app.add_option("--stopwords", global.stopwords_path, "stopword list")->capture_default_str();
    app.add_option("--contractions", global.contractions_path, "contraction table CSV")
        ->capture_default_str();

    CleanArgs clean_args;
    auto* clean = app.add_subcommand("clean", "clean raw JSONL records and apply row filters");
    clean->add_option("--in", clean_args.in, "raw records (JSONL)")->required();
    clean->add_option("--out", clean_args.out, "cleaned records (JSONL)")->required();
    clean->add_option("--funnel", clean_args.funnel, "funnel report CSV");
    clean->add_option("--chunk", clean_args.chunk, "records per processing chunk")
        ->capture_default_str();

    std::string attrs_in, attrs_out;
    auto* attrs = app.add_subcommand("attrs", "derive keyword-count attributes");
    attrs->add_option("--in", attrs_in, "cleaned records (JSONL)")->required();
    attrs->add_option("--out", attrs_out, "records with attributes (JSONL)")->required();

    SetsArgs sets_args;
    auto* sets = app.add_subcommand("sets", "split records into the three candidate sets");
    sets->add_option("--in", sets_args.in, "records with attributes (JSONL)")->required();
    sets->add_option("--out-dir", sets_args.out_dir, "output directory")->required();
    sets->add_option("--sample", sets_args.sample, "set3 sample size")->capture_default_str();

    SynthArgs synth_args;
    auto* synth = app.add_subcommand("synth", "generate label-preserving synthetic records");
    synth->add_option("--in", synth_args.in, "cleaned records (JSONL)")->required();
    synth->add_option("--labels", synth_args.labels, "labels CSV (id_str,label)")->required();
    synth->add_option("--out", synth_args.out, "labeled originals + synthetics (JSONL)")
        ->required();
    synth->add_option("--balance", synth_args.balance, "class balance CSV");
    synth->add_option("--m", synth_args.m, "synthetic variants per source")->capture_default_str();

    TrainArgs train_args;
    auto* train = app.add_subcommand("train", "train the convolutional classifier");
    train->add_option("--in", train_args.in, "labeled records (JSONL)")->required();
    train->add_option("--vectors", train_args.vectors, "word vector file")->required();
    train->add_option("--out", train_args.out, "checkpoint path")->required();
    train->add_option("--window-len", train_args.window_len)->capture_default_str();
    train->add_option("--dim", train_args.embed_dim, "embedding dimension (must match file)")
        ->capture_default_str();
    train->add_option("--heights", train_args.heights, "filter heights, comma separated")
        ->capture_default_str();
    train->add_option("--filters", train_args.filters, "filters per height")
        ->capture_default_str();
    train->add_option("--pos-weight", train_args.pos_weight,
                      "positive class weight (0 = class ratio)")
        ->capture_default_str();
    train->add_option("--lr", train_args.learning_rate)->capture_default_str();
    train->add_option("--batch-size", train_args.batch_size)->capture_default_str();
    train->add_option("--epochs", train_args.epochs)->capture_default_str();
    train->add_option("--threshold", train_args.threshold)->capture_default_str();
    train->add_option("--stride", train_args.stride)->capture_default_str();
    train->add_option("--pad", train_args.pad, "padding mode: zeros|random")
        ->capture_default_str();
    train->add_option("--oov", train_args.oov, "out-of-vocabulary mode: fresh|frozen")
        ->capture_default_str();
    train->add_option("--val-fraction", train_args.val_fraction,
                      "held-out fraction for best-epoch selection")
        ->capture_default_str();

    PredictArgs predict_args;
    auto* predict = app.add_subcommand("predict", "classify records with a trained checkpoint");
    predict->add_option("--in", predict_args.in, "records (JSONL)")->required();
    predict->add_option("--vectors", predict_args.vectors, "word vector file")->required();
    predict->add_option("--model", predict_args.model, "checkpoint path")->required();
    predict->add_option("--out", predict_args.out, "classified records (JSONL)")->required();

    BaselineArgs baseline_args;
    auto* baseline = app.add_subcommand("baseline", "train and evaluate a classical baseline");
    baseline->add_option("--kind", baseline_args.kind, "svm|logistic|tree")
        ->check(CLI::IsMember({"svm", "logistic", "tree"}))
        ->capture_default_str();
    baseline->add_option("--train", baseline_args.train, "labeled training records (JSONL)")
        ->required();
    baseline->add_option("--test", baseline_args.test, "labeled test records (JSONL)");
    baseline->add_option("--vectors", baseline_args.vectors, "word vector file")->required();
    baseline->add_option("--out", baseline_args.out, "model file");
    baseline->add_option("--metrics", baseline_args.metrics, "metrics CSV");
    baseline->add_option("--pca-dim", baseline_args.pca_dim)->capture_default_str();
    baseline->add_option("--lr", baseline_args.learning_rate)->capture_default_str();
    baseline->add_option("--epochs", baseline_args.epochs)->capture_default_str();
    baseline->add_option("--l2", baseline_args.l2)->capture_default_str();
    baseline->add_option("--max-depth", baseline_args.max_depth)->capture_default_str();
    baseline->add_option("--min-leaf", baseline_args.min_leaf)->capture_default_str();

    EvalArgs eval_args;
    auto* eval = app.add_subcommand("eval", "score classified records against labels");
    eval->add_option("--pred", eval_args.pred, "classified records (JSONL)")->required();
    eval->add_option("--labels", eval_args.labels, "labels CSV (id_str,label)")->required();
    eval->add_option("--out", eval_args.out, "metrics CSV")->required();
    eval->add_option("--roc", eval_args.roc, "ROC points CSV");
    eval->add_option("--confusion", eval_args.confusion, "confusion matrix report");
    eval->add_option("--model-name", eval_args.model_name)->capture_default_str();

    MineArgs mine_args;
    auto* mine = app.add_subcommand("mine", "mine association rules from classified records");
    mine->add_option("--in", mine_args.in, "classified records (JSONL)")->required();
    mine->add_option("--rules", mine_args.rules, "rules CSV")->required();
    mine->add_option("--tag-stats", mine_args.tag_stats, "tag statistics CSV");
    mine->add_option("--hits", mine_args.hits, "hub/authority CSV");
    mine->add_option("--min-support", mine_args.min_support)->capture_default_str();
    mine->add_option("--min-confidence", mine_args.min_confidence)->capture_default_str();
    mine->add_option("--max-len", mine_args.max_len, "maximum itemset size")
        ->capture_default_str();

    SweepArgs sweep_args;
    auto* sweep = app.add_subcommand("sweep", "rule-count sensitivity over threshold grids");
    sweep->add_option("--in", sweep_args.in, "classified records (JSONL)")->required();
    sweep->add_option("--out", sweep_args.out, "rule-count matrix CSV")->required();
    sweep->add_option("--supports", sweep_args.supports, "comma-separated min supports")
        ->capture_default_str();
    sweep->add_option("--confidences", sweep_args.confidences, "comma-separated min confidences")
        ->capture_default_str();
    sweep->add_option("--max-len", sweep_args.max_len)->capture_default_str();

    std::string kappa_ratings, kappa_out;
    auto* kappa = app.add_subcommand("kappa", "inter-rater agreement from a rating table");
    kappa->add_option("--ratings", kappa_ratings, "CSV: one row per item, one column per rater")
        ->required();
    kappa->add_option("--out", kappa_out, "result CSV");

    std::vector<std::string> report_inputs;
    std::string report_out;
    auto* report = app.add_subcommand("report", "aggregate metrics CSVs into one table");
    report->add_option("--in", report_inputs, "metrics CSVs")->required();
    report->add_option("--out", report_out, "combined CSV")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help
        app.exit(e);
        return kExitUsage;
    }

    if (global.threads > 0) omp_set_num_threads(global.threads);
    if (global.threads == 1) omp_set_num_threads(1);

    try {
        if (clean->parsed()) return cmd_clean(clean_args, global);
        if (attrs->parsed()) return cmd_attrs(attrs_in, attrs_out, global);
        if (sets->parsed()) return cmd_sets(sets_args, global);
        if (synth->parsed()) return cmd_synth(synth_args, global);
        if (train->parsed()) return cmd_train(train_args, global);
        if (predict->parsed()) return cmd_predict(predict_args, global);
        if (baseline->parsed()) return cmd_baseline(baseline_args, global);
        if (eval->parsed()) return cmd_eval(eval_args, global);
        if (mine->parsed()) return cmd_mine(mine_args, global);
        if (sweep->parsed()) return cmd_sweep(sweep_args, global);
        if (kappa->parsed()) return cmd_kappa(kappa_ratings, kappa_out);
        if (report->parsed()) return cmd_report(report_inputs, report_out);
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitContract;
    } catch (const std::runtime_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        const std::string what = e.what();
        return what.find("cannot open") != std::string::npos ? kExitUnreadable : kExitData;
    }
    return kExitUsage;
}
