#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace dtx {

struct ConfusionMatrix {
    int64_t tp = 0;
    int64_t fp = 0;
    int64_t tn = 0;
    int64_t fn = 0;

    int64_t total() const { return tp + fp + tn + fn; }
};

// Zero-denominator ratios are reported as absent, not zero.
struct Metrics {
    std::optional<double> accuracy;
    std::optional<double> precision;
    std::optional<double> recall;
    std::optional<double> specificity;
    std::optional<double> f1;
};

// accuracy (tp+tn)/total, precision tp/(tp+fp), recall tp/(tp+fn),
// specificity tn/(tn+fp), f1 = (2*precision*recall)/(precision+recall).
// Throws on an empty matrix.
Metrics metrics(const ConfusionMatrix& cm);

double f1_score(double precision, double recall);

// Counts with POSITIVE encoded as 1. Throws on length mismatch.
ConfusionMatrix confusion_from_predictions(std::span<const int> labels,
                                           std::span<const int> predictions);

// The per-class "labelled correctly / mislabelled" layout used in reports.
std::string confusion_report(const ConfusionMatrix& cm);

struct RocPoint {
    double threshold;
    double fpr;
    double tpr;
};

struct RocResult {
    std::vector<RocPoint> points;  // thresholds descending, +-inf sentinels
    double auc = 0.0;              // trapezoidal; equals pairwise concordance
};

// Throws unless both classes are present.
RocResult roc_auc(std::span<const double> scores, std::span<const int> labels);

// N items x r raters of categorical labels.
struct RatingTable {
    size_t n_categories = 0;
    std::vector<std::vector<int>> category_counts;  // [item][category] sums to r

    static RatingTable from_labels(const std::vector<std::vector<std::string>>& cells);
    size_t n_items() const { return category_counts.size(); }
    size_t n_raters() const;
};

struct FleissResult {
    double kappa = 0.0;
    double p_bar = 0.0;    // mean per-item agreement
    double p_e = 0.0;      // chance agreement
};

// kappa = (p_bar - p_e) / (1 - p_e). When every rater uses one category
// everywhere (p_e == 1) agreement is trivially perfect and kappa reports 1.
FleissResult fleiss_kappa(const RatingTable& ratings);

}  // namespace dtx
