#include "dtx/eval.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace dtx {

double f1_score(double precision, double recall) {
    return (2.0 * precision * recall) / (precision + recall);
}

Metrics metrics(const ConfusionMatrix& cm) {
    if (cm.total() == 0) throw std::invalid_argument("metrics: empty confusion matrix");
    Metrics m;
    m.accuracy = static_cast<double>(cm.tp + cm.tn) / static_cast<double>(cm.total());
    if (cm.tp + cm.fp > 0)
        m.precision = static_cast<double>(cm.tp) / static_cast<double>(cm.tp + cm.fp);
    if (cm.tp + cm.fn > 0)
        m.recall = static_cast<double>(cm.tp) / static_cast<double>(cm.tp + cm.fn);
    if (cm.tn + cm.fp > 0)
        m.specificity = static_cast<double>(cm.tn) / static_cast<double>(cm.tn + cm.fp);
    if (m.precision && m.recall && (*m.precision + *m.recall) > 0.0)
        m.f1 = f1_score(*m.precision, *m.recall);
    return m;
}

ConfusionMatrix confusion_from_predictions(std::span<const int> labels,
                                           std::span<const int> predictions) {
    if (labels.size() != predictions.size())
        throw std::invalid_argument("confusion: labels/predictions length mismatch");
    ConfusionMatrix cm;
    for (size_t i = 0; i < labels.size(); ++i) {
        const bool truth = labels[i] == 1;
        const bool pred = predictions[i] == 1;
        if (truth && pred) ++cm.tp;
        else if (truth && !pred) ++cm.fn;
        else if (!truth && pred) ++cm.fp;
        else ++cm.tn;
    }
    return cm;
}

std::string confusion_report(const ConfusionMatrix& cm) {
    std::ostringstream os;
    os << "class,labelled_correctly,mislabelled,total\n";
    os << "positive," << cm.tp << "," << cm.fn << "," << (cm.tp + cm.fn) << "\n";
    os << "negative," << cm.tn << "," << cm.fp << "," << (cm.tn + cm.fp) << "\n";
    os << "\n";
    os << "tp,fp,tn,fn\n";
    os << cm.tp << "," << cm.fp << "," << cm.tn << "," << cm.fn << "\n";
    return os.str();
}

RocResult roc_auc(std::span<const double> scores, std::span<const int> labels) {
    if (scores.size() != labels.size())
        throw std::invalid_argument("roc: scores/labels length mismatch");
    int64_t n_pos = 0, n_neg = 0;
    for (int y : labels) (y == 1 ? n_pos : n_neg) += 1;
    if (n_pos == 0 || n_neg == 0)
        throw std::invalid_argument("roc: both classes must be present");

    // Sort by (score desc, label desc) for a deterministic sweep; equal
    // scores are processed as one threshold step.
    std::vector<size_t> order(scores.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](size_t a, size_t b) {
        if (scores[a] != scores[b]) return scores[a] > scores[b];
        return labels[a] > labels[b];
    });

    RocResult out;
    const double inf = std::numeric_limits<double>::infinity();
    out.points.push_back({inf, 0.0, 0.0});

    int64_t tp = 0, fp = 0;
    double auc = 0.0;
    size_t i = 0;
    while (i < order.size()) {
        const double s = scores[order[i]];
        int64_t d_tp = 0, d_fp = 0;
        while (i < order.size() && scores[order[i]] == s) {
            (labels[order[i]] == 1 ? d_tp : d_fp) += 1;
            ++i;
        }
        // Trapezoid over the block; ties contribute half concordance.
        auc += static_cast<double>(d_fp) * (static_cast<double>(tp) +
                                            static_cast<double>(d_tp) / 2.0);
        tp += d_tp;
        fp += d_fp;
        out.points.push_back({s, static_cast<double>(fp) / static_cast<double>(n_neg),
                              static_cast<double>(tp) / static_cast<double>(n_pos)});
    }
    out.points.push_back({-inf, 1.0, 1.0});
    out.auc = auc / (static_cast<double>(n_pos) * static_cast<double>(n_neg));
    return out;
}

RatingTable RatingTable::from_labels(const std::vector<std::vector<std::string>>& cells) {
    RatingTable table;
    if (cells.empty()) throw std::invalid_argument("ratings: no items");
    const size_t r = cells.front().size();
    if (r < 2) throw std::invalid_argument("ratings: need at least 2 raters");

    std::map<std::string, size_t> category_ids;
    for (const auto& row : cells) {
        if (row.size() != r) throw std::invalid_argument("ratings: ragged rating table");
        for (const std::string& label : row) category_ids.emplace(label, 0);
    }
    size_t next = 0;
    for (auto& [label, id] : category_ids) id = next++;

    table.n_categories = next;
    table.category_counts.assign(cells.size(), std::vector<int>(next, 0));
    for (size_t i = 0; i < cells.size(); ++i) {
        for (const std::string& label : cells[i]) {
            table.category_counts[i][category_ids.at(label)] += 1;
        }
    }
    return table;
}

size_t RatingTable::n_raters() const {
    if (category_counts.empty()) return 0;
    int64_t r = 0;
    for (int c : category_counts.front()) r += c;
    return static_cast<size_t>(r);
}

FleissResult fleiss_kappa(const RatingTable& ratings) {
    const size_t n = ratings.n_items();
    if (n == 0) throw std::invalid_argument("fleiss: no items");
    const auto r = static_cast<int64_t>(ratings.n_raters());
    if (r < 2) throw std::invalid_argument("fleiss: need at least 2 raters");

    const size_t k = ratings.n_categories;
    std::vector<double> category_share(k, 0.0);
    double p_sum = 0.0;
    for (const auto& row : ratings.category_counts) {
        int64_t total = 0;
        int64_t sq = 0;
        for (size_t j = 0; j < k; ++j) {
            total += row[j];
            sq += static_cast<int64_t>(row[j]) * row[j];
            category_share[j] += row[j];
        }
        if (total != r) throw std::invalid_argument("fleiss: item with inconsistent rater count");
        p_sum += static_cast<double>(sq - r) / static_cast<double>(r * (r - 1));
    }

    FleissResult out;
    out.p_bar = p_sum / static_cast<double>(n);
    out.p_e = 0.0;
    const double denom = static_cast<double>(n) * static_cast<double>(r);
    for (size_t j = 0; j < k; ++j) {
        const double share = category_share[j] / denom;
        out.p_e += share * share;
    }
    if (out.p_e >= 1.0) {
        // Single category used by every rater everywhere: trivially perfect.
        out.kappa = 1.0;
        return out;
    }
    out.kappa = (out.p_bar - out.p_e) / (1.0 - out.p_e);
    return out;
}

}  // namespace dtx
