#include "dtx/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace dtx {

std::vector<double> PcaModel::project(std::span<const double> x) const {
    std::vector<double> out(components.size(), 0.0);
    for (size_t c = 0; c < components.size(); ++c) {
        double acc = 0.0;
        for (size_t j = 0; j < mean.size(); ++j) acc += components[c][j] * (x[j] - mean[j]);
        out[c] = acc;
    }
    return out;
}

void jacobi_eigen_symmetric(std::vector<std::vector<double>> a, std::vector<double>& eigenvalues,
                            std::vector<std::vector<double>>& eigenvectors) {
    const size_t n = a.size();
    eigenvectors.assign(n, std::vector<double>(n, 0.0));
    for (size_t i = 0; i < n; ++i) eigenvectors[i][i] = 1.0;

    auto off_diagonal = [&]() {
        double s = 0.0;
        for (size_t i = 0; i < n; ++i)
            for (size_t j = i + 1; j < n; ++j) s += a[i][j] * a[i][j];
        return s;
    };

    const double tol = 1e-20;
    for (int sweep = 0; sweep < 100 && off_diagonal() > tol; ++sweep) {
        for (size_t p = 0; p + 1 < n; ++p) {
            for (size_t q = p + 1; q < n; ++q) {
                if (std::abs(a[p][q]) < 1e-300) continue;
                const double theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                const double t = (theta >= 0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (size_t k = 0; k < n; ++k) {
                    const double akp = a[k][p];
                    const double akq = a[k][q];
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for (size_t k = 0; k < n; ++k) {
                    const double apk = a[p][k];
                    const double aqk = a[q][k];
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
                for (size_t k = 0; k < n; ++k) {
                    const double vkp = eigenvectors[k][p];
                    const double vkq = eigenvectors[k][q];
                    eigenvectors[k][p] = c * vkp - s * vkq;
                    eigenvectors[k][q] = s * vkp + c * vkq;
                }
            }
        }
    }

    // Sort by descending eigenvalue; columns follow.
    std::vector<size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](size_t x, size_t y) { return a[x][x] > a[y][y]; });
    eigenvalues.resize(n);
    std::vector<std::vector<double>> sorted(n, std::vector<double>(n, 0.0));
    for (size_t c = 0; c < n; ++c) {
        eigenvalues[c] = a[order[c]][order[c]];
        for (size_t k = 0; k < n; ++k) sorted[k][c] = eigenvectors[k][order[c]];
    }
    eigenvectors = std::move(sorted);
}

PcaModel pca_fit(const std::vector<std::vector<double>>& vectors, size_t d) {
    if (vectors.size() < 2) throw std::invalid_argument("pca: need at least 2 vectors");
    const size_t k = vectors.front().size();
    if (d < 1 || d > k)
        throw std::invalid_argument("pca: reduced dimension " + std::to_string(d) +
                                    " out of range for input dimension " + std::to_string(k));

    PcaModel model;
    model.mean.assign(k, 0.0);
    for (const auto& v : vectors) {
        if (v.size() != k) throw std::invalid_argument("pca: ragged input vectors");
        for (size_t j = 0; j < k; ++j) model.mean[j] += v[j];
    }
    for (double& m : model.mean) m /= static_cast<double>(vectors.size());

    // Sample covariance.
    std::vector<std::vector<double>> cov(k, std::vector<double>(k, 0.0));
    for (const auto& v : vectors) {
        for (size_t i = 0; i < k; ++i) {
            const double di = v[i] - model.mean[i];
            for (size_t j = i; j < k; ++j) cov[i][j] += di * (v[j] - model.mean[j]);
        }
    }
    const double norm = 1.0 / static_cast<double>(vectors.size() - 1);
    double total_variance = 0.0;
    for (size_t i = 0; i < k; ++i) {
        for (size_t j = i; j < k; ++j) {
            cov[i][j] *= norm;
            cov[j][i] = cov[i][j];
        }
        total_variance += cov[i][i];
    }
    if (total_variance <= 0.0)
        throw std::invalid_argument("pca: degenerate covariance, data has no variance");

    std::vector<double> eigenvalues;
    std::vector<std::vector<double>> eigenvectors;
    jacobi_eigen_symmetric(cov, eigenvalues, eigenvectors);

    model.components.resize(d);
    model.explained_variance.resize(d);
    for (size_t c = 0; c < d; ++c) {
        model.explained_variance[c] = std::max(0.0, eigenvalues[c]);
        model.components[c].resize(k);
        for (size_t j = 0; j < k; ++j) model.components[c][j] = eigenvectors[j][c];
    }
    return model;
}

std::vector<double> featurize(std::span<const std::string> tokens, const EmbeddingTable& table,
                              const PcaModel& pca, Rng& rng) {
    std::vector<double> out(pca.reduced_dim(), 0.0);
    if (tokens.empty()) return out;
    std::vector<double> oov(pca.input_dim());
    for (const std::string& tok : tokens) {
        const std::vector<double>* vec = table.find(tok);
        if (!vec) {
            for (double& x : oov) x = rng.uniform_real(-0.5, 0.5);
            vec = &oov;
        }
        const std::vector<double> projected = pca.project(*vec);
        for (size_t j = 0; j < out.size(); ++j) out[j] += projected[j];
    }
    for (double& x : out) x /= static_cast<double>(tokens.size());
    return out;
}

double LinearModel::raw_score(std::span<const double> x) const {
    double acc = bias;
    for (size_t j = 0; j < weights.size(); ++j) acc += weights[j] * x[j];
    return acc;
}

double LinearModel::score(std::span<const double> x) const {
    return 1.0 / (1.0 + std::exp(-raw_score(x)));
}

int LinearModel::predict(std::span<const double> x) const {
    return raw_score(x) >= 0.0 ? 1 : 0;
}

double logistic_loss(const std::vector<std::vector<double>>& features, std::span<const int> labels,
                     std::span<const double> weights, double bias, double l2,
                     std::vector<double>* grad_w, double* grad_b) {
    const size_t n = features.size();
    const size_t d = weights.size();
    if (grad_w) grad_w->assign(d, 0.0);
    if (grad_b) *grad_b = 0.0;

    double loss = 0.0;
    for (size_t i = 0; i < n; ++i) {
        double z = bias;
        for (size_t j = 0; j < d; ++j) z += weights[j] * features[i][j];
        // log(1 + exp(-y*z)) with y in {-1,+1}, stable form.
        const double yz = (labels[i] == 1 ? z : -z);
        loss += yz > 0 ? std::log1p(std::exp(-yz)) : -yz + std::log1p(std::exp(yz));
        const double p = 1.0 / (1.0 + std::exp(-z));
        const double residual = p - (labels[i] == 1 ? 1.0 : 0.0);
        if (grad_w)
            for (size_t j = 0; j < d; ++j) (*grad_w)[j] += residual * features[i][j];
        if (grad_b) *grad_b += residual;
    }
    const double inv = 1.0 / static_cast<double>(n);
    loss *= inv;
    for (size_t j = 0; j < d; ++j) {
        loss += 0.5 * l2 * weights[j] * weights[j];
        if (grad_w) (*grad_w)[j] = (*grad_w)[j] * inv + l2 * weights[j];
    }
    if (grad_b) *grad_b *= inv;
    return loss;
}

LinearModel train_linear(const std::vector<std::vector<double>>& features,
                         std::span<const int> labels, LinearKind kind,
                         const LinearConfig& config) {
    if (features.empty()) throw std::invalid_argument("train_linear: empty dataset");
    if (features.size() != labels.size())
        throw std::invalid_argument("train_linear: features/labels size mismatch");
    const size_t n_pos = static_cast<size_t>(std::count(labels.begin(), labels.end(), 1));
    if (n_pos == 0 || n_pos == labels.size())
        throw std::invalid_argument("train_linear: labels contain a single class");

    const size_t n = features.size();
    const size_t d = features.front().size();
    LinearModel model;
    model.kind = kind;
    model.weights.assign(d, 0.0);
    model.bias = 0.0;

    std::vector<double> grad(d);
    for (size_t epoch = 0; epoch < config.epochs; ++epoch) {
        double grad_b = 0.0;
        if (kind == LinearKind::Logistic) {
            logistic_loss(features, labels, model.weights, model.bias, config.l2, &grad, &grad_b);
        } else {
            // Subgradient of mean hinge loss + L2.
            std::fill(grad.begin(), grad.end(), 0.0);
            for (size_t i = 0; i < n; ++i) {
                const double y = labels[i] == 1 ? 1.0 : -1.0;
                double z = model.bias;
                for (size_t j = 0; j < d; ++j) z += model.weights[j] * features[i][j];
                if (y * z < 1.0) {
                    for (size_t j = 0; j < d; ++j) grad[j] -= y * features[i][j];
                    grad_b -= y;
                }
            }
            const double inv = 1.0 / static_cast<double>(n);
            for (size_t j = 0; j < d; ++j) grad[j] = grad[j] * inv + config.l2 * model.weights[j];
            grad_b *= inv;
        }
        for (size_t j = 0; j < d; ++j) model.weights[j] -= config.learning_rate * grad[j];
        model.bias -= config.learning_rate * grad_b;
    }
    return model;
}

namespace {

double gini(int64_t pos, int64_t total) {
    if (total == 0) return 0.0;
    const double p = static_cast<double>(pos) / static_cast<double>(total);
    return 2.0 * p * (1.0 - p);
}

struct Split {
    bool found = false;
    size_t feature = 0;
    double threshold = 0.0;
    double impurity = 0.0;  // weighted child Gini
};

Split best_split(const std::vector<std::vector<double>>& features, std::span<const int> labels,
                 const std::vector<size_t>& idx, size_t min_leaf) {
    const size_t d = features.front().size();
    const size_t n = idx.size();
    Split best;

    std::vector<std::pair<double, int>> column(n);
    for (size_t f = 0; f < d; ++f) {
        for (size_t i = 0; i < n; ++i)
            column[i] = {features[idx[i]][f], labels[idx[i]]};
        std::sort(column.begin(), column.end());

        int64_t total_pos = 0;
        for (const auto& [v, y] : column) total_pos += y;

        int64_t left_pos = 0;
        for (size_t i = 0; i + 1 < n; ++i) {
            left_pos += column[i].second;
            if (column[i].first == column[i + 1].first) continue;
            const size_t left_n = i + 1;
            const size_t right_n = n - left_n;
            if (left_n < min_leaf || right_n < min_leaf) continue;
            const double threshold = column[i].first + (column[i + 1].first - column[i].first) / 2.0;
            const double w =
                (static_cast<double>(left_n) * gini(left_pos, left_n) +
                 static_cast<double>(right_n) * gini(total_pos - left_pos, right_n)) /
                static_cast<double>(n);
            // Ties break to the lowest feature index, then lowest threshold;
            // the scan order already visits candidates in that order.
            if (!best.found || w < best.impurity) {
                best.found = true;
                best.feature = f;
                best.threshold = threshold;
                best.impurity = w;
            }
        }
    }
    return best;
}

int build_node(const std::vector<std::vector<double>>& features, std::span<const int> labels,
               std::vector<size_t> idx, size_t depth, const TreeConfig& config,
               std::vector<TreeNode>& nodes) {
    int64_t pos = 0;
    for (size_t i : idx) pos += labels[i];
    const auto n = static_cast<int64_t>(idx.size());

    const int node_id = static_cast<int>(nodes.size());
    nodes.emplace_back();
    nodes[node_id].positive_fraction = static_cast<double>(pos) / static_cast<double>(n);
    nodes[node_id].label = 2 * pos > n ? 1 : 0;

    const double node_impurity = gini(pos, n);
    if (node_impurity == 0.0 || depth >= config.max_depth) return node_id;

    const Split split = best_split(features, labels, idx, config.min_leaf);
    if (!split.found || split.impurity > node_impurity) return node_id;

    std::vector<size_t> left_idx, right_idx;
    for (size_t i : idx) {
        (features[i][split.feature] <= split.threshold ? left_idx : right_idx).push_back(i);
    }
    idx.clear();
    idx.shrink_to_fit();

    nodes[node_id].feature = static_cast<int>(split.feature);
    nodes[node_id].threshold = split.threshold;
    const int left = build_node(features, labels, std::move(left_idx), depth + 1, config, nodes);
    const int right = build_node(features, labels, std::move(right_idx), depth + 1, config, nodes);
    nodes[node_id].left = left;
    nodes[node_id].right = right;
    return node_id;
}

}  // namespace

int DecisionTree::predict(std::span<const double> x) const {
    int node = 0;
    while (nodes[node].feature >= 0) {
        node = x[nodes[node].feature] <= nodes[node].threshold ? nodes[node].left
                                                               : nodes[node].right;
    }
    return nodes[node].label;
}

double DecisionTree::score(std::span<const double> x) const {
    int node = 0;
    while (nodes[node].feature >= 0) {
        node = x[nodes[node].feature] <= nodes[node].threshold ? nodes[node].left
                                                               : nodes[node].right;
    }
    return nodes[node].positive_fraction;
}

DecisionTree train_tree(const std::vector<std::vector<double>>& features,
                        std::span<const int> labels, const TreeConfig& config) {
    if (features.empty()) throw std::invalid_argument("train_tree: empty dataset");
    if (features.size() != labels.size())
        throw std::invalid_argument("train_tree: features/labels size mismatch");

    std::vector<size_t> idx(features.size());
    std::iota(idx.begin(), idx.end(), 0);
    DecisionTree tree;
    build_node(features, labels, std::move(idx), 0, config, tree.nodes);
    return tree;
}

}  // namespace dtx
