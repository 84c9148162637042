#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "dtx/embed.hpp"

namespace dtx {

// Top-d principal components of a set of K-dimensional vectors.
struct PcaModel {
    std::vector<double> mean;                 // K
    std::vector<std::vector<double>> components;  // d columns, each K, orthonormal
    std::vector<double> explained_variance;   // descending, one per component

    size_t input_dim() const { return mean.size(); }
    size_t reduced_dim() const { return components.size(); }
    std::vector<double> project(std::span<const double> x) const;
};

// Exact symmetric eigendecomposition (cyclic Jacobi) of the sample
// covariance; components ordered by descending explained variance. Throws
// when d is out of range, fewer than two vectors are given, or the data has
// no variance at all.
PcaModel pca_fit(const std::vector<std::vector<double>>& vectors, size_t d);

// Symmetric eigendecomposition used by pca_fit; exposed for reuse.
// Returns (eigenvalues descending, eigenvectors as columns).
void jacobi_eigen_symmetric(std::vector<std::vector<double>> a, std::vector<double>& eigenvalues,
                            std::vector<std::vector<double>>& eigenvectors);

// Mean of the PCA-projected word vectors; OOV tokens draw uniform random
// vectors in [-0.5, 0.5] per occurrence, as in the embedding layer. Empty
// token lists featurize to the zero vector.
std::vector<double> featurize(std::span<const std::string> tokens, const EmbeddingTable& table,
                              const PcaModel& pca, Rng& rng);

enum class LinearKind { SvmHinge, Logistic };

struct LinearConfig {
    double learning_rate = 0.1;
    size_t epochs = 500;
    double l2 = 1e-3;
    uint64_t seed = 0;
};

struct LinearModel {
    LinearKind kind = LinearKind::SvmHinge;
    std::vector<double> weights;
    double bias = 0.0;

    double raw_score(std::span<const double> x) const;
    // SVM: margin mapped through a logistic link; logistic: sigmoid.
    double score(std::span<const double> x) const;
    int predict(std::span<const double> x) const;
};

// Full-batch (sub)gradient descent on L2-regularized hinge or log loss;
// deterministic. Throws when labels contain a single class.
LinearModel train_linear(const std::vector<std::vector<double>>& features,
                         std::span<const int> labels, LinearKind kind,
                         const LinearConfig& config);

// Regularized mean log loss and its gradient; the training objective for
// LinearKind::Logistic, exposed for verification.
double logistic_loss(const std::vector<std::vector<double>>& features, std::span<const int> labels,
                     std::span<const double> weights, double bias, double l2,
                     std::vector<double>* grad_w = nullptr, double* grad_b = nullptr);

struct TreeConfig {
    size_t max_depth = 8;
    size_t min_leaf = 1;
};

struct TreeNode {
    int feature = -1;  // -1 marks a leaf
    double threshold = 0.0;
    int left = -1;   // x[feature] <= threshold
    int right = -1;
    int label = 0;
    double positive_fraction = 0.0;
};

struct DecisionTree {
    std::vector<TreeNode> nodes;  // nodes[0] is the root

    int predict(std::span<const double> x) const;
    double score(std::span<const double> x) const;  // positive fraction at the leaf
};

// CART with Gini impurity and axis-aligned thresholds (midpoints between
// consecutive distinct values). Ties break to the lowest feature index, then
// the lowest threshold; zero-gain splits are taken while the node is impure.
// Never produces a child smaller than min_leaf. Throws on single-class data
// only when the tree cannot be built at all (empty dataset).
DecisionTree train_tree(const std::vector<std::vector<double>>& features,
                        std::span<const int> labels, const TreeConfig& config);

}  // namespace dtx
