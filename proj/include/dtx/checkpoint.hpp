#pragma once

#include <string>

#include "dtx/baselines.hpp"
#include "dtx/nn.hpp"

namespace dtx {

// Model container: a text header (magic + version line, then `key value`
// lines, then a line reading `tensors`) followed by little-endian float32
// tensors in a documented order. Parameters round-trip through float32.

void save_checkpoint(const std::string& path, const CnnConfig& config, const CnnParams& params);

struct LoadedCheckpoint {
    CnnConfig config;
    CnnParams params;
};
LoadedCheckpoint load_checkpoint(const std::string& path);

// Baseline model files share the container with a different magic. Tensors:
// pca mean [K], components [d*K] row-major, explained variance [d], then the
// model itself (linear: weights [d] + bias; tree: per-node rows of
// feature, threshold, left, right, label, positive_fraction).
struct BaselineModel {
    std::string kind;  // "svm", "logistic", or "tree"
    PcaModel pca;
    LinearModel linear;
    DecisionTree tree;
};

void save_baseline(const std::string& path, const BaselineModel& model);
BaselineModel load_baseline(const std::string& path);

}  // namespace dtx
