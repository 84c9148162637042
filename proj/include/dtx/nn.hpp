#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "dtx/corpus.hpp"
#include "dtx/embed.hpp"
#include "dtx/synthgen.hpp"

namespace dtx {

enum class OovMode { FreshPerOccurrence, FrozenPerWord };

struct CnnConfig {
    size_t window_len = 50;  // L
    size_t embed_dim = 400;  // K (must match the vector file)
    std::vector<size_t> filter_heights = {3, 4, 5, 6, 7};
    size_t filters_per_height = 64;
    static constexpr size_t num_outputs = 2;

    double pos_weight = 1.0;      // weight on the positive class in the loss
    double learning_rate = 1e-4;
    size_t batch_size = 64;
    size_t epochs = 10;
    uint64_t seed = 0;
    double threshold = 0.5;  // positive iff any window scores >= threshold

    double adam_beta1 = 0.9;
    double adam_beta2 = 0.999;
    double adam_eps = 1e-8;

    size_t stride = 25;  // sliding-window stride at inference
    PadMode pad_mode = PadMode::Zeros;
    OovMode oov_mode = OovMode::FreshPerOccurrence;

    size_t total_filters() const { return filter_heights.size() * filters_per_height; }
    EmbedConfig embed_config() const {
        return EmbedConfig{window_len, stride, pad_mode, -0.5, 0.5};
    }
};

// Offsets of each tensor inside the flat parameter vector. Order: per filter
// height (config order) the conv weights [F][h*K] row-major then the conv
// biases [F]; then the output-layer weights [2][total_filters] row-major and
// biases [2]. Checkpoints serialize tensors in this same order.
struct ParamLayout {
    struct Group {
        size_t height;
        size_t weights_off;
        size_t biases_off;
    };
    std::vector<Group> groups;
    size_t fc_weights_off = 0;
    size_t fc_biases_off = 0;
    size_t total = 0;

    static ParamLayout from(const CnnConfig& config);
};

// All network weights as one flat vector; doubles as the gradient container.
struct CnnParams {
    std::vector<double> values;

    static CnnParams zeros(const CnnConfig& config);
    // Uniform +-sqrt(6/(fan_in+fan_out)) per weight tensor, zero biases.
    static CnnParams glorot(const CnnConfig& config, uint64_t seed);

    bool all_finite() const;
};

struct ForwardResult {
    std::vector<double> pooled;   // feature vector, one value per filter
    std::vector<size_t> argmax;   // winning convolution position per filter
    std::array<double, 2> logits{};
    std::array<double, 2> probs{};
    double y_hat = 0.0;  // positive-class probability
};

// Valid convolution over rows, rectifier, one-max pooling, fully connected
// output, softmax. Throws std::invalid_argument on shape mismatch.
ForwardResult forward(const EmbeddedWindow& window, const CnnParams& params,
                      const CnnConfig& config);

// loss = y * (-log(y_hat)) * pos_weight + (1-y) * (-log(1-y_hat)),
// y_hat clamped to [1e-12, 1-1e-12].
double weighted_cross_entropy(int y, double y_hat, double pos_weight);

struct BatchGrad {
    CnnParams grad;       // d(mean loss)/d(theta)
    double mean_loss = 0.0;
    size_t correct = 0;   // items where (y_hat >= threshold) == label
};

// Gradient of the mean batch loss. Items are processed in fixed chunks of
// kGradChunk and the chunk partial sums are reduced in chunk order, so the
// serial and OpenMP variants are bit-identical (and independent of thread
// count). Max pooling routes gradient to the first maximal position.
inline constexpr size_t kGradChunk = 8;
BatchGrad backward_batch_serial(std::span<const EmbeddedWindow> windows,
                                std::span<const int> labels, const CnnParams& params,
                                const CnnConfig& config);
BatchGrad backward_batch(std::span<const EmbeddedWindow> windows, std::span<const int> labels,
                         const CnnParams& params, const CnnConfig& config);

struct TrainTrace {
    std::vector<double> epoch_mean_loss;      // mean of batch losses per epoch
    std::vector<double> epoch_train_accuracy; // batch-time accuracy per epoch
    std::vector<double> epoch_val_accuracy;   // only when a validation set is given
    size_t best_epoch = 0;                    // index into epoch_val_accuracy
};

struct TrainResult {
    CnnParams params;
    TrainTrace trace;
};

struct TrainOptions {
    const std::vector<LabeledText>* validation = nullptr;  // select best epoch by accuracy
    bool parallel = true;  // use the OpenMP gradient path (same bits either way)
};

// One-epoch loop per the configured epoch budget: fixed-order batches of
// batch_size (last partial batch trained), texts embedded per batch with
// fresh OOV draws each epoch, Adam updates. Deterministic given (seed,
// dataset order). Throws on an empty dataset or non-finite loss.
TrainResult train(const std::vector<LabeledText>& dataset, const EmbeddingTable& table,
                  const CnnConfig& config, const TrainOptions& options = {});

struct Prediction {
    Classification label = Classification::Negative;
    double score = 0.0;   // max window y_hat
    size_t n_windows = 0; // 0 signals an empty token list
};

// Sliding-window inference: positive iff any window scores >= threshold.
Prediction predict(std::span<const std::string> tokens, const CnnParams& params,
                   const CnnConfig& config, const EmbeddingTable& table, Rng& rng);

}  // namespace dtx
