#include "dtx/nn.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace dtx {

ParamLayout ParamLayout::from(const CnnConfig& config) {
    ParamLayout layout;
    size_t off = 0;
    for (size_t h : config.filter_heights) {
        ParamLayout::Group g;
        g.height = h;
        g.weights_off = off;
        off += config.filters_per_height * h * config.embed_dim;
        g.biases_off = off;
        off += config.filters_per_height;
        layout.groups.push_back(g);
    }
    layout.fc_weights_off = off;
    off += CnnConfig::num_outputs * config.total_filters();
    layout.fc_biases_off = off;
    off += CnnConfig::num_outputs;
    layout.total = off;
    return layout;
}

CnnParams CnnParams::zeros(const CnnConfig& config) {
    CnnParams p;
    p.values.assign(ParamLayout::from(config).total, 0.0);
    return p;
}

CnnParams CnnParams::glorot(const CnnConfig& config, uint64_t seed) {
    const ParamLayout layout = ParamLayout::from(config);
    CnnParams p;
    p.values.assign(layout.total, 0.0);
    Rng rng(seed);
    for (const auto& g : layout.groups) {
        const size_t fan_in = g.height * config.embed_dim;
        const size_t fan_out = config.filters_per_height;
        const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
        const size_t count = config.filters_per_height * fan_in;
        for (size_t i = 0; i < count; ++i)
            p.values[g.weights_off + i] = rng.uniform_real(-limit, limit);
    }
    {
        const double limit =
            std::sqrt(6.0 / static_cast<double>(config.total_filters() + CnnConfig::num_outputs));
        const size_t count = CnnConfig::num_outputs * config.total_filters();
        for (size_t i = 0; i < count; ++i)
            p.values[layout.fc_weights_off + i] = rng.uniform_real(-limit, limit);
    }
    return p;
}

bool CnnParams::all_finite() const {
    for (double v : values) {
        if (!std::isfinite(v)) return false;
    }
    return true;
}

namespace {

void softmax2(const std::array<double, 2>& logits, std::array<double, 2>& probs) {
    const double m = std::max(logits[0], logits[1]);
    const double e0 = std::exp(logits[0] - m);
    const double e1 = std::exp(logits[1] - m);
    const double z = e0 + e1;
    probs[0] = e0 / z;
    probs[1] = e1 / z;
}

// Forward pass keeping the intermediates backward needs. `conv_preact`, when
// non-null, receives the pre-rectifier value at each filter's winning
// position.
ForwardResult forward_impl(const EmbeddedWindow& window, const CnnParams& params,
                           const CnnConfig& config, const ParamLayout& layout,
                           std::vector<double>* conv_preact) {
    const size_t L = config.window_len;
    const size_t K = config.embed_dim;
    if (window.rows != L || window.cols != K)
        throw std::invalid_argument("forward: window shape " + std::to_string(window.rows) + "x" +
                                    std::to_string(window.cols) + " does not match config " +
                                    std::to_string(L) + "x" + std::to_string(K));
    if (params.values.size() != layout.total)
        throw std::invalid_argument("forward: parameter vector size mismatch");

    const size_t F = config.filters_per_height;
    ForwardResult out;
    out.pooled.assign(config.total_filters(), 0.0);
    out.argmax.assign(config.total_filters(), 0);
    if (conv_preact) conv_preact->assign(config.total_filters(), 0.0);

    for (size_t gi = 0; gi < layout.groups.size(); ++gi) {
        const auto& g = layout.groups[gi];
        const size_t h = g.height;
        const size_t positions = L - h + 1;
        for (size_t f = 0; f < F; ++f) {
            const double* w = params.values.data() + g.weights_off + f * h * K;
            const double bias = params.values[g.biases_off + f];
            double best = 0.0;
            double best_preact = 0.0;
            size_t best_pos = 0;
            bool first = true;
            for (size_t p = 0; p < positions; ++p) {
                double acc = bias;
                const double* win = window.data.data() + p * K;
                for (size_t i = 0; i < h * K; ++i) acc += w[i] * win[i];
                const double activated = acc > 0.0 ? acc : 0.0;
                if (first || activated > best) {
                    best = activated;
                    best_preact = acc;
                    best_pos = p;
                    first = false;
                }
            }
            const size_t fi = gi * F + f;
            out.pooled[fi] = best;
            out.argmax[fi] = best_pos;
            if (conv_preact) (*conv_preact)[fi] = best_preact;
        }
    }

    const size_t T = config.total_filters();
    for (size_t o = 0; o < CnnConfig::num_outputs; ++o) {
        double acc = params.values[layout.fc_biases_off + o];
        const double* w = params.values.data() + layout.fc_weights_off + o * T;
        for (size_t f = 0; f < T; ++f) acc += w[f] * out.pooled[f];
        out.logits[o] = acc;
    }
    softmax2(out.logits, out.probs);
    out.y_hat = out.probs[1];
    return out;
}

}  // namespace

ForwardResult forward(const EmbeddedWindow& window, const CnnParams& params,
                      const CnnConfig& config) {
    return forward_impl(window, params, config, ParamLayout::from(config), nullptr);
}

double weighted_cross_entropy(int y, double y_hat, double pos_weight) {
    constexpr double eps = 1e-12;
    const double p = std::clamp(y_hat, eps, 1.0 - eps);
    return y == 1 ? -std::log(p) * pos_weight : -std::log(1.0 - p);
}

namespace {

// Accumulates one item's loss gradient into `grad` (+=) and returns its loss.
double backward_item(const EmbeddedWindow& window, int label, const CnnParams& params,
                     const CnnConfig& config, const ParamLayout& layout, CnnParams& grad,
                     bool& correct) {
    std::vector<double> conv_preact;
    const ForwardResult fw = forward_impl(window, params, config, layout, &conv_preact);
    const double loss = weighted_cross_entropy(label, fw.y_hat, config.pos_weight);
    correct = (fw.y_hat >= config.threshold) == (label == 1);

    // d loss / d logits through the softmax; the positive branch carries the
    // class weight.
    const double scale = label == 1 ? config.pos_weight : 1.0;
    std::array<double, 2> dlogits{};
    for (size_t k = 0; k < 2; ++k) {
        const double target = (label == 1 ? (k == 1 ? 1.0 : 0.0) : (k == 0 ? 1.0 : 0.0));
        dlogits[k] = scale * (fw.probs[k] - target);
    }

    const size_t T = config.total_filters();
    std::vector<double> dpooled(T, 0.0);
    for (size_t o = 0; o < CnnConfig::num_outputs; ++o) {
        const double* w = params.values.data() + layout.fc_weights_off + o * T;
        double* gw = grad.values.data() + layout.fc_weights_off + o * T;
        for (size_t f = 0; f < T; ++f) {
            gw[f] += dlogits[o] * fw.pooled[f];
            dpooled[f] += dlogits[o] * w[f];
        }
        grad.values[layout.fc_biases_off + o] += dlogits[o];
    }

    const size_t F = config.filters_per_height;
    const size_t K = config.embed_dim;
    for (size_t gi = 0; gi < layout.groups.size(); ++gi) {
        const auto& g = layout.groups[gi];
        const size_t h = g.height;
        for (size_t f = 0; f < F; ++f) {
            const size_t fi = gi * F + f;
            if (conv_preact[fi] <= 0.0) continue;  // rectifier inactive at the winner
            const double d = dpooled[fi];
            if (d == 0.0) continue;
            const size_t p = fw.argmax[fi];
            const double* win = window.data.data() + p * K;
            double* gw = grad.values.data() + g.weights_off + f * h * K;
            for (size_t i = 0; i < h * K; ++i) gw[i] += d * win[i];
            grad.values[g.biases_off + f] += d;
        }
    }
    return loss;
}

BatchGrad backward_batch_impl(std::span<const EmbeddedWindow> windows, std::span<const int> labels,
                              const CnnParams& params, const CnnConfig& config, bool parallel) {
    if (windows.size() != labels.size())
        throw std::invalid_argument("backward: windows/labels size mismatch");
    const ParamLayout layout = ParamLayout::from(config);
    const size_t n = windows.size();
    const size_t n_chunks = (n + kGradChunk - 1) / kGradChunk;

    std::vector<CnnParams> partials(n_chunks);
    std::vector<double> chunk_loss(n_chunks, 0.0);
    std::vector<size_t> chunk_correct(n_chunks, 0);

#pragma omp parallel for schedule(dynamic) if (parallel)
    for (int64_t c = 0; c < static_cast<int64_t>(n_chunks); ++c) {
        CnnParams partial = CnnParams::zeros(config);
        double loss = 0.0;
        size_t correct = 0;
        const size_t begin = static_cast<size_t>(c) * kGradChunk;
        const size_t end = std::min(begin + kGradChunk, n);
        for (size_t i = begin; i < end; ++i) {
            bool ok = false;
            loss += backward_item(windows[i], labels[i], params, config, layout, partial, ok);
            if (ok) ++correct;
        }
        partials[c] = std::move(partial);
        chunk_loss[c] = loss;
        chunk_correct[c] = correct;
    }

    // Fixed-order reduction: chunk partials summed in chunk order, so the
    // result does not depend on thread count or scheduling.
    BatchGrad out;
    out.grad = CnnParams::zeros(config);
    for (size_t c = 0; c < n_chunks; ++c) {
        const std::vector<double>& src = partials[c].values;
        for (size_t i = 0; i < layout.total; ++i) out.grad.values[i] += src[i];
        out.mean_loss += chunk_loss[c];
        out.correct += chunk_correct[c];
    }
    const double inv = 1.0 / static_cast<double>(n);
    for (double& v : out.grad.values) v *= inv;
    out.mean_loss *= inv;
    return out;
}

}  // namespace

BatchGrad backward_batch_serial(std::span<const EmbeddedWindow> windows,
                                std::span<const int> labels, const CnnParams& params,
                                const CnnConfig& config) {
    return backward_batch_impl(windows, labels, params, config, false);
}

BatchGrad backward_batch(std::span<const EmbeddedWindow> windows, std::span<const int> labels,
                         const CnnParams& params, const CnnConfig& config) {
    return backward_batch_impl(windows, labels, params, config, true);
}

namespace {

struct AdamState {
    std::vector<double> m;
    std::vector<double> v;
    int64_t t = 0;

    explicit AdamState(size_t n) : m(n, 0.0), v(n, 0.0) {}

    void step(CnnParams& params, const CnnParams& grad, const CnnConfig& config) {
        ++t;
        const double b1 = config.adam_beta1;
        const double b2 = config.adam_beta2;
        const double corr1 = 1.0 - std::pow(b1, static_cast<double>(t));
        const double corr2 = 1.0 - std::pow(b2, static_cast<double>(t));
        const auto n = static_cast<int64_t>(params.values.size());
#pragma omp parallel for schedule(static)
        for (int64_t i = 0; i < n; ++i) {
            const double g = grad.values[i];
            m[i] = b1 * m[i] + (1.0 - b1) * g;
            v[i] = b2 * v[i] + (1.0 - b2) * g * g;
            const double mhat = m[i] / corr1;
            const double vhat = v[i] / corr2;
            params.values[i] -= config.learning_rate * mhat / (std::sqrt(vhat) + config.adam_eps);
        }
    }
};

// Embedding table extended with a frozen random vector per out-of-vocabulary
// word, for the deterministic OOV mode.
EmbeddingTable freeze_oov_words(const std::vector<LabeledText>& dataset,
                                const std::vector<LabeledText>* validation,
                                const EmbeddingTable& table, const CnnConfig& config) {
    EmbeddingTable frozen = table;
    auto add_missing = [&](const std::vector<LabeledText>& texts) {
        for (const LabeledText& t : texts) {
            for (const std::string& w : t.tokens) {
                if (frozen.find(w)) continue;
                Rng rng(mix_seed(config.seed, std::hash<std::string>{}(w)));
                std::vector<double> vec(table.dim());
                for (double& x : vec) x = rng.uniform_real(-0.5, 0.5);
                frozen.insert(w, std::move(vec));
            }
        }
    };
    add_missing(dataset);
    if (validation) add_missing(*validation);
    return frozen;
}

double evaluate_accuracy(const std::vector<LabeledText>& texts, const CnnParams& params,
                         const CnnConfig& config, const EmbeddingTable& table, uint64_t salt) {
    if (texts.empty()) return 0.0;
    size_t correct = 0;
    for (size_t i = 0; i < texts.size(); ++i) {
        Rng rng(mix_seed(salt, i));
        const Prediction pred = predict(texts[i].tokens, params, config, table, rng);
        const bool positive = pred.label == Classification::Positive;
        if (positive == (texts[i].label == 1)) ++correct;
    }
    return static_cast<double>(correct) / static_cast<double>(texts.size());
}

}  // namespace

TrainResult train(const std::vector<LabeledText>& dataset, const EmbeddingTable& table,
                  const CnnConfig& config, const TrainOptions& options) {
    if (dataset.empty()) throw std::invalid_argument("train: empty dataset");
    if (table.dim() != config.embed_dim)
        throw std::invalid_argument("train: vector dimension " + std::to_string(table.dim()) +
                                    " does not match config embed_dim " +
                                    std::to_string(config.embed_dim));

    const EmbeddingTable* lookup = &table;
    EmbeddingTable frozen;
    if (config.oov_mode == OovMode::FrozenPerWord) {
        frozen = freeze_oov_words(dataset, options.validation, table, config);
        lookup = &frozen;
    }

    TrainResult result;
    result.params = CnnParams::glorot(config, config.seed);
    AdamState adam(result.params.values.size());
    const EmbedConfig embed_cfg = config.embed_config();

    CnnParams best_params = result.params;
    double best_val = -1.0;

    for (size_t epoch = 0; epoch < config.epochs; ++epoch) {
        const uint64_t epoch_seed = mix_seed(config.seed, 0x1000 + epoch);
        double loss_sum = 0.0;
        size_t n_batches = 0;
        size_t correct = 0;

        for (size_t begin = 0; begin < dataset.size(); begin += config.batch_size) {
            const size_t end = std::min(begin + config.batch_size, dataset.size());
            std::vector<EmbeddedWindow> windows(end - begin);
            std::vector<int> labels(end - begin);
            const auto count = static_cast<int64_t>(end - begin);
#pragma omp parallel for schedule(static) if (options.parallel)
            for (int64_t k = 0; k < count; ++k) {
                const size_t i = begin + static_cast<size_t>(k);
                Rng rng(mix_seed(epoch_seed, i));
                windows[k] = embed_first_window(dataset[i].tokens, *lookup, embed_cfg, rng);
                labels[k] = dataset[i].label;
            }

            const BatchGrad bg =
                options.parallel
                    ? backward_batch(windows, labels, result.params, config)
                    : backward_batch_serial(windows, labels, result.params, config);
            if (!std::isfinite(bg.mean_loss))
                throw std::runtime_error("train: non-finite batch loss at epoch " +
                                         std::to_string(epoch) + ", batch " +
                                         std::to_string(n_batches));
            adam.step(result.params, bg.grad, config);
            loss_sum += bg.mean_loss;
            correct += bg.correct;
            ++n_batches;
        }

        result.trace.epoch_mean_loss.push_back(loss_sum / static_cast<double>(n_batches));
        result.trace.epoch_train_accuracy.push_back(static_cast<double>(correct) /
                                                    static_cast<double>(dataset.size()));

        if (options.validation) {
            const double acc = evaluate_accuracy(*options.validation, result.params, config,
                                                 *lookup, mix_seed(config.seed, 0x2000 + epoch));
            result.trace.epoch_val_accuracy.push_back(acc);
            if (acc > best_val) {
                best_val = acc;
                best_params = result.params;
                result.trace.best_epoch = epoch;
            }
        }
    }

    if (options.validation && !result.trace.epoch_val_accuracy.empty())
        result.params = std::move(best_params);
    return result;
}

Prediction predict(std::span<const std::string> tokens, const CnnParams& params,
                   const CnnConfig& config, const EmbeddingTable& table, Rng& rng) {
    Prediction pred;
    if (tokens.empty()) {
        pred.label = Classification::Negative;
        pred.score = 0.0;
        pred.n_windows = 0;
        return pred;
    }
    const std::vector<EmbeddedWindow> windows =
        embed_tokens(tokens, table, config.embed_config(), rng);
    pred.n_windows = windows.size();
    double best = 0.0;
    for (const EmbeddedWindow& w : windows) {
        const ForwardResult fw = forward(w, params, config);
        best = std::max(best, fw.y_hat);
    }
    pred.score = best;
    pred.label = best >= config.threshold ? Classification::Positive : Classification::Negative;
    return pred;
}

}  // namespace dtx
