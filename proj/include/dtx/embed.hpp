#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "dtx/rng.hpp"

namespace dtx {

// Pre-trained word vectors. Text format: first line `vocab_size dim`, then
// one line per word: `word v1 ... vdim`. Immutable after load.
class EmbeddingTable {
public:
    static EmbeddingTable load(const std::string& path);

    size_t dim() const { return dim_; }
    size_t size() const { return vectors_.size(); }

    // nullptr when the word is out of vocabulary.
    const std::vector<double>* find(const std::string& word) const {
        auto it = vectors_.find(word);
        return it == vectors_.end() ? nullptr : &it->second;
    }

    void insert(const std::string& word, std::vector<double> vec);

private:
    std::unordered_map<std::string, std::vector<double>> vectors_;
    size_t dim_ = 0;
};

// Fixed window_len x dim matrix; row i is the embedding of token i, rows past
// n_tokens are padding.
struct EmbeddedWindow {
    size_t rows = 0;
    size_t cols = 0;
    size_t n_tokens = 0;  // real token rows; the rest are padding
    size_t start = 0;     // index of the first covered token
    std::vector<double> data;  // row-major

    double& at(size_t r, size_t c) { return data[r * cols + c]; }
    double at(size_t r, size_t c) const { return data[r * cols + c]; }
};

enum class PadMode { Zeros, Random };

struct EmbedConfig {
    size_t window_len = 50;
    size_t stride = 25;
    PadMode pad_mode = PadMode::Zeros;
    // Uniform range for out-of-vocabulary tokens (fresh draw per occurrence).
    double oov_low = -0.5;
    double oov_high = 0.5;
};

// Embeds a token sequence into one or more windows. Shorter sequences are
// padded to window_len (zeros by default); longer ones produce sliding
// windows at `stride` spacing, with a final window anchored at the tail so
// every token is covered.
std::vector<EmbeddedWindow> embed_tokens(std::span<const std::string> tokens,
                                         const EmbeddingTable& table, const EmbedConfig& config,
                                         Rng& rng);

// Embeds the first window only (token 0 onward, truncated at window_len);
// the form consumed by training.
EmbeddedWindow embed_first_window(std::span<const std::string> tokens,
                                  const EmbeddingTable& table, const EmbedConfig& config,
                                  Rng& rng);

}  // namespace dtx
