#include "dtx/embed.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace dtx {

EmbeddingTable EmbeddingTable::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("vectors: cannot open " + path);

    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("vectors: " + path + ": empty file");
    size_t declared = 0, dim = 0;
    {
        std::istringstream iss(line);
        if (!(iss >> declared >> dim) || dim == 0)
            throw std::runtime_error("vectors: " + path + ":1: expected header `vocab_size dim`");
    }

    EmbeddingTable table;
    table.dim_ = dim;
    table.vectors_.reserve(declared);
    size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::istringstream iss(line);
        std::string word;
        iss >> word;
        std::vector<double> vec;
        vec.reserve(dim);
        double v;
        while (iss >> v) vec.push_back(v);
        if (vec.size() != dim)
            throw std::runtime_error("vectors: " + path + ":" + std::to_string(line_no) +
                                     ": expected " + std::to_string(dim) + " values, got " +
                                     std::to_string(vec.size()));
        if (!table.vectors_.emplace(word, std::move(vec)).second)
            throw std::runtime_error("vectors: " + path + ":" + std::to_string(line_no) +
                                     ": duplicate word '" + word + "'");
    }
    if (table.vectors_.size() != declared)
        throw std::runtime_error("vectors: " + path + ": header declares " +
                                 std::to_string(declared) + " words, file has " +
                                 std::to_string(table.vectors_.size()));
    return table;
}

void EmbeddingTable::insert(const std::string& word, std::vector<double> vec) {
    if (dim_ == 0) dim_ = vec.size();
    if (vec.size() != dim_) throw std::runtime_error("vectors: inconsistent dimension on insert");
    vectors_[word] = std::move(vec);
}

namespace {

// Fills one window starting at token `start`.
EmbeddedWindow build_window(std::span<const std::string> tokens, size_t start,
                            const EmbeddingTable& table, const EmbedConfig& config, Rng& rng) {
    const size_t L = config.window_len;
    const size_t K = table.dim();
    EmbeddedWindow w;
    w.rows = L;
    w.cols = K;
    w.start = start;
    w.n_tokens = std::min(L, tokens.size() - start);
    w.data.assign(L * K, 0.0);

    for (size_t i = 0; i < w.n_tokens; ++i) {
        const std::vector<double>* vec = table.find(tokens[start + i]);
        if (vec) {
            std::copy(vec->begin(), vec->end(), w.data.begin() + i * K);
        } else {
            for (size_t j = 0; j < K; ++j)
                w.at(i, j) = rng.uniform_real(config.oov_low, config.oov_high);
        }
    }
    if (config.pad_mode == PadMode::Random) {
        for (size_t i = w.n_tokens; i < L; ++i)
            for (size_t j = 0; j < K; ++j)
                w.at(i, j) = rng.uniform_real(config.oov_low, config.oov_high);
    }
    return w;
}

}  // namespace

std::vector<EmbeddedWindow> embed_tokens(std::span<const std::string> tokens,
                                         const EmbeddingTable& table, const EmbedConfig& config,
                                         Rng& rng) {
    const size_t L = config.window_len;
    const size_t stride = config.stride == 0 ? L : config.stride;
    std::vector<EmbeddedWindow> windows;

    if (tokens.size() <= L) {
        windows.push_back(build_window(tokens, 0, table, config, rng));
        return windows;
    }
    const size_t last_start = tokens.size() - L;
    size_t start = 0;
    for (; start <= last_start; start += stride) {
        windows.push_back(build_window(tokens, start, table, config, rng));
    }
    // Anchor a final window at the tail when the stride overshoots it.
    if (start - stride < last_start) {
        windows.push_back(build_window(tokens, last_start, table, config, rng));
    }
    return windows;
}

EmbeddedWindow embed_first_window(std::span<const std::string> tokens, const EmbeddingTable& table,
                                  const EmbedConfig& config, Rng& rng) {
    return build_window(tokens, 0, table, config, rng);
}

}  // namespace dtx
