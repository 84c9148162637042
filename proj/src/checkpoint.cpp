#include "dtx/checkpoint.hpp"

#include <cstring>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

namespace dtx {

namespace {

constexpr const char* kNnMagic = "DTXNN 1";
constexpr const char* kBaselineMagic = "DTXBL 1";

void write_f32(std::ostream& out, double value) {
    const auto f = static_cast<float>(value);
    uint32_t bits;
    std::memcpy(&bits, &f, 4);
    char bytes[4] = {static_cast<char>(bits & 0xFF), static_cast<char>((bits >> 8) & 0xFF),
                     static_cast<char>((bits >> 16) & 0xFF),
                     static_cast<char>((bits >> 24) & 0xFF)};
    out.write(bytes, 4);
}

double read_f32(std::istream& in) {
    unsigned char bytes[4];
    in.read(reinterpret_cast<char*>(bytes), 4);
    if (!in) throw std::runtime_error("checkpoint: truncated tensor data");
    const uint32_t bits = static_cast<uint32_t>(bytes[0]) | (static_cast<uint32_t>(bytes[1]) << 8) |
                          (static_cast<uint32_t>(bytes[2]) << 16) |
                          (static_cast<uint32_t>(bytes[3]) << 24);
    float f;
    std::memcpy(&f, &bits, 4);
    return static_cast<double>(f);
}

void write_tensor(std::ostream& out, const std::vector<double>& values) {
    for (double v : values) write_f32(out, v);
}

std::vector<double> read_tensor(std::istream& in, size_t count) {
    std::vector<double> values(count);
    for (double& v : values) v = read_f32(in);
    return values;
}

using Header = std::map<std::string, std::string>;

// Reads the key-value header up to the `tensors` line.
Header read_header(std::istream& in, const std::string& path, const char* magic) {
    std::string line;
    if (!std::getline(in, line) || line != magic)
        throw std::runtime_error("checkpoint: " + path + ": bad magic (expected '" + magic + "')");
    Header header;
    while (std::getline(in, line)) {
        if (line == "tensors") return header;
        const size_t sp = line.find(' ');
        if (sp == std::string::npos)
            throw std::runtime_error("checkpoint: " + path + ": malformed header line '" + line +
                                     "'");
        header.emplace(line.substr(0, sp), line.substr(sp + 1));
    }
    throw std::runtime_error("checkpoint: " + path + ": missing tensors section");
}

const std::string& header_get(const Header& header, const std::string& key,
                              const std::string& path) {
    auto it = header.find(key);
    if (it == header.end())
        throw std::runtime_error("checkpoint: " + path + ": missing header key '" + key + "'");
    return it->second;
}

std::vector<size_t> parse_size_list(const std::string& s) {
    std::vector<size_t> out;
    std::istringstream iss(s);
    std::string item;
    while (std::getline(iss, item, ',')) out.push_back(std::stoull(item));
    return out;
}

std::string format_double(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

}  // namespace

void save_checkpoint(const std::string& path, const CnnConfig& config, const CnnParams& params) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("checkpoint: cannot open " + path + " for writing");

    out << kNnMagic << "\n";
    out << "window_len " << config.window_len << "\n";
    out << "embed_dim " << config.embed_dim << "\n";
    std::string heights;
    for (size_t i = 0; i < config.filter_heights.size(); ++i) {
        if (i) heights += ',';
        heights += std::to_string(config.filter_heights[i]);
    }
    out << "filter_heights " << heights << "\n";
    out << "filters_per_height " << config.filters_per_height << "\n";
    out << "pos_weight " << format_double(config.pos_weight) << "\n";
    out << "learning_rate " << format_double(config.learning_rate) << "\n";
    out << "batch_size " << config.batch_size << "\n";
    out << "epochs " << config.epochs << "\n";
    out << "seed " << config.seed << "\n";
    out << "threshold " << format_double(config.threshold) << "\n";
    out << "adam_beta1 " << format_double(config.adam_beta1) << "\n";
    out << "adam_beta2 " << format_double(config.adam_beta2) << "\n";
    out << "adam_eps " << format_double(config.adam_eps) << "\n";
    out << "stride " << config.stride << "\n";
    out << "pad_mode " << (config.pad_mode == PadMode::Zeros ? "zeros" : "random") << "\n";
    out << "oov_mode " << (config.oov_mode == OovMode::FreshPerOccurrence ? "fresh" : "frozen")
        << "\n";
    out << "tensors\n";
    write_tensor(out, params.values);
}

LoadedCheckpoint load_checkpoint(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("checkpoint: cannot open " + path);
    const Header header = read_header(in, path, kNnMagic);

    LoadedCheckpoint ck;
    CnnConfig& c = ck.config;
    c.window_len = std::stoull(header_get(header, "window_len", path));
    c.embed_dim = std::stoull(header_get(header, "embed_dim", path));
    c.filter_heights = parse_size_list(header_get(header, "filter_heights", path));
    c.filters_per_height = std::stoull(header_get(header, "filters_per_height", path));
    c.pos_weight = std::stod(header_get(header, "pos_weight", path));
    c.learning_rate = std::stod(header_get(header, "learning_rate", path));
    c.batch_size = std::stoull(header_get(header, "batch_size", path));
    c.epochs = std::stoull(header_get(header, "epochs", path));
    c.seed = std::stoull(header_get(header, "seed", path));
    c.threshold = std::stod(header_get(header, "threshold", path));
    c.adam_beta1 = std::stod(header_get(header, "adam_beta1", path));
    c.adam_beta2 = std::stod(header_get(header, "adam_beta2", path));
    c.adam_eps = std::stod(header_get(header, "adam_eps", path));
    c.stride = std::stoull(header_get(header, "stride", path));
    c.pad_mode = header_get(header, "pad_mode", path) == "random" ? PadMode::Random : PadMode::Zeros;
    c.oov_mode = header_get(header, "oov_mode", path) == "frozen" ? OovMode::FrozenPerWord
                                                                  : OovMode::FreshPerOccurrence;

    const size_t total = ParamLayout::from(c).total;
    ck.params.values = read_tensor(in, total);
    return ck;
}

void save_baseline(const std::string& path, const BaselineModel& model) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("checkpoint: cannot open " + path + " for writing");

    const size_t k = model.pca.input_dim();
    const size_t d = model.pca.reduced_dim();
    out << kBaselineMagic << "\n";
    out << "kind " << model.kind << "\n";
    out << "input_dim " << k << "\n";
    out << "pca_dim " << d << "\n";
    if (model.kind == "tree") {
        out << "n_nodes " << model.tree.nodes.size() << "\n";
    }
    out << "tensors\n";

    write_tensor(out, model.pca.mean);
    for (const auto& comp : model.pca.components) write_tensor(out, comp);
    write_tensor(out, model.pca.explained_variance);

    if (model.kind == "tree") {
        for (const TreeNode& n : model.tree.nodes) {
            write_f32(out, static_cast<double>(n.feature));
            write_f32(out, n.threshold);
            write_f32(out, static_cast<double>(n.left));
            write_f32(out, static_cast<double>(n.right));
            write_f32(out, static_cast<double>(n.label));
            write_f32(out, n.positive_fraction);
        }
    } else {
        write_tensor(out, model.linear.weights);
        write_f32(out, model.linear.bias);
    }
}

BaselineModel load_baseline(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("checkpoint: cannot open " + path);
    const Header header = read_header(in, path, kBaselineMagic);

    BaselineModel model;
    model.kind = header_get(header, "kind", path);
    const size_t k = std::stoull(header_get(header, "input_dim", path));
    const size_t d = std::stoull(header_get(header, "pca_dim", path));

    model.pca.mean = read_tensor(in, k);
    model.pca.components.resize(d);
    for (auto& comp : model.pca.components) comp = read_tensor(in, k);
    model.pca.explained_variance = read_tensor(in, d);

    if (model.kind == "tree") {
        const size_t n_nodes = std::stoull(header_get(header, "n_nodes", path));
        model.tree.nodes.resize(n_nodes);
        for (TreeNode& n : model.tree.nodes) {
            n.feature = static_cast<int>(read_f32(in));
            n.threshold = read_f32(in);
            n.left = static_cast<int>(read_f32(in));
            n.right = static_cast<int>(read_f32(in));
            n.label = static_cast<int>(read_f32(in));
            n.positive_fraction = read_f32(in);
        }
    } else {
        model.linear.kind = model.kind == "svm" ? LinearKind::SvmHinge : LinearKind::Logistic;
        model.linear.weights = read_tensor(in, d);
        model.linear.bias = read_f32(in);
    }
    return model;
}

}  // namespace dtx
