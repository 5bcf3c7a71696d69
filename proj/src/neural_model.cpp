#include "famoel/neural_model.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>

namespace famoel {

namespace {

// Kept inside the open interval: large |z| would otherwise round to exactly 0 or 1.
double sigmoid(double z) {
    constexpr double lo = std::numeric_limits<double>::denorm_min();
    const double hi = std::nextafter(1.0, 0.0);
    if (z >= 0) {
        return std::min(hi, 1.0 / (1.0 + std::exp(-z)));
    }
    const double e = std::exp(z);
    return std::max(lo, e / (1.0 + e));
}

void check_shape(const Genome& genome, const NetworkShape& shape) {
    if (genome.size() != shape.genome_length()) {
        throw Error(ErrorCode::ShapeMismatch, "genome length " + std::to_string(genome.size()) + " != " +
                                                  std::to_string(shape.genome_length()));
    }
}

std::uint64_t to_le(std::uint64_t v) {
    if constexpr (std::endian::native == std::endian::big) {
        std::uint64_t r = 0;
        for (int i = 0; i < 8; ++i) r |= ((v >> (8 * i)) & 0xFFu) << (8 * (7 - i));
        return r;
    }
    return v;
}

}  // namespace

void NetworkShape::validate() const {
    if (n_inputs < 1 || n_hidden < 1) {
        throw Error(ErrorCode::InvalidValue, "network needs at least one input and one hidden node");
    }
}

NetworkWeights decode(const Genome& genome, const NetworkShape& shape) {
    check_shape(genome, shape);
    NetworkWeights w;
    w.hidden_weights = Matrix(shape.n_hidden, shape.n_inputs);
    std::size_t k = 0;
    for (std::size_t h = 0; h < shape.n_hidden; ++h) {
        for (std::size_t i = 0; i < shape.n_inputs; ++i) w.hidden_weights(h, i) = genome[k++];
    }
    w.hidden_bias.assign(genome.values().begin() + static_cast<std::ptrdiff_t>(k),
                         genome.values().begin() + static_cast<std::ptrdiff_t>(k + shape.n_hidden));
    k += shape.n_hidden;
    w.output_weights.assign(genome.values().begin() + static_cast<std::ptrdiff_t>(k),
                            genome.values().begin() + static_cast<std::ptrdiff_t>(k + shape.n_hidden));
    k += shape.n_hidden;
    w.output_bias = genome[k];
    return w;
}

Genome encode(const NetworkWeights& weights) {
    std::vector<double> v(weights.hidden_weights.data());
    v.insert(v.end(), weights.hidden_bias.begin(), weights.hidden_bias.end());
    v.insert(v.end(), weights.output_weights.begin(), weights.output_weights.end());
    v.push_back(weights.output_bias);
    return Genome(std::move(v));
}

Genome init_genome(const NetworkShape& shape, Rng& rng) {
    shape.validate();
    Genome g(shape, 0.0);
    const double s1 = std::sqrt(6.0 / static_cast<double>(shape.n_inputs + shape.n_hidden));
    const double s2 = std::sqrt(6.0 / static_cast<double>(shape.n_hidden + 1));
    std::uniform_real_distribution<double> u1(-s1, s1);
    std::uniform_real_distribution<double> u2(-s2, s2);
    const std::size_t n_w1 = shape.n_hidden * shape.n_inputs;
    for (std::size_t k = 0; k < n_w1; ++k) g[k] = u1(rng);
    const std::size_t w2_begin = n_w1 + shape.n_hidden;
    for (std::size_t h = 0; h < shape.n_hidden; ++h) g[w2_begin + h] = u2(rng);
    return g;
}

double forward(const Genome& genome, const NetworkShape& shape, std::span<const double> features) {
    check_shape(genome, shape);
    if (features.size() != shape.n_inputs) {
        throw Error(ErrorCode::ShapeMismatch, "feature length " + std::to_string(features.size()) +
                                                  " != n_inputs " + std::to_string(shape.n_inputs));
    }
    const auto v = genome.values();
    const std::size_t nh = shape.n_hidden;
    const std::size_t ni = shape.n_inputs;
    const double* w1 = v.data();
    const double* b1 = w1 + nh * ni;
    const double* w2 = b1 + nh;
    const double b2 = w2[nh];
    double z = b2;
    for (std::size_t h = 0; h < nh; ++h) {
        const double* row = w1 + h * ni;
        double a = b1[h];
        for (std::size_t i = 0; i < ni; ++i) a += row[i] * features[i];
        z += w2[h] * std::tanh(a);
    }
    return sigmoid(z);
}

std::vector<double> predict_proba(const Genome& genome, const NetworkShape& shape, const EncodedDataset& data) {
    std::vector<double> p(data.size());
    for (std::size_t r = 0; r < data.size(); ++r) p[r] = forward(genome, shape, data.features.row(r));
    return p;
}

std::vector<int> predict_labels(const Genome& genome, const NetworkShape& shape, const EncodedDataset& data,
                                double threshold) {
    std::vector<int> labels(data.size());
    for (std::size_t r = 0; r < data.size(); ++r) {
        labels[r] = forward(genome, shape, data.features.row(r)) >= threshold ? 1 : 0;
    }
    return labels;
}

double cross_entropy(std::span<const double> probabilities, std::span<const int> labels) {
    if (probabilities.empty()) {
        throw Error(ErrorCode::EmptyDataset, "cross-entropy of an empty dataset");
    }
    if (probabilities.size() != labels.size()) {
        throw Error(ErrorCode::DimensionMismatch, "probabilities and labels differ in length");
    }
    double total = 0.0;
    for (std::size_t i = 0; i < probabilities.size(); ++i) {
        const double p = std::clamp(probabilities[i], kProbabilityClamp, 1.0 - kProbabilityClamp);
        total -= labels[i] ? std::log(p) : std::log(1.0 - p);
    }
    return total / static_cast<double>(probabilities.size());
}

double cross_entropy(const Genome& genome, const NetworkShape& shape, const EncodedDataset& data) {
    if (data.size() == 0) {
        throw Error(ErrorCode::EmptyDataset, "cross-entropy of an empty dataset");
    }
    const auto p = predict_proba(genome, shape, data);
    return cross_entropy(p, data.labels);
}

void accumulate_gradient(const Genome& genome, const NetworkShape& shape, std::span<const double> features,
                         int label, std::span<double> grad) {
    check_shape(genome, shape);
    const std::size_t nh = shape.n_hidden;
    const std::size_t ni = shape.n_inputs;
    const auto v = genome.values();
    const double* w1 = v.data();
    const double* b1 = w1 + nh * ni;
    const double* w2 = b1 + nh;

    thread_local std::vector<double> hidden;
    hidden.resize(nh);
    double z = w2[nh];
    for (std::size_t h = 0; h < nh; ++h) {
        const double* row = w1 + h * ni;
        double a = b1[h];
        for (std::size_t i = 0; i < ni; ++i) a += row[i] * features[i];
        hidden[h] = std::tanh(a);
        z += w2[h] * hidden[h];
    }
    // dL/dz for sigmoid + cross-entropy.
    const double delta = sigmoid(z) - static_cast<double>(label);

    double* g_w1 = grad.data();
    double* g_b1 = g_w1 + nh * ni;
    double* g_w2 = g_b1 + nh;
    g_w2[nh] += delta;
    for (std::size_t h = 0; h < nh; ++h) {
        g_w2[h] += delta * hidden[h];
        const double dh = delta * w2[h] * (1.0 - hidden[h] * hidden[h]);
        g_b1[h] += dh;
        double* row = g_w1 + h * ni;
        for (std::size_t i = 0; i < ni; ++i) row[i] += dh * features[i];
    }
}

Genome partial_train(Genome genome, const NetworkShape& shape, const EncodedDataset& train,
                     const TrainingConfig& config, Rng& rng) {
    check_shape(genome, shape);
    if (config.learning_rate < 0) {
        throw Error(ErrorCode::InvalidValue, "learning rate must be >= 0");
    }
    if (train.size() == 0 || config.epochs == 0 || config.batch_size == 0) {
        return genome;
    }
    std::vector<std::size_t> order(train.size());
    std::vector<double> grad(genome.size());
    auto params = genome.values();
    for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::shuffle(order.begin(), order.end(), rng);
        for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
            const std::size_t stop = std::min(order.size(), start + config.batch_size);
            std::fill(grad.begin(), grad.end(), 0.0);
            for (std::size_t k = start; k < stop; ++k) {
                accumulate_gradient(genome, shape, train.features.row(order[k]), train.labels[order[k]], grad);
            }
            const double step = config.learning_rate / static_cast<double>(stop - start);
            for (std::size_t p = 0; p < params.size(); ++p) params[p] -= step * grad[p];
        }
    }
    return genome;
}

void write_genome(std::ostream& out, const Genome& genome) {
    const std::uint64_t n = to_le(genome.size());
    out.write(reinterpret_cast<const char*>(&n), sizeof n);
    for (double v : genome.values()) {
        const std::uint64_t bits = to_le(std::bit_cast<std::uint64_t>(v));
        out.write(reinterpret_cast<const char*>(&bits), sizeof bits);
    }
}

Genome read_genome(std::istream& in) {
    std::uint64_t n = 0;
    if (!in.read(reinterpret_cast<char*>(&n), sizeof n)) {
        throw Error(ErrorCode::Io, "truncated genome header");
    }
    n = to_le(n);
    std::vector<double> values(n);
    for (auto& v : values) {
        std::uint64_t bits = 0;
        if (!in.read(reinterpret_cast<char*>(&bits), sizeof bits)) {
            throw Error(ErrorCode::Io, "truncated genome payload");
        }
        v = std::bit_cast<double>(to_le(bits));
    }
    return Genome(std::move(values));
}

}  // namespace famoel
