#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <vector>

#include "famoel/common.hpp"
#include "famoel/data_ingest.hpp"

namespace famoel {

// One hidden tanh layer, one sigmoid output unit.
struct NetworkShape {
    std::size_t n_inputs = 1;
    std::size_t n_hidden = 1;

    [[nodiscard]] std::size_t genome_length() const noexcept { return n_hidden * (n_inputs + 1) + n_hidden + 1; }
    void validate() const;

    friend bool operator==(const NetworkShape&, const NetworkShape&) = default;
};

// Flat parameter vector, layer-major:
//   [ W1 (n_hidden x n_inputs, row-major) | b1 (n_hidden) | w2 (n_hidden) | b2 ]
class Genome {
public:
    Genome() = default;
    explicit Genome(std::vector<double> values) : values_(std::move(values)) {}
    Genome(const NetworkShape& shape, double fill) : values_(shape.genome_length(), fill) {}

    [[nodiscard]] std::size_t size() const noexcept { return values_.size(); }
    [[nodiscard]] std::span<const double> values() const noexcept { return values_; }
    [[nodiscard]] std::span<double> values() noexcept { return values_; }
    double& operator[](std::size_t i) noexcept { return values_[i]; }
    double operator[](std::size_t i) const noexcept { return values_[i]; }

    friend bool operator==(const Genome&, const Genome&) = default;

private:
    std::vector<double> values_;
};

struct NetworkWeights {
    Matrix hidden_weights;  // n_hidden x n_inputs
    std::vector<double> hidden_bias;
    std::vector<double> output_weights;
    double output_bias = 0.0;
};

NetworkWeights decode(const Genome& genome, const NetworkShape& shape);
Genome encode(const NetworkWeights& weights);

// Glorot-uniform weights, zero biases.
Genome init_genome(const NetworkShape& shape, Rng& rng);

double forward(const Genome& genome, const NetworkShape& shape, std::span<const double> features);

std::vector<double> predict_proba(const Genome& genome, const NetworkShape& shape, const EncodedDataset& data);
std::vector<int> predict_labels(const Genome& genome, const NetworkShape& shape, const EncodedDataset& data,
                                double threshold = 0.5);

inline constexpr double kProbabilityClamp = 1e-7;

double cross_entropy(std::span<const double> probabilities, std::span<const int> labels);
double cross_entropy(const Genome& genome, const NetworkShape& shape, const EncodedDataset& data);

// d/dθ of the single-sample loss -[y ln p + (1-y) ln(1-p)], accumulated into `grad`.
void accumulate_gradient(const Genome& genome, const NetworkShape& shape, std::span<const double> features,
                         int label, std::span<double> grad);

struct TrainingConfig {
    double learning_rate = 1e-3;
    std::size_t epochs = 1;
    std::size_t batch_size = 32;
};

// Minibatch SGD on cross-entropy. Rows are reshuffled every epoch from `rng`.
Genome partial_train(Genome genome, const NetworkShape& shape, const EncodedDataset& train,
                     const TrainingConfig& config, Rng& rng);

// Little-endian: uint64 length followed by that many float64 values.
void write_genome(std::ostream& out, const Genome& genome);
Genome read_genome(std::istream& in);

}  // namespace famoel
