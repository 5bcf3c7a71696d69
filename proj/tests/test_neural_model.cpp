#include <cmath>
#include <random>
#include <sstream>

#include "doctest.h"
#include "test_util.hpp"

#include "famoel/neural_model.hpp"

using namespace famoel;

namespace {

EncodedDataset random_dataset(std::size_t n, std::size_t d, Rng& rng) {
    std::normal_distribution<double> nd(0.0, 1.0);
    EncodedDataset data;
    data.features = Matrix(n, d);
    for (std::size_t r = 0; r < n; ++r) {
        double s = 0;
        for (std::size_t c = 0; c < d; ++c) {
            data.features(r, c) = nd(rng);
            s += data.features(r, c) * (c % 2 ? -1.0 : 1.0);
        }
        data.labels.push_back(s + 0.5 * nd(rng) > 0 ? 1 : 0);
        data.groups.push_back(r % 2 ? Group::Privileged : Group::Unprivileged);
    }
    return data;
}

Genome random_genome(const NetworkShape& shape, Rng& rng, double scale) {
    std::normal_distribution<double> nd(0.0, scale);
    std::vector<double> v(shape.genome_length());
    for (auto& x : v) x = nd(rng);
    return Genome(v);
}

// Unclamped single-sample cross-entropy straight from the forward pass.
double sample_loss(const Genome& g, const NetworkShape& shape, std::span<const double> x, int y) {
    const double p = forward(g, shape, x);
    return -(y * std::log(p) + (1 - y) * std::log(1 - p));
}

}  // namespace

TEST_SUITE("neural_model") {

TEST_CASE("genome length formula and encode/decode round trip") {
    const NetworkShape shape{2, 3};
    CHECK(shape.genome_length() == 13);
    Rng rng(1);
    const Genome g = random_genome(shape, rng, 1.0);
    const auto w = decode(g, shape);
    CHECK(w.hidden_weights.rows() == 3);
    CHECK(w.hidden_weights.cols() == 2);
    CHECK(w.hidden_weights(1, 0) == g[2]);  // W1 row-major
    CHECK(w.hidden_bias[0] == g[6]);
    CHECK(w.output_weights[2] == g[11]);
    CHECK(w.output_bias == g[12]);
    CHECK(encode(w) == g);
    CHECK(testutil::error_code_of([&] { decode(Genome(std::vector<double>(12)), shape); }) ==
          ErrorCode::ShapeMismatch);
}

TEST_CASE("init_genome: deterministic, Glorot bounds, zero biases") {
    const NetworkShape shape{5, 4};
    Rng a(42), b(42);
    const Genome g1 = init_genome(shape, a);
    const Genome g2 = init_genome(shape, b);
    CHECK(g1 == g2);
    const auto w = decode(g1, shape);
    const double s1 = std::sqrt(6.0 / (5 + 4));
    const double s2 = std::sqrt(6.0 / (4 + 1));
    for (double v : w.hidden_weights.data()) CHECK(std::abs(v) <= s1);
    for (double v : w.output_weights) CHECK(std::abs(v) <= s2);
    for (double v : w.hidden_bias) CHECK(v == 0.0);
    CHECK(w.output_bias == 0.0);
}

TEST_CASE("forward: zero genome gives 0.5; output in (0,1); output-layer negation gives 1 - p") {
    const NetworkShape shape{3, 4};
    const std::vector<double> x = {0.3, -1.2, 2.0};
    CHECK(forward(Genome(shape, 0.0), shape, x) == 0.5);
    Rng rng(5);
    for (int t = 0; t < 200; ++t) {
        Genome g = random_genome(shape, rng, t < 100 ? 1.0 : 50.0);
        const double p = forward(g, shape, x);
        CHECK(p > 0.0);
        CHECK(p < 1.0);
        CHECK(std::isfinite(p));
        Genome neg = g;
        for (std::size_t i = shape.n_hidden * (shape.n_inputs + 1); i < g.size(); ++i) neg[i] = -neg[i];
        if (t < 100) CHECK(forward(neg, shape, x) == doctest::Approx(1.0 - p).epsilon(1e-12));
    }
    const std::vector<double> bad = {1.0};
    CHECK(testutil::error_code_of([&] { forward(Genome(shape, 0.0), shape, bad); }) == ErrorCode::ShapeMismatch);
}

TEST_CASE("predict_labels: tie at 0.5 is positive; threshold 0 labels everything positive") {
    Rng rng(2);
    const auto data = random_dataset(20, 3, rng);
    const NetworkShape shape{3, 2};
    for (int v : predict_labels(Genome(shape, 0.0), shape, data)) CHECK(v == 1);
    const Genome g = random_genome(shape, rng, 2.0);
    for (int v : predict_labels(g, shape, data, 0.0)) CHECK(v == 1);
}

TEST_CASE("cross_entropy: ln 2 at p = 0.5; clamp boundary; empty dataset") {
    const std::vector<double> half = {0.5};
    const std::vector<int> one = {1};
    CHECK(cross_entropy(half, one) == doctest::Approx(std::log(2.0)).epsilon(1e-12));
    const std::vector<double> sure = {1.0};
    CHECK(cross_entropy(sure, one) == doctest::Approx(-std::log(1.0 - 1e-7)).epsilon(1e-9));
    CHECK(cross_entropy(sure, one) == doctest::Approx(1e-7).epsilon(1e-6));
    CHECK(testutil::error_code_of([] { cross_entropy(std::vector<double>{}, std::vector<int>{}); }) ==
          ErrorCode::EmptyDataset);
}

TEST_CASE("cross_entropy of a dataset is the size-weighted mean over a partition") {
    Rng rng(8);
    const auto data = random_dataset(30, 4, rng);
    const NetworkShape shape{4, 3};
    const Genome g = random_genome(shape, rng, 1.0);
    std::vector<std::size_t> a, b;
    for (std::size_t i = 0; i < 30; ++i) (i % 3 ? a : b).push_back(i);
    const double whole = cross_entropy(g, shape, data);
    const double parts = (cross_entropy(g, shape, data.subset(a)) * a.size() +
                          cross_entropy(g, shape, data.subset(b)) * b.size()) / 30.0;
    CHECK(whole == doctest::Approx(parts).epsilon(1e-12));
}

TEST_CASE("gradient matches central finite differences on 100 random (genome, sample) pairs") {
    Rng rng(2024);
    const double h = 1e-5;
    double worst = 0.0;
    for (int t = 0; t < 100; ++t) {
        const NetworkShape shape{1 + static_cast<std::size_t>(t % 5), 1 + static_cast<std::size_t>(t % 7)};
        const Genome g = random_genome(shape, rng, 0.8);
        std::normal_distribution<double> nd(0.0, 1.0);
        std::vector<double> x(shape.n_inputs);
        for (auto& v : x) v = nd(rng);
        const int y = t % 2;
        std::vector<double> grad(g.size(), 0.0);
        accumulate_gradient(g, shape, x, y, grad);
        for (std::size_t i = 0; i < g.size(); ++i) {
            Genome plus = g, minus = g;
            plus[i] += h;
            minus[i] -= h;
            const double numeric = (sample_loss(plus, shape, x, y) - sample_loss(minus, shape, x, y)) / (2 * h);
            const double scale = std::max(std::abs(numeric), std::abs(grad[i]));
            // Below 1e-6 the finite difference itself is dominated by round-off.
            const double err = scale > 1e-6 ? std::abs(numeric - grad[i]) / scale : std::abs(numeric - grad[i]);
            worst = std::max(worst, err);
        }
    }
    CHECK(worst <= 1e-4);
}

TEST_CASE("partial_train: zero learning rate leaves the genome bit-exact; deterministic per seed") {
    Rng rng(3);
    const auto data = random_dataset(50, 4, rng);
    const NetworkShape shape{4, 5};
    const Genome g = init_genome(shape, rng);
    Rng r1(9), r2(9);
    CHECK(partial_train(g, shape, data, TrainingConfig{0.0, 1, 32}, r1) == g);
    Rng a(11), b(11);
    const TrainingConfig cfg{0.01, 2, 8};
    CHECK(partial_train(g, shape, data, cfg, a) == partial_train(g, shape, data, cfg, b));
    Rng c(12);
    CHECK(testutil::error_code_of([&] { partial_train(g, shape, data, TrainingConfig{-1.0, 1, 8}, c); }) ==
          ErrorCode::InvalidValue);
}

TEST_CASE("partial_train: one epoch at lr 1e-4 does not increase training CE (<= 2 of 20 violations)") {
    int violations = 0;
    for (int s = 0; s < 20; ++s) {
        Rng rng(1000 + s);
        const auto data = random_dataset(200, 6, rng);
        const NetworkShape shape{6, 8};
        const Genome g = init_genome(shape, rng);
        const double before = cross_entropy(g, shape, data);
        const Genome trained = partial_train(g, shape, data, TrainingConfig{1e-4, 1, 32}, rng);
        violations += cross_entropy(trained, shape, data) > before;
    }
    CHECK(violations <= 2);
}

TEST_CASE("genome serialization round trip and truncation") {
    Rng rng(4);
    const Genome g = random_genome(NetworkShape{3, 3}, rng, 1.0);
    std::stringstream ss;
    write_genome(ss, g);
    const std::string bytes = ss.str();
    CHECK(bytes.size() == 8 + 8 * g.size());
    CHECK(static_cast<unsigned char>(bytes[0]) == g.size());  // little-endian length
    std::stringstream in(bytes);
    CHECK(read_genome(in) == g);
    std::stringstream cut(bytes.substr(0, bytes.size() - 3));
    CHECK(testutil::error_code_of([&] { read_genome(cut); }) == ErrorCode::Io);
}

}  // TEST_SUITE
