#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "famoel/common.hpp"

namespace famoel {

// Symmetric |E| x |E| matrix with entries in [-1, 1] and a unit diagonal.
class CorrelationMatrix {
public:
    CorrelationMatrix() = default;
    explicit CorrelationMatrix(std::size_t m) : values_(m, m, 0.0) {
        for (std::size_t i = 0; i < m; ++i) values_(i, i) = 1.0;
    }
    explicit CorrelationMatrix(Matrix values);

    [[nodiscard]] std::size_t size() const noexcept { return values_.rows(); }
    double operator()(std::size_t i, std::size_t j) const noexcept { return values_(i, j); }
    double& operator()(std::size_t i, std::size_t j) noexcept { return values_(i, j); }
    [[nodiscard]] const Matrix& values() const noexcept { return values_; }

private:
    Matrix values_;
};

// Average ranks (1-based) with ties sharing their mean rank.
std::vector<double> average_ranks(std::span<const double> x);

double spearman(std::span<const double> x, std::span<const double> y);

// Rank-grid nonlinear correlation coefficient in [0, 1]: b = floor(sqrt(N)) quantile bins per
// variable, NCC = 2 + sum p_ij log_b p_ij, clamped to [0, 1].
double rank_grid_ncc(std::span<const double> x, std::span<const double> y);

// sign(Spearman) * NCC; 0 when either input is constant. Throws TooFewSamples for N < 4.
double signed_ncc(std::span<const double> x, std::span<const double> y);

// Pairwise signed_ncc over the columns of a (population x objectives) matrix.
CorrelationMatrix mncie_matrix(const Matrix& objective_values);

struct CorrelationHistory {
    std::vector<CorrelationMatrix> matrices;  // NC_1 .. NC_t
    std::size_t window = 10;

    void append(CorrelationMatrix m) { matrices.push_back(std::move(m)); }
    [[nodiscard]] std::size_t length() const noexcept { return matrices.size(); }
};

// Elementwise mean of the last `history.window` matrices.
CorrelationMatrix averaged_matrix(const CorrelationHistory& history);

struct SelectionMask {
    std::vector<std::size_t> active;  // sorted objective indices
    int generation = 0;

    [[nodiscard]] bool contains(std::size_t objective) const;
    [[nodiscard]] std::size_t size() const noexcept { return active.size(); }

    static SelectionMask full(std::size_t m, int generation = 0);
    friend bool operator==(const SelectionMask& a, const SelectionMask& b) { return a.active == b.active; }
};

// The conflict-first greedy loop over an averaged matrix. Returned indices are sorted.
std::vector<std::size_t> select_from_matrix(const CorrelationMatrix& averaged, double tau);

// Full set while t < warmup; otherwise the greedy loop over the averaged history.
SelectionMask select_representative(int t, const CorrelationHistory& history, double tau, int warmup = 10);

struct ReductionConfig {
    double tau = 0.22;
    int warmup = 10;
    std::size_t window = 10;

    void validate() const;
};

// Per-generation driver: computes NC_t from the current population, appends it, selects.
class FairnessAwareSelector {
public:
    explicit FairnessAwareSelector(ReductionConfig config);

    SelectionMask step(int generation, const Matrix& objective_values);

    [[nodiscard]] const CorrelationHistory& history() const noexcept { return history_; }

private:
    ReductionConfig config_;
    CorrelationHistory history_;
};

}  // namespace famoel
