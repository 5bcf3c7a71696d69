#include "famoel/objective_reduction.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace famoel {

CorrelationMatrix::CorrelationMatrix(Matrix values) : values_(std::move(values)) {
    if (values_.rows() != values_.cols()) {
        throw Error(ErrorCode::DimensionMismatch, "correlation matrix must be square");
    }
}

std::vector<double> average_ranks(std::span<const double> x) {
    const std::size_t n = x.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
    std::vector<double> ranks(n);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i + 1;
        while (j < n && x[order[j]] == x[order[i]]) ++j;
        // positions i..j-1 hold ranks i+1..j
        const double avg = 0.5 * static_cast<double>(i + 1 + j);
        for (std::size_t k = i; k < j; ++k) ranks[order[k]] = avg;
        i = j;
    }
    return ranks;
}

double spearman(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) {
        throw Error(ErrorCode::DimensionMismatch, "spearman inputs differ in length");
    }
    const auto rx = average_ranks(x);
    const auto ry = average_ranks(y);
    const double n = static_cast<double>(x.size());
    const double mx = std::accumulate(rx.begin(), rx.end(), 0.0) / n;
    const double my = std::accumulate(ry.begin(), ry.end(), 0.0) / n;
    double sxy = 0, sxx = 0, syy = 0;
    for (std::size_t i = 0; i < rx.size(); ++i) {
        sxy += (rx[i] - mx) * (ry[i] - my);
        sxx += (rx[i] - mx) * (rx[i] - mx);
        syy += (ry[i] - my) * (ry[i] - my);
    }
    if (sxx == 0.0 || syy == 0.0) {
        return 0.0;
    }
    return sxy / std::sqrt(sxx * syy);
}

namespace {

std::vector<std::size_t> rank_bins(std::span<const double> x, std::size_t bins) {
    const auto ranks = average_ranks(x);
    const double n = static_cast<double>(x.size());
    std::vector<std::size_t> out(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        const auto b = static_cast<std::size_t>(std::floor((ranks[i] - 0.5) * static_cast<double>(bins) / n));
        out[i] = std::min(bins - 1, b);
    }
    return out;
}

bool is_constant(std::span<const double> x) {
    return std::adjacent_find(x.begin(), x.end(), std::not_equal_to<>()) == x.end();
}

}  // namespace

double rank_grid_ncc(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) {
        throw Error(ErrorCode::DimensionMismatch, "ncc inputs differ in length");
    }
    const std::size_t n = x.size();
    if (n < 4) {
        throw Error(ErrorCode::TooFewSamples, "ncc needs at least 4 samples");
    }
    const auto b = static_cast<std::size_t>(std::floor(std::sqrt(static_cast<double>(n))));
    const auto bx = rank_bins(x, b);
    const auto by = rank_bins(y, b);
    std::vector<std::size_t> counts(b * b, 0);
    for (std::size_t i = 0; i < n; ++i) ++counts[bx[i] * b + by[i]];
    const double log_b = std::log(static_cast<double>(b));
    double sum = 0.0;
    for (std::size_t c : counts) {
        if (c == 0) continue;
        const double p = static_cast<double>(c) / static_cast<double>(n);
        sum += p * std::log(p) / log_b;
    }
    return std::clamp(2.0 + sum, 0.0, 1.0);
}

double signed_ncc(std::span<const double> x, std::span<const double> y) {
    if (x.size() < 4 || y.size() < 4) {
        throw Error(ErrorCode::TooFewSamples, "signed ncc needs at least 4 samples");
    }
    if (is_constant(x) || is_constant(y)) {
        return 0.0;
    }
    const double rho = spearman(x, y);
    if (rho == 0.0) {
        return 0.0;
    }
    const double ncc = rank_grid_ncc(x, y);
    return rho > 0 ? ncc : -ncc;
}

CorrelationMatrix mncie_matrix(const Matrix& objective_values) {
    if (objective_values.rows() < 4) {
        throw Error(ErrorCode::TooFewSamples, "mNCIE needs a population of at least 4");
    }
    const std::size_t m = objective_values.cols();
    std::vector<std::vector<double>> columns(m);
    for (std::size_t j = 0; j < m; ++j) columns[j] = objective_values.column(j);
    CorrelationMatrix out(m);
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = i + 1; j < m; ++j) {
            const double v = signed_ncc(columns[i], columns[j]);
            out(i, j) = v;
            out(j, i) = v;
        }
    }
    return out;
}

CorrelationMatrix averaged_matrix(const CorrelationHistory& history) {
    const std::size_t w = history.window;
    if (w == 0 || history.length() < w) {
        throw Error(ErrorCode::InsufficientHistory, "need " + std::to_string(w) + " matrices, have " +
                                                        std::to_string(history.length()));
    }
    const std::size_t m = history.matrices.back().size();
    Matrix sum(m, m, 0.0);
    for (std::size_t k = history.length() - w; k < history.length(); ++k) {
        const auto& nc = history.matrices[k];
        if (nc.size() != m) {
            throw Error(ErrorCode::DimensionMismatch, "history matrices differ in size");
        }
        for (std::size_t i = 0; i < m; ++i) {
            for (std::size_t j = 0; j < m; ++j) sum(i, j) += nc(i, j);
        }
    }
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < m; ++j) sum(i, j) /= static_cast<double>(w);
    }
    return CorrelationMatrix(std::move(sum));
}

bool SelectionMask::contains(std::size_t objective) const {
    return std::binary_search(active.begin(), active.end(), objective);
}

SelectionMask SelectionMask::full(std::size_t m, int generation) {
    SelectionMask mask;
    mask.active.resize(m);
    std::iota(mask.active.begin(), mask.active.end(), std::size_t{0});
    mask.generation = generation;
    return mask;
}

std::vector<std::size_t> select_from_matrix(const CorrelationMatrix& nc, double tau) {
    const std::size_t m = nc.size();
    std::vector<std::size_t> remaining(m);
    std::iota(remaining.begin(), remaining.end(), std::size_t{0});
    std::vector<std::size_t> selected;

    while (!remaining.empty()) {
        bool any_negative = false;
        for (std::size_t j : remaining) {
            for (std::size_t i = 0; i < m && !any_negative; ++i) any_negative = nc(i, j) < 0.0;
        }

        // Ties resolve to the smallest index: `remaining` is ascending and only strict
        // improvements replace the incumbent.
        std::size_t best = remaining.front();
        double best_score = 0.0;
        bool first = true;
        for (std::size_t j : remaining) {
            double score = 0.0;
            for (std::size_t i = 0; i < m; ++i) {
                if (!any_negative) {
                    score += nc(i, j);
                } else if (nc(i, j) < 0.0) {
                    score += nc(i, j);
                }
            }
            const bool better = any_negative ? score < best_score : score > best_score;
            if (first || better) {
                best = j;
                best_score = score;
                first = false;
            }
        }

        selected.push_back(best);
        std::erase(remaining, best);
        std::erase_if(remaining, [&](std::size_t j) { return nc(best, j) > tau; });
    }
    std::sort(selected.begin(), selected.end());
    return selected;
}

SelectionMask select_representative(int t, const CorrelationHistory& history, double tau, int warmup) {
    if (!(tau > 0.0 && tau < 1.0)) {
        throw Error(ErrorCode::InvalidValue, "tau must lie in (0, 1)");
    }
    if (history.matrices.empty()) {
        throw Error(ErrorCode::InsufficientHistory, "empty correlation history");
    }
    const std::size_t m = history.matrices.back().size();
    if (t < warmup) {
        return SelectionMask::full(m, t);
    }
    SelectionMask mask;
    mask.active = select_from_matrix(averaged_matrix(history), tau);
    mask.generation = t;
    return mask;
}

void ReductionConfig::validate() const {
    if (!(tau > 0.0 && tau < 1.0)) {
        throw Error(ErrorCode::InvalidValue, "tau must lie in (0, 1)");
    }
    if (warmup < 0 || window == 0) {
        throw Error(ErrorCode::InvalidValue, "warmup must be >= 0 and window >= 1");
    }
}

FairnessAwareSelector::FairnessAwareSelector(ReductionConfig config) : config_(config) {
    config_.validate();
    history_.window = config_.window;
}

SelectionMask FairnessAwareSelector::step(int generation, const Matrix& objective_values) {
    history_.append(mncie_matrix(objective_values));
    return select_representative(generation, history_, config_.tau, config_.warmup);
}

}  // namespace famoel
