#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "famoel/common.hpp"

namespace famoel {

struct FriedmanResult {
    double statistic = 0.0;
    double p_value = 1.0;
    bool significant = false;
    std::vector<double> mean_ranks;  // per treatment, rank 1 = best
    std::size_t blocks = 0;
    std::size_t treatments = 0;
};

// samples: blocks x treatments. Within-block ranks (ties averaged), chi-squared approximation
// with k - 1 degrees of freedom.
FriedmanResult friedman_test(const Matrix& samples, bool lower_is_better = true, double alpha = 0.05);

enum class Outcome { Better, Similar, Worse };

char outcome_symbol(Outcome o);

struct DatasetComparison {
    std::string dataset;
    std::vector<double> means;    // per algorithm
    std::vector<double> stddevs;  // per algorithm (sample standard deviation)
    FriedmanResult omnibus;       // all algorithms together
    std::vector<Outcome> versus_reference;  // per algorithm; the reference itself is Similar
};

struct WinTieLoss {
    std::size_t win = 0;
    std::size_t tie = 0;
    std::size_t loss = 0;
};

struct ComparisonReport {
    std::vector<std::string> algorithms;
    std::size_t reference = 0;
    bool lower_is_better = true;
    std::vector<DatasetComparison> datasets;
    std::vector<WinTieLoss> totals;  // per algorithm versus the reference
};

struct ComparisonSample {
    std::string dataset;
    std::string algorithm;
    std::string block;
    double value = 0.0;
};

// Groups samples by dataset; each dataset's blocks must be present for every algorithm.
// Each algorithm is compared against `reference` with a two-treatment Friedman test.
ComparisonReport friedman_compare(const std::vector<ComparisonSample>& samples, const std::string& reference,
                                  bool lower_is_better = true, double alpha = 0.05);

}  // namespace famoel
