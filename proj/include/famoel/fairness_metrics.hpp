#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "famoel/data_ingest.hpp"
#include "famoel/neural_model.hpp"

namespace famoel {

inline constexpr std::size_t kFairnessMeasureCount = 25;
inline constexpr std::size_t kObjectiveCount = 26;  // CE followed by f1..f25

// Confusion counts and derived rates of one group. A rate whose denominator is zero is
// reported as 0 and flagged in `degenerate`.
struct GroupConfusion {
    std::size_t tp = 0, fp = 0, fn = 0, tn = 0;
    double tpr = 0, fpr = 0, fnr = 0, for_ = 0, fdr = 0, ppv = 0, npv = 0, tnr = 0, err = 0;
    double selection_rate = 0;  // P(yhat = 1 | g)

    enum Rate : unsigned { TPR = 1u << 0, FPR = 1u << 1, FNR = 1u << 2, FOR = 1u << 3, FDR = 1u << 4,
                           PPV = 1u << 5, NPV = 1u << 6, TNR = 1u << 7 };
    unsigned degenerate = 0;

    [[nodiscard]] std::size_t size() const noexcept { return tp + fp + fn + tn; }
    [[nodiscard]] bool is_degenerate(Rate r) const noexcept { return (degenerate & r) != 0; }
};

struct GroupRates {
    GroupConfusion unprivileged;
    GroupConfusion privileged;
};

struct MetricsConfig {
    double alpha = 2.0;                    // generalized entropy exponent, Fair16-Fair18
    double dirichlet_concentration = 1.0;  // Fair25 smoothing

    void validate() const;
};

using RawMeasures = std::array<double, kFairnessMeasureCount>;       // Fair1..Fair25
using FairnessObjectives = std::array<double, kFairnessMeasureCount>;  // f1..f25
using ObjectiveVector = std::array<double, kObjectiveCount>;          // CE, f1..f25

const std::array<std::string, kObjectiveCount>& objective_names();

GroupRates group_confusion(std::span<const int> y, std::span<const int> yhat, std::span<const Group> groups);

// b_i = yhat_i - y_i + 1
std::vector<int> benefit_vector(std::span<const int> y, std::span<const int> yhat);

// Ratio a/b with 0/0 -> 1 and a/0 -> +inf for a > 0.
double safe_ratio(double numerator, double denominator);

double fair25_bias_amplification(std::span<const int> y, std::span<const int> yhat, std::span<const Group> groups,
                                 const MetricsConfig& cfg);

RawMeasures raw_measures(const GroupRates& rates, std::span<const int> y, std::span<const int> yhat,
                         std::span<const Group> groups, const MetricsConfig& cfg);
RawMeasures raw_measures(std::span<const int> y, std::span<const int> yhat, std::span<const Group> groups,
                         const MetricsConfig& cfg);

// 1 - min(r, 1/r); 0 and +inf both map to 1.
double ratio_objective(double ratio);

FairnessObjectives transform(const RawMeasures& raw);

ObjectiveVector evaluate_predictions(std::span<const int> y, std::span<const int> yhat,
                                     std::span<const double> probabilities, std::span<const Group> groups,
                                     const MetricsConfig& cfg);

ObjectiveVector evaluate_individual(const Genome& genome, const NetworkShape& shape, const EncodedDataset& data,
                                    const MetricsConfig& cfg);

}  // namespace famoel
