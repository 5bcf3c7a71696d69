#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "famoel/common.hpp"

namespace famoel {

// One point per row; every objective minimized.
using PointSet = Matrix;

// true iff a is no worse than b everywhere and strictly better somewhere.
bool dominates(std::span<const double> a, std::span<const double> b);

// Keeps non-dominated rows in input order; exact duplicates collapse to the first occurrence.
PointSet nondominated_filter(const PointSet& set);

PointSet build_pseudo_front(std::span<const PointSet> pooled);

struct NormalizationBounds {
    std::vector<double> lower;
    std::vector<double> upper;

    static NormalizationBounds from(const PointSet& set);
};

// (x - lower) / (upper - lower) per axis; an axis with lower == upper maps to 0.
PointSet normalize(const PointSet& set, const NormalizationBounds& bounds);

double generational_distance(const PointSet& set, const PointSet& reference);

// Schott's spacing with L1 nearest-neighbour distances.
double spacing(const PointSet& set);

// d(s, X) = min_x (sum_k |s_k - x_k|^0.1)^10
double l01_dissimilarity(std::span<const double> s, std::span<const double> x);

// Greedy evaluation of PD(S) = max_s [PD(S \ s) + d(s, S \ s)]: the point with the largest
// dissimilarity to the rest is removed first and its dissimilarity accumulated.
double pure_diversity(const PointSet& set);

inline constexpr double kHypervolumeReference = 1.2;

// Normalizes by `bounds`, clamps at the reference and estimates the dominated part of
// [0, reference]^m from `n_samples` uniform draws.
double hypervolume_mc(const PointSet& set, const NormalizationBounds& bounds, std::size_t n_samples,
                      std::uint64_t seed, double reference = kHypervolumeReference);

// Exact dominated volume for m <= 3.
double hypervolume_exact(const PointSet& set, std::span<const double> reference);

struct IndicatorValues {
    double gd = 0;
    double pd = 0;
    double sp = 0;
    double hv = 0;
};

struct IndicatorConfig {
    std::size_t hv_samples = 100000;
    std::uint64_t hv_seed = 12345;
};

// GD against the normalized front; SP, PD and HV on the normalized set. SP is 0 for fewer
// than two distinct points.
IndicatorValues compute_indicators(const PointSet& set, const PointSet& front, const IndicatorConfig& config);

}  // namespace famoel
