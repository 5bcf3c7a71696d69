#include "famoel/indicators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace famoel {

namespace {

void require_same_dim(const PointSet& a, const PointSet& b) {
    if (a.cols() != b.cols()) {
        throw Error(ErrorCode::DimensionMismatch, "point dimensions differ: " + std::to_string(a.cols()) + " vs " +
                                                      std::to_string(b.cols()));
    }
}

bool equal_rows(std::span<const double> a, std::span<const double> b) {
    return std::equal(a.begin(), a.end(), b.begin(), b.end());
}

// 2-d dominated area of points (x, y) against (rx, ry); points must be strictly inside.
double area_2d(std::vector<std::pair<double, double>> pts, double rx, double ry) {
    std::sort(pts.begin(), pts.end());
    double area = 0.0;
    double best_y = ry;
    for (const auto& [x, y] : pts) {
        if (y < best_y) {
            area += (rx - x) * (best_y - y);
            best_y = y;
        }
    }
    return area;
}

}  // namespace

bool dominates(std::span<const double> a, std::span<const double> b) {
    bool strictly = false;
    for (std::size_t k = 0; k < a.size(); ++k) {
        if (a[k] > b[k]) return false;
        strictly = strictly || a[k] < b[k];
    }
    return strictly;
}

PointSet nondominated_filter(const PointSet& set) {
    PointSet out;
    const std::size_t n = set.rows();
    for (std::size_t i = 0; i < n; ++i) {
        bool keep = true;
        for (std::size_t j = 0; j < n && keep; ++j) {
            if (j == i) continue;
            if (dominates(set.row(j), set.row(i))) keep = false;
            else if (j < i && equal_rows(set.row(j), set.row(i))) keep = false;
        }
        if (keep) out.append_row(set.row(i));
    }
    if (out.rows() == 0) {
        out = PointSet(0, set.cols());
    }
    return out;
}

PointSet build_pseudo_front(std::span<const PointSet> pooled) {
    if (pooled.empty()) {
        throw Error(ErrorCode::TooFewPoints, "pseudo-front needs at least one point set");
    }
    PointSet all;
    for (const auto& s : pooled) {
        for (std::size_t r = 0; r < s.rows(); ++r) all.append_row(s.row(r));
    }
    return nondominated_filter(all);
}

NormalizationBounds NormalizationBounds::from(const PointSet& set) {
    if (set.rows() == 0) {
        throw Error(ErrorCode::TooFewPoints, "bounds of an empty set");
    }
    NormalizationBounds b;
    b.lower.assign(set.cols(), std::numeric_limits<double>::infinity());
    b.upper.assign(set.cols(), -std::numeric_limits<double>::infinity());
    for (std::size_t r = 0; r < set.rows(); ++r) {
        for (std::size_t k = 0; k < set.cols(); ++k) {
            b.lower[k] = std::min(b.lower[k], set(r, k));
            b.upper[k] = std::max(b.upper[k], set(r, k));
        }
    }
    return b;
}

PointSet normalize(const PointSet& set, const NormalizationBounds& bounds) {
    if (bounds.lower.size() != set.cols() || bounds.upper.size() != set.cols()) {
        throw Error(ErrorCode::DimensionMismatch, "bounds dimension differs from points");
    }
    PointSet out(set.rows(), set.cols());
    for (std::size_t r = 0; r < set.rows(); ++r) {
        for (std::size_t k = 0; k < set.cols(); ++k) {
            const double range = bounds.upper[k] - bounds.lower[k];
            out(r, k) = range > 0.0 ? (set(r, k) - bounds.lower[k]) / range : 0.0;
        }
    }
    return out;
}

double generational_distance(const PointSet& set, const PointSet& reference) {
    if (set.rows() == 0 || reference.rows() == 0) {
        throw Error(ErrorCode::TooFewPoints, "GD needs nonempty set and reference");
    }
    require_same_dim(set, reference);
    double total = 0.0;
    for (std::size_t i = 0; i < set.rows(); ++i) {
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < reference.rows(); ++j) {
            double d2 = 0.0;
            for (std::size_t k = 0; k < set.cols(); ++k) {
                const double d = set(i, k) - reference(j, k);
                d2 += d * d;
            }
            best = std::min(best, d2);
        }
        total += std::sqrt(best);
    }
    return total / static_cast<double>(set.rows());
}

double spacing(const PointSet& set) {
    const std::size_t n = set.rows();
    if (n < 2) {
        throw Error(ErrorCode::TooFewPoints, "spacing needs at least two points");
    }
    std::vector<double> d(n, std::numeric_limits<double>::infinity());
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (i == j) continue;
            double l1 = 0.0;
            for (std::size_t k = 0; k < set.cols(); ++k) l1 += std::abs(set(i, k) - set(j, k));
            d[i] = std::min(d[i], l1);
        }
    }
    const double mean = std::accumulate(d.begin(), d.end(), 0.0) / static_cast<double>(n);
    double ss = 0.0;
    for (double di : d) ss += (mean - di) * (mean - di);
    return std::sqrt(ss / static_cast<double>(n - 1));
}

double l01_dissimilarity(std::span<const double> s, std::span<const double> x) {
    double acc = 0.0;
    for (std::size_t k = 0; k < s.size(); ++k) acc += std::pow(std::abs(s[k] - x[k]), 0.1);
    return std::pow(acc, 10.0);
}

double pure_diversity(const PointSet& set) {
    const std::size_t n = set.rows();
    if (n < 2) {
        return 0.0;
    }
    Matrix dist(n, n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            dist(i, j) = dist(j, i) = l01_dissimilarity(set.row(i), set.row(j));
        }
    }
    // An exact duplicate adds 0 under the recursion, so it is dropped up front rather than
    // left to perturb the greedy order.
    std::vector<bool> alive(n, true);
    std::size_t live = n;
    for (std::size_t j = 1; j < n; ++j) {
        for (std::size_t i = 0; i < j; ++i) {
            if (alive[i] && std::ranges::equal(set.row(i), set.row(j))) {
                alive[j] = false;
                --live;
                break;
            }
        }
    }
    double total = 0.0;
    for (std::size_t remaining = live; remaining > 1; --remaining) {
        std::size_t pick = n;
        double pick_d = -1.0;
        for (std::size_t i = 0; i < n; ++i) {
            if (!alive[i]) continue;
            double nearest = std::numeric_limits<double>::infinity();
            for (std::size_t j = 0; j < n; ++j) {
                if (j != i && alive[j]) nearest = std::min(nearest, dist(i, j));
            }
            if (nearest > pick_d) {
                pick_d = nearest;
                pick = i;
            }
        }
        total += pick_d;
        alive[pick] = false;
    }
    return total;
}

double hypervolume_mc(const PointSet& set, const NormalizationBounds& bounds, std::size_t n_samples,
                      std::uint64_t seed, double reference) {
    if (set.rows() == 0) {
        throw Error(ErrorCode::TooFewPoints, "hypervolume of an empty set");
    }
    if (n_samples == 0) {
        throw Error(ErrorCode::InvalidValue, "hypervolume needs at least one sample");
    }
    PointSet pts = normalize(set, bounds);
    const std::size_t m = pts.cols();
    // Points at or beyond the reference on some axis dominate nothing inside the box.
    PointSet useful;
    for (std::size_t r = 0; r < pts.rows(); ++r) {
        bool inside = true;
        for (std::size_t k = 0; k < m; ++k) inside = inside && pts(r, k) < reference;
        if (inside) useful.append_row(pts.row(r));
    }
    if (useful.rows() == 0) {
        return 0.0;
    }
    useful = nondominated_filter(useful);

    Rng rng(seed);
    std::uniform_real_distribution<double> u(0.0, reference);
    std::vector<double> sample(m);
    std::size_t hits = 0;
    for (std::size_t s = 0; s < n_samples; ++s) {
        for (auto& v : sample) v = u(rng);
        for (std::size_t r = 0; r < useful.rows(); ++r) {
            const auto p = useful.row(r);
            std::size_t k = 0;
            while (k < m && p[k] <= sample[k]) ++k;
            if (k == m) {
                ++hits;
                break;
            }
        }
    }
    return std::pow(reference, static_cast<double>(m)) * static_cast<double>(hits) / static_cast<double>(n_samples);
}

double hypervolume_exact(const PointSet& set, std::span<const double> reference) {
    const std::size_t m = reference.size();
    if (m > 3) {
        throw Error(ErrorCode::DimensionTooHigh, "exact hypervolume supports m <= 3");
    }
    if (set.rows() > 0 && set.cols() != m) {
        throw Error(ErrorCode::DimensionMismatch, "reference dimension differs from points");
    }
    std::vector<std::vector<double>> pts;
    for (std::size_t r = 0; r < set.rows(); ++r) {
        bool inside = true;
        for (std::size_t k = 0; k < m; ++k) inside = inside && set(r, k) < reference[k];
        if (inside) pts.emplace_back(set.row(r).begin(), set.row(r).end());
    }
    if (pts.empty()) {
        return 0.0;
    }
    if (m == 1) {
        double best = reference[0];
        for (const auto& p : pts) best = std::min(best, p[0]);
        return reference[0] - best;
    }
    if (m == 2) {
        std::vector<std::pair<double, double>> xy;
        for (const auto& p : pts) xy.emplace_back(p[0], p[1]);
        return area_2d(std::move(xy), reference[0], reference[1]);
    }
    // m == 3: sweep along the third axis, summing slab areas.
    std::sort(pts.begin(), pts.end(), [](const auto& a, const auto& b) { return a[2] < b[2]; });
    double volume = 0.0;
    std::vector<std::pair<double, double>> active;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        active.emplace_back(pts[i][0], pts[i][1]);
        const double z_next = i + 1 < pts.size() ? pts[i + 1][2] : reference[2];
        const double depth = z_next - pts[i][2];
        if (depth > 0) {
            volume += depth * area_2d(active, reference[0], reference[1]);
        }
    }
    return volume;
}

IndicatorValues compute_indicators(const PointSet& set, const PointSet& front, const IndicatorConfig& config) {
    const auto bounds = NormalizationBounds::from(front);
    const PointSet ns = normalize(set, bounds);
    const PointSet nf = normalize(front, bounds);
    IndicatorValues v;
    v.gd = generational_distance(ns, nf);
    v.sp = ns.rows() >= 2 ? spacing(ns) : 0.0;
    v.pd = pure_diversity(ns);
    v.hv = hypervolume_mc(set, bounds, config.hv_samples, config.hv_seed);
    return v;
}

}  // namespace famoel
