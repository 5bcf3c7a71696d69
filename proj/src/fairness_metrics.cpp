#include "famoel/fairness_metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace famoel {

namespace {

void check_lengths(std::size_t a, std::size_t b, std::size_t c) {
    if (a != b || a != c) {
        throw Error(ErrorCode::DimensionMismatch, "y, yhat and groups must have equal length");
    }
}

// Returns 0 and sets the flag when the denominator is empty.
double rate(std::size_t num, std::size_t den, unsigned flag, unsigned& degenerate) {
    if (den == 0) {
        degenerate |= flag;
        return 0.0;
    }
    return static_cast<double>(num) / static_cast<double>(den);
}

GroupConfusion finish(GroupConfusion c) {
    using R = GroupConfusion;
    c.tpr = rate(c.tp, c.tp + c.fn, R::TPR, c.degenerate);
    c.fnr = rate(c.fn, c.tp + c.fn, R::FNR, c.degenerate);
    c.fpr = rate(c.fp, c.fp + c.tn, R::FPR, c.degenerate);
    c.tnr = rate(c.tn, c.fp + c.tn, R::TNR, c.degenerate);
    c.ppv = rate(c.tp, c.tp + c.fp, R::PPV, c.degenerate);
    c.fdr = rate(c.fp, c.tp + c.fp, R::FDR, c.degenerate);
    c.npv = rate(c.tn, c.tn + c.fn, R::NPV, c.degenerate);
    c.for_ = rate(c.fn, c.tn + c.fn, R::FOR, c.degenerate);
    const std::size_t n = c.size();
    c.err = n ? static_cast<double>(c.fn + c.fp) / static_cast<double>(n) : 0.0;
    c.selection_rate = n ? static_cast<double>(c.tp + c.fp) / static_cast<double>(n) : 0.0;
    return c;
}

double x_ln_x(double x) { return x > 0.0 ? x * std::log(x) : 0.0; }

// Benefit relative to a mean; an all-zero benefit set is treated as perfectly equal.
double relative(double b, double mean) { return mean > 0.0 ? b / mean : 1.0; }

struct BenefitStats {
    double n = 0;
    double sum = 0;
    [[nodiscard]] double mean() const { return n > 0 ? sum / n : 0.0; }
};

double theil(std::span<const int> b, std::span<const Group> groups, const Group* only, double mean) {
    double acc = 0.0;
    double n = 0.0;
    for (std::size_t i = 0; i < b.size(); ++i) {
        if (only && groups[i] != *only) continue;
        acc += x_ln_x(relative(b[i], mean));
        n += 1.0;
    }
    return n > 0 ? acc / n : 0.0;
}

double root(double t) { return 2.0 * std::sqrt(std::max(0.0, t)); }

double smoothed_log_disparity(std::span<const int> z, std::span<const Group> groups, double c) {
    double n[2] = {0, 0};
    double ones[2] = {0, 0};
    for (std::size_t i = 0; i < z.size(); ++i) {
        const auto g = static_cast<std::size_t>(groups[i]);
        n[g] += 1.0;
        ones[g] += z[i] == 1 ? 1.0 : 0.0;
    }
    double eps = 0.0;
    for (int outcome = 0; outcome <= 1; ++outcome) {
        double log_p[2];
        for (int g = 0; g < 2; ++g) {
            const double count = outcome == 1 ? ones[g] : n[g] - ones[g];
            log_p[g] = std::log((count + c / 2.0) / (n[g] + c));
        }
        eps = std::max(eps, std::abs(log_p[0] - log_p[1]));
    }
    return eps;
}

}  // namespace

void MetricsConfig::validate() const {
    if (!(alpha > 0.0) || alpha == 1.0) {
        throw Error(ErrorCode::InvalidValue, "alpha must be positive and != 1");
    }
    if (!(dirichlet_concentration > 0.0)) {
        throw Error(ErrorCode::InvalidValue, "dirichlet concentration must be positive");
    }
}

const std::array<std::string, kObjectiveCount>& objective_names() {
    static const std::array<std::string, kObjectiveCount> names = [] {
        std::array<std::string, kObjectiveCount> out;
        out[0] = "CE";
        for (std::size_t k = 1; k < kObjectiveCount; ++k) out[k] = "f" + std::to_string(k);
        return out;
    }();
    return names;
}

GroupRates group_confusion(std::span<const int> y, std::span<const int> yhat, std::span<const Group> groups) {
    check_lengths(y.size(), yhat.size(), groups.size());
    GroupConfusion c[2];
    for (std::size_t i = 0; i < y.size(); ++i) {
        auto& g = c[static_cast<std::size_t>(groups[i])];
        if (y[i] == 1) {
            (yhat[i] == 1 ? g.tp : g.fn)++;
        } else {
            (yhat[i] == 1 ? g.fp : g.tn)++;
        }
    }
    if (c[0].size() == 0 || c[1].size() == 0) {
        throw Error(ErrorCode::MissingGroup, c[0].size() == 0 ? "no unprivileged rows" : "no privileged rows");
    }
    return {finish(c[0]), finish(c[1])};
}

std::vector<int> benefit_vector(std::span<const int> y, std::span<const int> yhat) {
    if (y.size() != yhat.size()) {
        throw Error(ErrorCode::DimensionMismatch, "y and yhat must have equal length");
    }
    std::vector<int> b(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) b[i] = yhat[i] - y[i] + 1;
    return b;
}

double safe_ratio(double numerator, double denominator) {
    if (denominator == 0.0) {
        return numerator == 0.0 ? 1.0 : std::numeric_limits<double>::infinity();
    }
    return numerator / denominator;
}

double fair25_bias_amplification(std::span<const int> y, std::span<const int> yhat, std::span<const Group> groups,
                                 const MetricsConfig& cfg) {
    check_lengths(y.size(), yhat.size(), groups.size());
    const bool has_u = std::find(groups.begin(), groups.end(), Group::Unprivileged) != groups.end();
    const bool has_p = std::find(groups.begin(), groups.end(), Group::Privileged) != groups.end();
    if (!has_u || !has_p) {
        throw Error(ErrorCode::MissingGroup, "Fair25 needs both groups");
    }
    const double c = cfg.dirichlet_concentration;
    return smoothed_log_disparity(yhat, groups, c) - smoothed_log_disparity(y, groups, c);
}

RawMeasures raw_measures(const GroupRates& rates, std::span<const int> y, std::span<const int> yhat,
                         std::span<const Group> groups, const MetricsConfig& cfg) {
    const auto& u = rates.unprivileged;
    const auto& p = rates.privileged;
    RawMeasures m{};
    m[0] = u.tpr - p.tpr;
    m[1] = u.fpr - p.fpr;
    m[2] = u.fnr - p.fnr;
    m[3] = u.for_ - p.for_;
    m[4] = u.fdr - p.fdr;
    m[5] = u.err - p.err;
    m[6] = safe_ratio(u.fpr, p.fpr);
    m[7] = safe_ratio(u.fnr, p.fnr);
    m[8] = safe_ratio(u.for_, p.for_);
    m[9] = safe_ratio(u.fdr, p.fdr);
    m[10] = safe_ratio(u.err, p.err);
    m[11] = 0.5 * ((u.tpr - p.tpr) + (u.fpr - p.fpr));
    m[12] = 0.5 * (std::abs(u.tpr - p.tpr) + std::abs(u.fpr - p.fpr));
    m[13] = safe_ratio(u.selection_rate, p.selection_rate);
    m[14] = u.selection_rate - p.selection_rate;

    const auto b = benefit_vector(y, yhat);
    BenefitStats all;
    BenefitStats per_group[2];
    for (std::size_t i = 0; i < b.size(); ++i) {
        all.n += 1;
        all.sum += b[i];
        auto& g = per_group[static_cast<std::size_t>(groups[i])];
        g.n += 1;
        g.sum += b[i];
    }
    const double n = all.n;
    const double mu = all.mean();
    const double a = cfg.alpha;
    const double scale = 1.0 / (n * a * (a - 1.0));

    double ge = 0.0;
    for (int bi : b) ge += std::pow(relative(bi, mu), a) - 1.0;
    m[15] = scale * ge;

    double between = 0.0;
    for (const auto& g : per_group) {
        if (g.n > 0) between += g.n * (std::pow(relative(g.mean(), mu), a) - 1.0);
    }
    m[16] = scale * between;
    m[17] = scale * per_group[0].n * (std::pow(relative(per_group[0].mean(), mu), a) - 1.0) +
            scale * per_group[1].n * (std::pow(relative(per_group[1].mean(), mu), a) - 1.0);

    m[18] = theil(b, groups, nullptr, mu);
    m[19] = root(m[18]);

    const Group gu = Group::Unprivileged;
    const Group gp = Group::Privileged;
    const double t_u = theil(b, groups, &gu, per_group[0].mean());
    const double t_p = theil(b, groups, &gp, per_group[1].mean());
    m[20] = t_u + t_p;
    m[21] = root(t_u) + root(t_p);
    m[22] = 0.0;
    m[23] = 0.0;
    for (const double t : {t_u, t_p}) {
        m[22] += t;
        m[23] += root(t);
    }
    m[24] = fair25_bias_amplification(y, yhat, groups, cfg);
    return m;
}

RawMeasures raw_measures(std::span<const int> y, std::span<const int> yhat, std::span<const Group> groups,
                         const MetricsConfig& cfg) {
    return raw_measures(group_confusion(y, yhat, groups), y, yhat, groups, cfg);
}

double ratio_objective(double ratio) {
    if (ratio == 0.0 || std::isinf(ratio)) {
        return 1.0;
    }
    return 1.0 - std::min(ratio, 1.0 / ratio);
}

FairnessObjectives transform(const RawMeasures& raw) {
    FairnessObjectives f{};
    for (std::size_t k = 0; k < kFairnessMeasureCount; ++k) {
        const std::size_t id = k + 1;  // Fair<id>
        if (id <= 6 || id == 12 || id == 13 || id == 15 || id == 25) {
            f[k] = std::abs(raw[k]);
        } else if ((id >= 7 && id <= 11) || id == 14) {
            f[k] = ratio_objective(raw[k]);
        } else {
            f[k] = raw[k];
        }
    }
    return f;
}

ObjectiveVector evaluate_predictions(std::span<const int> y, std::span<const int> yhat,
                                     std::span<const double> probabilities, std::span<const Group> groups,
                                     const MetricsConfig& cfg) {
    ObjectiveVector out{};
    out[0] = cross_entropy(probabilities, y);
    const auto f = transform(raw_measures(y, yhat, groups, cfg));
    std::copy(f.begin(), f.end(), out.begin() + 1);
    return out;
}

ObjectiveVector evaluate_individual(const Genome& genome, const NetworkShape& shape, const EncodedDataset& data,
                                    const MetricsConfig& cfg) {
    if (data.size() == 0) {
        throw Error(ErrorCode::EmptyDataset, "cannot evaluate on an empty dataset");
    }
    const auto p = predict_proba(genome, shape, data);
    std::vector<int> yhat(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) yhat[i] = p[i] >= 0.5 ? 1 : 0;
    return evaluate_predictions(data.labels, yhat, p, data.groups, cfg);
}

}  // namespace famoel
