#include "famoel/stats.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>

#include <boost/math/distributions/chi_squared.hpp>

#include "famoel/objective_reduction.hpp"

namespace famoel {

FriedmanResult friedman_test(const Matrix& samples, bool lower_is_better, double alpha) {
    const std::size_t n = samples.rows();
    const std::size_t k = samples.cols();
    if (n < 2) {
        throw Error(ErrorCode::TooFewBlocks, "Friedman test needs at least 2 blocks");
    }
    if (k < 2) {
        throw Error(ErrorCode::InvalidValue, "Friedman test needs at least 2 treatments");
    }
    std::vector<double> rank_sums(k, 0.0);
    for (std::size_t b = 0; b < n; ++b) {
        std::vector<double> row(samples.row(b).begin(), samples.row(b).end());
        if (!lower_is_better) {
            for (double& v : row) v = -v;
        }
        const auto ranks = average_ranks(row);
        for (std::size_t j = 0; j < k; ++j) rank_sums[j] += ranks[j];
    }
    const double dn = static_cast<double>(n);
    const double dk = static_cast<double>(k);
    double sum_sq = 0.0;
    for (double r : rank_sums) sum_sq += r * r;

    FriedmanResult out;
    out.blocks = n;
    out.treatments = k;
    out.statistic = 12.0 / (dn * dk * (dk + 1.0)) * sum_sq - 3.0 * dn * (dk + 1.0);
    if (std::abs(out.statistic) < 1e-12) out.statistic = 0.0;
    boost::math::chi_squared dist(dk - 1.0);
    out.p_value = out.statistic > 0.0 ? boost::math::cdf(boost::math::complement(dist, out.statistic)) : 1.0;
    out.significant = out.p_value < alpha;
    out.mean_ranks.resize(k);
    for (std::size_t j = 0; j < k; ++j) out.mean_ranks[j] = rank_sums[j] / dn;
    return out;
}

char outcome_symbol(Outcome o) {
    switch (o) {
    case Outcome::Better: return '+';
    case Outcome::Similar: return '=';
    case Outcome::Worse: return '-';
    }
    return '?';
}

ComparisonReport friedman_compare(const std::vector<ComparisonSample>& samples, const std::string& reference,
                                  bool lower_is_better, double alpha) {
    std::set<std::string> algorithm_set;
    std::map<std::string, std::map<std::string, std::map<std::string, double>>> table;  // dataset -> block -> alg
    for (const auto& s : samples) {
        algorithm_set.insert(s.algorithm);
        table[s.dataset][s.block][s.algorithm] = s.value;
    }
    if (!algorithm_set.count(reference)) {
        throw Error(ErrorCode::InvalidValue, "reference algorithm '" + reference + "' has no samples");
    }
    if (algorithm_set.size() < 2) {
        throw Error(ErrorCode::InvalidValue, "comparison needs at least two algorithms");
    }
    ComparisonReport report;
    report.algorithms.assign(algorithm_set.begin(), algorithm_set.end());
    report.reference = static_cast<std::size_t>(
        std::find(report.algorithms.begin(), report.algorithms.end(), reference) - report.algorithms.begin());
    report.lower_is_better = lower_is_better;
    report.totals.resize(report.algorithms.size());
    const std::size_t k = report.algorithms.size();

    for (const auto& [dataset, blocks] : table) {
        Matrix m(blocks.size(), k);
        std::size_t b = 0;
        for (const auto& [block, values] : blocks) {
            for (std::size_t j = 0; j < k; ++j) {
                auto it = values.find(report.algorithms[j]);
                if (it == values.end()) {
                    throw Error(ErrorCode::InvalidValue, "dataset '" + dataset + "' block '" + block +
                                                             "' lacks algorithm '" + report.algorithms[j] + "'");
                }
                m(b, j) = it->second;
            }
            ++b;
        }
        DatasetComparison dc;
        dc.dataset = dataset;
        for (std::size_t j = 0; j < k; ++j) {
            const auto col = m.column(j);
            const double mean = std::accumulate(col.begin(), col.end(), 0.0) / static_cast<double>(col.size());
            double ss = 0.0;
            for (double v : col) ss += (v - mean) * (v - mean);
            dc.means.push_back(mean);
            dc.stddevs.push_back(col.size() > 1 ? std::sqrt(ss / static_cast<double>(col.size() - 1)) : 0.0);
        }
        dc.omnibus = friedman_test(m, lower_is_better, alpha);
        for (std::size_t j = 0; j < k; ++j) {
            Outcome o = Outcome::Similar;
            if (j != report.reference) {
                Matrix pair(m.rows(), 2);
                for (std::size_t r = 0; r < m.rows(); ++r) {
                    pair(r, 0) = m(r, j);
                    pair(r, 1) = m(r, report.reference);
                }
                const auto fr = friedman_test(pair, lower_is_better, alpha);
                if (fr.significant) {
                    o = fr.mean_ranks[0] < fr.mean_ranks[1] ? Outcome::Better : Outcome::Worse;
                }
            }
            dc.versus_reference.push_back(o);
            auto& t = report.totals[j];
            (o == Outcome::Better ? t.win : o == Outcome::Worse ? t.loss : t.tie)++;
        }
        report.datasets.push_back(std::move(dc));
    }
    return report;
}

}  // namespace famoel
