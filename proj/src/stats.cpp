#include "mlaco/stats.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <numeric>
#include <set>

#include "mlaco/error.hpp"

namespace mlaco {

namespace {

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

// Exact null distribution of the doubled positive rank sum: counts of
// sign assignments per achievable sum. Doubling makes tied average ranks
// integral.
std::vector<double> rank_sum_counts(const std::vector<long>& doubled_ranks) {
    const long max_sum = std::accumulate(doubled_ranks.begin(), doubled_ranks.end(), 0L);
    std::vector<double> ways(static_cast<std::size_t>(max_sum) + 1, 0.0);
    ways[0] = 1.0;
    long reached = 0;
    for (const long r : doubled_ranks) {
        reached += r;
        for (long s = reached; s >= r; --s) {
            ways[static_cast<std::size_t>(s)] += ways[static_cast<std::size_t>(s - r)];
        }
    }
    return ways;
}

}  // namespace

PairedComparison wilcoxon_signed_rank(const Vector& a, const Vector& b, TestSide side) {
    if (a.size() != b.size() || a.size() == 0) {
        throw InvalidArgumentError("wilcoxon: paired lists must have equal nonzero length");
    }
    PairedComparison result;
    result.diffs = a - b;

    std::vector<double> magnitudes;
    std::vector<bool> positive;
    for (Index i = 0; i < result.diffs.size(); ++i) {
        const double d = result.diffs(i);
        if (d == 0) continue;
        magnitudes.push_back(std::abs(d));
        positive.push_back(d > 0);
    }
    result.n_effective = static_cast<int>(magnitudes.size());
    if (result.n_effective == 0) {
        result.degenerate = true;
        result.exact = true;
        result.p_value = 1;
        return result;
    }

    // Average ranks over tied magnitudes, doubled to stay integral.
    const int n = result.n_effective;
    std::vector<int> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](int x, int y) { return magnitudes[static_cast<std::size_t>(x)] < magnitudes[static_cast<std::size_t>(y)]; });
    std::vector<long> doubled_rank(static_cast<std::size_t>(n), 0);
    double tie_correction = 0;
    int at = 0;
    while (at < n) {
        int glen = 1;
        while (at + glen < n &&
               magnitudes[static_cast<std::size_t>(order[static_cast<std::size_t>(at + glen)])] ==
                   magnitudes[static_cast<std::size_t>(order[static_cast<std::size_t>(at)])]) {
            ++glen;
        }
        // Ranks at+1 .. at+glen share the average; doubled sum of an
        // arithmetic run is integral.
        const long doubled_avg = 2 * at + glen + 1;
        for (int k = 0; k < glen; ++k) {
            doubled_rank[static_cast<std::size_t>(order[static_cast<std::size_t>(at + k)])] = doubled_avg;
        }
        if (glen > 1) {
            tie_correction += static_cast<double>(glen) * glen * glen - glen;
        }
        at += glen;
    }

    long doubled_w_plus = 0;
    for (int i = 0; i < n; ++i) {
        if (positive[static_cast<std::size_t>(i)]) doubled_w_plus += doubled_rank[static_cast<std::size_t>(i)];
    }
    result.w_plus = static_cast<double>(doubled_w_plus) / 2.0;
    const double total = static_cast<double>(n) * (n + 1) / 2.0;
    result.w_statistic = std::min(result.w_plus, total - result.w_plus);

    if (n <= 25) {
        result.exact = true;
        const std::vector<double> ways = rank_sum_counts(doubled_rank);
        const double assignments = std::pow(2.0, n);
        auto cdf_upto = [&](long doubled_value) {
            double count = 0;
            for (long s = 0; s <= doubled_value && s < static_cast<long>(ways.size()); ++s) {
                count += ways[static_cast<std::size_t>(s)];
            }
            return count / assignments;
        };
        const double below = cdf_upto(doubled_w_plus);
        const double above = 1.0 - cdf_upto(doubled_w_plus - 1);
        switch (side) {
            case TestSide::TwoSided: result.p_value = std::min(1.0, 2.0 * std::min(below, above)); break;
            case TestSide::Greater: result.p_value = above; break;
            case TestSide::Less: result.p_value = below; break;
        }
    } else {
        const double mean = total / 2.0;
        const double variance =
            static_cast<double>(n) * (n + 1) * (2 * n + 1) / 24.0 - tie_correction / 48.0;
        if (variance <= 0) {
            result.p_value = 1;
            return result;
        }
        const double sd = std::sqrt(variance);
        switch (side) {
            case TestSide::TwoSided: {
                const double z = std::max(0.0, std::abs(result.w_plus - mean) - 0.5) / sd;
                result.p_value = std::min(1.0, 2.0 * (1.0 - normal_cdf(z)));
                break;
            }
            case TestSide::Greater:
                result.p_value = 1.0 - normal_cdf((result.w_plus - mean - 0.5) / sd);
                break;
            case TestSide::Less:
                result.p_value = normal_cdf((result.w_plus - mean + 0.5) / sd);
                break;
        }
    }
    return result;
}

double optimality_gap(double found, double opt, bool* found_exceeds_opt) {
    if (opt <= 0) throw InvalidArgumentError("optimality_gap: optimum must be positive");
    if (found_exceeds_opt) *found_exceeds_opt = false;
    const double gap = 100.0 * (opt - found) / opt;
    if (gap < 0) {
        if (found_exceeds_opt) {
            *found_exceeds_opt = true;
        } else {
            std::cerr << "warning: found objective " << found << " beats the declared optimum "
                      << opt << "\n";
        }
        return 0;
    }
    return gap;
}

std::vector<Checkpoint> normalize_curves(const std::vector<RunTrace>& traces,
                                         const std::vector<RunTrace>& baseline) {
    if (traces.empty() || traces.size() != baseline.size()) {
        throw InvalidArgumentError("normalize_curves: trace and baseline sets must match");
    }
    std::vector<double> scale(traces.size());
    for (std::size_t i = 0; i < traces.size(); ++i) {
        if (baseline[i].checkpoints.empty() || traces[i].checkpoints.empty()) {
            throw InvalidArgumentError("normalize_curves: empty trace");
        }
        const double base_final = baseline[i].checkpoints.back().best;
        if (base_final <= 0) {
            throw InvalidArgumentError("normalize_curves: nonpositive baseline objective");
        }
        scale[i] = base_final;
    }

    std::set<long> grid;
    for (const auto& trace : traces) {
        for (const auto& point : trace.checkpoints) grid.insert(point.constructions);
    }

    std::vector<Checkpoint> curve;
    curve.reserve(grid.size());
    std::vector<std::size_t> cursor(traces.size(), 0);
    for (const long g : grid) {
        double sum = 0;
        for (std::size_t i = 0; i < traces.size(); ++i) {
            const auto& points = traces[i].checkpoints;
            while (cursor[i] + 1 < points.size() && points[cursor[i] + 1].constructions <= g) {
                ++cursor[i];
            }
            // Before a trace's first checkpoint its first value is used.
            sum += points[cursor[i]].best / scale[i];
        }
        curve.push_back({g, sum / static_cast<double>(traces.size())});
    }
    return curve;
}

}  // namespace mlaco
