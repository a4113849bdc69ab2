#pragma once

#include <vector>

#include "mlaco/aco.hpp"
#include "mlaco/types.hpp"

namespace mlaco {

enum class TestSide { TwoSided, Greater, Less };

struct PairedComparison {
    Vector diffs;             // a - b, zero differences included
    double w_statistic = 0;   // min of the positive/negative rank sums
    double w_plus = 0;        // rank sum of the positive differences
    double p_value = 1;
    int n_effective = 0;      // nonzero differences
    bool degenerate = false;  // every difference was zero
    bool exact = false;       // exact distribution (vs normal approximation)
};

// Wilcoxon signed-rank test on paired values. Zero differences are
// dropped, tied magnitudes share average ranks. Exact distribution up to
// 25 effective pairs, tie-corrected normal approximation above.
PairedComparison wilcoxon_signed_rank(const Vector& a, const Vector& b,
                                      TestSide side = TestSide::TwoSided);

// Percentage shortfall of a found objective against the proven optimum,
// clamped at zero; sets *found_exceeds_opt when the "optimum" is beaten.
double optimality_gap(double found, double opt, bool* found_exceeds_opt = nullptr);

// Per-instance traces divided by the matching baseline's final best,
// then averaged pointwise over the union checkpoint grid with
// last-value-carried-forward interpolation.
std::vector<Checkpoint> normalize_curves(const std::vector<RunTrace>& traces,
                                         const std::vector<RunTrace>& baseline);

}  // namespace mlaco
