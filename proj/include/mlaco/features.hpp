#pragma once

#include <array>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "mlaco/instance.hpp"
#include "mlaco/sampler.hpp"

namespace mlaco {

inline constexpr int kFeatureCount = 5;

// Per-directed-edge feature tensor: five n-by-n matrices (diagonals
// unused), plus optional +1/-1 labels marking optimal-route membership.
//
// f[0]  edge cost over budget
// f[1]  score-per-cost, normalized over edges leaving i
// f[2]  score-per-cost, normalized over edges entering j
// f[3]  rank-weighted sample frequency, max-normalized
// f[4]  sample objective correlation, max-normalized
struct EdgeFeatures {
    Index n = 0;
    std::array<Matrix, kFeatureCount> f;
    Eigen::MatrixXi label;  // empty when unlabeled

    bool labeled() const { return label.size() > 0; }
    Index edge_count() const { return n * (n - 1); }
};

// Flattened training/prediction view: one row per directed edge.
struct FeatureRows {
    Matrix x;                                 // edge_count x 5
    IntVector label;                          // edge_count, empty if unlabeled
    std::vector<std::pair<Index, Index>> edges;  // row -> (i, j)
};

// The three instance-local features (fills f[0..2]; f[3], f[4] zero).
// Costs are clamped below at 1e-9 before any ratio.
EdgeFeatures graph_features(const Instance& inst);

// The two sample-statistics features, computed by scanning route edge
// lists (O(m*n + n^2)). Throws DegenerateSamplesError when all sample
// objectives are equal. Writes f[3] and f[4] of `out`.
void statistical_features(const Instance& inst, const SampleSet& samples, EdgeFeatures& out);

// graph_features + statistical_features, with labels attached when the
// optimal route is supplied (+1 on its directed edges, -1 elsewhere).
EdgeFeatures assemble(const Instance& inst, const SampleSet& samples,
                      const std::optional<Route>& optimal_route = std::nullopt);

FeatureRows to_rows(const EdgeFeatures& features);

// Columnar CSV interchange: "i,j,f1,f2,f3,f4,f5[,label]" with 1-based
// vertex indices. Reading accepts concatenated output from many
// instances.
void write_feature_csv(const EdgeFeatures& features, const std::string& path);
void append_feature_csv(const EdgeFeatures& features, std::ostream& out, bool header);
FeatureRows read_feature_csv(const std::string& path);

}  // namespace mlaco
