#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "mlaco/features.hpp"
#include "mlaco/instance.hpp"

namespace mlaco {

struct ExactResult {
    Route route;
    double objective = 0;
    long nodes_explored = 0;
    bool proved_optimal = false;
    double wall_time = 0;
    // (nodes_explored, objective) at each incumbent improvement.
    std::vector<std::pair<long, double>> incumbent_trace;
};

// Depth-first branch and bound over partial paths. Prunes on budget
// reservation (shortest remaining way to the end vertex) and on a
// fractional-knapsack relaxation of the reachable score. Returns the
// incumbent with proved_optimal=false when the time limit fires;
// time_limit 0 returns the greedy warm start immediately.
ExactResult solve_bnb(const Instance& inst, double time_limit_sec);

struct TrainingSet {
    Matrix x;          // rows from every instance proved optimal
    IntVector label;   // +1 for optimal-route edges, -1 otherwise
    std::vector<ExactResult> results;   // one per input instance
    std::vector<bool> kept;             // instance contributed rows
};

// Labels a batch of instances: solves each within the per-instance time
// limit, drops those not proved optimal, and concatenates the labeled
// feature rows of the rest. sample_count 0 means 100*n per instance.
TrainingSet build_training_set(const std::vector<Instance>& instances, double time_limit_sec,
                               int sample_count, std::uint64_t seed);

}  // namespace mlaco
