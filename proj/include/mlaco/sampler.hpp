#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mlaco/instance.hpp"

namespace mlaco {

// A batch of random feasible routes in set representation, with their
// objective values and descending-objective rankings (1 = best).
struct SampleSet {
    std::vector<Route> routes;
    Vector objectives;
    std::vector<int> rankings;
    int m = 0;
};

// Rank positions by descending value; ties broken by ascending index, so
// the result is a permutation of 1..m.
std::vector<int> rank_descending(const Vector& values);

// Draws m random feasible routes: each walks a fresh uniform permutation
// of the intermediate vertices and keeps every vertex that still leaves
// enough budget to reach the end. O(m*n) total; deterministic per seed
// and independent of worker count (one derived stream per sample).
SampleSet sample(const Instance& inst, int m, std::uint64_t seed);

// Debug dump, one {"route":[...],"objective":y} object per line. Routes
// are written 1-based. Not a stability contract.
void dump_samples_jsonl(const SampleSet& samples, const std::string& path);

}  // namespace mlaco
