#include "mlaco/sampler.hpp"

#include <algorithm>
#include <cassert>
#include <fstream>
#include <iostream>
#include <numeric>

#include "mlaco/error.hpp"
#include "mlaco/rng.hpp"

namespace mlaco {

std::vector<int> rank_descending(const Vector& values) {
    if (values.size() == 0) throw InvalidArgumentError("rank_descending: empty value list");
    const int m = static_cast<int>(values.size());
    std::vector<int> order(static_cast<std::size_t>(m));
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return values(a) > values(b); });
    std::vector<int> ranks(static_cast<std::size_t>(m));
    for (int r = 0; r < m; ++r) ranks[static_cast<std::size_t>(order[r])] = r + 1;
    return ranks;
}

namespace {

Route sample_one(const Instance& inst, std::vector<Index>& permutation, Rng& rng) {
    rng.shuffle(permutation);
    Route route;
    route.vertices.reserve(permutation.size() + 2);
    route.vertices.push_back(inst.start);
    route.objective = inst.score(inst.start);
    double used = 0;
    Index current = inst.start;
    for (const Index candidate : permutation) {
        if (used + inst.cost(current, candidate) + inst.cost(candidate, inst.end) <= inst.t_max) {
            route.vertices.push_back(candidate);
            route.objective += inst.score(candidate);
            used += inst.cost(current, candidate);
            current = candidate;
        }
    }
    route.vertices.push_back(inst.end);
    route.objective += inst.score(inst.end);
    route.cost = used + inst.cost(current, inst.end);
    return route;
}

}  // namespace

SampleSet sample(const Instance& inst, int m, std::uint64_t seed) {
    if (m < 1) throw InvalidArgumentError("sample: need at least one sample");
    if (inst.cost(inst.start, inst.end) > inst.t_max) {
        throw InfeasibleInstanceError(inst.name + ": no route fits the budget");
    }
    if (m < inst.n - 1) {
        std::cerr << "warning: sample size " << m << " below vertex count " << inst.n
                  << "; some edges will never be sampled\n";
    }

    std::vector<Index> intermediates;
    intermediates.reserve(static_cast<std::size_t>(inst.n));
    for (Index v = 0; v < inst.n; ++v) {
        if (v != inst.start && v != inst.end) intermediates.push_back(v);
    }

    SampleSet set;
    set.m = m;
    set.routes.reserve(static_cast<std::size_t>(m));
    set.objectives.resize(m);
    std::vector<Index> permutation;
    for (int k = 0; k < m; ++k) {
        // Restart from the canonical order so each sample depends only on
        // its own stream, not on who shuffled before it.
        permutation = intermediates;
        Rng rng(stream_seed(seed, static_cast<std::uint64_t>(k)));
        Route route = sample_one(inst, permutation, rng);
        assert(feasible(inst, route));
        set.objectives(k) = route.objective;
        set.routes.push_back(std::move(route));
    }
    set.rankings = rank_descending(set.objectives);
    return set;
}

void dump_samples_jsonl(const SampleSet& samples, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ParseError(path + ": cannot open for writing");
    for (int k = 0; k < samples.m; ++k) {
        out << "{\"route\":[";
        const auto& vertices = samples.routes[static_cast<std::size_t>(k)].vertices;
        for (std::size_t i = 0; i < vertices.size(); ++i) {
            if (i > 0) out << ',';
            out << vertices[i] + 1;
        }
        out << "],\"objective\":" << samples.objectives(k) << "}\n";
    }
}

}  // namespace mlaco
