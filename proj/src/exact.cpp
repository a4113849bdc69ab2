#include "mlaco/exact.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>

#include "mlaco/error.hpp"
#include "mlaco/rng.hpp"
#include "mlaco/sampler.hpp"

namespace mlaco {

namespace {

using Clock = std::chrono::steady_clock;

// Shortest-path distances to the end vertex over the complete graph.
// Equal to the direct edge under the triangle inequality, but keeps the
// reservation admissible for rounded or explicit cost matrices.
Vector distances_to(const Instance& inst, Index target) {
    const Index n = inst.n;
    Vector dist = Vector::Constant(n, std::numeric_limits<double>::infinity());
    std::vector<char> done(static_cast<std::size_t>(n), 0);
    dist(target) = 0;
    for (Index round = 0; round < n; ++round) {
        Index best = -1;
        double best_d = std::numeric_limits<double>::infinity();
        for (Index v = 0; v < n; ++v) {
            if (!done[static_cast<std::size_t>(v)] && dist(v) < best_d) {
                best = v;
                best_d = dist(v);
            }
        }
        if (best < 0) break;
        done[static_cast<std::size_t>(best)] = 1;
        for (Index v = 0; v < n; ++v) {
            if (v != best && v != target) {
                dist(v) = std::min(dist(v), inst.cost(v, best) + best_d);
            }
        }
    }
    return dist;
}

// Pairwise shortest paths (Floyd-Warshall); used to decide which
// vertices can still appear anywhere in a completion.
Matrix all_pairs_shortest(const Matrix& cost) {
    Matrix d = cost;
    const Index n = d.rows();
    for (Index k = 0; k < n; ++k) {
        for (Index i = 0; i < n; ++i) {
            if (i == k) continue;
            const double dik = d(i, k);
            for (Index j = 0; j < n; ++j) {
                if (d(k, j) + dik < d(i, j)) d(i, j) = dik + d(k, j);
            }
        }
    }
    return d;
}

// Greedy warm start: repeatedly insert the unvisited vertex with the best
// score-per-detour ratio at its cheapest feasible position.
Route greedy_insertion(const Instance& inst) {
    std::vector<Index> path{inst.start, inst.end};
    std::vector<char> used(static_cast<std::size_t>(inst.n), 0);
    used[static_cast<std::size_t>(inst.start)] = 1;
    used[static_cast<std::size_t>(inst.end)] = 1;
    double cost = inst.cost(inst.start, inst.end);
    while (true) {
        Index best_v = -1;
        std::size_t best_pos = 0;
        double best_ratio = -1;
        double best_delta = 0;
        for (Index v = 0; v < inst.n; ++v) {
            if (used[static_cast<std::size_t>(v)] || inst.score(v) <= 0) continue;
            for (std::size_t pos = 0; pos + 1 < path.size(); ++pos) {
                const double delta = inst.cost(path[pos], v) + inst.cost(v, path[pos + 1]) -
                                     inst.cost(path[pos], path[pos + 1]);
                if (cost + delta > inst.t_max) continue;
                const double ratio = inst.score(v) / std::max(delta, 1e-12);
                if (ratio > best_ratio) {
                    best_ratio = ratio;
                    best_v = v;
                    best_pos = pos;
                    best_delta = delta;
                }
            }
        }
        if (best_v < 0) break;
        path.insert(path.begin() + static_cast<std::ptrdiff_t>(best_pos) + 1, best_v);
        used[static_cast<std::size_t>(best_v)] = 1;
        cost += best_delta;
    }
    // Re-accumulate so the cached cost matches the exact left-to-right sum.
    Route route = make_route(inst, std::move(path));
    return feasible(inst, route) ? route : make_route(inst, {inst.start, inst.end});
}

struct Search {
    const Instance& inst;
    Vector to_end;           // admissible reservation per vertex
    Matrix shortest;         // admissible pairwise lower bounds
    Vector half_star;        // (cheapest in + cheapest out) / 2 per vertex
    std::vector<Index> ratio_order;  // vertices by score / half_star, descending

    Route best;
    double best_objective = 0;
    long nodes = 0;
    std::vector<std::pair<long, double>> trace;

    Clock::time_point deadline;
    bool timed_out = false;

    std::vector<Index> path;
    std::vector<char> visited;

    explicit Search(const Instance& instance) : inst(instance) {}

    bool out_of_time() {
        if (timed_out) return true;
        if ((nodes & 1023) == 0 && Clock::now() > deadline) timed_out = true;
        return timed_out;
    }

    void record(const std::vector<Index>& vertices, double objective) {
        if (objective > best_objective) {
            best_objective = objective;
            best = make_route(inst, vertices);
            trace.emplace_back(nodes, objective);
        }
    }

    // Fractional knapsack over the vertices that could still appear in a
    // completion; every edge of a completion costs at least half the
    // cheapest in-star plus half the cheapest out-star of its endpoints.
    double score_bound(Index current, double cost, double score) const {
        double capacity = inst.t_max - cost -
                          0.5 * (half_star_out(current) + half_star_in(inst.end));
        double bound = score;
        for (const Index v : ratio_order) {
            if (visited[static_cast<std::size_t>(v)]) continue;
            if (cost + shortest(current, v) + to_end(v) > inst.t_max) continue;
            const double weight = half_star(v);
            if (weight <= capacity) {
                capacity -= weight;
                bound += inst.score(v);
            } else {
                if (capacity > 0 && weight > 0) bound += inst.score(v) * (capacity / weight);
                break;
            }
        }
        return bound;
    }

    double half_star_in(Index v) const { return min_in(v); }
    double half_star_out(Index v) const { return min_out(v); }

    Vector min_in, min_out;

    void dfs(Index current, double cost, double score) {
        ++nodes;
        if (out_of_time()) return;
        if (cost + to_end(current) > inst.t_max) return;
        record_completion(current, cost, score);
        if (score_bound(current, cost, score) <= best_objective) return;

        // Candidate extensions, most promising first.
        std::vector<std::pair<double, Index>> children;
        for (Index v = 0; v < inst.n; ++v) {
            if (visited[static_cast<std::size_t>(v)] || v == inst.end) continue;
            if (cost + inst.cost(current, v) + to_end(v) > inst.t_max) continue;
            children.emplace_back(inst.score(v) / std::max(inst.cost(current, v), 1e-12), v);
        }
        std::sort(children.begin(), children.end(), [](const auto& a, const auto& b) {
            if (a.first != b.first) return a.first > b.first;
            return a.second < b.second;
        });
        for (const auto& [ratio, v] : children) {
            (void)ratio;
            visited[static_cast<std::size_t>(v)] = 1;
            path.push_back(v);
            dfs(v, cost + inst.cost(current, v), score + inst.score(v));
            path.pop_back();
            visited[static_cast<std::size_t>(v)] = 0;
            if (timed_out) return;
        }
    }

    void record_completion(Index current, double cost, double score) {
        if (cost + inst.cost(current, inst.end) > inst.t_max) return;
        path.push_back(inst.end);
        record(path, score + inst.score(inst.end));
        path.pop_back();
    }
};

}  // namespace

ExactResult solve_bnb(const Instance& inst, double time_limit_sec) {
    validate(inst);
    const auto started = Clock::now();

    ExactResult result;
    Route warm = greedy_insertion(inst);
    result.route = warm;
    result.objective = warm.objective;

    if (time_limit_sec <= 0) {
        result.wall_time = std::chrono::duration<double>(Clock::now() - started).count();
        return result;
    }

    Search search(inst);
    search.to_end = distances_to(inst, inst.end);
    search.shortest = all_pairs_shortest(inst.cost);
    search.min_in = Vector::Constant(inst.n, std::numeric_limits<double>::infinity());
    search.min_out = Vector::Constant(inst.n, std::numeric_limits<double>::infinity());
    for (Index i = 0; i < inst.n; ++i) {
        for (Index j = 0; j < inst.n; ++j) {
            if (i == j) continue;
            search.min_out(i) = std::min(search.min_out(i), inst.cost(i, j));
            search.min_in(j) = std::min(search.min_in(j), inst.cost(i, j));
        }
    }
    search.half_star = 0.5 * (search.min_in + search.min_out);
    search.ratio_order.resize(static_cast<std::size_t>(inst.n));
    std::iota(search.ratio_order.begin(), search.ratio_order.end(), Index{0});
    std::erase_if(search.ratio_order,
                  [&](Index v) { return v == inst.start || v == inst.end || inst.score(v) <= 0; });
    std::sort(search.ratio_order.begin(), search.ratio_order.end(), [&](Index a, Index b) {
        const double wa = std::max(search.half_star(a), 1e-12);
        const double wb = std::max(search.half_star(b), 1e-12);
        const double ra = inst.score(a) / wa;
        const double rb = inst.score(b) / wb;
        if (ra != rb) return ra > rb;
        return a < b;
    });

    search.best = warm;
    search.best_objective = warm.objective;
    search.trace.emplace_back(0, warm.objective);
    search.deadline = started + std::chrono::duration_cast<Clock::duration>(
                                    std::chrono::duration<double>(time_limit_sec));
    search.visited.assign(static_cast<std::size_t>(inst.n), 0);
    search.visited[static_cast<std::size_t>(inst.start)] = 1;
    search.path = {inst.start};

    search.dfs(inst.start, 0.0, inst.score(inst.start));

    result.route = search.best;
    result.objective = search.best_objective;
    result.nodes_explored = search.nodes;
    result.proved_optimal = !search.timed_out;
    result.incumbent_trace = std::move(search.trace);
    result.wall_time = std::chrono::duration<double>(Clock::now() - started).count();
    return result;
}

TrainingSet build_training_set(const std::vector<Instance>& instances, double time_limit_sec,
                               int sample_count, std::uint64_t seed) {
    if (instances.empty()) throw InvalidArgumentError("build_training_set: no instances");

    TrainingSet set;
    set.results.reserve(instances.size());
    set.kept.assign(instances.size(), false);
    std::vector<FeatureRows> parts;
    Index total_rows = 0;
    for (std::size_t idx = 0; idx < instances.size(); ++idx) {
        const Instance& inst = instances[idx];
        ExactResult solved = solve_bnb(inst, time_limit_sec);
        if (solved.proved_optimal) {
            const int m = sample_count > 0 ? sample_count : static_cast<int>(100 * inst.n);
            const SampleSet samples = sample(inst, m, stream_seed(seed, idx));
            const EdgeFeatures features = assemble(inst, samples, solved.route);
            parts.push_back(to_rows(features));
            total_rows += parts.back().x.rows();
            set.kept[idx] = true;
        }
        set.results.push_back(std::move(solved));
    }
    if (parts.empty()) {
        throw EmptyTrainingSetError("no instance was solved to optimality; training set is empty");
    }
    set.x.resize(total_rows, kFeatureCount);
    set.label.resize(total_rows);
    Index row = 0;
    for (const auto& part : parts) {
        set.x.middleRows(row, part.x.rows()) = part.x;
        set.label.segment(row, part.label.size()) = part.label;
        row += part.x.rows();
    }
    return set;
}

}  // namespace mlaco
