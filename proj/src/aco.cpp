#include "mlaco/aco.hpp"

#include <algorithm>
#include <atomic>
#include <cassert>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <limits>

#include "mlaco/error.hpp"
#include "mlaco/parallel.hpp"

namespace mlaco {

namespace {

constexpr double kMinCost = 1e-9;

using Clock = std::chrono::steady_clock;

Matrix heuristic_rule(const Instance& inst) {
    Matrix eta = Matrix::Zero(inst.n, inst.n);
    for (Index i = 0; i < inst.n; ++i) {
        for (Index j = 0; j < inst.n; ++j) {
            if (i != j) eta(i, j) = inst.score(j) / std::max(inst.cost(i, j), kMinCost);
        }
    }
    return eta;
}

Matrix floored(const Matrix& p, double floor_value) {
    Matrix out = p.cwiseMax(floor_value);
    out.diagonal().setZero();
    return out;
}

// Min-max rescale of the off-diagonal probabilities into [lo, hi];
// constant inputs map to the interval midpoint.
Matrix rescale_probabilities(const Matrix& p, double lo, double hi, const std::string& name) {
    const Index n = p.rows();
    double pmin = std::numeric_limits<double>::infinity();
    double pmax = -std::numeric_limits<double>::infinity();
    for (Index i = 0; i < n; ++i) {
        for (Index j = 0; j < n; ++j) {
            if (i == j) continue;
            pmin = std::min(pmin, p(i, j));
            pmax = std::max(pmax, p(i, j));
        }
    }
    Matrix tau(n, n);
    if (pmax - pmin <= 0) {
        std::cerr << "warning: " << name << ": constant prediction; seeding midpoint pheromone\n";
        tau.setConstant(0.5 * (lo + hi));
    } else {
        tau = ((p.array() - pmin) * ((hi - lo) / (pmax - pmin)) + lo).matrix();
    }
    tau.diagonal().setZero();
    return tau;
}

}  // namespace

std::string to_string(Variant v) { return v == Variant::AntSystem ? "as" : "mmas"; }

std::string to_string(Integration i) {
    switch (i) {
        case Integration::None: return "none";
        case Integration::Eta: return "eta";
        case Integration::EtaHat: return "eta_hat";
        case Integration::TauSeed: return "tau_seed";
    }
    return "none";
}

Variant variant_from_string(const std::string& s) {
    if (s == "as") return Variant::AntSystem;
    if (s == "mmas") return Variant::MaxMin;
    throw InvalidArgumentError("unknown variant '" + s + "' (supported: as, mmas)");
}

Integration integration_from_string(const std::string& s) {
    if (s == "none") return Integration::None;
    if (s == "eta") return Integration::Eta;
    if (s == "eta_hat") return Integration::EtaHat;
    if (s == "tau_seed") return Integration::TauSeed;
    throw InvalidArgumentError("unknown integration '" + s +
                               "' (supported: none, eta, eta_hat, tau_seed)");
}

void validate(const AcoConfig& config) {
    if (config.alpha < 0 || config.beta < 0) {
        throw InvalidArgumentError("aco: alpha and beta must be nonnegative");
    }
    if (config.rho <= 0 || config.rho >= 1) {
        throw InvalidArgumentError("aco: rho must lie strictly between 0 and 1");
    }
    if (config.delta < 0 || config.delta > 1) {
        throw InvalidArgumentError("aco: delta must lie in [0, 1]");
    }
    if (config.ants < 0) throw InvalidArgumentError("aco: negative population size");
    if (config.c_scale <= 0) throw InvalidArgumentError("aco: c_scale must be positive");
}

Route greedy_route(const Instance& inst, const Matrix& eta) {
    std::vector<Index> vertices{inst.start};
    std::vector<char> visited(static_cast<std::size_t>(inst.n), 0);
    visited[static_cast<std::size_t>(inst.start)] = 1;
    double used = 0;
    Index current = inst.start;
    while (true) {
        Index best = -1;
        double best_eta = -1;
        for (Index j = 0; j < inst.n; ++j) {
            if (visited[static_cast<std::size_t>(j)] || j == inst.end) continue;
            if (used + inst.cost(current, j) + inst.cost(j, inst.end) > inst.t_max) continue;
            if (eta(current, j) > best_eta) {
                best_eta = eta(current, j);
                best = j;
            }
        }
        if (best < 0) break;
        visited[static_cast<std::size_t>(best)] = 1;
        vertices.push_back(best);
        used += inst.cost(current, best);
        current = best;
    }
    vertices.push_back(inst.end);
    return make_route(inst, std::move(vertices));
}

PheromoneState init_model(const Instance& inst, const AcoConfig& config,
                          const Prediction* prediction) {
    validate(config);
    if ((prediction == nullptr) != (config.integration == Integration::None)) {
        throw InvalidArgumentError(config.integration == Integration::None
                                       ? "aco: prediction given but integration is 'none'"
                                       : "aco: integration mode requires a prediction");
    }
    if (prediction && (prediction->p.rows() != inst.n || prediction->p.cols() != inst.n)) {
        throw InvalidArgumentError("aco: prediction size does not match the instance");
    }

    PheromoneState state;
    switch (config.integration) {
        case Integration::None:
        case Integration::TauSeed:
            state.eta = heuristic_rule(inst);
            break;
        case Integration::Eta:
            state.eta = floored(prediction->p, config.eta_floor);
            break;
        case Integration::EtaHat:
            state.eta =
                floored(prediction->p, config.eta_floor).cwiseProduct(heuristic_rule(inst));
            break;
    }

    if (config.variant == Variant::AntSystem) {
        if (config.integration == Integration::TauSeed) {
            state.tau = prediction->p;
            state.tau.diagonal().setZero();
        } else {
            state.tau = Matrix::Constant(inst.n, inst.n, 1.0);
            state.tau.diagonal().setZero();
        }
        return state;
    }

    // Max-min bounds need a reference objective before any ant has run; a
    // greedy walk over the desirability matrix provides one.
    const Route seed_route = greedy_route(inst, state.eta);
    if (seed_route.objective <= 0) {
        throw InvalidArgumentError(inst.name + ": nonpositive greedy objective; max-min bounds undefined");
    }
    state.tau_max = 1.0 / (config.rho * seed_route.objective);
    state.tau_min = state.tau_max / (2.0 * static_cast<double>(inst.n));
    if (config.integration == Integration::TauSeed) {
        state.tau = rescale_probabilities(prediction->p, state.tau_min, state.tau_max, inst.name);
    } else {
        state.tau = Matrix::Constant(inst.n, inst.n, state.tau_max);
        state.tau.diagonal().setZero();
    }
    return state;
}

Route construct(const Instance& inst, const PheromoneState& state, const AcoConfig& config,
                Rng& rng, long* fallback) {
    Route route;
    route.vertices.reserve(static_cast<std::size_t>(inst.n));
    route.vertices.push_back(inst.start);
    route.objective = inst.score(inst.start);
    std::vector<char> visited(static_cast<std::size_t>(inst.n), 0);
    visited[static_cast<std::size_t>(inst.start)] = 1;

    std::vector<Index> candidates;
    std::vector<double> weights;
    candidates.reserve(static_cast<std::size_t>(inst.n));
    weights.reserve(static_cast<std::size_t>(inst.n));

    double used = 0;
    Index current = inst.start;
    const bool plain_alpha = config.alpha == 1.0;
    const bool plain_beta = config.beta == 1.0;
    while (true) {
        candidates.clear();
        weights.clear();
        double total = 0;
        for (Index j = 0; j < inst.n; ++j) {
            if (visited[static_cast<std::size_t>(j)] || j == inst.end) continue;
            if (used + inst.cost(current, j) + inst.cost(j, inst.end) > inst.t_max) continue;
            const double tau = state.tau(current, j);
            const double eta = state.eta(current, j);
            double w = plain_alpha ? tau : (config.alpha == 0 ? 1.0 : std::pow(tau, config.alpha));
            w *= plain_beta ? eta : (config.beta == 0 ? 1.0 : std::pow(eta, config.beta));
            candidates.push_back(j);
            weights.push_back(w);
            total += w;
        }
        if (candidates.empty()) break;

        Index chosen;
        if (total <= 0) {
            if (fallback) ++*fallback;
            chosen = candidates[rng.bounded(candidates.size())];
        } else {
            // Inverse-CDF selection; boundary draws resolve to the lower
            // index, and zero-weight bins are never selected.
            const double r = rng.uniform01() * total;
            double cumulative = 0;
            chosen = -1;
            for (std::size_t k = 0; k < candidates.size(); ++k) {
                if (weights[k] <= 0) continue;
                cumulative += weights[k];
                chosen = candidates[k];
                if (cumulative >= r) break;
            }
        }
        visited[static_cast<std::size_t>(chosen)] = 1;
        route.vertices.push_back(chosen);
        route.objective += inst.score(chosen);
        used += inst.cost(current, chosen);
        current = chosen;
    }

    route.vertices.push_back(inst.end);
    route.objective += inst.score(inst.end);
    route.cost = used + inst.cost(current, inst.end);
    assert(feasible(inst, route));
    return route;
}

void update_as(PheromoneState& state, const std::vector<Route>& routes, const AcoConfig& config,
               double y_best_global) {
    if (y_best_global <= 0) throw InvalidArgumentError("update_as: nonpositive best objective");
    state.tau *= (1.0 - config.rho);
    const double deposit_scale = config.c_scale * y_best_global;
    for (const Route& route : routes) {
        const double deposit = route.objective / deposit_scale;
        for (std::size_t k = 0; k + 1 < route.vertices.size(); ++k) {
            state.tau(route.vertices[k], route.vertices[k + 1]) += deposit;
        }
    }
}

void update_mmas(PheromoneState& state, const Route& best_route, double y_best_global,
                 const AcoConfig& config, Index n) {
    if (best_route.objective <= 0 || y_best_global <= 0) {
        throw InvalidArgumentError("update_mmas: nonpositive best objective");
    }
    state.tau *= (1.0 - config.rho);
    const double deposit = config.deposit == DepositRule::Paper
                               ? 1.0 / best_route.objective
                               : best_route.objective / (config.c_scale * y_best_global);
    for (std::size_t k = 0; k + 1 < best_route.vertices.size(); ++k) {
        state.tau(best_route.vertices[k], best_route.vertices[k + 1]) += deposit;
    }
    state.tau_max = 1.0 / (config.rho * y_best_global);
    state.tau_min = state.tau_max / (2.0 * static_cast<double>(n));
    state.tau = state.tau.cwiseMax(state.tau_min).cwiseMin(state.tau_max);
    state.tau.diagonal().setZero();
}

void smooth(PheromoneState& state, const AcoConfig& config, const Prediction* prediction) {
    if (config.integration == Integration::TauSeed && prediction) {
        state.tau =
            rescale_probabilities(prediction->p, state.tau_min, state.tau_max, "smooth");
    } else {
        state.tau += config.delta * (Matrix::Constant(state.tau.rows(), state.tau.cols(),
                                                      state.tau_max) -
                                     state.tau);
    }
    state.tau.diagonal().setZero();
    state.stagnation = 0;
}

Route two_opt_improve(const Instance& inst, const Route& route) {
    std::vector<Index> path = route.vertices;
    std::vector<char> visited(static_cast<std::size_t>(inst.n), 0);
    for (const Index v : path) visited[static_cast<std::size_t>(v)] = 1;
    double cost = route_cost(inst, path);

    auto two_opt_pass = [&]() -> bool {
        bool improved_any = false;
        bool improved = true;
        while (improved) {
            improved = false;
            const std::size_t len = path.size();
            for (std::size_t a = 1; a + 1 < len; ++a) {
                for (std::size_t b = a + 1; b + 1 < len; ++b) {
                    const double delta = inst.cost(path[a - 1], path[b]) +
                                         inst.cost(path[a], path[b + 1]) -
                                         inst.cost(path[a - 1], path[a]) -
                                         inst.cost(path[b], path[b + 1]);
                    if (delta >= -1e-12) continue;
                    std::reverse(path.begin() + static_cast<std::ptrdiff_t>(a),
                                 path.begin() + static_cast<std::ptrdiff_t>(b) + 1);
                    const double resummed = route_cost(inst, path);
                    if (resummed < cost) {
                        cost = resummed;
                        improved = true;
                        improved_any = true;
                    } else {
                        std::reverse(path.begin() + static_cast<std::ptrdiff_t>(a),
                                     path.begin() + static_cast<std::ptrdiff_t>(b) + 1);
                    }
                }
            }
        }
        return improved_any;
    };

    while (true) {
        two_opt_pass();
        // Greedy insertion of the best score-per-detour vertex that the
        // freed budget admits.
        Index best_v = -1;
        std::size_t best_pos = 0;
        double best_ratio = -1;
        for (Index v = 0; v < inst.n; ++v) {
            if (visited[static_cast<std::size_t>(v)] || inst.score(v) <= 0) continue;
            for (std::size_t pos = 0; pos + 1 < path.size(); ++pos) {
                const double delta = inst.cost(path[pos], v) + inst.cost(v, path[pos + 1]) -
                                     inst.cost(path[pos], path[pos + 1]);
                if (cost + delta > inst.t_max) continue;
                const double ratio = inst.score(v) / std::max(delta, 1e-12);
                if (ratio > best_ratio) {
                    best_ratio = ratio;
                    best_v = v;
                    best_pos = pos;
                }
            }
        }
        if (best_v < 0) break;
        path.insert(path.begin() + static_cast<std::ptrdiff_t>(best_pos) + 1, best_v);
        const double resummed = route_cost(inst, path);
        if (resummed > inst.t_max) {
            // Exact resummation disagreed with the delta screen; undo.
            path.erase(path.begin() + static_cast<std::ptrdiff_t>(best_pos) + 1);
            break;
        }
        cost = resummed;
        visited[static_cast<std::size_t>(best_v)] = 1;
    }

    Route improved = make_route(inst, std::move(path));
    assert(feasible(inst, improved));
    assert(improved.objective >= route.objective);
    return improved;
}

RunTrace run(const Instance& inst, const AcoConfig& config, const Prediction* prediction,
             const RunObserver& observer) {
    const auto started = Clock::now();
    validate(inst);

    AcoConfig cfg = config;
    if (cfg.ants == 0) {
        cfg.ants = cfg.variant == Variant::AntSystem ? static_cast<int>(100 * inst.n)
                                                     : static_cast<int>(inst.n);
    }
    if (cfg.budget == 0) cfg.budget = 1000 * inst.n;
    const int threads = cfg.threads > 0 ? cfg.threads : worker_count();

    PheromoneState state = init_model(inst, cfg, prediction);

    RunTrace trace;
    Route best_global;
    double best_objective = -std::numeric_limits<double>::infinity();
    long constructions = 0;
    int since_improvement = 0;  // iterations without a global-best improvement

    std::vector<Route> routes(static_cast<std::size_t>(cfg.ants));
    std::atomic<long> fallback_total{0};

    for (long iteration = 0;; ++iteration) {
        const int chunk_threads = cfg.ants >= 64 ? threads : 1;
        parallel_for(0, cfg.ants, chunk_threads, [&](long ant) {
            Rng rng(stream_seed(cfg.seed, static_cast<std::uint64_t>(iteration),
                                static_cast<std::uint64_t>(ant)));
            long local_fallback = 0;
            routes[static_cast<std::size_t>(ant)] =
                construct(inst, state, cfg, rng, &local_fallback);
            if (local_fallback > 0) fallback_total.fetch_add(local_fallback);
        });
        constructions += cfg.ants;

        std::size_t iteration_best = 0;
        for (std::size_t k = 1; k < routes.size(); ++k) {
            if (routes[k].objective > routes[iteration_best].objective) iteration_best = k;
        }
        Route iter_best_route = routes[iteration_best];
        if (cfg.local_search) iter_best_route = two_opt_improve(inst, iter_best_route);

        if (iter_best_route.objective > best_objective) {
            best_objective = iter_best_route.objective;
            best_global = iter_best_route;
            since_improvement = 0;
            state.stagnation = 0;
        } else {
            ++since_improvement;
            ++state.stagnation;
        }

        if (cfg.variant == Variant::AntSystem) {
            update_as(state, routes, cfg, best_objective);
        } else {
            const Route& deposit_route =
                cfg.update_rule == UpdateRule::IterationBest ? iter_best_route : best_global;
            update_mmas(state, deposit_route, best_objective, cfg, inst.n);
        }
        if (observer) observer(state, constructions);

        if (cfg.variant == Variant::MaxMin && state.stagnation >= cfg.t_pts) {
            smooth(state, cfg, prediction);
            if (observer) observer(state, constructions);
        }

        trace.checkpoints.push_back({constructions, best_objective});

        if (cfg.termination == Termination::ConstructionBudget) {
            if (constructions >= cfg.budget) break;
        } else if (since_improvement >= cfg.t_ter) {
            break;
        }
    }

    trace.best_route = best_global;
    trace.wall_time = std::chrono::duration<double>(Clock::now() - started).count();
    trace.fallback_events = fallback_total.load();
    if (trace.fallback_events > 0) {
        std::cerr << "note: " << inst.name << ": " << trace.fallback_events
                  << " uniform-fallback selections (all candidate weights zero)\n";
    }
    return trace;
}

AcoConfig sota_preset() {
    AcoConfig config;
    config.variant = Variant::MaxMin;
    config.integration = Integration::EtaHat;
    config.update_rule = UpdateRule::GlobalBest;
    config.ants = 50;
    config.termination = Termination::NoImprove;
    config.t_ter = 200;
    config.local_search = true;
    return config;
}

void write_trace_csv(const RunTrace& trace, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ParseError(path + ": cannot open for writing");
    out << "constructions,best_objective\n";
    for (const auto& point : trace.checkpoints) {
        out << point.constructions << ',' << point.best << '\n';
    }
}

}  // namespace mlaco
