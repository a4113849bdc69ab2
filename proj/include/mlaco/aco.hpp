#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "mlaco/classifier.hpp"
#include "mlaco/instance.hpp"
#include "mlaco/rng.hpp"

namespace mlaco {

enum class Variant { AntSystem, MaxMin };
enum class Integration { None, Eta, EtaHat, TauSeed };
enum class UpdateRule { IterationBest, GlobalBest };
enum class Termination { ConstructionBudget, NoImprove };
enum class DepositRule { Paper, Proportional };

std::string to_string(Variant v);
std::string to_string(Integration i);
Variant variant_from_string(const std::string& s);
Integration integration_from_string(const std::string& s);

struct AcoConfig {
    Variant variant = Variant::MaxMin;
    double alpha = 1;
    double beta = 1;
    double rho = 0.05;
    double delta = 0.5;
    int t_pts = 100;          // stagnant iterations before trail smoothing
    double c_scale = 100;     // deposit constant C = c_scale * best objective
    int ants = 0;             // 0: 100n for ant system, n for max-min
    long budget = 0;          // total constructions; 0: 1000n
    UpdateRule update_rule = UpdateRule::IterationBest;
    Integration integration = Integration::None;
    std::uint64_t seed = 0;
    Termination termination = Termination::ConstructionBudget;
    int t_ter = 200;          // stagnant iterations before no-improve stop
    bool local_search = false;
    DepositRule deposit = DepositRule::Paper;
    double eta_floor = 1e-6;  // floor on predicted probabilities in eta modes
    int threads = 0;          // 0: MLACO_THREADS or single-threaded
};

void validate(const AcoConfig& config);

// The evolving probabilistic model: pheromone and desirability matrices
// plus the max-min clamp bounds (unused for ant system).
struct PheromoneState {
    Matrix tau;
    Matrix eta;
    double tau_max = 0;
    double tau_min = 0;
    int stagnation = 0;
};

struct Checkpoint {
    long constructions = 0;
    double best = 0;
};

struct RunTrace {
    std::vector<Checkpoint> checkpoints;
    Route best_route;
    double wall_time = 0;
    long fallback_events = 0;
};

// Builds the initial model for the chosen integration mode. A prediction
// is required exactly when integration != None. Max-min bounds are
// seeded from a deterministic greedy route.
PheromoneState init_model(const Instance& inst, const AcoConfig& config,
                          const Prediction* prediction = nullptr);

// Greedy argmax-desirability walk used to seed max-min bounds.
Route greedy_route(const Instance& inst, const Matrix& eta);

// Samples one feasible route from the current model. Falls back to a
// uniform choice when every candidate weight is zero; such events are
// counted into *fallback when given.
Route construct(const Instance& inst, const PheromoneState& state, const AcoConfig& config,
                Rng& rng, long* fallback = nullptr);

// All-ants pheromone update: evaporate, then each route deposits its
// objective divided by c_scale * best-so-far on its edges.
void update_as(PheromoneState& state, const std::vector<Route>& routes, const AcoConfig& config,
               double y_best_global);

// Single-route update with bound recomputation and clamping.
void update_mmas(PheromoneState& state, const Route& best_route, double y_best_global,
                 const AcoConfig& config, Index n);

// Pheromone trail smoothing: push values toward tau_max by delta, or
// reset to the rescaled prediction in tau-seed mode.
void smooth(PheromoneState& state, const AcoConfig& config, const Prediction* prediction = nullptr);

// 2-opt segment reversals to shed travel cost, alternated with greedy
// score-per-detour vertex insertion until no vertex fits.
Route two_opt_improve(const Instance& inst, const Route& route);

using RunObserver = std::function<void(const PheromoneState&, long constructions)>;

// Full optimization loop; deterministic per config.seed regardless of
// thread count. The observer, when set, runs after every pheromone
// update or smoothing event.
RunTrace run(const Instance& inst, const AcoConfig& config, const Prediction* prediction = nullptr,
             const RunObserver& observer = nullptr);

// Named profile: max-min + prediction-weighted heuristic + 2-opt,
// global-best updates, population 50, no-improve termination.
AcoConfig sota_preset();

void write_trace_csv(const RunTrace& trace, const std::string& path);

}  // namespace mlaco
