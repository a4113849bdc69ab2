#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mlaco/types.hpp"

namespace mlaco {

// How the cost matrix was derived from the source data. Euclidean
// instances keep their coordinates so they can be re-serialized exactly.
enum class Rounding { ExactEuclidean, TsplibEuc2d, Explicit };

std::string to_string(Rounding r);
Rounding rounding_from_string(const std::string& s);

// A complete directed orienteering instance: travel costs between all
// vertex pairs, a score per vertex, a travel budget and designated
// start/end vertices. Immutable after construction and safe to share
// across threads.
struct Instance {
    std::string name;
    Index n = 0;
    Matrix cost;                   // n x n, nonnegative, diagonal unused
    Vector score;                  // n, nonnegative
    double t_max = 0;
    Index start = 0;
    Index end = 0;
    std::optional<Coords> coords;  // present for coordinate-derived instances
    Rounding rounding = Rounding::ExactEuclidean;

    bool operator==(const Instance& other) const;
};

// An ordered start-to-end vertex sequence with its accumulated travel
// cost and collected score.
struct Route {
    std::vector<Index> vertices;
    double cost = 0;
    double objective = 0;
};

enum class InstanceFormat { Json, Oplib, Chao };

struct GenerateParams {
    Index n = 50;
    std::uint64_t seed = 0;
    double budget_lo = 100;  // t_max drawn uniformly from integers in [lo, hi]
    double budget_hi = 400;
    double coord_hi = 100;   // coordinates uniform real in [0, coord_hi]^2
    long score_hi = 100;     // scores uniform integer in [0, score_hi]
};

// Generates a random Euclidean instance: uniform coordinates, integer
// scores with zero at the start (vertex 0) and end (vertex n-1), and an
// integer budget. Deterministic for a fixed (n, seed).
Instance generate_random(const GenerateParams& params);

// Reads an instance file. Raises ParseError naming the offending
// line/field, or InfeasibleInstanceError when no start-to-end route fits
// the budget.
Instance parse_instance(const std::string& path, InstanceFormat format);

// Canonical JSON serialization; parse_instance(write_json(i)) == i.
std::string to_json_string(const Instance& inst);
void write_json(const Instance& inst, const std::string& path);

// Validates structural invariants (dimensions, nonnegativity, feasible
// start-to-end hop). Throws on violation.
void validate(const Instance& inst);

// True iff route starts at inst.start, ends at inst.end, repeats no
// vertex and fits the budget. Out-of-range vertex indices throw instead
// of returning false.
bool feasible(const Instance& inst, const Route& route);

// Left-to-right accumulated travel cost of a vertex sequence.
double route_cost(const Instance& inst, const std::vector<Index>& vertices);

// Sum of scores over the sequence (start and end included).
double route_objective(const Instance& inst, const std::vector<Index>& vertices);

// Builds a Route with cached cost/objective; throws on bad indices.
Route make_route(const Instance& inst, std::vector<Index> vertices);

}  // namespace mlaco
