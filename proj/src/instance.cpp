#include "mlaco/instance.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "mlaco/error.hpp"
#include "mlaco/rng.hpp"

namespace mlaco {

namespace {

double euclidean(double dx, double dy) { return std::sqrt(dx * dx + dy * dy); }

// TSPLIB nearest-integer rounding.
double nint(double x) { return std::floor(x + 0.5); }

Matrix costs_from_coords(const Coords& coords, Rounding rounding) {
    const Index n = coords.rows();
    Matrix cost = Matrix::Zero(n, n);
    for (Index i = 0; i < n; ++i) {
        for (Index j = i + 1; j < n; ++j) {
            const double d = euclidean(coords(i, 0) - coords(j, 0), coords(i, 1) - coords(j, 1));
            const double c = rounding == Rounding::TsplibEuc2d ? nint(d) : d;
            cost(i, j) = c;
            cost(j, i) = c;
        }
    }
    return cost;
}

// TSPLIB pseudo-Euclidean distance (ATT).
double att_distance(double dx, double dy) {
    const double r = std::sqrt((dx * dx + dy * dy) / 10.0);
    const double t = nint(r);
    return t < r ? t + 1 : t;
}

Matrix att_costs(const Coords& coords) {
    const Index n = coords.rows();
    Matrix cost = Matrix::Zero(n, n);
    for (Index i = 0; i < n; ++i) {
        for (Index j = i + 1; j < n; ++j) {
            const double c = att_distance(coords(i, 0) - coords(j, 0), coords(i, 1) - coords(j, 1));
            cost(i, j) = c;
            cost(j, i) = c;
        }
    }
    return cost;
}

[[noreturn]] void parse_fail(const std::string& path, int line, const std::string& what) {
    throw ParseError(path + ":" + std::to_string(line) + ": " + what);
}

}  // namespace

std::string to_string(Rounding r) {
    switch (r) {
        case Rounding::ExactEuclidean: return "exact-euclidean";
        case Rounding::TsplibEuc2d: return "tsplib-euc2d";
        case Rounding::Explicit: return "explicit";
    }
    return "exact-euclidean";
}

Rounding rounding_from_string(const std::string& s) {
    if (s == "exact-euclidean") return Rounding::ExactEuclidean;
    if (s == "tsplib-euc2d") return Rounding::TsplibEuc2d;
    if (s == "explicit") return Rounding::Explicit;
    throw ParseError("unknown rounding tag '" + s + "'");
}

bool Instance::operator==(const Instance& other) const {
    const bool coords_equal =
        coords.has_value() == other.coords.has_value() &&
        (!coords.has_value() || *coords == *other.coords);
    return name == other.name && n == other.n && cost == other.cost && score == other.score &&
           t_max == other.t_max && start == other.start && end == other.end && coords_equal &&
           rounding == other.rounding;
}

Instance generate_random(const GenerateParams& params) {
    if (params.n < 2) {
        throw InvalidArgumentError("generate_random: need at least 2 vertices, got " +
                                   std::to_string(params.n));
    }
    if (params.budget_lo > params.budget_hi) {
        throw InvalidArgumentError("generate_random: empty budget range");
    }
    Rng rng(stream_seed(params.seed));

    Instance inst;
    inst.n = params.n;
    inst.name = "rand-n" + std::to_string(params.n) + "-s" + std::to_string(params.seed);
    Coords coords(params.n, 2);
    for (Index i = 0; i < params.n; ++i) {
        coords(i, 0) = rng.uniform(0.0, params.coord_hi);
        coords(i, 1) = rng.uniform(0.0, params.coord_hi);
    }
    inst.coords = coords;
    inst.score = Vector::Zero(params.n);
    for (Index i = 1; i + 1 < params.n; ++i) {
        inst.score(i) = static_cast<double>(rng.uniform_int(0, params.score_hi));
    }
    inst.t_max = static_cast<double>(
        rng.uniform_int(static_cast<long>(params.budget_lo), static_cast<long>(params.budget_hi)));
    inst.start = 0;
    inst.end = params.n - 1;
    inst.rounding = Rounding::ExactEuclidean;
    inst.cost = costs_from_coords(coords, inst.rounding);
    validate(inst);
    return inst;
}

void validate(const Instance& inst) {
    if (inst.n < 2) throw InvalidArgumentError(inst.name + ": instance needs at least 2 vertices");
    if (inst.cost.rows() != inst.n || inst.cost.cols() != inst.n) {
        throw InvalidArgumentError(inst.name + ": cost matrix must be n x n");
    }
    if (inst.score.size() != inst.n) {
        throw InvalidArgumentError(inst.name + ": score vector must have n entries");
    }
    if (inst.start < 0 || inst.start >= inst.n || inst.end < 0 || inst.end >= inst.n) {
        throw InvalidArgumentError(inst.name + ": start/end vertex out of range");
    }
    if (inst.start == inst.end) {
        throw InvalidArgumentError(inst.name + ": start and end vertices must differ");
    }
    if (inst.t_max < 0) throw InvalidArgumentError(inst.name + ": negative budget");
    for (Index i = 0; i < inst.n; ++i) {
        if (inst.score(i) < 0) {
            throw InvalidArgumentError(inst.name + ": negative score at vertex " +
                                       std::to_string(i + 1));
        }
        for (Index j = 0; j < inst.n; ++j) {
            if (i != j && !(inst.cost(i, j) >= 0)) {
                throw InvalidArgumentError(inst.name + ": negative cost on edge (" +
                                           std::to_string(i + 1) + "," + std::to_string(j + 1) +
                                           ")");
            }
        }
    }
    if (inst.cost(inst.start, inst.end) > inst.t_max) {
        throw InfeasibleInstanceError(inst.name + ": start-to-end cost " +
                                      std::to_string(inst.cost(inst.start, inst.end)) +
                                      " exceeds budget " + std::to_string(inst.t_max));
    }
}

double route_cost(const Instance& inst, const std::vector<Index>& vertices) {
    double cost = 0;
    for (std::size_t k = 0; k + 1 < vertices.size(); ++k) {
        cost += inst.cost(vertices[k], vertices[k + 1]);
    }
    return cost;
}

double route_objective(const Instance& inst, const std::vector<Index>& vertices) {
    double objective = 0;
    for (const Index v : vertices) objective += inst.score(v);
    return objective;
}

Route make_route(const Instance& inst, std::vector<Index> vertices) {
    for (const Index v : vertices) {
        if (v < 0 || v >= inst.n) {
            throw InvalidArgumentError("route references vertex " + std::to_string(v + 1) +
                                       " outside instance of size " + std::to_string(inst.n));
        }
    }
    Route route;
    route.cost = route_cost(inst, vertices);
    route.objective = route_objective(inst, vertices);
    route.vertices = std::move(vertices);
    return route;
}

bool feasible(const Instance& inst, const Route& route) {
    if (route.vertices.empty()) return false;
    for (const Index v : route.vertices) {
        if (v < 0 || v >= inst.n) {
            throw InvalidArgumentError("route references vertex " + std::to_string(v + 1) +
                                       " outside instance of size " + std::to_string(inst.n));
        }
    }
    if (route.vertices.front() != inst.start || route.vertices.back() != inst.end) return false;
    std::vector<bool> seen(static_cast<std::size_t>(inst.n), false);
    for (const Index v : route.vertices) {
        if (seen[static_cast<std::size_t>(v)]) return false;
        seen[static_cast<std::size_t>(v)] = true;
    }
    return route_cost(inst, route.vertices) <= inst.t_max;
}

// --- JSON format -----------------------------------------------------------

std::string to_json_string(const Instance& inst) {
    nlohmann::json j;
    j["name"] = inst.name;
    j["n"] = inst.n;
    j["start"] = inst.start + 1;
    j["end"] = inst.end + 1;
    j["t_max"] = inst.t_max;
    j["rounding"] = to_string(inst.rounding);
    j["scores"] = std::vector<double>(inst.score.data(), inst.score.data() + inst.n);
    if (inst.coords) {
        auto& coords = j["coords"];
        coords = nlohmann::json::array();
        for (Index i = 0; i < inst.n; ++i) {
            coords.push_back({(*inst.coords)(i, 0), (*inst.coords)(i, 1)});
        }
    }
    if (inst.rounding == Rounding::Explicit || !inst.coords) {
        auto& costs = j["costs"];
        costs = nlohmann::json::array();
        for (Index i = 0; i < inst.n; ++i) {
            std::vector<double> row(inst.n);
            for (Index k = 0; k < inst.n; ++k) row[static_cast<std::size_t>(k)] = inst.cost(i, k);
            costs.push_back(row);
        }
    }
    return j.dump(2) + "\n";
}

void write_json(const Instance& inst, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ParseError(path + ": cannot open for writing");
    out << to_json_string(inst);
}

namespace {

Instance parse_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError(path + ": cannot open");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(path + ": " + e.what());
    }
    auto require = [&](const char* field) -> const nlohmann::json& {
        if (!j.contains(field)) throw ParseError(path + ": missing field '" + field + "'");
        return j.at(field);
    };
    Instance inst;
    try {
        inst.name = require("name").get<std::string>();
        inst.n = require("n").get<Index>();
        if (inst.n < 2) throw ParseError(path + ": field 'n' must be at least 2");
        inst.start = require("start").get<Index>() - 1;
        inst.end = require("end").get<Index>() - 1;
        inst.t_max = require("t_max").get<double>();
        inst.rounding = rounding_from_string(require("rounding").get<std::string>());
        const auto scores = require("scores").get<std::vector<double>>();
        if (static_cast<Index>(scores.size()) != inst.n) {
            throw ParseError(path + ": field 'scores' must list n values");
        }
        inst.score = Eigen::Map<const Vector>(scores.data(), inst.n);
        if (j.contains("coords")) {
            const auto& coords = j.at("coords");
            if (static_cast<Index>(coords.size()) != inst.n) {
                throw ParseError(path + ": field 'coords' must list n pairs");
            }
            Coords c(inst.n, 2);
            for (Index i = 0; i < inst.n; ++i) {
                const auto& pair = coords.at(static_cast<std::size_t>(i));
                if (pair.size() != 2) {
                    throw ParseError(path + ": coords entry " + std::to_string(i + 1) +
                                     " is not an [x, y] pair");
                }
                c(i, 0) = pair.at(0).get<double>();
                c(i, 1) = pair.at(1).get<double>();
            }
            inst.coords = c;
        }
        if (j.contains("costs")) {
            const auto& costs = j.at("costs");
            if (static_cast<Index>(costs.size()) != inst.n) {
                throw ParseError(path + ": field 'costs' must list n rows");
            }
            inst.cost.resize(inst.n, inst.n);
            for (Index i = 0; i < inst.n; ++i) {
                const auto row = costs.at(static_cast<std::size_t>(i)).get<std::vector<double>>();
                if (static_cast<Index>(row.size()) != inst.n) {
                    throw ParseError(path + ": costs row " + std::to_string(i + 1) +
                                     " must list n values");
                }
                inst.cost.row(i) = Eigen::Map<const Vector>(row.data(), inst.n).transpose();
            }
        } else if (inst.coords) {
            if (inst.rounding == Rounding::Explicit) {
                throw ParseError(path + ": rounding 'explicit' requires a costs matrix");
            }
            inst.cost = costs_from_coords(*inst.coords, inst.rounding);
        } else {
            throw ParseError(path + ": one of 'coords' or 'costs' is required");
        }
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(path + ": " + e.what());
    }
    validate(inst);
    return inst;
}

// --- TSPLIB-style format ----------------------------------------------------

struct OplibData {
    std::string name = "unnamed";
    std::string type;
    Index dimension = -1;
    double t_max = -1;
    std::string weight_type;
    std::string weight_format = "FULL_MATRIX";
    std::optional<Coords> coords;
    std::optional<Vector> scores;
    std::vector<double> weights;
    Index depot = -1;
};

// Splits "KEYWORD : value" into its parts; section keywords have no value.
bool split_keyword(const std::string& line, std::string& key, std::string& value) {
    const auto colon = line.find(':');
    auto trim = [](std::string s) {
        const auto b = s.find_first_not_of(" \t\r\n");
        if (b == std::string::npos) return std::string();
        const auto e = s.find_last_not_of(" \t\r\n");
        return s.substr(b, e - b + 1);
    };
    if (colon == std::string::npos) {
        key = trim(line);
        value.clear();
    } else {
        key = trim(line.substr(0, colon));
        value = trim(line.substr(colon + 1));
    }
    return !key.empty();
}

Instance parse_oplib(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError(path + ": cannot open");

    OplibData data;
    std::string line;
    int lineno = 0;
    auto next_line = [&]() -> bool {
        while (std::getline(in, line)) {
            ++lineno;
            if (line.find_first_not_of(" \t\r\n") != std::string::npos) return true;
        }
        return false;
    };

    while (next_line()) {
        std::string key, value;
        if (!split_keyword(line, key, value)) continue;
        if (key == "EOF") break;
        if (key == "NAME") {
            data.name = value;
        } else if (key == "TYPE") {
            data.type = value;
        } else if (key == "COMMENT") {
            // ignored
        } else if (key == "DIMENSION") {
            data.dimension = std::strtol(value.c_str(), nullptr, 10);
            if (data.dimension < 2) parse_fail(path, lineno, "DIMENSION must be at least 2");
        } else if (key == "COST_LIMIT" || key == "TMAX") {
            char* rest = nullptr;
            data.t_max = std::strtod(value.c_str(), &rest);
            if (rest == value.c_str()) parse_fail(path, lineno, "non-numeric " + key);
        } else if (key == "EDGE_WEIGHT_TYPE") {
            data.weight_type = value;
        } else if (key == "EDGE_WEIGHT_FORMAT") {
            data.weight_format = value;
        } else if (key == "DISPLAY_DATA_TYPE" || key == "NODE_COORD_TYPE") {
            // ignored
        } else if (key == "NODE_COORD_SECTION" || key == "DISPLAY_DATA_SECTION") {
            const bool display_only = key == "DISPLAY_DATA_SECTION";
            if (data.dimension < 0) parse_fail(path, lineno, key + " before DIMENSION");
            Coords coords(data.dimension, 2);
            for (Index i = 0; i < data.dimension; ++i) {
                if (!next_line()) parse_fail(path, lineno, "unexpected end of coordinate list");
                std::istringstream row(line);
                long id;
                double x, y;
                if (!(row >> id >> x >> y)) parse_fail(path, lineno, "malformed coordinate line");
                if (id < 1 || id > data.dimension) parse_fail(path, lineno, "vertex id out of range");
                coords(id - 1, 0) = x;
                coords(id - 1, 1) = y;
            }
            if (!display_only || !data.coords) data.coords = coords;
        } else if (key == "NODE_SCORE_SECTION") {
            if (data.dimension < 0) parse_fail(path, lineno, "NODE_SCORE_SECTION before DIMENSION");
            Vector scores = Vector::Zero(data.dimension);
            for (Index i = 0; i < data.dimension; ++i) {
                if (!next_line()) parse_fail(path, lineno, "unexpected end of score list");
                std::istringstream row(line);
                long id;
                double s;
                if (!(row >> id >> s)) parse_fail(path, lineno, "malformed score line");
                if (id < 1 || id > data.dimension) parse_fail(path, lineno, "vertex id out of range");
                scores(id - 1) = s;
            }
            data.scores = scores;
        } else if (key == "EDGE_WEIGHT_SECTION") {
            if (data.dimension < 0) parse_fail(path, lineno, "EDGE_WEIGHT_SECTION before DIMENSION");
            // Weight count depends on the declared format; read numbers until
            // the expected count is reached.
            const Index n = data.dimension;
            std::size_t expected = 0;
            if (data.weight_format == "FULL_MATRIX") {
                expected = static_cast<std::size_t>(n) * static_cast<std::size_t>(n);
            } else if (data.weight_format == "LOWER_DIAG_ROW" ||
                       data.weight_format == "UPPER_DIAG_ROW") {
                expected = static_cast<std::size_t>(n) * static_cast<std::size_t>(n + 1) / 2;
            } else if (data.weight_format == "LOWER_ROW" || data.weight_format == "UPPER_ROW") {
                expected = static_cast<std::size_t>(n) * static_cast<std::size_t>(n - 1) / 2;
            } else {
                parse_fail(path, lineno, "unsupported EDGE_WEIGHT_FORMAT " + data.weight_format);
            }
            while (data.weights.size() < expected) {
                if (!next_line()) parse_fail(path, lineno, "unexpected end of weight list");
                std::istringstream row(line);
                double w;
                while (row >> w) data.weights.push_back(w);
            }
            if (data.weights.size() != expected) {
                parse_fail(path, lineno, "edge weight count mismatch");
            }
        } else if (key == "DEPOT_SECTION") {
            if (!next_line()) parse_fail(path, lineno, "unexpected end of depot section");
            data.depot = std::strtol(line.c_str(), nullptr, 10) - 1;
            if (next_line()) {
                if (line.find("-1") == std::string::npos) {
                    parse_fail(path, lineno, "depot section must end with -1");
                }
            }
        } else {
            parse_fail(path, lineno, "unknown keyword '" + key + "'");
        }
    }

    if (data.dimension < 0) throw ParseError(path + ": missing DIMENSION");
    if (data.t_max < 0) throw ParseError(path + ": missing COST_LIMIT/TMAX");

    Instance inst;
    inst.name = data.name;
    inst.n = data.dimension;
    if (data.weight_type == "EUC_2D") {
        if (!data.coords) throw ParseError(path + ": EUC_2D requires NODE_COORD_SECTION");
        inst.rounding = Rounding::TsplibEuc2d;
        inst.cost = costs_from_coords(*data.coords, inst.rounding);
        inst.coords = data.coords;
    } else if (data.weight_type == "ATT") {
        if (!data.coords) throw ParseError(path + ": ATT requires NODE_COORD_SECTION");
        inst.rounding = Rounding::Explicit;
        inst.cost = att_costs(*data.coords);
        inst.coords = data.coords;
    } else if (data.weight_type == "EXPLICIT") {
        inst.rounding = Rounding::Explicit;
        const Index n = inst.n;
        inst.cost = Matrix::Zero(n, n);
        std::size_t pos = 0;
        if (data.weights.empty()) throw ParseError(path + ": missing EDGE_WEIGHT_SECTION");
        if (data.weight_format == "FULL_MATRIX") {
            for (Index i = 0; i < n; ++i)
                for (Index j = 0; j < n; ++j) inst.cost(i, j) = data.weights[pos++];
        } else if (data.weight_format == "LOWER_DIAG_ROW") {
            for (Index i = 0; i < n; ++i)
                for (Index j = 0; j <= i; ++j) {
                    inst.cost(i, j) = data.weights[pos];
                    inst.cost(j, i) = data.weights[pos++];
                }
        } else if (data.weight_format == "UPPER_DIAG_ROW") {
            for (Index i = 0; i < n; ++i)
                for (Index j = i; j < n; ++j) {
                    inst.cost(i, j) = data.weights[pos];
                    inst.cost(j, i) = data.weights[pos++];
                }
        } else if (data.weight_format == "LOWER_ROW") {
            for (Index i = 1; i < n; ++i)
                for (Index j = 0; j < i; ++j) {
                    inst.cost(i, j) = data.weights[pos];
                    inst.cost(j, i) = data.weights[pos++];
                }
        } else {  // UPPER_ROW
            for (Index i = 0; i < n; ++i)
                for (Index j = i + 1; j < n; ++j) {
                    inst.cost(i, j) = data.weights[pos];
                    inst.cost(j, i) = data.weights[pos++];
                }
        }
        inst.coords = data.coords;
    } else if (data.weight_type.empty()) {
        throw ParseError(path + ": missing EDGE_WEIGHT_TYPE");
    } else {
        throw ParseError(path + ": unsupported EDGE_WEIGHT_TYPE " + data.weight_type);
    }

    inst.score = data.scores ? *data.scores : Vector::Zero(inst.n);
    inst.t_max = data.t_max;

    // OP files describe a cycle through the depot. The path model requires
    // distinct start and end vertices, so the depot is duplicated as an
    // artificial ending vertex at zero distance from the original.
    const bool cyclic = data.depot >= 0 || data.type == "OP";
    if (cyclic) {
        const Index depot = data.depot >= 0 ? data.depot : 0;
        if (depot >= inst.n) throw ParseError(path + ": depot vertex out of range");
        const Index n = inst.n;
        Matrix cost = Matrix::Zero(n + 1, n + 1);
        cost.topLeftCorner(n, n) = inst.cost;
        cost.block(n, 0, 1, n) = inst.cost.row(depot);
        cost.block(0, n, n, 1) = inst.cost.col(depot);
        cost(n, depot) = 0;
        cost(depot, n) = 0;
        inst.cost = cost;
        Vector score(n + 1);
        score.head(n) = inst.score;
        score(n) = 0;
        inst.score = score;
        if (inst.coords) {
            Coords coords(n + 1, 2);
            coords.topRows(n) = *inst.coords;
            coords.row(n) = inst.coords->row(depot);
            inst.coords = coords;
        }
        inst.start = depot;
        inst.end = n;
        inst.n = n + 1;
        inst.rounding = Rounding::Explicit;
    } else {
        inst.start = 0;
        inst.end = inst.n - 1;
    }
    validate(inst);
    return inst;
}

// --- Chao text format --------------------------------------------------------

Instance parse_chao(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError(path + ": cannot open");
    std::string line;
    int lineno = 0;
    if (!std::getline(in, line)) throw ParseError(path + ": empty file");
    ++lineno;
    std::istringstream header(line);
    Index n = 0;
    double t_max = -1;
    if (!(header >> n >> t_max)) parse_fail(path, lineno, "header must be 'n t_max'");
    if (n < 2) parse_fail(path, lineno, "vertex count must be at least 2");
    if (t_max < 0) parse_fail(path, lineno, "negative budget");

    Coords coords(n, 2);
    Vector score(n);
    for (Index i = 0; i < n; ++i) {
        if (!std::getline(in, line)) parse_fail(path, lineno, "expected " + std::to_string(n) +
                                                                  " vertex lines");
        ++lineno;
        std::istringstream row(line);
        double x, y, s;
        if (!(row >> x >> y >> s)) parse_fail(path, lineno, "vertex line must be 'x y score'");
        coords(i, 0) = x;
        coords(i, 1) = y;
        score(i) = s;
    }

    Instance inst;
    inst.name = path.substr(path.find_last_of('/') + 1);
    if (const auto dot = inst.name.find_last_of('.'); dot != std::string::npos) {
        inst.name = inst.name.substr(0, dot);
    }
    inst.n = n;
    inst.coords = coords;
    inst.score = score;
    inst.t_max = t_max;
    inst.start = 0;
    inst.end = 1;
    inst.rounding = Rounding::ExactEuclidean;
    inst.cost = costs_from_coords(coords, inst.rounding);
    validate(inst);
    return inst;
}

}  // namespace

Instance parse_instance(const std::string& path, InstanceFormat format) {
    switch (format) {
        case InstanceFormat::Json: return parse_json(path);
        case InstanceFormat::Oplib: return parse_oplib(path);
        case InstanceFormat::Chao: return parse_chao(path);
    }
    throw InvalidArgumentError("unknown instance format");
}

}  // namespace mlaco
