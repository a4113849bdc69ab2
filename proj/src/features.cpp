#include "mlaco/features.hpp"

#include <cmath>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>

#include "mlaco/error.hpp"

namespace mlaco {

namespace {

constexpr double kMinCost = 1e-9;  // guards ratios against coincident vertices

double clamped_cost(const Instance& inst, Index i, Index j) {
    return std::max(inst.cost(i, j), kMinCost);
}

}  // namespace

EdgeFeatures graph_features(const Instance& inst) {
    if (inst.t_max <= 0) {
        throw InvalidArgumentError(inst.name + ": graph features need a positive budget");
    }
    EdgeFeatures features;
    features.n = inst.n;
    for (auto& m : features.f) m = Matrix::Zero(inst.n, inst.n);

    // Best score-per-cost leaving each vertex, and cheapest way into each.
    Vector best_out = Vector::Zero(inst.n);
    Vector min_in = Vector::Constant(inst.n, std::numeric_limits<double>::infinity());
    for (Index i = 0; i < inst.n; ++i) {
        for (Index j = 0; j < inst.n; ++j) {
            if (i == j) continue;
            best_out(i) = std::max(best_out(i), inst.score(j) / clamped_cost(inst, i, j));
            min_in(j) = std::min(min_in(j), clamped_cost(inst, i, j));
        }
    }

    for (Index i = 0; i < inst.n; ++i) {
        for (Index j = 0; j < inst.n; ++j) {
            if (i == j) continue;
            const double cost = clamped_cost(inst, i, j);
            features.f[0](i, j) = cost / inst.t_max;
            features.f[1](i, j) = best_out(i) > 0 ? (inst.score(j) / cost) / best_out(i) : 0.0;
            // The score of j cancels against the row maximum, leaving a
            // pure cost ratio; this form stays defined for zero scores.
            features.f[2](i, j) = min_in(j) / cost;
        }
    }
    return features;
}

void statistical_features(const Instance& inst, const SampleSet& samples, EdgeFeatures& out) {
    if (samples.m < 1) throw InvalidArgumentError("statistical features need samples");
    const Index n = inst.n;
    const int m = samples.m;

    const double mean = samples.objectives.mean();
    const double y_diff = (samples.objectives.array() - mean).sum();
    const double y_var = (samples.objectives.array() - mean).square().sum();
    if (y_var == 0) {
        throw DegenerateSamplesError(inst.name +
                                     ": all sample objectives equal; retry with more samples");
    }

    Matrix rank_score = Matrix::Zero(n, n);
    Matrix mean_x = Matrix::Zero(n, n);
    Matrix s1 = Matrix::Zero(n, n);
    for (int k = 0; k < m; ++k) {
        const auto& vertices = samples.routes[static_cast<std::size_t>(k)].vertices;
        const double inv_rank = 1.0 / samples.rankings[static_cast<std::size_t>(k)];
        const double centered = samples.objectives(k) - mean;
        for (std::size_t idx = 0; idx + 1 < vertices.size(); ++idx) {
            const Index i = vertices[idx];
            const Index j = vertices[idx + 1];
            rank_score(i, j) += inv_rank;
            mean_x(i, j) += 1.0 / m;
            s1(i, j) += centered;
        }
    }

    Matrix correlation = Matrix::Zero(n, n);
    for (Index i = 0; i < n; ++i) {
        for (Index j = 0; j < n; ++j) {
            if (i == j) continue;
            const double xbar = mean_x(i, j);
            const double x_var = xbar * (1.0 - xbar) * m;
            if (x_var <= 0) continue;  // edge never or always sampled
            const double covariance = (1.0 - xbar) * s1(i, j) - xbar * (y_diff - s1(i, j));
            correlation(i, j) = covariance / std::sqrt(x_var * y_var);
        }
    }

    const double max_rank = rank_score.maxCoeff();
    out.f[3] = max_rank > 0 ? Matrix(rank_score / max_rank) : rank_score;

    double max_corr = correlation.maxCoeff();
    if (max_corr <= 0) {
        const double max_abs = correlation.cwiseAbs().maxCoeff();
        if (max_abs > 0) {
            std::cerr << "warning: " << inst.name
                      << ": no positively correlated edge; normalizing by |max|\n";
            max_corr = max_abs;
        } else {
            max_corr = 1.0;
        }
    }
    out.f[4] = correlation / max_corr;
}

EdgeFeatures assemble(const Instance& inst, const SampleSet& samples,
                      const std::optional<Route>& optimal_route) {
    EdgeFeatures features = graph_features(inst);
    statistical_features(inst, samples, features);
    if (optimal_route) {
        features.label = Eigen::MatrixXi::Constant(inst.n, inst.n, -1);
        features.label.diagonal().setZero();
        const auto& vertices = optimal_route->vertices;
        for (const Index v : vertices) {
            if (v < 0 || v >= inst.n) {
                throw InvalidArgumentError(inst.name + ": label route leaves the instance");
            }
        }
        for (std::size_t idx = 0; idx + 1 < vertices.size(); ++idx) {
            features.label(vertices[idx], vertices[idx + 1]) = 1;
        }
    }
    return features;
}

FeatureRows to_rows(const EdgeFeatures& features) {
    FeatureRows rows;
    const Index count = features.edge_count();
    rows.x.resize(count, kFeatureCount);
    rows.edges.reserve(static_cast<std::size_t>(count));
    if (features.labeled()) rows.label.resize(count);
    Index r = 0;
    for (Index i = 0; i < features.n; ++i) {
        for (Index j = 0; j < features.n; ++j) {
            if (i == j) continue;
            for (int k = 0; k < kFeatureCount; ++k) rows.x(r, k) = features.f[k](i, j);
            if (features.labeled()) rows.label(r) = features.label(i, j);
            rows.edges.emplace_back(i, j);
            ++r;
        }
    }
    return rows;
}

void append_feature_csv(const EdgeFeatures& features, std::ostream& out, bool header) {
    if (header) {
        out << "i,j,f1,f2,f3,f4,f5";
        if (features.labeled()) out << ",label";
        out << '\n';
    }
    const auto precision = out.precision(std::numeric_limits<double>::max_digits10);
    for (Index i = 0; i < features.n; ++i) {
        for (Index j = 0; j < features.n; ++j) {
            if (i == j) continue;
            out << i + 1 << ',' << j + 1;
            for (int k = 0; k < kFeatureCount; ++k) out << ',' << features.f[k](i, j);
            if (features.labeled()) out << ',' << features.label(i, j);
            out << '\n';
        }
    }
    out.precision(precision);
}

void write_feature_csv(const EdgeFeatures& features, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ParseError(path + ": cannot open for writing");
    append_feature_csv(features, out, true);
}

FeatureRows read_feature_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError(path + ": cannot open");
    std::string line;
    int lineno = 0;
    bool labeled = false;
    std::vector<std::array<double, kFeatureCount>> values;
    std::vector<int> labels;
    std::vector<std::pair<Index, Index>> edges;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        if (line.rfind("i,j,", 0) == 0) {  // header (possibly repeated when concatenated)
            labeled = line.find(",label") != std::string::npos;
            continue;
        }
        std::istringstream row(line);
        std::string field;
        auto next_field = [&](double& value) {
            if (!std::getline(row, field, ',')) {
                throw ParseError(path + ":" + std::to_string(lineno) + ": missing field");
            }
            char* rest = nullptr;
            value = std::strtod(field.c_str(), &rest);
            if (rest == field.c_str()) {
                throw ParseError(path + ":" + std::to_string(lineno) + ": non-numeric field '" +
                                 field + "'");
            }
        };
        double i, j;
        next_field(i);
        next_field(j);
        std::array<double, kFeatureCount> f{};
        for (auto& v : f) next_field(v);
        values.push_back(f);
        edges.emplace_back(static_cast<Index>(i) - 1, static_cast<Index>(j) - 1);
        if (labeled) {
            double l;
            next_field(l);
            labels.push_back(static_cast<int>(l));
        }
    }
    if (values.empty()) throw ParseError(path + ": no feature rows");

    FeatureRows rows;
    rows.x.resize(static_cast<Index>(values.size()), kFeatureCount);
    for (std::size_t r = 0; r < values.size(); ++r) {
        for (int k = 0; k < kFeatureCount; ++k) rows.x(static_cast<Index>(r), k) = values[r][static_cast<std::size_t>(k)];
    }
    if (!labels.empty()) {
        rows.label = Eigen::Map<const IntVector>(labels.data(), static_cast<Index>(labels.size()));
    }
    rows.edges = std::move(edges);
    return rows;
}

}  // namespace mlaco
