#include "mlaco/classifier.hpp"

#include <cmath>
#include <fstream>
#include <limits>

#include <json.hpp>

#include "mlaco/error.hpp"

namespace mlaco {

namespace {

const double kLn2 = std::log(2.0);

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

Vector point_weights(const IntVector& labels, double reg_pos, double reg_neg) {
    Vector r(labels.size());
    for (Index i = 0; i < labels.size(); ++i) r(i) = labels(i) > 0 ? reg_pos : reg_neg;
    return r;
}

}  // namespace

std::string to_string(ModelKind kind) { return kind == ModelKind::Svm ? "svm" : "logreg"; }

ModelKind model_kind_from_string(const std::string& s) {
    if (s == "svm") return ModelKind::Svm;
    if (s == "logreg" || s == "lr") return ModelKind::LogReg;
    throw InvalidArgumentError("unsupported model kind '" + s + "' (supported: svm, logreg)");
}

double training_loss(ModelKind kind, const Vector& w, double b, const Matrix& x,
                     const IntVector& labels, double reg_pos, double reg_neg) {
    const Vector r = point_weights(labels, reg_pos, reg_neg);
    const Vector z = (x * w).array() + b;
    double loss = 0.5 * w.squaredNorm();
    for (Index i = 0; i < labels.size(); ++i) {
        const double lz = labels(i) * z(i);
        if (kind == ModelKind::Svm) {
            loss += r(i) * std::max(0.0, 1.0 - lz);
        } else {
            // log2(1 + e^-lz), evaluated stably for large |lz|.
            const double t = lz > 0 ? std::log1p(std::exp(-lz)) : -lz + std::log1p(std::exp(lz));
            loss += r(i) * t / kLn2;
        }
    }
    return loss;
}

void training_gradient(ModelKind kind, const Vector& w, double b, const Matrix& x,
                       const IntVector& labels, double reg_pos, double reg_neg, Vector& grad_w,
                       double& grad_b) {
    const Vector r = point_weights(labels, reg_pos, reg_neg);
    const Vector z = (x * w).array() + b;
    Vector dz(labels.size());
    for (Index i = 0; i < labels.size(); ++i) {
        const double l = labels(i);
        if (kind == ModelKind::Svm) {
            dz(i) = l * z(i) < 1.0 ? -r(i) * l : 0.0;
        } else {
            dz(i) = -r(i) * l * sigmoid(-l * z(i)) / kLn2;
        }
    }
    grad_w = w + x.transpose() * dz;
    grad_b = dz.sum();
}

LinearModel train(const Matrix& x, const IntVector& labels, ModelKind kind,
                  const TrainOptions& options) {
    if (x.rows() != labels.size() || x.rows() == 0) {
        throw InvalidArgumentError("train: feature rows and labels must align");
    }
    if (x.cols() != kFeatureCount) {
        throw InvalidArgumentError("train: expected " + std::to_string(kFeatureCount) +
                                   " features per row, got " + std::to_string(x.cols()));
    }
    const Index positives = (labels.array() > 0).count();
    const Index negatives = labels.size() - positives;
    if (positives == 0 || negatives == 0) {
        throw DegenerateLabelsError("training data contains a single class");
    }

    const double reg_neg = options.reg_neg;
    const double reg_pos = options.reg_pos > 0
                               ? options.reg_pos
                               : reg_neg * static_cast<double>(negatives) / positives;
    const int epochs = options.epochs > 0 ? options.epochs
                                          : (kind == ModelKind::Svm ? 20000 : 4000);
    // Pegasos-style 1/(lambda t) schedule on the per-point-normalized
    // objective collapses to a plain 1/t step on the raw objective.
    const double lr_step0 = 1.0 / (reg_pos * positives + reg_neg * negatives);

    Vector w = Vector::Zero(kFeatureCount);
    double b = 0;
    Vector best_w = w;
    double best_b = b;
    double best_loss = training_loss(kind, w, b, x, labels, reg_pos, reg_neg);

    Vector grad_w(kFeatureCount);
    double grad_b = 0;
    for (int t = 1; t <= epochs; ++t) {
        training_gradient(kind, w, b, x, labels, reg_pos, reg_neg, grad_w, grad_b);
        double step;
        if (kind == ModelKind::Svm) {
            step = options.step_scale / t;
        } else {
            step = options.step_scale * lr_step0 *
                   (t <= options.lr_warm ? 1.0 : static_cast<double>(options.lr_warm) / t);
        }
        w -= step * grad_w;
        b -= step * grad_b;
        const double loss = training_loss(kind, w, b, x, labels, reg_pos, reg_neg);
        if (!std::isfinite(loss)) {
            throw DivergenceError("training loss became non-finite at step size " +
                                  std::to_string(step));
        }
        if (loss < best_loss) {
            best_loss = loss;
            best_w = w;
            best_b = b;
        }
    }

    LinearModel model;
    model.weights = best_w;
    model.bias = best_b;
    model.kind = kind;
    model.reg_pos = reg_pos;
    model.reg_neg = reg_neg;
    model.meta = {epochs, options.seed, best_loss};
    return model;
}

Vector decision_values(const LinearModel& model, const Matrix& x) {
    if (x.cols() != kFeatureCount) {
        throw InvalidArgumentError("decision_values: expected " + std::to_string(kFeatureCount) +
                                   "-dimensional features");
    }
    return (x * model.weights).array() + model.bias;
}

Prediction predict(const LinearModel& model, const EdgeFeatures& features) {
    Prediction prediction;
    prediction.p = Matrix::Zero(features.n, features.n);
    for (Index i = 0; i < features.n; ++i) {
        for (Index j = 0; j < features.n; ++j) {
            if (i == j) continue;
            double z = model.bias;
            for (int k = 0; k < kFeatureCount; ++k) z += model.weights(k) * features.f[k](i, j);
            prediction.p(i, j) = sigmoid(z);
        }
    }
    prediction.model_id = to_string(model.kind) + "-e" + std::to_string(model.meta.epochs) +
                          "-s" + std::to_string(model.meta.seed);
    return prediction;
}

Metrics evaluate(const LinearModel& model, const Matrix& x, const IntVector& labels) {
    const Vector z = decision_values(model, x);
    long tp = 0, tn = 0, fp = 0, fn = 0;
    for (Index i = 0; i < labels.size(); ++i) {
        const bool predicted_positive = z(i) >= 0;  // p >= 0.5
        if (labels(i) > 0) {
            (predicted_positive ? tp : fn) += 1;
        } else {
            (predicted_positive ? fp : tn) += 1;
        }
    }
    Metrics metrics;
    const double total = static_cast<double>(labels.size());
    metrics.accuracy = (tp + tn) / total;
    const double tpr = tp + fn > 0 ? static_cast<double>(tp) / (tp + fn) : 0;
    const double tnr = tn + fp > 0 ? static_cast<double>(tn) / (tn + fp) : 0;
    metrics.balanced_accuracy = 0.5 * (tpr + tnr);
    metrics.positive_recall = tpr;
    return metrics;
}

std::string to_json_string(const LinearModel& model) {
    nlohmann::json j;
    j["kind"] = to_string(model.kind);
    j["weights"] = std::vector<double>(model.weights.data(), model.weights.data() + kFeatureCount);
    j["bias"] = model.bias;
    j["reg_pos"] = model.reg_pos;
    j["reg_neg"] = model.reg_neg;
    j["training_meta"] = {{"epochs", model.meta.epochs},
                          {"seed", model.meta.seed},
                          {"final_loss", model.meta.final_loss}};
    return j.dump(2) + "\n";
}

void save_model(const LinearModel& model, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ParseError(path + ": cannot open for writing");
    out << to_json_string(model);
}

LinearModel load_model(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError(path + ": cannot open");
    nlohmann::json j;
    try {
        in >> j;
        LinearModel model;
        model.kind = model_kind_from_string(j.at("kind").get<std::string>());
        const auto weights = j.at("weights").get<std::vector<double>>();
        if (weights.size() != kFeatureCount) {
            throw ParseError(path + ": field 'weights' must list " +
                             std::to_string(kFeatureCount) + " values");
        }
        for (int k = 0; k < kFeatureCount; ++k) model.weights(k) = weights[static_cast<std::size_t>(k)];
        model.bias = j.at("bias").get<double>();
        model.reg_pos = j.at("reg_pos").get<double>();
        model.reg_neg = j.at("reg_neg").get<double>();
        const auto& meta = j.at("training_meta");
        model.meta.epochs = meta.at("epochs").get<int>();
        model.meta.seed = meta.at("seed").get<std::uint64_t>();
        model.meta.final_loss = meta.at("final_loss").get<double>();
        return model;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(path + ": " + e.what());
    }
}

}  // namespace mlaco
