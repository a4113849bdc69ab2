#pragma once

#include <cstdint>
#include <string>

#include "mlaco/features.hpp"
#include "mlaco/types.hpp"

namespace mlaco {

enum class ModelKind { Svm, LogReg };

std::string to_string(ModelKind kind);
ModelKind model_kind_from_string(const std::string& s);

struct TrainingMeta {
    int epochs = 0;
    std::uint64_t seed = 0;
    double final_loss = 0;
};

// A five-feature linear decision boundary with per-class regularization
// weights. Immutable once trained.
struct LinearModel {
    Eigen::Matrix<double, kFeatureCount, 1> weights;
    double bias = 0;
    ModelKind kind = ModelKind::Svm;
    double reg_pos = 1;
    double reg_neg = 1;
    TrainingMeta meta;
};

struct TrainOptions {
    int epochs = 0;        // 0: 20000 for svm, 4000 for logreg
    std::uint64_t seed = 0;
    double reg_pos = 0;    // 0: negative count / positive count
    double reg_neg = 1;
    double step_scale = 1; // multiplies the schedule step
    int lr_warm = 100;     // constant steps before 1/t decay (logreg)
};

// Weighted training loss: squared-norm regularizer on the weights plus
// per-point hinge (svm) or base-2 logistic loss (logreg), with positives
// weighted reg_pos and negatives reg_neg.
double training_loss(ModelKind kind, const Vector& w, double b, const Matrix& x,
                     const IntVector& labels, double reg_pos, double reg_neg);

// (Sub)gradient of training_loss at (w, b).
void training_gradient(ModelKind kind, const Vector& w, double b, const Matrix& x,
                       const IntVector& labels, double reg_pos, double reg_neg, Vector& grad_w,
                       double& grad_b);

// Deterministic full-batch descent on the exact weighted objective;
// returns the iterate with the lowest recorded full-data loss. Throws
// DegenerateLabelsError on single-class data and DivergenceError when
// the loss leaves the finite range.
LinearModel train(const Matrix& x, const IntVector& labels, ModelKind kind,
                  const TrainOptions& options = {});

// Per-edge membership probabilities from the logistic squashing of the
// decision value.
struct Prediction {
    Matrix p;  // n x n, strictly inside (0,1) off the diagonal
    std::string model_id;
};

Vector decision_values(const LinearModel& model, const Matrix& x);
Prediction predict(const LinearModel& model, const EdgeFeatures& features);

struct Metrics {
    double accuracy = 0;
    double balanced_accuracy = 0;
    double positive_recall = 0;
};

// Confusion-matrix metrics at probability threshold 0.5.
Metrics evaluate(const LinearModel& model, const Matrix& x, const IntVector& labels);

std::string to_json_string(const LinearModel& model);
void save_model(const LinearModel& model, const std::string& path);
LinearModel load_model(const std::string& path);

}  // namespace mlaco
