#pragma once

#include <Eigen/Dense>

namespace mlaco {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using IntVector = Eigen::VectorXi;
using Index = Eigen::Index;

using Coords = Eigen::Matrix<double, Eigen::Dynamic, 2>;

}  // namespace mlaco
