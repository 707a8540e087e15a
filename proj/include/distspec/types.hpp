#pragma once
#include <Eigen/Dense>

namespace distspec {

// Points are matrix rows throughout: an N x d matrix holds N points in R^d.
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

}  // namespace distspec
