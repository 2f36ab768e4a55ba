#pragma once

#include <Eigen/Core>

namespace threatgraph {

struct SymmetricEigen {
  Eigen::VectorXd values;   // ascending
  Eigen::MatrixXd vectors;  // column i pairs with values(i)
  int sweeps = 0;
};

/// Cyclic Jacobi eigensolver for small dense symmetric matrices. Rotations
/// sweep until the off-diagonal Frobenius norm drops below `tolerance`.
/// Only the upper triangle of `matrix` is read.
SymmetricEigen jacobi_eigen(const Eigen::MatrixXd& matrix, double tolerance = 1e-10, int max_sweeps = 100);

}  // namespace threatgraph
