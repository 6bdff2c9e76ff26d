#pragma once

#include <Eigen/Dense>

namespace rsmm {

// exp(A) by scaling and squaring with the diagonal [6/6] Pade approximant.
// The scaling is chosen from the 1-norm so that ||A / 2^s||_1 <= 1/2 and the
// Pade truncation bound is below tol. Throws std::overflow_error when the
// scaling or the result is not finite.
Eigen::MatrixXd matrix_exponential(const Eigen::MatrixXd& a, double tol = 1e-12);

}  // namespace rsmm
