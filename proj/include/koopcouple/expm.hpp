#pragma once

#include <Eigen/Dense>

namespace koopcouple {

/// Matrix exponential by scaling and squaring with diagonal Pade
/// approximants of degree 3, 5, 7, 9 or 13 (Higham 2005). Throws
/// std::invalid_argument for a non-square or non-finite input.
Eigen::MatrixXd expm(const Eigen::MatrixXd& a);

}  // namespace koopcouple
