#pragma once

#include <random>

#include <Eigen/Dense>

namespace testsupport {

inline Eigen::MatrixXd random_matrix(std::mt19937_64& rng, Eigen::Index rows, Eigen::Index cols,
                                     double scale = 1.0) {
  std::uniform_real_distribution<double> u(-scale, scale);
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = u(rng);
  return m;
}

inline Eigen::VectorXd random_vector(std::mt19937_64& rng, Eigen::Index n, double scale = 1.0) {
  return random_matrix(rng, n, 1, scale).col(0);
}

inline double rel_fro(const Eigen::MatrixXd& a, const Eigen::MatrixXd& ref) {
  return (a - ref).norm() / ref.norm();
}

/// Real matrix S diag-block(mu) S^{-1} with prescribed eigenvalues: `real`
/// real ones plus `pairs` complex-conjugate pairs, all with |mu| <= max_abs.
inline Eigen::MatrixXd random_diagonalizable(std::mt19937_64& rng, int real, int pairs,
                                             double max_abs) {
  const int n = real + 2 * pairs;
  std::uniform_real_distribution<double> r(0.05, max_abs), ang(0.1, 3.0), sgn(-1.0, 1.0);
  Eigen::MatrixXd block = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < real; ++i) block(i, i) = (sgn(rng) < 0 ? -1.0 : 1.0) * r(rng);
  for (int p = 0; p < pairs; ++p) {
    const int k = real + 2 * p;
    const double rad = r(rng), th = ang(rng);
    block(k, k) = rad * std::cos(th);
    block(k, k + 1) = -rad * std::sin(th);
    block(k + 1, k) = rad * std::sin(th);
    block(k + 1, k + 1) = rad * std::cos(th);
  }
  Eigen::MatrixXd s = random_matrix(rng, n, n) + 2.0 * Eigen::MatrixXd::Identity(n, n);
  return s * block * s.inverse();
}

}  // namespace testsupport
