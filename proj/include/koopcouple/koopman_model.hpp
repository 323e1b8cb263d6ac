#pragma once

#include <Eigen/Dense>

#include "koopcouple/dictionary.hpp"

namespace koopcouple {

/// A dictionary together with K such that Psi(x_{t+1}) ~= K Psi(x_t).
struct KoopmanModel {
  Dictionary dict;
  Eigen::MatrixXd matrix;

  KoopmanModel(Dictionary d, Eigen::MatrixXd k);

  /// B K Psi(x): one-step prediction by plain matrix products.
  Eigen::VectorXd advance(const Eigen::VectorXd& x) const;
};

}  // namespace koopcouple
