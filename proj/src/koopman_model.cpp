#include "koopcouple/koopman_model.hpp"

#include <stdexcept>

namespace koopcouple {

KoopmanModel::KoopmanModel(Dictionary d, Eigen::MatrixXd k)
    : dict(std::move(d)), matrix(std::move(k)) {
  const auto n = static_cast<Eigen::Index>(dict.size());
  if (matrix.rows() != n || matrix.cols() != n)
    throw std::invalid_argument("Koopman matrix size does not match dictionary");
}

Eigen::VectorXd KoopmanModel::advance(const Eigen::VectorXd& x) const {
  const Eigen::VectorXd psi = dict.evaluate(x);
  Eigen::VectorXd y(dict.var_count());
  for (std::size_t i = 0; i < dict.var_count(); ++i)
    y[i] = matrix.row(dict.linear_index(i)).dot(psi);
  return y;
}

}  // namespace koopcouple
