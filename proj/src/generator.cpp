#include "koopcouple/generator.hpp"

#include <cmath>
#include <stdexcept>

#include "koopcouple/expm.hpp"

namespace koopcouple {

GeneratorMatrix build_generator(const PolynomialVectorField& field, const Dictionary& dict) {
  if (field.var_count() != dict.var_count())
    throw std::invalid_argument("vector field and dictionary differ in var_count");

  const auto n_dic = static_cast<Eigen::Index>(dict.size());
  Eigen::MatrixXd g = Eigen::MatrixXd::Zero(n_dic, n_dic);
  for (std::size_t src = 0; src < dict.size(); ++src) {
    const MultiIndex& n = dict.entry(src);
    for (std::size_t i = 0; i < field.var_count(); ++i) {
      if (n[i] == 0) continue;
      // d/dx_i x^n = n_i x^{n - e_i}, then multiply by each term of f_i.
      MultiIndex lowered = n;
      lowered[i] -= 1;
      for (const Term& t : field.component(i)) {
        auto dst = dict.index_of(lowered + t.exponents);
        if (!dst) continue;
        g(static_cast<Eigen::Index>(*dst), static_cast<Eigen::Index>(src)) +=
            static_cast<double>(n[i]) * t.coefficient;
      }
    }
  }
  return GeneratorMatrix{dict, std::move(g)};
}

namespace {

void check_dt(double dt) {
  if (!std::isfinite(dt) || dt < 0.0)
    throw std::invalid_argument("time step must be finite and non-negative");
}

KoopmanModel finish(const Dictionary& dict, Eigen::MatrixXd flow) {
  // G has a zero constant column, so the constant coefficient column never moves.
  flow.col(0).setZero();
  flow(0, 0) = 1.0;
  return KoopmanModel(dict, flow.transpose());
}

}  // namespace

KoopmanModel local_koopman(const GeneratorMatrix& gen, double dt) {
  check_dt(dt);
  return finish(gen.dict, expm(gen.entries * dt));
}

KoopmanModel local_koopman_rk4(const GeneratorMatrix& gen, double dt, int substeps) {
  check_dt(dt);
  if (substeps < 1) throw std::invalid_argument("substeps must be positive");
  const auto n = gen.entries.rows();
  const double h = dt / substeps;
  const Eigen::MatrixXd& g = gen.entries;
  Eigen::MatrixXd c = Eigen::MatrixXd::Identity(n, n);
  for (int s = 0; s < substeps; ++s) {
    const Eigen::MatrixXd k1 = g * c;
    const Eigen::MatrixXd k2 = g * (c + 0.5 * h * k1);
    const Eigen::MatrixXd k3 = g * (c + 0.5 * h * k2);
    const Eigen::MatrixXd k4 = g * (c + h * k3);
    c += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  return finish(gen.dict, std::move(c));
}

}  // namespace koopcouple
