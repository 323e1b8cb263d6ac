#include "koopcouple/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace koopcouple {

namespace {

using cd = std::complex<double>;

bool spectral_order(const cd& a, const cd& b) {
  const double aa = std::abs(a), ab = std::abs(b);
  if (aa != ab) return aa > ab;
  if (a.real() != b.real()) return a.real() > b.real();
  return a.imag() > b.imag();
}

cd ipow(cd base, int n) {
  cd result(1.0, 0.0);
  while (n > 0) {
    if (n & 1) result *= base;
    base *= base;
    n >>= 1;
  }
  return result;
}

}  // namespace

SpectralDecomposition decompose(const KoopmanModel& model) {
  const Eigen::MatrixXd& k = model.matrix;
  if (!k.allFinite()) throw std::invalid_argument("Koopman matrix is not finite");
  const auto n = k.rows();

  Eigen::EigenSolver<Eigen::MatrixXd> solver(k, true);
  if (solver.info() != Eigen::Success) throw std::runtime_error("eigendecomposition failed");

  const Eigen::VectorXcd raw_values = solver.eigenvalues();
  const Eigen::MatrixXcd raw_vectors = solver.eigenvectors();
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
    return spectral_order(raw_values[a], raw_values[b]);
  });

  SpectralDecomposition dec{model, Eigen::VectorXcd(n), Eigen::MatrixXcd(n, n),
                            Eigen::MatrixXcd(n, n), model.dict.state_projector(),
                            Eigen::MatrixXcd()};
  for (Eigen::Index l = 0; l < n; ++l) {
    const auto src = order[static_cast<std::size_t>(l)];
    dec.eigenvalues[l] = raw_values[src];
    Eigen::VectorXcd u = raw_vectors.col(src);
    const double norm = u.norm();
    if (norm > 0.0) u /= norm;
    dec.right.col(l) = u;
  }

  // Rows of U^{-1} are the left eigenvectors, already scaled so W^T U = I.
  Eigen::PartialPivLU<Eigen::MatrixXcd> lu(dec.right);
  dec.left = lu.solve(Eigen::MatrixXcd::Identity(n, n)).transpose();
  dec.modes = dec.projector.cast<cd>() * dec.right;

  const Eigen::MatrixXcd gram = dec.left.transpose() * dec.right;
  dec.biorthogonality_residual =
      (gram - Eigen::MatrixXcd::Identity(n, n)).cwiseAbs().maxCoeff();
  const double scale = std::max(1.0, k.cwiseAbs().maxCoeff());
  dec.eigen_residual =
      (k.cast<cd>() * dec.right - dec.right * dec.eigenvalues.asDiagonal()).cwiseAbs().maxCoeff() /
      scale;
  // Nearly parallel eigenvectors pass both checks above while U^{-1} is
  // dominated by rounding; rebuilding K from the triples exposes that.
  dec.reconstruction_residual =
      (dec.right * dec.eigenvalues.asDiagonal() * dec.left.transpose() - k.cast<cd>())
          .cwiseAbs()
          .maxCoeff() /
      scale;
  dec.defective = !std::isfinite(dec.biorthogonality_residual) ||
                  !std::isfinite(dec.reconstruction_residual) ||
                  dec.biorthogonality_residual > kDefectiveTolerance ||
                  dec.eigen_residual > kDefectiveTolerance ||
                  dec.reconstruction_residual > kDefectiveTolerance;
  return dec;
}

Eigen::VectorXcd SpectralDecomposition::eigenfunctions(const Eigen::VectorXd& x) const {
  return left.transpose() * model.dict.evaluate(x).cast<cd>();
}

Eigen::MatrixXcd SpectralDecomposition::propagator(int n) const {
  Eigen::VectorXcd mu_n(eigenvalues.size());
  for (Eigen::Index l = 0; l < eigenvalues.size(); ++l) mu_n[l] = ipow(eigenvalues[l], n);
  return modes * mu_n.asDiagonal() * left.transpose();
}

namespace {

Eigen::VectorXd checked_real(const Eigen::VectorXcd& y) {
  const Eigen::VectorXd re = y.real();
  const double residue = y.imag().cwiseAbs().maxCoeff();
  if (residue > kImaginaryTolerance * std::max(1.0, re.cwiseAbs().maxCoeff()))
    throw std::runtime_error("imaginary residue " + std::to_string(residue) +
                             " in spectral prediction");
  return re;
}

}  // namespace

Eigen::VectorXd predict_n(const SpectralDecomposition& dec, const Eigen::VectorXd& x0, int n) {
  if (n < 1) throw std::invalid_argument("prediction horizon must be >= 1");
  if (dec.defective)
    throw DefectiveDecomposition("Koopman matrix is not diagonalizable to tolerance; use the "
                                 "matrix-power prediction");
  const Eigen::VectorXcd phi = dec.eigenfunctions(x0);
  Eigen::VectorXcd weighted(phi.size());
  for (Eigen::Index l = 0; l < phi.size(); ++l)
    weighted[l] = ipow(dec.eigenvalues[l], n) * phi[l];
  return checked_real(dec.modes * weighted);
}

Eigen::VectorXd predict_one(const SpectralDecomposition& dec, const Eigen::VectorXd& x) {
  return predict_n(dec, x, 1);
}

Eigen::VectorXd predict_n_power(const KoopmanModel& model, const Eigen::VectorXd& x0, int n) {
  if (n < 0) throw std::invalid_argument("prediction horizon must be non-negative");
  Eigen::VectorXd psi = model.dict.evaluate(x0);
  for (int s = 0; s < n; ++s) psi = model.matrix * psi;
  return model.dict.state_projector() * psi;
}

double relative_l2(const Eigen::VectorXd& y_true, const Eigen::VectorXd& y_pred) {
  if (y_true.size() != y_pred.size()) throw std::invalid_argument("state length mismatch");
  const double denom = y_true.norm();
  if (!(denom > 0.0)) throw std::invalid_argument("relative error undefined for zero truth");
  return (y_pred - y_true).norm() / denom;
}

Predictor::Predictor(const KoopmanModel& model) : dec_(decompose(model)) {
  power_ = dec_.projector;
}

const Eigen::MatrixXd& Predictor::op(int n) {
  if (n < 1) throw std::invalid_argument("prediction horizon must be >= 1");
  while (static_cast<int>(ops_.size()) < n) {
    const int next = static_cast<int>(ops_.size()) + 1;
    if (spectral()) {
      const Eigen::MatrixXcd t = dec_.propagator(next);
      const double re = t.real().cwiseAbs().maxCoeff();
      max_imag_ = std::max(max_imag_, t.imag().cwiseAbs().maxCoeff() / std::max(1.0, re));
      ops_.push_back(t.real());
    } else {
      power_ = power_ * dec_.model.matrix;
      ops_.push_back(power_);
    }
  }
  return ops_[static_cast<std::size_t>(n - 1)];
}

Eigen::VectorXd Predictor::predict(const Eigen::VectorXd& x0, int n) {
  return op(n) * dec_.model.dict.evaluate(x0);
}

}  // namespace koopcouple
