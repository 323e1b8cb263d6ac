#pragma once

#include <complex>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "koopcouple/koopman_model.hpp"

namespace koopcouple {

/// Raised when eigen-triple prediction is requested from a decomposition
/// whose eigenvectors do not form a usable basis.
class DefectiveDecomposition : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Eigenvalues mu_l, right eigenvectors u_l (unit norm) and left
/// eigenvectors w_l scaled so that w_l^T u_k = delta_lk. Eigenfunctions are
/// phi_l(x) = w_l^T Psi(x) and modes are v_l = B u_l.
struct SpectralDecomposition {
  KoopmanModel model;
  Eigen::VectorXcd eigenvalues;  // descending |mu|, then descending Re, Im
  Eigen::MatrixXcd right;
  Eigen::MatrixXcd left;
  Eigen::MatrixXd projector;  // B, D x N_dic
  Eigen::MatrixXcd modes;     // B U, column l is v_l
  double biorthogonality_residual = 0.0;
  double eigen_residual = 0.0;
  double reconstruction_residual = 0.0;  // max |U diag(mu) W^T - K|, scaled
  bool defective = false;

  Eigen::VectorXcd eigenfunctions(const Eigen::VectorXd& x) const;

  /// D x N_dic operator sum_l v_l mu_l^n w_l^T (complex in general).
  Eigen::MatrixXcd propagator(int n) const;
};

/// Residual above which a decomposition is flagged defective.
inline constexpr double kDefectiveTolerance = 1e-6;
/// Largest imaginary residue accepted in a real-valued prediction.
inline constexpr double kImaginaryTolerance = 1e-8;

SpectralDecomposition decompose(const KoopmanModel& model);

/// sum_l v_l mu_l phi_l(x). Throws DefectiveDecomposition when flagged, and
/// std::runtime_error if the imaginary residue exceeds kImaginaryTolerance.
Eigen::VectorXd predict_one(const SpectralDecomposition& dec, const Eigen::VectorXd& x);

/// sum_l v_l mu_l^n phi_l(x0), n >= 1.
Eigen::VectorXd predict_n(const SpectralDecomposition& dec, const Eigen::VectorXd& x0, int n);

/// B K^n Psi(x0) by repeated multiplication; the fallback route.
Eigen::VectorXd predict_n_power(const KoopmanModel& model, const Eigen::VectorXd& x0, int n);

/// ||y_pred - y_true|| / ||y_true||; throws std::invalid_argument for a
/// zero-norm truth or mismatched lengths.
double relative_l2(const Eigen::VectorXd& y_true, const Eigen::VectorXd& y_pred);

/// Real n-step prediction operators T_n (D x N_dic) with y_n = T_n Psi(x0).
///
/// Uses the eigen-triples when the decomposition is usable and falls back to
/// B K^n otherwise. Operators are built once per n and cached.
class Predictor {
public:
  explicit Predictor(const KoopmanModel& model);

  bool spectral() const { return !dec_.defective; }
  const SpectralDecomposition& decomposition() const { return dec_; }

  /// Largest |Im T_n| seen so far, relative to max(1, max |Re T_n|).
  double max_imaginary_residue() const { return max_imag_; }

  const Eigen::MatrixXd& op(int n);
  Eigen::VectorXd predict(const Eigen::VectorXd& x0, int n);

private:
  SpectralDecomposition dec_;
  std::vector<Eigen::MatrixXd> ops_;  // ops_[n-1] = T_n
  Eigen::MatrixXd power_;             // B K^n for the fallback
  double max_imag_ = 0.0;
};

}  // namespace koopcouple
