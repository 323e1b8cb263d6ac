#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "koopcouple/dictionary.hpp"
#include "koopcouple/koopman_model.hpp"

namespace koopcouple {

struct SnapshotPair {
  Eigen::VectorXd x;
  Eigen::VectorXd y;  // successor of x
};

/// Consecutive states of a trajectory as (x_m, x_{m+1}) pairs.
std::vector<SnapshotPair> pairs_from_states(const std::vector<Eigen::VectorXd>& states);

struct BatchEdmdResult {
  KoopmanModel model;
  Eigen::Index rank = 0;        // numerical rank of the Gram matrix P
  bool rank_deficient = false;  // rank < N_dic, K came from the pseudoinverse
};

/// K = Q P^+ with Q = sum Psi(y) Psi(x)^T and P = sum Psi(x) Psi(x)^T.
/// Singular values below eps * N_dic * s_max are discarded.
BatchEdmdResult batch_edmd(const Dictionary& dict, const std::vector<SnapshotPair>& pairs);

/// Moore-Penrose pseudoinverse through an SVD with the cutoff above.
Eigen::MatrixXd pseudo_inverse(const Eigen::MatrixXd& a, Eigen::Index* rank = nullptr);

struct OnlineState {
  Eigen::MatrixXd k;
  Eigen::MatrixXd p_inv;  // inverse of the regularised Gram matrix
  std::size_t count = 0;
};

/// Recursive least-squares refinement of a Koopman matrix, one snapshot
/// pair at a time. Starting from (K0, sigma I), after pairs 1..m the state
/// equals K = (K0 / sigma + Q) (I / sigma + P)^{-1}.
class OnlineEdmd {
public:
  /// Zero seed when `seed` is empty. Throws for sigma <= 0 or a seed whose
  /// size does not match the dictionary.
  OnlineEdmd(Dictionary dict, std::optional<Eigen::MatrixXd> seed, double sigma);

  /// Absorbs one pair and returns the gain gamma in (0, 1].
  double update(const SnapshotPair& pair);
  double update(const Eigen::VectorXd& x, const Eigen::VectorXd& y);

  const OnlineState& state() const { return state_; }
  const Dictionary& dict() const { return dict_; }
  KoopmanModel model() const { return KoopmanModel(dict_, state_.k); }

private:
  Dictionary dict_;
  OnlineState state_;
  Eigen::VectorXd pinv_psi_;  // scratch
};

OnlineState online_init(const Eigen::MatrixXd& seed, double sigma);

}  // namespace koopcouple
