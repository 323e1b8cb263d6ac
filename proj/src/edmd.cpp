#include "koopcouple/edmd.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace koopcouple {

std::vector<SnapshotPair> pairs_from_states(const std::vector<Eigen::VectorXd>& states) {
  std::vector<SnapshotPair> pairs;
  if (states.size() < 2) return pairs;
  pairs.reserve(states.size() - 1);
  for (std::size_t m = 0; m + 1 < states.size(); ++m) pairs.push_back({states[m], states[m + 1]});
  return pairs;
}

Eigen::MatrixXd pseudo_inverse(const Eigen::MatrixXd& a, Eigen::Index* rank) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Eigen::VectorXd& s = svd.singularValues();
  const double smax = s.size() > 0 ? s[0] : 0.0;
  const double cutoff = std::numeric_limits<double>::epsilon() *
                        static_cast<double>(std::max(a.rows(), a.cols())) * smax;
  Eigen::VectorXd s_inv = Eigen::VectorXd::Zero(s.size());
  Eigen::Index r = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    if (s[i] > cutoff) {
      s_inv[i] = 1.0 / s[i];
      ++r;
    }
  }
  if (rank) *rank = r;
  return svd.matrixV() * s_inv.asDiagonal() * svd.matrixU().transpose();
}

BatchEdmdResult batch_edmd(const Dictionary& dict, const std::vector<SnapshotPair>& pairs) {
  if (pairs.empty()) throw std::invalid_argument("batch EDMD needs at least one snapshot pair");
  const auto n = static_cast<Eigen::Index>(dict.size());
  const auto m = static_cast<Eigen::Index>(pairs.size());
  Eigen::MatrixXd psi_x(n, m), psi_y(n, m);
  for (Eigen::Index c = 0; c < m; ++c) {
    psi_x.col(c) = dict.evaluate(pairs[static_cast<std::size_t>(c)].x);
    psi_y.col(c) = dict.evaluate(pairs[static_cast<std::size_t>(c)].y);
  }
  const Eigen::MatrixXd q = psi_y * psi_x.transpose();
  Eigen::MatrixXd p(n, n);
  p.setZero();
  p.selfadjointView<Eigen::Lower>().rankUpdate(psi_x);
  p = p.selfadjointView<Eigen::Lower>();

  Eigen::Index rank = 0;
  const Eigen::MatrixXd p_pinv = pseudo_inverse(p, &rank);
  return BatchEdmdResult{KoopmanModel(dict, q * p_pinv), rank, rank < n};
}

OnlineState online_init(const Eigen::MatrixXd& seed, double sigma) {
  if (!(sigma > 0.0) || !std::isfinite(sigma))
    throw std::invalid_argument("sigma must be positive and finite");
  if (seed.rows() != seed.cols()) throw std::invalid_argument("seed matrix must be square");
  const auto n = seed.rows();
  return OnlineState{seed, sigma * Eigen::MatrixXd::Identity(n, n), 0};
}

OnlineEdmd::OnlineEdmd(Dictionary dict, std::optional<Eigen::MatrixXd> seed, double sigma)
    : dict_(std::move(dict)) {
  const auto n = static_cast<Eigen::Index>(dict_.size());
  Eigen::MatrixXd k = seed ? std::move(*seed) : Eigen::MatrixXd::Zero(n, n);
  if (k.rows() != n || k.cols() != n)
    throw std::invalid_argument("seed matrix size does not match dictionary");
  state_ = online_init(k, sigma);
  pinv_psi_.resize(n);
}

double OnlineEdmd::update(const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
  const Eigen::VectorXd psi_x = dict_.evaluate(x);
  const Eigen::VectorXd psi_y = dict_.evaluate(y);

  pinv_psi_.noalias() = state_.p_inv * psi_x;
  const double gamma = 1.0 / (1.0 + psi_x.dot(pinv_psi_));

  // Pinv is symmetric, so psi_x^T Pinv = (Pinv psi_x)^T.
  Eigen::VectorXd innovation = psi_y;
  innovation.noalias() -= state_.k * psi_x;
  state_.k.noalias() += (gamma * innovation) * pinv_psi_.transpose();
  state_.p_inv.noalias() -= (gamma * pinv_psi_) * pinv_psi_.transpose();
  state_.p_inv = 0.5 * (state_.p_inv + state_.p_inv.transpose()).eval();
  ++state_.count;
  return gamma;
}

double OnlineEdmd::update(const SnapshotPair& pair) { return update(pair.x, pair.y); }

}  // namespace koopcouple
