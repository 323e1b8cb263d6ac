#include "koopcouple/expm.hpp"

#include <array>
#include <cmath>
#include <span>
#include <stdexcept>

namespace koopcouple {

namespace {

using Eigen::MatrixXd;

// Largest 1-norms for which the degree-m approximant reaches unit roundoff.
constexpr std::array<double, 5> kTheta = {1.495585217958292e-2, 2.539398330063230e-1,
                                          9.504178996162932e-1, 2.097847961257068e0,
                                          5.371920351148152e0};

constexpr std::array<double, 4> kPade3 = {120.0, 60.0, 12.0, 1.0};
constexpr std::array<double, 6> kPade5 = {30240.0, 15120.0, 3360.0, 420.0, 30.0, 1.0};
constexpr std::array<double, 8> kPade7 = {17297280.0, 8648640.0, 1995840.0, 277200.0,
                                          25200.0,    1512.0,    56.0,      1.0};
constexpr std::array<double, 10> kPade9 = {17643225600.0, 8821612800.0, 2075673600.0,
                                           302702400.0,   30270240.0,   2162160.0,
                                           110880.0,      3960.0,       90.0,
                                           1.0};
constexpr std::array<double, 14> kPade13 = {
    64764752532480000.0, 32382376266240000.0, 7771770303897600.0, 1187353796428800.0,
    129060195264000.0,   10559470521600.0,    670442572800.0,     33522128640.0,
    1323241920.0,        40840800.0,          960960.0,           16380.0,
    182.0,               1.0};

MatrixXd solve_pade(const MatrixXd& u, const MatrixXd& v) {
  return (v - u).partialPivLu().solve(v + u);
}

// Degrees 3..9: U = A * sum_odd b_k A^{k-1}, V = sum_even b_k A^k.
MatrixXd pade_low(const MatrixXd& a, std::span<const double> b) {
  const auto n = a.rows();
  const MatrixXd ident = MatrixXd::Identity(n, n);
  const MatrixXd a2 = a * a;
  MatrixXd power = ident;  // A^{2j}
  MatrixXd u_inner = MatrixXd::Zero(n, n);
  MatrixXd v = MatrixXd::Zero(n, n);
  for (std::size_t k = 0; k + 1 < b.size(); k += 2) {
    v += b[k] * power;
    u_inner += b[k + 1] * power;
    power = power * a2;
  }
  return solve_pade(a * u_inner, v);
}

MatrixXd pade13(const MatrixXd& a) {
  const auto& b = kPade13;
  const auto n = a.rows();
  const MatrixXd ident = MatrixXd::Identity(n, n);
  const MatrixXd a2 = a * a;
  const MatrixXd a4 = a2 * a2;
  const MatrixXd a6 = a4 * a2;
  const MatrixXd u =
      a * (a6 * (b[13] * a6 + b[11] * a4 + b[9] * a2) + b[7] * a6 + b[5] * a4 + b[3] * a2 +
           b[1] * ident);
  const MatrixXd v = a6 * (b[12] * a6 + b[10] * a4 + b[8] * a2) + b[6] * a6 + b[4] * a4 +
                     b[2] * a2 + b[0] * ident;
  return solve_pade(u, v);
}

}  // namespace

MatrixXd expm(const MatrixXd& a) {
  if (a.rows() != a.cols()) throw std::invalid_argument("expm needs a square matrix");
  if (!a.allFinite()) throw std::invalid_argument("expm input is not finite");
  if (a.rows() == 0) return a;

  const double norm = a.cwiseAbs().colwise().sum().maxCoeff();
  if (norm <= kTheta[0]) return pade_low(a, kPade3);
  if (norm <= kTheta[1]) return pade_low(a, kPade5);
  if (norm <= kTheta[2]) return pade_low(a, kPade7);
  if (norm <= kTheta[3]) return pade_low(a, kPade9);

  const int s = std::max(0, static_cast<int>(std::ceil(std::log2(norm / kTheta[4]))));
  MatrixXd r = pade13(a / std::ldexp(1.0, s));
  for (int k = 0; k < s; ++k) r = r * r;
  return r;
}

}  // namespace koopcouple
