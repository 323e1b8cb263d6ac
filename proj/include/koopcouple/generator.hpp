#pragma once

#include <Eigen/Dense>

#include "koopcouple/dictionary.hpp"
#include "koopcouple/koopman_model.hpp"
#include "koopcouple/polynomial.hpp"

namespace koopcouple {

/// Matrix of the adjoint generator L^dagger = sum_i f_i d/dx_i on the
/// monomial coefficient space: L^dagger psi_n = sum_m G(m, n) psi_m, with
/// contributions leaving the dictionary dropped.
struct GeneratorMatrix {
  Dictionary dict;
  Eigen::MatrixXd entries;
};

GeneratorMatrix build_generator(const PolynomialVectorField& field, const Dictionary& dict);

/// Local Koopman matrix over one sampling interval.
///
/// The coefficient flow dc/dt = G c started from the unit vector at m gives
/// the expansion of psi_m(x, dt); those expansions form the rows of K, so
/// K = exp(G dt)^T and Psi(x(t + dt)) = K Psi(x(t)). The constant row is
/// exactly the unit vector.
KoopmanModel local_koopman(const GeneratorMatrix& gen, double dt);

/// Same matrix obtained by integrating every coefficient column with
/// `substeps` classical RK4 steps; used to cross-check local_koopman.
KoopmanModel local_koopman_rk4(const GeneratorMatrix& gen, double dt, int substeps = 100);

}  // namespace koopcouple
