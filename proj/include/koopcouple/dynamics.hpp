#pragma once

#include <cstdint>
#include <iosfwd>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "koopcouple/dictionary.hpp"
#include "koopcouple/polynomial.hpp"

namespace koopcouple {

/// Coupling term c_ij g_ij(x_i, x_j) added to subsystem i.
///
/// `field` has D_i + D_j variables (x_i first, then x_j) and D_i components.
struct Coupling {
  std::size_t target;  // i
  std::size_t source;  // j
  double strength;     // c_ij
  PolynomialVectorField field;
};

/// Diffusive coupling c (x_{j,var} - x_{i,var}) on coordinate `coord` of subsystem i.
Coupling diffusive_coupling(const VariableLayout& layout, std::size_t target, std::size_t source,
                            double strength, std::size_t var, std::size_t coord);

class CoupledSystem {
public:
  CoupledSystem(std::vector<PolynomialVectorField> subsystems, std::vector<Coupling> couplings);

  const VariableLayout& layout() const { return layout_; }
  const std::vector<PolynomialVectorField>& subsystems() const { return subsystems_; }
  const std::vector<Coupling>& couplings() const { return couplings_; }

  /// Polynomial right-hand side of the whole system over all D variables.
  const PolynomialVectorField& full_field() const { return full_; }

private:
  std::vector<PolynomialVectorField> subsystems_;
  std::vector<Coupling> couplings_;
  VariableLayout layout_;
  PolynomialVectorField full_;
};

class BlowUpError : public std::runtime_error {
public:
  BlowUpError(std::size_t step, const std::string& what)
      : std::runtime_error(what), step_(step) {}
  std::size_t step() const { return step_; }

private:
  std::size_t step_;
};

/// One classical fourth-order Runge-Kutta step.
Eigen::VectorXd rk4_step(const PolynomialVectorField& field, const Eigen::VectorXd& x, double dt);

struct Trajectory {
  std::vector<Eigen::VectorXd> states;
  double dt = 0.0;
  std::uint64_t seed = 0;

  /// Drops the first `count` states.
  Trajectory tail(std::size_t count) const;
};

/// states[0] = x0, states[k+1] = rk4_step(states[k]); throws BlowUpError
/// carrying the step index on non-finite values.
Trajectory simulate(const PolynomialVectorField& field, const Eigen::VectorXd& x0,
                    std::size_t steps, double dt);
Trajectory simulate(const CoupledSystem& system, const Eigen::VectorXd& x0, std::size_t steps,
                    double dt);

/// Separate random streams derived from one experiment seed.
enum class SeedPurpose : std::uint32_t { TrainInit = 1, TestInit = 2, TestTrajectory = 3 };

/// mt19937_64 seeded through std::seed_seq from (base, purpose, index); both
/// are fully specified by the standard, so draws match across platforms.
std::mt19937_64 make_rng(std::uint64_t base, SeedPurpose purpose, std::uint64_t index = 0);

/// Uniform double in [0, 1) built from the top 53 bits of one draw.
double uniform01(std::mt19937_64& rng);

using Range = std::pair<double, double>;

/// Independent uniform draw per coordinate; throws for lo > hi.
Eigen::VectorXd sample_initial(const std::vector<Range>& ranges, std::mt19937_64& rng);
Eigen::VectorXd sample_initial(const std::vector<Range>& ranges, std::uint64_t seed);

/// x + eps with eps_i uniform in (-radius, radius).
Eigen::VectorXd perturb_initial(const Eigen::VectorXd& x, double radius, std::mt19937_64& rng);
Eigen::VectorXd perturb_initial(const Eigen::VectorXd& x, double radius, std::uint64_t seed);

/// Trajectory CSV: header `t,x_1_1,x_1_2,...`, 17 significant digits.
void write_trajectory_csv(std::ostream& out, const Trajectory& traj, const VariableLayout& layout);
void write_trajectory_csv(const std::string& path, const Trajectory& traj,
                          const VariableLayout& layout);
Trajectory read_trajectory_csv(const std::string& path);

}  // namespace koopcouple
