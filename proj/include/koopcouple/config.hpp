#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "koopcouple/dynamics.hpp"
#include "koopcouple/polynomial.hpp"

namespace koopcouple {

/// Everything needed to rerun one coupled-oscillator experiment.
///
/// Trajectory lengths count states and include the burn-in, so the training
/// set holds train_length - burn_in states (one fewer snapshot pairs).
struct ExperimentConfig {
  std::string name;
  std::vector<PolynomialVectorField> subsystems;
  std::vector<Coupling> couplings;

  std::uint32_t degree = 3;
  double dt = 0.01;
  std::size_t train_length = 5001;
  std::size_t burn_in = 0;
  std::vector<Range> initial_ranges;

  std::size_t test_count = 100;
  std::size_t test_length = 1001;
  std::size_t test_burn_in = 0;
  double perturbation_radius = 0.3;

  double sigma = 1.0;
  std::size_t checkpoint_stride = 500;
  std::size_t max_pairs = 0;  // 0: use every training pair
  std::size_t nstep_pairs = 2000;
  int horizon = 100;
  std::size_t spectrum_pairs = 2000;
  double spectrum_threshold = 0.99;

  std::uint64_t seed = 1;
  std::string output_dir = "out";

  CoupledSystem system() const { return CoupledSystem(subsystems, couplings); }
  std::size_t train_pairs() const { return train_length - burn_in - 1; }

  /// Checkpoints stride, 2 stride, ... up to the usable pair count.
  std::vector<std::size_t> checkpoints() const;

  /// Throws std::invalid_argument naming the first violated constraint.
  void validate() const;
};

ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);

/// Bundled presets: "duffing" and "vdp".
std::optional<std::string> preset_text(const std::string& name);

}  // namespace koopcouple
