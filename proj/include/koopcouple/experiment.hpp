#pragma once

#include <complex>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "koopcouple/config.hpp"
#include "koopcouple/dynamics.hpp"
#include "koopcouple/edmd.hpp"
#include "koopcouple/koopman_model.hpp"

namespace koopcouple {

inline constexpr const char* kProposed = "proposed";
inline constexpr const char* kEdmd = "edmd";

struct Dataset {
  Trajectory train;               // burn-in already dropped
  std::vector<Trajectory> tests;  // burn-in already dropped
  Eigen::VectorXd train_initial;
};

/// Training and test trajectories for one RNG seed. Test initial states are
/// the (pre-burn-in) training initial state plus uniform noise.
Dataset generate_dataset(const ExperimentConfig& cfg, std::uint64_t seed);

/// Local Koopman matrices from the subsystem equations, embedded into the
/// global dictionary.
KoopmanModel derive_seed(const ExperimentConfig& cfg);

struct SummaryRow {
  std::size_t key = 0;  // checkpoint pair count or horizon n
  std::string method;
  double mean = 0.0;
  double std = 0.0;  // population standard deviation
  std::size_t count = 0;
};

struct Diagnostic {
  std::size_t key = 0;
  std::string method;
  std::string route;  // "spectral", "matrix-power" or "failed"
  double imaginary_residue = 0.0;
  std::string message;
};

struct ErrorSummary {
  std::vector<SummaryRow> rows;
  std::vector<Diagnostic> diagnostics;

  const SummaryRow* find(std::size_t key, const std::string& method) const;
};

struct RunOptions {
  bool write_files = true;
  bool raw_errors = false;  // per-point error CSV next to the summary
};

/// One-step error at every checkpoint for the online-refined seed and for
/// batch EDMD on the same leading pairs.
ErrorSummary run_onestep_experiment(const ExperimentConfig& cfg, const Dataset& data,
                                    const std::string& out_dir, const RunOptions& opts = {});

/// Errors of n-step predictions from each test initial state, n = 1..horizon,
/// with both methods trained on cfg.nstep_pairs pairs.
ErrorSummary run_nstep_experiment(const ExperimentConfig& cfg, const Dataset& data,
                                  const std::string& out_dir, const RunOptions& opts = {});

struct SpectrumSummary {
  std::size_t pair_count = 0;
  double threshold = 0.0;
  std::vector<std::complex<double>> proposed;
  std::vector<std::complex<double>> edmd;
  std::size_t proposed_above = 0;
  std::size_t edmd_above = 0;
};

SpectrumSummary run_spectrum_export(const ExperimentConfig& cfg, const Dataset& data,
                                    std::size_t pair_count, const std::string& out_dir,
                                    const RunOptions& opts = {});

/// Eigenvalues in decomposition order, written as `re,im,abs`.
std::vector<std::complex<double>> spectrum_of(const KoopmanModel& model);
void write_spectrum_csv(const std::string& path, const std::vector<std::complex<double>>& mu);
std::size_t count_above(const std::vector<std::complex<double>>& mu, double threshold);

/// Proposed method on the first `pairs` training pairs.
KoopmanModel train_online(const ExperimentConfig& cfg, const KoopmanModel& seed,
                          const std::vector<SnapshotPair>& pairs, std::size_t count);

void write_summary_csv(const std::string& path, const std::vector<SummaryRow>& rows);
std::vector<SummaryRow> read_summary_csv(const std::string& path);

struct ReproduceResult {
  std::vector<ErrorSummary> onestep;  // per seed
  std::vector<ErrorSummary> nstep;
  std::vector<SpectrumSummary> spectrum;
  std::vector<SummaryRow> onestep_mean;  // seed-averaged
  std::vector<SummaryRow> nstep_mean;
};

/// Seed-averaged rows: mean of per-seed means and of per-seed stds, summed counts.
std::vector<SummaryRow> average_over_seeds(const std::vector<ErrorSummary>& runs);

/// Runs derive, one-step, n-step and spectrum for seeds cfg.seed .. cfg.seed + k - 1.
/// Per-seed files go to out_dir/seed_<s>/, averages to out_dir/.
ReproduceResult reproduce(const ExperimentConfig& cfg, std::size_t seeds,
                          const std::string& out_dir, const RunOptions& opts = {});

}  // namespace koopcouple
