// koopcouple command-line driver.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "koopcouple/config.hpp"
#include "koopcouple/edmd.hpp"
#include "koopcouple/experiment.hpp"
#include "koopcouple/matrix_io.hpp"

namespace fs = std::filesystem;
using namespace koopcouple;

namespace {

struct CommonFlags {
  std::string config;
  std::string out = "out";
  std::size_t seeds = 1;
  std::optional<double> sigma;
  std::optional<std::uint32_t> degree;
  std::optional<std::size_t> stride;
  std::optional<std::uint64_t> seed;
  bool raw = false;
};

void add_common(CLI::App* cmd, CommonFlags& f, bool need_config) {
  auto* opt = cmd->add_option("--config", f.config,
                              "config file, or preset:duffing / preset:vdp");
  if (need_config) opt->required();
  cmd->add_option("--out", f.out, "output directory");
  cmd->add_option("--seeds", f.seeds, "number of RNG seeds to run")->check(CLI::PositiveNumber);
  cmd->add_option("--sigma", f.sigma, "initial inverse-Gram scale for online EDMD");
  cmd->add_option("--degree", f.degree, "dictionary degree")->check(CLI::PositiveNumber);
  cmd->add_option("--checkpoint-stride", f.stride, "pairs between checkpoints")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--seed", f.seed, "first RNG seed (overrides the config)");
  cmd->add_flag("--raw-errors", f.raw, "also write per-point error CSVs");
}

ExperimentConfig resolve(const CommonFlags& f) {
  ExperimentConfig cfg = load_config(f.config);
  if (f.sigma) cfg.sigma = *f.sigma;
  if (f.degree) cfg.degree = *f.degree;
  if (f.stride) cfg.checkpoint_stride = *f.stride;
  if (f.seed) cfg.seed = *f.seed;
  cfg.validate();
  return cfg;
}

std::vector<SnapshotPair> training_pairs(const ExperimentConfig& cfg,
                                         const std::string& trajectory_path) {
  if (!trajectory_path.empty()) return pairs_from_states(read_trajectory_csv(trajectory_path).states);
  return pairs_from_states(generate_dataset(cfg, cfg.seed).train.states);
}

template <typename Runner>
void run_seeds(const ExperimentConfig& cfg, const CommonFlags& f, const std::string& stem,
               Runner runner) {
  RunOptions opts;
  opts.raw_errors = f.raw;
  std::vector<ErrorSummary> runs;
  for (std::size_t i = 0; i < f.seeds; ++i) {
    const std::uint64_t seed = cfg.seed + i;
    const std::string dir =
        f.seeds == 1 ? f.out : (fs::path(f.out) / ("seed_" + std::to_string(seed))).string();
    runs.push_back(runner(cfg, generate_dataset(cfg, seed), dir, opts));
  }
  const auto mean = average_over_seeds(runs);
  if (f.seeds > 1)
    write_summary_csv((fs::path(f.out) / (stem + "_summary_mean.csv")).string(), mean);
  for (const auto& r : mean)
    std::printf("%6zu  %-8s  mean=%.6e  std=%.6e  n=%zu\n", r.key, r.method.c_str(), r.mean,
                r.std, r.count);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Koopman matrices for coupled systems from subsystem equations and online EDMD"};
  app.require_subcommand(1);

  CommonFlags derive_f, sim_f, online_f, batch_f, one_f, nstep_f, spec_f, repro_f;
  std::string trajectory, matrix_path, preset;
  std::optional<std::size_t> pairs;

  auto* derive = app.add_subcommand("derive", "write the assembled seed matrix");
  add_common(derive, derive_f, true);

  auto* sim = app.add_subcommand("simulate", "write training and test trajectories as CSV");
  add_common(sim, sim_f, true);

  auto* online = app.add_subcommand("train-online", "seed + online EDMD on training pairs");
  add_common(online, online_f, true);
  online->add_option("--trajectory", trajectory, "training trajectory CSV (default: simulate)");
  online->add_option("--pairs", pairs, "number of snapshot pairs to absorb");

  auto* batch = app.add_subcommand("train-batch", "batch EDMD on training pairs");
  add_common(batch, batch_f, true);
  batch->add_option("--trajectory", trajectory, "training trajectory CSV (default: simulate)");
  batch->add_option("--pairs", pairs, "number of snapshot pairs");

  auto* onestep = app.add_subcommand("eval-onestep", "one-step error at each checkpoint");
  add_common(onestep, one_f, true);

  auto* nstep = app.add_subcommand("eval-nstep", "n-step error for n = 1..horizon");
  add_common(nstep, nstep_f, true);

  auto* spectrum = app.add_subcommand("spectrum", "export Koopman eigenvalues");
  add_common(spectrum, spec_f, false);
  spectrum->add_option("--matrix", matrix_path, "eigenvalues of this matrix file only");
  spectrum->add_option("--pairs", pairs, "training pairs (default: config)");

  auto* repro = app.add_subcommand("reproduce", "full experiment for a bundled preset");
  add_common(repro, repro_f, false);
  repro->add_option("preset", preset, "duffing or vdp")
      ->required()
      ->check(CLI::IsMember({"duffing", "vdp"}));

  CLI11_PARSE(app, argc, argv);

  try {
    if (*derive) {
      const auto cfg = resolve(derive_f);
      fs::create_directories(derive_f.out);
      const auto path = fs::path(derive_f.out) / "seed_matrix.csv";
      write_matrix_csv(path.string(), derive_seed(cfg), "seed");
      std::cout << "wrote " << path.string() << '\n';
    } else if (*sim) {
      const auto cfg = resolve(sim_f);
      fs::create_directories(sim_f.out);
      const auto layout = cfg.system().layout();
      const Dataset data = generate_dataset(cfg, cfg.seed);
      write_trajectory_csv((fs::path(sim_f.out) / "train.csv").string(), data.train, layout);
      for (std::size_t t = 0; t < data.tests.size(); ++t) {
        char name[32];
        std::snprintf(name, sizeof name, "test_%03zu.csv", t);
        write_trajectory_csv((fs::path(sim_f.out) / name).string(), data.tests[t], layout);
      }
      std::cout << "wrote " << 1 + data.tests.size() << " trajectories to " << sim_f.out << '\n';
    } else if (*online || *batch) {
      const CommonFlags& f = *online ? online_f : batch_f;
      const auto cfg = resolve(f);
      const auto all = training_pairs(cfg, trajectory);
      const std::size_t m = pairs.value_or(all.size());
      if (m == 0 || m > all.size()) throw std::invalid_argument("--pairs out of range");
      fs::create_directories(f.out);
      const KoopmanModel seed = derive_seed(cfg);
      if (*online) {
        const auto path = fs::path(f.out) / "online_matrix.csv";
        write_matrix_csv(path.string(), train_online(cfg, seed, all, m), "proposed");
        std::cout << "wrote " << path.string() << '\n';
      } else {
        const std::vector<SnapshotPair> head(all.begin(), all.begin() + static_cast<long>(m));
        const auto result = batch_edmd(seed.dict, head);
        const auto path = fs::path(f.out) / "edmd_matrix.csv";
        write_matrix_csv(path.string(), result.model, "edmd");
        std::cout << "wrote " << path.string() << " (rank " << result.rank << " of "
                  << seed.dict.size() << ")\n";
      }
    } else if (*onestep) {
      run_seeds(resolve(one_f), one_f, "onestep", run_onestep_experiment);
    } else if (*nstep) {
      run_seeds(resolve(nstep_f), nstep_f, "nstep", run_nstep_experiment);
    } else if (*spectrum) {
      fs::create_directories(spec_f.out);
      if (!matrix_path.empty()) {
        const auto mu = spectrum_of(read_matrix_csv(matrix_path));
        write_spectrum_csv((fs::path(spec_f.out) / "spectrum.csv").string(), mu);
        std::cout << "eigenvalues: " << mu.size()
                  << ", |mu| > 0.99: " << count_above(mu, 0.99) << '\n';
      } else {
        if (spec_f.config.empty()) throw std::invalid_argument("--config or --matrix required");
        const auto cfg = resolve(spec_f);
        const auto s = run_spectrum_export(cfg, generate_dataset(cfg, cfg.seed),
                                           pairs.value_or(cfg.spectrum_pairs), spec_f.out);
        std::cout << "|mu| > " << s.threshold << ": proposed " << s.proposed_above << ", edmd "
                  << s.edmd_above << " of " << s.proposed.size() << '\n';
      }
    } else if (*repro) {
      if (repro_f.config.empty()) repro_f.config = "preset:" + preset;
      const auto cfg = resolve(repro_f);
      RunOptions opts;
      opts.raw_errors = repro_f.raw;
      const auto r = reproduce(cfg, repro_f.seeds, repro_f.out, opts);
      std::cout << "one-step error (seed-averaged)\n";
      for (const auto& row : r.onestep_mean)
        std::printf("%6zu  %-8s  mean=%.6e  std=%.6e\n", row.key, row.method.c_str(), row.mean,
                    row.std);
      std::cout << "wrote results to " << repro_f.out << '\n';
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
