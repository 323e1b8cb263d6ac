#include "koopcouple/experiment.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <sstream>
#include <stdexcept>

#include "koopcouple/assembly.hpp"
#include "koopcouple/generator.hpp"
#include "koopcouple/matrix_io.hpp"
#include "koopcouple/spectral.hpp"

namespace koopcouple {

namespace fs = std::filesystem;

const SummaryRow* ErrorSummary::find(std::size_t key, const std::string& method) const {
  for (const auto& r : rows)
    if (r.key == key && r.method == method) return &r;
  return nullptr;
}

Dataset generate_dataset(const ExperimentConfig& cfg, std::uint64_t seed) {
  const CoupledSystem sys = cfg.system();
  Dataset data;
  auto train_rng = make_rng(seed, SeedPurpose::TrainInit);
  data.train_initial = sample_initial(cfg.initial_ranges, train_rng);
  data.train = simulate(sys, data.train_initial, cfg.train_length - 1, cfg.dt).tail(cfg.burn_in);
  data.train.seed = seed;
  data.tests.reserve(cfg.test_count);
  for (std::size_t t = 0; t < cfg.test_count; ++t) {
    auto rng = make_rng(seed, SeedPurpose::TestInit, t);
    const Eigen::VectorXd x0 = perturb_initial(data.train_initial, cfg.perturbation_radius, rng);
    Trajectory test = simulate(sys, x0, cfg.test_length - 1, cfg.dt).tail(cfg.test_burn_in);
    test.seed = seed;
    data.tests.push_back(std::move(test));
  }
  return data;
}

KoopmanModel derive_seed(const ExperimentConfig& cfg) {
  if (cfg.subsystems.empty()) throw std::invalid_argument("config has no subsystem equations");
  const CoupledSystem sys = cfg.system();
  std::vector<KoopmanModel> locals;
  locals.reserve(cfg.subsystems.size());
  for (const auto& field : cfg.subsystems) {
    const Dictionary local(field.var_count(), cfg.degree);
    locals.push_back(local_koopman(build_generator(field, local), cfg.dt));
  }
  return assemble_global(locals, sys.layout(), Dictionary(sys.layout().total(), cfg.degree));
}

KoopmanModel train_online(const ExperimentConfig& cfg, const KoopmanModel& seed,
                          const std::vector<SnapshotPair>& pairs, std::size_t count) {
  if (count > pairs.size()) throw std::invalid_argument("not enough snapshot pairs");
  OnlineEdmd online(seed.dict, seed.matrix, cfg.sigma);
  for (std::size_t m = 0; m < count; ++m) online.update(pairs[m]);
  return online.model();
}

namespace {

struct Stats {
  double mean = 0.0;
  double std = 0.0;
};

Stats stats_of(const std::vector<double>& v) {
  Stats s;
  if (v.empty()) return {std::nan(""), std::nan("")};
  for (double e : v) s.mean += e;
  s.mean /= static_cast<double>(v.size());
  double ss = 0.0;
  for (double e : v) ss += (e - s.mean) * (e - s.mean);
  s.std = std::sqrt(ss / static_cast<double>(v.size()));
  return s;
}

// One trained model under evaluation, identified by (key, method).
struct Candidate {
  std::size_t key;
  std::string method;
  std::unique_ptr<Predictor> predictor;
  std::string failure;
  std::vector<double> errors;
};

void make_predictor(Candidate& c, const KoopmanModel& model) {
  try {
    c.predictor = std::make_unique<Predictor>(model);
  } catch (const std::exception& e) {
    c.failure = e.what();
  }
}

void ensure_dir(const std::string& dir) {
  if (!dir.empty()) fs::create_directories(dir);
}

ErrorSummary summarize(std::vector<Candidate>& cands) {
  ErrorSummary summary;
  for (auto& c : cands) {
    const Stats s = c.failure.empty() ? stats_of(c.errors) : Stats{std::nan(""), std::nan("")};
    summary.rows.push_back({c.key, c.method, s.mean, s.std, c.failure.empty() ? c.errors.size() : 0});
    Diagnostic d{c.key, c.method, "failed", 0.0, c.failure};
    if (c.failure.empty() && c.predictor) {
      d.route = c.predictor->spectral() ? "spectral" : "matrix-power";
      d.imaginary_residue = c.predictor->max_imaginary_residue();
    }
    summary.diagnostics.push_back(std::move(d));
  }
  return summary;
}

void write_diagnostics_csv(const std::string& path, const std::vector<Diagnostic>& diags) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path);
  out << "checkpoint_or_n,method,route,imaginary_residue,message\n";
  for (const auto& d : diags) {
    std::string msg = d.message;
    for (char& ch : msg)
      if (ch == ',' || ch == '\n') ch = ' ';
    out << d.key << ',' << d.method << ',' << d.route << ',' << format_double(d.imaginary_residue)
        << ',' << msg << '\n';
  }
}

// Raw errors are stored per candidate in test-trajectory-major order; `steps`
// gives the number of points each test trajectory contributed.
void write_raw_csv(const std::string& path, const std::vector<Candidate>& cands,
                   const std::vector<std::size_t>& steps, bool horizon_mode) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path);
  out << (horizon_mode ? "n,method,trajectory,error\n" : "checkpoint,method,trajectory,step,error\n");
  for (const auto& c : cands) {
    if (!c.failure.empty()) continue;
    std::size_t idx = 0;
    for (std::size_t t = 0; t < steps.size(); ++t) {
      for (std::size_t k = 0; k < steps[t]; ++k, ++idx) {
        out << c.key << ',' << c.method << ',' << t << ',';
        if (!horizon_mode) out << k << ',';
        out << format_double(c.errors[idx]) << '\n';
      }
    }
  }
}

}  // namespace

ErrorSummary run_onestep_experiment(const ExperimentConfig& cfg, const Dataset& data,
                                    const std::string& out_dir, const RunOptions& opts) {
  const auto checkpoints = cfg.checkpoints();
  if (checkpoints.empty()) throw std::invalid_argument("no checkpoints in range");
  const auto pairs = pairs_from_states(data.train.states);
  const KoopmanModel seed = derive_seed(cfg);
  const Dictionary& dict = seed.dict;

  std::vector<Candidate> cands;
  OnlineEdmd online(dict, seed.matrix, cfg.sigma);
  std::size_t absorbed = 0;
  for (std::size_t m : checkpoints) {
    for (; absorbed < m; ++absorbed) online.update(pairs[absorbed]);
    Candidate proposed{m, kProposed, nullptr, {}, {}};
    make_predictor(proposed, online.model());
    cands.push_back(std::move(proposed));

    Candidate edmd{m, kEdmd, nullptr, {}, {}};
    try {
      const std::vector<SnapshotPair> head(pairs.begin(), pairs.begin() + static_cast<long>(m));
      make_predictor(edmd, batch_edmd(dict, head).model);
    } catch (const std::exception& e) {
      edmd.failure = e.what();
    }
    cands.push_back(std::move(edmd));
  }

  std::vector<std::size_t> steps;
  for (const auto& test : data.tests) {
    const std::size_t n = test.states.size() - 1;
    steps.push_back(n);
    Eigen::MatrixXd psi(dict.size(), n);
    for (std::size_t k = 0; k < n; ++k) psi.col(static_cast<Eigen::Index>(k)) = dict.evaluate(test.states[k]);
    for (auto& c : cands) {
      if (!c.failure.empty()) continue;
      try {
        const Eigen::MatrixXd pred = c.predictor->op(1) * psi;
        for (std::size_t k = 0; k < n; ++k)
          c.errors.push_back(relative_l2(test.states[k + 1], pred.col(static_cast<Eigen::Index>(k))));
      } catch (const std::exception& e) {
        c.failure = e.what();
      }
    }
  }

  ErrorSummary summary = summarize(cands);
  if (opts.write_files) {
    ensure_dir(out_dir);
    write_summary_csv((fs::path(out_dir) / "onestep_summary.csv").string(), summary.rows);
    write_diagnostics_csv((fs::path(out_dir) / "onestep_diagnostics.csv").string(),
                          summary.diagnostics);
    if (opts.raw_errors)
      write_raw_csv((fs::path(out_dir) / "onestep_raw.csv").string(), cands, steps, false);
  }
  return summary;
}

ErrorSummary run_nstep_experiment(const ExperimentConfig& cfg, const Dataset& data,
                                  const std::string& out_dir, const RunOptions& opts) {
  const auto pairs = pairs_from_states(data.train.states);
  if (cfg.nstep_pairs > pairs.size()) throw std::invalid_argument("not enough training pairs");
  const KoopmanModel seed = derive_seed(cfg);
  const Dictionary& dict = seed.dict;
  const std::vector<SnapshotPair> head(pairs.begin(),
                                       pairs.begin() + static_cast<long>(cfg.nstep_pairs));

  std::vector<Candidate> methods(2);
  methods[0].method = kProposed;
  methods[1].method = kEdmd;
  for (auto& m : methods) m.key = cfg.nstep_pairs;
  try {
    make_predictor(methods[0], train_online(cfg, seed, pairs, cfg.nstep_pairs));
  } catch (const std::exception& e) {
    methods[0].failure = e.what();
  }
  try {
    make_predictor(methods[1], batch_edmd(dict, head).model);
  } catch (const std::exception& e) {
    methods[1].failure = e.what();
  }

  // Candidates per (n, method), filled trajectory by trajectory.
  std::vector<Candidate> cands;
  for (int n = 1; n <= cfg.horizon; ++n)
    for (const auto& m : methods)
      cands.push_back({static_cast<std::size_t>(n), m.method, nullptr, m.failure, {}});

  std::vector<std::size_t> steps;
  for (const auto& test : data.tests) {
    if (static_cast<int>(test.states.size()) <= cfg.horizon)
      throw std::invalid_argument("test trajectory shorter than horizon");
    steps.push_back(1);
    const Eigen::VectorXd psi0 = dict.evaluate(test.states[0]);
    for (int n = 1; n <= cfg.horizon; ++n) {
      for (std::size_t mi = 0; mi < methods.size(); ++mi) {
        auto& c = cands[static_cast<std::size_t>(n - 1) * methods.size() + mi];
        if (!c.failure.empty()) continue;
        try {
          const Eigen::VectorXd pred = methods[mi].predictor->op(n) * psi0;
          c.errors.push_back(relative_l2(test.states[static_cast<std::size_t>(n)], pred));
        } catch (const std::exception& e) {
          c.failure = e.what();
        }
      }
    }
  }

  ErrorSummary summary = summarize(cands);
  for (std::size_t i = 0; i < summary.diagnostics.size(); ++i) {
    const auto& m = methods[i % methods.size()];
    auto& d = summary.diagnostics[i];
    if (m.predictor && cands[i].failure.empty()) {
      d.route = m.predictor->spectral() ? "spectral" : "matrix-power";
      d.imaginary_residue = m.predictor->max_imaginary_residue();
    }
  }
  if (opts.write_files) {
    ensure_dir(out_dir);
    write_summary_csv((fs::path(out_dir) / "nstep_summary.csv").string(), summary.rows);
    write_diagnostics_csv((fs::path(out_dir) / "nstep_diagnostics.csv").string(),
                          summary.diagnostics);
    if (opts.raw_errors)
      write_raw_csv((fs::path(out_dir) / "nstep_raw.csv").string(), cands, steps, true);
  }
  return summary;
}

std::vector<std::complex<double>> spectrum_of(const KoopmanModel& model) {
  const auto dec = decompose(model);
  return {dec.eigenvalues.data(), dec.eigenvalues.data() + dec.eigenvalues.size()};
}

std::size_t count_above(const std::vector<std::complex<double>>& mu, double threshold) {
  std::size_t n = 0;
  for (const auto& m : mu)
    if (std::abs(m) > threshold) ++n;
  return n;
}

void write_spectrum_csv(const std::string& path, const std::vector<std::complex<double>>& mu) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path);
  out << "re,im,abs\n";
  for (const auto& m : mu)
    out << format_double(m.real()) << ',' << format_double(m.imag()) << ','
        << format_double(std::abs(m)) << '\n';
}

SpectrumSummary run_spectrum_export(const ExperimentConfig& cfg, const Dataset& data,
                                    std::size_t pair_count, const std::string& out_dir,
                                    const RunOptions& opts) {
  const auto pairs = pairs_from_states(data.train.states);
  if (pair_count == 0 || pair_count > pairs.size())
    throw std::invalid_argument("spectrum pair count out of range");
  const KoopmanModel seed = derive_seed(cfg);
  const std::vector<SnapshotPair> head(pairs.begin(), pairs.begin() + static_cast<long>(pair_count));

  SpectrumSummary s;
  s.pair_count = pair_count;
  s.threshold = cfg.spectrum_threshold;
  s.proposed = spectrum_of(train_online(cfg, seed, pairs, pair_count));
  s.edmd = spectrum_of(batch_edmd(seed.dict, head).model);
  s.proposed_above = count_above(s.proposed, s.threshold);
  s.edmd_above = count_above(s.edmd, s.threshold);

  if (opts.write_files) {
    ensure_dir(out_dir);
    write_spectrum_csv((fs::path(out_dir) / "spectrum_proposed.csv").string(), s.proposed);
    write_spectrum_csv((fs::path(out_dir) / "spectrum_edmd.csv").string(), s.edmd);
    std::ofstream out(fs::path(out_dir) / "spectrum_summary.csv");
    out << "method,pair_count,threshold,count_above,total\n";
    out << kProposed << ',' << pair_count << ',' << format_double(s.threshold) << ','
        << s.proposed_above << ',' << s.proposed.size() << '\n';
    out << kEdmd << ',' << pair_count << ',' << format_double(s.threshold) << ',' << s.edmd_above
        << ',' << s.edmd.size() << '\n';
  }
  return s;
}

void write_summary_csv(const std::string& path, const std::vector<SummaryRow>& rows) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path);
  out << "checkpoint_or_n,method,mean,std,count\n";
  for (const auto& r : rows)
    out << r.key << ',' << r.method << ',' << format_double(r.mean) << ','
        << format_double(r.std) << ',' << r.count << '\n';
}

std::vector<SummaryRow> read_summary_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::string line;
  std::getline(in, line);
  std::vector<SummaryRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string key, method, mean, sd, count;
    std::getline(ss, key, ',');
    std::getline(ss, method, ',');
    std::getline(ss, mean, ',');
    std::getline(ss, sd, ',');
    std::getline(ss, count, ',');
    rows.push_back({std::stoul(key), method, std::stod(mean), std::stod(sd), std::stoul(count)});
  }
  return rows;
}

std::vector<SummaryRow> average_over_seeds(const std::vector<ErrorSummary>& runs) {
  std::vector<SummaryRow> out;
  if (runs.empty()) return out;
  for (const auto& first : runs.front().rows) {
    SummaryRow avg{first.key, first.method, 0.0, 0.0, 0};
    std::size_t used = 0;
    for (const auto& run : runs) {
      const SummaryRow* r = run.find(first.key, first.method);
      if (!r || !std::isfinite(r->mean)) continue;
      avg.mean += r->mean;
      avg.std += r->std;
      avg.count += r->count;
      ++used;
    }
    if (used == 0) {
      avg.mean = avg.std = std::nan("");
    } else {
      avg.mean /= static_cast<double>(used);
      avg.std /= static_cast<double>(used);
    }
    out.push_back(avg);
  }
  return out;
}

ReproduceResult reproduce(const ExperimentConfig& cfg, std::size_t seeds,
                          const std::string& out_dir, const RunOptions& opts) {
  if (seeds == 0) throw std::invalid_argument("need at least one seed");
  cfg.validate();
  ReproduceResult result;
  if (opts.write_files) {
    ensure_dir(out_dir);
    write_matrix_csv((fs::path(out_dir) / "seed_matrix.csv").string(), derive_seed(cfg), "seed");
  }
  for (std::size_t i = 0; i < seeds; ++i) {
    const std::uint64_t seed = cfg.seed + i;
    const std::string dir = (fs::path(out_dir) / ("seed_" + std::to_string(seed))).string();
    const Dataset data = generate_dataset(cfg, seed);
    result.onestep.push_back(run_onestep_experiment(cfg, data, dir, opts));
    result.nstep.push_back(run_nstep_experiment(cfg, data, dir, opts));
    result.spectrum.push_back(run_spectrum_export(cfg, data, cfg.spectrum_pairs, dir, opts));
  }
  result.onestep_mean = average_over_seeds(result.onestep);
  result.nstep_mean = average_over_seeds(result.nstep);
  if (opts.write_files) {
    write_summary_csv((fs::path(out_dir) / "onestep_summary_mean.csv").string(),
                      result.onestep_mean);
    write_summary_csv((fs::path(out_dir) / "nstep_summary_mean.csv").string(), result.nstep_mean);
    std::ofstream out(fs::path(out_dir) / "spectrum_summary_mean.csv");
    double p = 0.0, e = 0.0;
    for (const auto& s : result.spectrum) {
      p += static_cast<double>(s.proposed_above);
      e += static_cast<double>(s.edmd_above);
    }
    const double k = static_cast<double>(result.spectrum.size());
    out << "method,pair_count,threshold,mean_count_above\n";
    out << kProposed << ',' << cfg.spectrum_pairs << ',' << format_double(cfg.spectrum_threshold)
        << ',' << format_double(p / k) << '\n';
    out << kEdmd << ',' << cfg.spectrum_pairs << ',' << format_double(cfg.spectrum_threshold)
        << ',' << format_double(e / k) << '\n';
  }
  return result;
}

}  // namespace koopcouple
