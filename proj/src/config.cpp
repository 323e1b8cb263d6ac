#include "koopcouple/config.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "koopcouple/presets_data.hpp"

namespace koopcouple {

using nlohmann::json;

namespace {

PolynomialVectorField duffing_field(double delta, double alpha, double beta) {
  PolynomialVectorField f(2);
  f.add_term(0, {0, 1}, 1.0);
  f.add_term(1, {0, 1}, -delta);
  f.add_term(1, {1, 0}, -alpha);
  f.add_term(1, {3, 0}, -beta);
  return f;
}

PolynomialVectorField van_der_pol_field(double mu) {
  PolynomialVectorField f(2);
  f.add_term(0, {0, 1}, 1.0);
  f.add_term(1, {0, 1}, mu);
  f.add_term(1, {2, 1}, -mu);
  f.add_term(1, {1, 0}, -1.0);
  return f;
}

// "terms": one list per coordinate of {"exponents": [...], "coefficient": c}.
PolynomialVectorField field_from_terms(std::size_t vars, std::size_t driven, const json& terms) {
  if (!terms.is_array() || terms.size() != driven)
    throw std::invalid_argument("'terms' needs one list per driven coordinate");
  PolynomialVectorField f(vars);
  for (std::size_t c = 0; c < driven; ++c) {
    for (const auto& t : terms[c]) {
      auto e = t.at("exponents").get<std::vector<std::uint32_t>>();
      if (e.size() != vars) throw std::invalid_argument("exponent vector has wrong length");
      f.add_term(c, MultiIndex(std::move(e)), t.at("coefficient").get<double>());
    }
  }
  return f;
}

PolynomialVectorField parse_subsystem(const json& j) {
  if (j.contains("model")) {
    const auto model = j.at("model").get<std::string>();
    if (model == "duffing")
      return duffing_field(j.at("delta").get<double>(), j.at("alpha").get<double>(),
                           j.at("beta").get<double>());
    if (model == "van_der_pol") return van_der_pol_field(j.at("mu").get<double>());
    throw std::invalid_argument("unknown subsystem model '" + model + "'");
  }
  const auto vars = j.at("variables").get<std::size_t>();
  return field_from_terms(vars, vars, j.at("terms"));
}

std::size_t one_based(const json& j, const char* key) {
  const auto v = j.at(key).get<long long>();
  if (v < 1) throw std::invalid_argument(std::string("'") + key + "' is 1-based");
  return static_cast<std::size_t>(v - 1);
}

template <typename T>
void maybe(const json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

}  // namespace

std::vector<std::size_t> ExperimentConfig::checkpoints() const {
  const std::size_t usable = max_pairs > 0 ? std::min(max_pairs, train_pairs()) : train_pairs();
  std::vector<std::size_t> out;
  for (std::size_t m = checkpoint_stride; m <= usable; m += checkpoint_stride) out.push_back(m);
  return out;
}

void ExperimentConfig::validate() const {
  auto fail = [](const std::string& what) { throw std::invalid_argument("config: " + what); };
  if (subsystems.empty()) fail("no subsystem equations");
  if (degree == 0) fail("degree must be positive");
  if (!(dt > 0.0)) fail("dt must be positive");
  if (train_length < 2) fail("train length must be at least 2");
  if (burn_in + 1 >= train_length) fail("burn-in must leave at least one training pair");
  if (test_count == 0) fail("test count must be positive");
  if (test_burn_in + 1 >= test_length) fail("test burn-in must leave at least one test pair");
  if (!(perturbation_radius > 0.0)) fail("perturbation radius must be positive");
  if (!(sigma > 0.0)) fail("sigma must be positive");
  if (checkpoint_stride == 0) fail("checkpoint stride must be positive");
  if (checkpoint_stride > train_pairs()) fail("checkpoint stride exceeds training pairs");
  if (nstep_pairs == 0 || nstep_pairs > train_pairs()) fail("n-step pair count out of range");
  if (spectrum_pairs == 0 || spectrum_pairs > train_pairs()) fail("spectrum pair count out of range");
  if (horizon < 1) fail("horizon must be >= 1");
  if (horizon > static_cast<int>(test_length - test_burn_in - 1))
    fail("horizon longer than test trajectories");
  const auto sys = system();
  if (initial_ranges.size() != sys.layout().total())
    fail("initial_ranges must give one range per state variable");
  for (const auto& [lo, hi] : initial_ranges)
    if (!(lo <= hi)) fail("inverted initial range");
}

ExperimentConfig parse_config(const std::string& text) {
  const json j = json::parse(text);
  ExperimentConfig cfg;
  maybe(j, "name", cfg.name);
  for (const auto& s : j.at("subsystems")) cfg.subsystems.push_back(parse_subsystem(s));

  std::vector<std::size_t> dims;
  for (const auto& f : cfg.subsystems) dims.push_back(f.var_count());
  const VariableLayout layout(dims);
  if (j.contains("couplings")) {
    for (const auto& c : j.at("couplings")) {
      const std::size_t target = one_based(c, "target");
      const std::size_t source = one_based(c, "source");
      if (target >= dims.size() || source >= dims.size())
        throw std::invalid_argument("coupling refers to a missing subsystem");
      const double strength = c.value("strength", 1.0);
      if (c.contains("diffusive")) {
        const auto& d = c.at("diffusive");
        cfg.couplings.push_back(diffusive_coupling(layout, target, source, strength,
                                                   one_based(d, "variable"),
                                                   one_based(d, "coordinate")));
      } else {
        const std::size_t vars = dims[target] + dims[source];
        cfg.couplings.push_back(
            Coupling{target, source, strength, field_from_terms(vars, dims[target], c.at("terms"))});
      }
    }
  }

  maybe(j, "degree", cfg.degree);
  maybe(j, "dt", cfg.dt);
  if (j.contains("train")) {
    const auto& t = j.at("train");
    maybe(t, "length", cfg.train_length);
    maybe(t, "burn_in", cfg.burn_in);
    if (t.contains("initial_ranges"))
      for (const auto& r : t.at("initial_ranges"))
        cfg.initial_ranges.emplace_back(r.at(0).get<double>(), r.at(1).get<double>());
  }
  if (j.contains("test")) {
    const auto& t = j.at("test");
    maybe(t, "count", cfg.test_count);
    maybe(t, "length", cfg.test_length);
    maybe(t, "burn_in", cfg.test_burn_in);
    maybe(t, "perturbation_radius", cfg.perturbation_radius);
  }
  maybe(j, "sigma", cfg.sigma);
  maybe(j, "checkpoint_stride", cfg.checkpoint_stride);
  maybe(j, "max_pairs", cfg.max_pairs);
  if (j.contains("nstep")) {
    maybe(j.at("nstep"), "pairs", cfg.nstep_pairs);
    maybe(j.at("nstep"), "horizon", cfg.horizon);
  }
  if (j.contains("spectrum")) {
    maybe(j.at("spectrum"), "pairs", cfg.spectrum_pairs);
    maybe(j.at("spectrum"), "threshold", cfg.spectrum_threshold);
  }
  maybe(j, "seed", cfg.seed);
  maybe(j, "output_dir", cfg.output_dir);
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  if (path.rfind("preset:", 0) == 0) {
    auto text = preset_text(path.substr(7));
    if (!text) throw std::invalid_argument("unknown preset '" + path.substr(7) + "'");
    return parse_config(*text);
  }
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::optional<std::string> preset_text(const std::string& name) {
  if (name == "duffing") return std::string(presets::kDuffing);
  if (name == "vdp") return std::string(presets::kVanDerPol);
  return std::nullopt;
}

}  // namespace koopcouple
