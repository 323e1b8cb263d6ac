#include "koopcouple/dynamics.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace koopcouple {

namespace {

std::vector<std::size_t> dims_of(const std::vector<PolynomialVectorField>& subsystems) {
  std::vector<std::size_t> dims;
  dims.reserve(subsystems.size());
  for (const auto& f : subsystems) dims.push_back(f.var_count());
  return dims;
}

bool all_finite(const Eigen::VectorXd& v) { return v.allFinite(); }

}  // namespace

Coupling diffusive_coupling(const VariableLayout& layout, std::size_t target, std::size_t source,
                            double strength, std::size_t var, std::size_t coord) {
  const std::size_t di = layout.dim(target), dj = layout.dim(source);
  if (var >= di || var >= dj || coord >= di)
    throw std::out_of_range("diffusive coupling variable out of range");
  PolynomialVectorField g(di + dj);
  // g has D_i + D_j variables but only the first D_i components are used.
  MultiIndex xj(di + dj), xi(di + dj);
  xj[di + var] = 1;
  xi[var] = 1;
  g.add_term(coord, xj, 1.0);
  g.add_term(coord, xi, -1.0);
  return Coupling{target, source, strength, std::move(g)};
}

CoupledSystem::CoupledSystem(std::vector<PolynomialVectorField> subsystems,
                             std::vector<Coupling> couplings)
    : subsystems_(std::move(subsystems)),
      couplings_(std::move(couplings)),
      layout_(dims_of(subsystems_)),
      full_(layout_.total()) {
  for (std::size_t s = 0; s < subsystems_.size(); ++s) {
    const std::size_t off = layout_.offset(s);
    for (std::size_t c = 0; c < subsystems_[s].var_count(); ++c) {
      for (const Term& t : subsystems_[s].component(c)) {
        MultiIndex m(layout_.total());
        for (std::size_t k = 0; k < t.exponents.size(); ++k) m[off + k] = t.exponents[k];
        full_.add_term(off + c, m, t.coefficient);
      }
    }
  }
  for (const Coupling& cp : couplings_) {
    if (cp.target >= layout_.subsystem_count() || cp.source >= layout_.subsystem_count())
      throw std::out_of_range("coupling subsystem index out of range");
    if (!std::isfinite(cp.strength)) throw std::invalid_argument("non-finite coupling strength");
    const std::size_t di = layout_.dim(cp.target), dj = layout_.dim(cp.source);
    if (cp.field.var_count() != di + dj)
      throw std::invalid_argument("coupling field must have D_i + D_j variables");
    const std::size_t oi = layout_.offset(cp.target), oj = layout_.offset(cp.source);
    for (std::size_t c = 0; c < di; ++c) {
      for (const Term& t : cp.field.component(c)) {
        MultiIndex m(layout_.total());
        for (std::size_t k = 0; k < di; ++k) m[oi + k] += t.exponents[k];
        for (std::size_t k = 0; k < dj; ++k) m[oj + k] += t.exponents[di + k];
        full_.add_term(oi + c, m, cp.strength * t.coefficient);
      }
    }
    for (std::size_t c = di; c < cp.field.var_count(); ++c)
      if (!cp.field.component(c).empty())
        throw std::invalid_argument("coupling field may only drive the target subsystem");
  }
}

Eigen::VectorXd rk4_step(const PolynomialVectorField& field, const Eigen::VectorXd& x, double dt) {
  const Eigen::VectorXd k1 = field.evaluate(x);
  const Eigen::VectorXd k2 = field.evaluate(x + 0.5 * dt * k1);
  const Eigen::VectorXd k3 = field.evaluate(x + 0.5 * dt * k2);
  const Eigen::VectorXd k4 = field.evaluate(x + dt * k3);
  return x + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

Trajectory Trajectory::tail(std::size_t count) const {
  Trajectory t{{}, dt, seed};
  if (count < states.size()) t.states.assign(states.begin() + static_cast<long>(count), states.end());
  return t;
}

Trajectory simulate(const PolynomialVectorField& field, const Eigen::VectorXd& x0,
                    std::size_t steps, double dt) {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw std::invalid_argument("dt must be positive");
  if (static_cast<std::size_t>(x0.size()) != field.var_count())
    throw std::invalid_argument("initial state length does not match system");
  if (!all_finite(x0)) throw BlowUpError(0, "non-finite initial state");
  Trajectory traj{{}, dt, 0};
  traj.states.reserve(steps + 1);
  traj.states.push_back(x0);
  for (std::size_t k = 0; k < steps; ++k) {
    Eigen::VectorXd next = rk4_step(field, traj.states.back(), dt);
    if (!all_finite(next))
      throw BlowUpError(k + 1, "trajectory blew up at step " + std::to_string(k + 1));
    traj.states.push_back(std::move(next));
  }
  return traj;
}

Trajectory simulate(const CoupledSystem& system, const Eigen::VectorXd& x0, std::size_t steps,
                    double dt) {
  return simulate(system.full_field(), x0, steps, dt);
}

std::mt19937_64 make_rng(std::uint64_t base, SeedPurpose purpose, std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(base & 0xffffffffu),
                    static_cast<std::uint32_t>(base >> 32),
                    static_cast<std::uint32_t>(purpose),
                    static_cast<std::uint32_t>(index & 0xffffffffu),
                    static_cast<std::uint32_t>(index >> 32)};
  return std::mt19937_64(seq);
}

double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

Eigen::VectorXd sample_initial(const std::vector<Range>& ranges, std::mt19937_64& rng) {
  Eigen::VectorXd x(static_cast<Eigen::Index>(ranges.size()));
  for (std::size_t i = 0; i < ranges.size(); ++i) {
    const auto [lo, hi] = ranges[i];
    if (!(lo <= hi) || !std::isfinite(lo) || !std::isfinite(hi))
      throw std::invalid_argument("invalid sampling range");
    x[static_cast<Eigen::Index>(i)] = lo + (hi - lo) * uniform01(rng);
  }
  return x;
}

Eigen::VectorXd sample_initial(const std::vector<Range>& ranges, std::uint64_t seed) {
  auto rng = make_rng(seed, SeedPurpose::TrainInit);
  return sample_initial(ranges, rng);
}

Eigen::VectorXd perturb_initial(const Eigen::VectorXd& x, double radius, std::mt19937_64& rng) {
  if (!(radius > 0.0) || !std::isfinite(radius))
    throw std::invalid_argument("perturbation radius must be positive");
  Eigen::VectorXd out = x;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    double u = 0.0;
    while (u == 0.0) u = uniform01(rng);  // open interval on both sides
    out[i] += radius * (2.0 * u - 1.0);
  }
  return out;
}

Eigen::VectorXd perturb_initial(const Eigen::VectorXd& x, double radius, std::uint64_t seed) {
  auto rng = make_rng(seed, SeedPurpose::TestInit);
  return perturb_initial(x, radius, rng);
}

void write_trajectory_csv(std::ostream& out, const Trajectory& traj, const VariableLayout& layout) {
  out << 't';
  for (std::size_t s = 0; s < layout.subsystem_count(); ++s)
    for (std::size_t c = 0; c < layout.dim(s); ++c) out << ",x_" << s + 1 << '_' << c + 1;
  out << '\n';
  char buf[32];
  for (std::size_t k = 0; k < traj.states.size(); ++k) {
    std::snprintf(buf, sizeof buf, "%.17g", static_cast<double>(k) * traj.dt);
    out << buf;
    for (Eigen::Index i = 0; i < traj.states[k].size(); ++i) {
      std::snprintf(buf, sizeof buf, "%.17g", traj.states[k][i]);
      out << ',' << buf;
    }
    out << '\n';
  }
}

void write_trajectory_csv(const std::string& path, const Trajectory& traj,
                          const VariableLayout& layout) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path);
  write_trajectory_csv(out, traj, layout);
}

Trajectory read_trajectory_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::string line;
  if (!std::getline(in, line) || line.rfind("t,", 0) != 0)
    throw std::runtime_error(path + ": missing trajectory header");
  Trajectory traj;
  std::vector<double> times;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    std::vector<double> row;
    while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
    if (row.size() < 2) throw std::runtime_error(path + ": malformed row");
    times.push_back(row[0]);
    traj.states.push_back(Eigen::Map<Eigen::VectorXd>(row.data() + 1,
                                                      static_cast<Eigen::Index>(row.size() - 1)));
  }
  if (times.size() >= 2) traj.dt = times[1] - times[0];
  return traj;
}

}  // namespace koopcouple
