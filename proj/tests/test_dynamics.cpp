#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <sstream>

#include "koopcouple/dynamics.hpp"
#include "support.hpp"

using namespace koopcouple;
namespace fs = std::filesystem;

namespace {

PolynomialVectorField harmonic() {
  PolynomialVectorField f(2);
  f.add_term(0, {0, 1}, 1.0);
  f.add_term(1, {1, 0}, -1.0);
  return f;
}

PolynomialVectorField duffing(double delta, double alpha, double beta) {
  PolynomialVectorField f(2);
  f.add_term(0, {0, 1}, 1.0);
  f.add_term(1, {0, 1}, -delta);
  f.add_term(1, {1, 0}, -alpha);
  f.add_term(1, {3, 0}, -beta);
  return f;
}

PolynomialVectorField van_der_pol(double mu) {
  PolynomialVectorField f(2);
  f.add_term(0, {0, 1}, 1.0);
  f.add_term(1, {0, 1}, mu);
  f.add_term(1, {2, 1}, -mu);
  f.add_term(1, {1, 0}, -1.0);
  return f;
}

double harmonic_error(double dt) {
  const Eigen::Vector2d x0(1.0, 0.0);
  const auto steps = static_cast<std::size_t>(std::lround(1.0 / dt));
  const auto traj = simulate(harmonic(), x0, steps, dt);
  const Eigen::Vector2d exact(std::cos(1.0), -std::sin(1.0));
  return (traj.states.back() - exact).norm();
}

}  // namespace

TEST_CASE("polynomial field evaluation and term merging") {
  PolynomialVectorField f(2);
  f.add_term(1, {2, 1}, 3.0);
  f.add_term(1, {2, 1}, -1.0);
  f.add_term(0, {0, 0}, 0.5);
  CHECK(f.component(1).size() == 1);
  CHECK(f.degree() == 3);
  const Eigen::VectorXd y = f.evaluate(Eigen::Vector2d(2.0, -1.0));
  CHECK(y[0] == 0.5);
  CHECK(y[1] == 2.0 * 4.0 * -1.0);
  CHECK(PolynomialVectorField(3).degree() == 0);
  CHECK_THROWS(f.add_term(2, {1, 0}, 1.0));
  CHECK_THROWS(f.add_term(0, {1, 0, 0}, 1.0));
}

TEST_CASE("rk4 on the harmonic oscillator and on exponential decay") {
  CHECK(harmonic_error(0.01) <= 1e-9);
  PolynomialVectorField decay(1);
  decay.add_term(0, {1}, -2.0);
  const auto traj = simulate(decay, Eigen::VectorXd::Constant(1, 1.0), 100, 0.01);
  CHECK(traj.states.back()[0] == doctest::Approx(std::exp(-2.0)).epsilon(1e-9));
  // One step equals the degree-4 Taylor polynomial of exp(h lambda).
  const double h = -2.0 * 0.01;
  CHECK(traj.states[1][0] ==
        doctest::Approx(1 + h + h * h / 2 + h * h * h / 6 + h * h * h * h / 24).epsilon(1e-15));
}

TEST_CASE("rk4 global error is fourth order") {
  const double ratio = harmonic_error(0.02) / harmonic_error(0.01);
  INFO("ratio " << ratio);
  CHECK(ratio >= 12.0);
  CHECK(ratio <= 20.0);
}

TEST_CASE("zero field and zero steps") {
  const Eigen::Vector3d x0(0.1, 0.2, 0.3);
  const auto traj = simulate(PolynomialVectorField(3), x0, 10, 0.1);
  for (const auto& s : traj.states) CHECK((s - x0).norm() == 0.0);
  const auto none = simulate(harmonic(), Eigen::Vector2d(1, 2), 0, 0.01);
  REQUIRE(none.states.size() == 1);
  CHECK(none.states[0] == Eigen::Vector2d(1, 2));
  CHECK_THROWS_AS(simulate(harmonic(), Eigen::Vector2d(1, 2), 3, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(simulate(harmonic(), Eigen::Vector3d(1, 2, 3), 3, 0.01), std::invalid_argument);
}

TEST_CASE("blow-up is reported with its step") {
  PolynomialVectorField f(1);
  f.add_term(0, {3}, 1.0);
  try {
    simulate(f, Eigen::VectorXd::Constant(1, 10.0), 10000, 0.1);
    FAIL("expected blow-up");
  } catch (const BlowUpError& e) {
    CHECK(e.step() >= 1);
    CHECK(e.step() <= 10000);
  }
}

TEST_CASE("preset oscillators stay bounded") {
  const auto d = simulate(duffing(0.23, -0.99, 0.8), Eigen::Vector2d(1.5, -1.5), 5000, 0.01);
  for (const auto& s : d.states) CHECK(s.cwiseAbs().maxCoeff() < 10.0);
  const auto v = simulate(van_der_pol(1.32), Eigen::Vector2d(1.5, 1.0), 6000, 0.01);
  for (const auto& s : v.states) CHECK(s.cwiseAbs().maxCoeff() < 10.0);
}

TEST_CASE("diffusive coupling in the full field") {
  const CoupledSystem sys({harmonic(), harmonic()},
                          {diffusive_coupling(VariableLayout({2, 2}), 0, 1, 0.7, 0, 1),
                           diffusive_coupling(VariableLayout({2, 2}), 1, 0, 0.7, 0, 1)});
  const Eigen::Vector4d x(0.3, -0.2, 1.1, 0.4);
  const Eigen::VectorXd f = sys.full_field().evaluate(x);
  CHECK(f[0] == doctest::Approx(-0.2));
  CHECK(f[1] == doctest::Approx(-0.3 + 0.7 * (1.1 - 0.3)));
  CHECK(f[2] == doctest::Approx(0.4));
  CHECK(f[3] == doctest::Approx(-1.1 + 0.7 * (0.3 - 1.1)));
  // Symmetric couplings are antisymmetric in the exchanged pair.
  const double ci = f[1] + 0.3, cj = f[3] + 1.1;
  CHECK(ci == doctest::Approx(-cj));

  CHECK_THROWS_AS(CoupledSystem({harmonic()}, {diffusive_coupling(VariableLayout({2, 2}), 0, 1,
                                                                  1.0, 0, 1)}),
                  std::out_of_range);
  CHECK_THROWS_AS(diffusive_coupling(VariableLayout({2, 2}), 0, 1, 1.0, 0, 2), std::out_of_range);
}

TEST_CASE("simulation is deterministic") {
  const CoupledSystem sys({duffing(0.23, -0.99, 0.8), duffing(0.15, -0.59, 0.86)},
                          {diffusive_coupling(VariableLayout({2, 2}), 0, 1, 1.0, 0, 1)});
  const Eigen::Vector4d x0(0.2, 0.1, -0.4, 0.9);
  const auto a = simulate(sys, x0, 300, 0.01);
  const auto b = simulate(sys, x0, 300, 0.01);
  for (std::size_t k = 0; k < a.states.size(); ++k) CHECK(a.states[k] == b.states[k]);
}

TEST_CASE("initial state sampling") {
  const std::vector<Range> ranges = {{-1.5, 1.5}, {0.0, 2.0}, {3.0, 3.0}};
  auto rng = make_rng(42, SeedPurpose::TrainInit);
  for (int i = 0; i < 1000; ++i) {
    const Eigen::VectorXd x = sample_initial(ranges, rng);
    CHECK(x[0] >= -1.5);
    CHECK(x[0] < 1.5);
    CHECK(x[1] >= 0.0);
    CHECK(x[1] < 2.0);
    CHECK(x[2] == 3.0);
  }
  CHECK(sample_initial(ranges, 7) == sample_initial(ranges, 7));
  CHECK(sample_initial(ranges, 7) != sample_initial(ranges, 8));
  CHECK_THROWS_AS(sample_initial({{1.0, 0.0}}, 1), std::invalid_argument);

  // Distinct purposes give independent streams.
  auto a = make_rng(5, SeedPurpose::TrainInit), b = make_rng(5, SeedPurpose::TestInit);
  CHECK(a() != b());
}

TEST_CASE("uniform01 stays in [0, 1)") {
  auto rng = make_rng(1, SeedPurpose::TestTrajectory, 3);
  double lo = 1.0, hi = 0.0, sum = 0.0;
  for (int i = 0; i < 100000; ++i) {
    const double u = uniform01(rng);
    lo = std::min(lo, u);
    hi = std::max(hi, u);
    sum += u;
  }
  CHECK(lo >= 0.0);
  CHECK(hi < 1.0);
  CHECK(sum / 100000 == doctest::Approx(0.5).epsilon(0.01));
}

TEST_CASE("perturbation bounds and scaling") {
  const Eigen::Vector4d x(0.5, -0.5, 1.0, 0.0);
  for (std::uint64_t s = 0; s < 200; ++s) {
    const Eigen::VectorXd y = perturb_initial(x, 0.3, s);
    CHECK((y - x).cwiseAbs().maxCoeff() < 0.3);
  }
  const Eigen::VectorXd big = perturb_initial(x, 1.0, 9) - x;
  const Eigen::VectorXd tiny = perturb_initial(x, 1e-9, 9) - x;
  CHECK((tiny - 1e-9 * big).cwiseAbs().maxCoeff() <= 1e-15);
  CHECK_THROWS_AS(perturb_initial(x, 0.0, 1), std::invalid_argument);
}

TEST_CASE("trajectory CSV round trip") {
  const auto traj = simulate(duffing(0.23, -0.99, 0.8), Eigen::Vector2d(0.7, -0.1), 20, 0.01);
  std::ostringstream out;
  write_trajectory_csv(out, traj, VariableLayout({2}));
  CHECK(out.str().rfind("t,x_1_1,x_1_2\n", 0) == 0);

  const auto path = fs::temp_directory_path() / "koopcouple_traj_roundtrip.csv";
  write_trajectory_csv(path.string(), traj, VariableLayout({2}));
  const auto back = read_trajectory_csv(path.string());
  fs::remove(path);
  REQUIRE(back.states.size() == traj.states.size());
  for (std::size_t k = 0; k < traj.states.size(); ++k) CHECK(back.states[k] == traj.states[k]);
  CHECK(back.dt == doctest::Approx(0.01));
  CHECK(traj.tail(5).states.size() == 16);
  CHECK(traj.tail(100).states.empty());
}
