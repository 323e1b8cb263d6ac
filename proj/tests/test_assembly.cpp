#include <doctest.h>

#include <random>
#include <set>

#include "koopcouple/assembly.hpp"
#include "koopcouple/dynamics.hpp"
#include "koopcouple/generator.hpp"
#include "support.hpp"

using namespace koopcouple;

namespace {

PolynomialVectorField duffing(double delta, double alpha, double beta) {
  PolynomialVectorField f(2);
  f.add_term(0, {0, 1}, 1.0);
  f.add_term(1, {0, 1}, -delta);
  f.add_term(1, {1, 0}, -alpha);
  f.add_term(1, {3, 0}, -beta);
  return f;
}

KoopmanModel local_model(const PolynomialVectorField& f, std::uint32_t degree, double dt) {
  return local_koopman(build_generator(f, Dictionary(f.var_count(), degree)), dt);
}

}  // namespace

TEST_CASE("two planar subsystems at degree three") {
  const VariableLayout layout({2, 2});
  const Dictionary global(4, 3);
  const std::vector<KoopmanModel> locals = {local_model(duffing(0.23, -0.99, 0.8), 3, 0.01),
                                            local_model(duffing(0.15, -0.59, 0.86), 3, 0.01)};
  const auto seed = assemble_global(locals, layout, global);
  REQUIRE(seed.matrix.rows() == 35);
  REQUIRE(seed.matrix.cols() == 35);

  // Block consistency.
  for (std::size_t s = 0; s < 2; ++s) {
    const auto map = embed_indices(locals[s].dict, global, layout, s);
    for (std::size_t a = 0; a < map.size(); ++a)
      for (std::size_t b = 0; b < map.size(); ++b)
        CHECK(seed.matrix(static_cast<Eigen::Index>(map[a]), static_cast<Eigen::Index>(map[b])) ==
              locals[s].matrix(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)));
  }

  // Writable slots: pairs inside one subsystem's image, 2 * 10^2 minus the
  // shared (constant, constant) slot.
  std::set<std::pair<std::size_t, std::size_t>> slots;
  for (std::size_t s = 0; s < 2; ++s) {
    const auto map = embed_indices(locals[s].dict, global, layout, s);
    for (auto a : map)
      for (auto b : map) slots.emplace(a, b);
  }
  CHECK(slots.size() == 2 * 100 - 1);
  for (Eigen::Index i = 0; i < 35; ++i)
    for (Eigen::Index j = 0; j < 35; ++j)
      if (seed.matrix(i, j) != 0.0)
        CHECK(slots.count({static_cast<std::size_t>(i), static_cast<std::size_t>(j)}) == 1);

  // Interaction rows and columns are zero.
  std::size_t interactions = 0;
  for (std::size_t g = 0; g < global.size(); ++g) {
    if (!is_interaction(global.entry(g), layout)) continue;
    ++interactions;
    const auto gi = static_cast<Eigen::Index>(g);
    CHECK(seed.matrix.row(gi).cwiseAbs().maxCoeff() == 0.0);
    CHECK(seed.matrix.col(gi).cwiseAbs().maxCoeff() == 0.0);
  }
  CHECK(interactions == 35 - 19);  // 19 = 10 + 10 - shared constant
  CHECK(seed.matrix(0, 0) == 1.0);
}

TEST_CASE("is_interaction") {
  const VariableLayout layout({2, 2, 2});
  CHECK_FALSE(is_interaction({0, 0, 0, 0, 0, 0}, layout));
  CHECK_FALSE(is_interaction({2, 1, 0, 0, 0, 0}, layout));
  CHECK_FALSE(is_interaction({0, 0, 0, 0, 0, 3}, layout));
  CHECK(is_interaction({1, 0, 1, 0, 0, 0}, layout));
  CHECK(is_interaction({0, 0, 0, 1, 0, 1}, layout));
}

TEST_CASE("single subsystem is reproduced unchanged") {
  const auto local = local_model(duffing(0.23, -0.99, 0.8), 3, 0.01);
  const auto seed = assemble_global({local}, VariableLayout({2}), Dictionary(2, 3));
  CHECK((seed.matrix - local.matrix).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("all-zero local matrices leave only the constant entry") {
  const Dictionary local(2, 2);
  const std::vector<KoopmanModel> locals(3, KoopmanModel(local, Eigen::MatrixXd::Zero(6, 6)));
  const auto seed = assemble_global(locals, VariableLayout({2, 2, 2}), Dictionary(6, 2));
  CHECK(seed.matrix(0, 0) == 1.0);
  CHECK(seed.matrix.cwiseAbs().sum() == 1.0);
}

TEST_CASE("dimension mismatches are rejected") {
  const auto local = local_model(duffing(0.23, -0.99, 0.8), 3, 0.01);
  CHECK_THROWS_AS(assemble_global({local}, VariableLayout({2, 2}), Dictionary(4, 3)),
                  std::invalid_argument);
  CHECK_THROWS_AS(assemble_global({local, local}, VariableLayout({2, 2}), Dictionary(5, 3)),
                  std::invalid_argument);
  CHECK_THROWS_AS(assemble_global({local, local}, VariableLayout({2, 2}), Dictionary(4, 2)),
                  std::invalid_argument);
  CHECK_THROWS_AS(assemble_global({local, local}, VariableLayout({3, 1}), Dictionary(4, 3)),
                  std::invalid_argument);
}

TEST_CASE("uncoupled linear system: global seed predicts exactly like the local models") {
  std::mt19937_64 rng(17);
  const VariableLayout layout({2, 2, 2});
  std::vector<PolynomialVectorField> fields;
  std::vector<KoopmanModel> locals;
  for (int s = 0; s < 3; ++s) {
    const Eigen::MatrixXd a = testsupport::random_matrix(rng, 2, 2);
    PolynomialVectorField f(2);
    f.add_term(0, {1, 0}, a(0, 0));
    f.add_term(0, {0, 1}, a(0, 1));
    f.add_term(1, {1, 0}, a(1, 0));
    f.add_term(1, {0, 1}, a(1, 1));
    fields.push_back(f);
    locals.push_back(local_model(f, 1, 0.01));
  }
  const auto seed = assemble_global(locals, layout, Dictionary(6, 1));
  const CoupledSystem system(fields, {});
  const auto traj = simulate(system, testsupport::random_vector(rng, 6), 50, 0.01);
  for (const auto& x : traj.states) {
    const Eigen::VectorXd global = seed.advance(x);
    for (std::size_t s = 0; s < 3; ++s) {
      const auto off = static_cast<Eigen::Index>(layout.offset(s));
      const Eigen::VectorXd local = locals[s].advance(x.segment(off, 2));
      CHECK(global[off] == local[0]);
      CHECK(global[off + 1] == local[1]);
    }
  }
}
