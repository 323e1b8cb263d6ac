#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "koopcouple/dictionary.hpp"

namespace koopcouple {

struct Term {
  MultiIndex exponents;
  double coefficient = 0.0;
};

/// Right-hand side f of x' = f(x), one sparse polynomial per coordinate.
class PolynomialVectorField {
public:
  explicit PolynomialVectorField(std::size_t var_count);
  PolynomialVectorField(std::size_t var_count, std::vector<std::vector<Term>> components);

  std::size_t var_count() const { return var_count_; }
  const std::vector<Term>& component(std::size_t i) const { return components_.at(i); }
  const std::vector<std::vector<Term>>& components() const { return components_; }

  /// Adds c * x^exponents to coordinate i, merging with an existing monomial.
  void add_term(std::size_t i, const MultiIndex& exponents, double coefficient);

  /// Highest total degree appearing in any component (0 for the zero field).
  std::uint32_t degree() const;

  void evaluate(std::span<const double> x, std::span<double> out) const;
  Eigen::VectorXd evaluate(const Eigen::VectorXd& x) const;

private:
  std::size_t var_count_;
  std::vector<std::vector<Term>> components_;
};

}  // namespace koopcouple
