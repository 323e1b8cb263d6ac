#include "koopcouple/polynomial.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace koopcouple {

PolynomialVectorField::PolynomialVectorField(std::size_t var_count)
    : var_count_(var_count), components_(var_count) {
  if (var_count == 0) throw std::invalid_argument("vector field needs at least one variable");
}

PolynomialVectorField::PolynomialVectorField(std::size_t var_count,
                                             std::vector<std::vector<Term>> components)
    : PolynomialVectorField(var_count) {
  if (components.size() != var_count)
    throw std::invalid_argument("vector field needs one component per variable");
  for (std::size_t i = 0; i < var_count; ++i)
    for (const auto& t : components[i]) add_term(i, t.exponents, t.coefficient);
}

void PolynomialVectorField::add_term(std::size_t i, const MultiIndex& exponents,
                                     double coefficient) {
  if (i >= var_count_) throw std::out_of_range("component index out of range");
  if (exponents.size() != var_count_)
    throw std::invalid_argument("term exponent length does not match var_count");
  if (!std::isfinite(coefficient)) throw std::invalid_argument("non-finite coefficient");
  auto& comp = components_[i];
  auto it = std::find_if(comp.begin(), comp.end(),
                         [&](const Term& t) { return t.exponents == exponents; });
  if (it != comp.end())
    it->coefficient += coefficient;
  else
    comp.push_back(Term{exponents, coefficient});
}

std::uint32_t PolynomialVectorField::degree() const {
  std::uint32_t d = 0;
  for (const auto& comp : components_)
    for (const auto& t : comp) d = std::max(d, t.exponents.degree());
  return d;
}

void PolynomialVectorField::evaluate(std::span<const double> x, std::span<double> out) const {
  if (x.size() != var_count_ || out.size() != var_count_)
    throw std::invalid_argument("state length does not match vector field");
  for (std::size_t i = 0; i < var_count_; ++i) {
    double acc = 0.0;
    for (const auto& t : components_[i]) {
      double v = t.coefficient;
      for (std::size_t k = 0; k < var_count_; ++k)
        for (std::uint32_t p = 0; p < t.exponents[k]; ++p) v *= x[k];
      acc += v;
    }
    out[i] = acc;
  }
}

Eigen::VectorXd PolynomialVectorField::evaluate(const Eigen::VectorXd& x) const {
  Eigen::VectorXd out(x.size());
  evaluate(std::span<const double>(x.data(), static_cast<std::size_t>(x.size())),
           std::span<double>(out.data(), static_cast<std::size_t>(out.size())));
  return out;
}

}  // namespace koopcouple
