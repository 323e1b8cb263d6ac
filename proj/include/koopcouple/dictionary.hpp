#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace koopcouple {

/// Exponent vector of a monomial x^n = x_1^{n_1} ... x_D^{n_D}.
class MultiIndex {
public:
  MultiIndex() = default;
  explicit MultiIndex(std::size_t var_count) : exps_(var_count, 0) {}
  explicit MultiIndex(std::vector<std::uint32_t> exponents) : exps_(std::move(exponents)) {}
  MultiIndex(std::initializer_list<std::uint32_t> exponents) : exps_(exponents) {}

  std::size_t size() const { return exps_.size(); }
  std::uint32_t operator[](std::size_t i) const { return exps_[i]; }
  std::uint32_t& operator[](std::size_t i) { return exps_[i]; }
  const std::vector<std::uint32_t>& exponents() const { return exps_; }

  std::uint32_t degree() const;
  bool is_constant() const { return degree() == 0; }

  MultiIndex operator+(const MultiIndex& other) const;

  auto operator<=>(const MultiIndex&) const = default;

private:
  std::vector<std::uint32_t> exps_;
};

/// Locates each subsystem's variables inside the global state vector.
class VariableLayout {
public:
  explicit VariableLayout(std::vector<std::size_t> subsystem_dims);

  std::size_t subsystem_count() const { return dims_.size(); }
  std::size_t dim(std::size_t subsystem) const { return dims_.at(subsystem); }
  std::size_t offset(std::size_t subsystem) const { return offsets_.at(subsystem); }
  std::size_t total() const { return offsets_.back(); }
  const std::vector<std::size_t>& dims() const { return dims_; }

  /// Subsystem owning global variable `var`.
  std::size_t owner(std::size_t var) const;

private:
  std::vector<std::size_t> dims_;
  std::vector<std::size_t> offsets_;  // size = dims_.size() + 1
};

/// All monomials in `var_count` variables of total degree <= max_degree.
///
/// Entries are graded: degree ascending, and within one degree ordered
/// lexicographically with higher powers of earlier variables first, so
/// entry 0 is the constant and entries 1..var_count are x_1..x_D. Truncating
/// to a lower degree keeps a prefix.
class Dictionary {
public:
  Dictionary(std::size_t var_count, std::uint32_t max_degree);

  std::size_t var_count() const { return var_count_; }
  std::uint32_t max_degree() const { return max_degree_; }
  std::size_t size() const { return entries_.size(); }

  const MultiIndex& entry(std::size_t k) const { return entries_.at(k); }
  const std::vector<MultiIndex>& entries() const { return entries_; }

  std::optional<std::size_t> index_of(const MultiIndex& m) const;

  /// Index of the monomial x_var (degree one).
  std::size_t linear_index(std::size_t var) const;

  /// Psi(x); throws std::invalid_argument on wrong length or non-finite input.
  Eigen::VectorXd evaluate(std::span<const double> x) const;
  Eigen::VectorXd evaluate(const Eigen::VectorXd& x) const;

  /// Evaluates column-wise: returns N_dic x M for a D x M block of states.
  Eigen::MatrixXd evaluate_columns(const Eigen::MatrixXd& states) const;

  /// D x N_dic matrix picking the degree-one entries out of Psi(x).
  Eigen::MatrixXd state_projector() const;

  bool operator==(const Dictionary& other) const {
    return var_count_ == other.var_count_ && max_degree_ == other.max_degree_;
  }

private:
  std::size_t var_count_;
  std::uint32_t max_degree_;
  std::vector<MultiIndex> entries_;
  std::map<MultiIndex, std::size_t> lookup_;
};

inline Dictionary build_dictionary(std::size_t var_count, std::uint32_t max_degree) {
  return Dictionary(var_count, max_degree);
}

/// Binomial C(n, k) as an exact integer.
std::uint64_t binomial(std::uint64_t n, std::uint64_t k);

/// Maps each entry of a subsystem's local dictionary to its position in the
/// global dictionary by zero-padding exponents outside the subsystem.
std::vector<std::size_t> embed_indices(const Dictionary& local, const Dictionary& global,
                                       const VariableLayout& layout, std::size_t subsystem);

}  // namespace koopcouple
