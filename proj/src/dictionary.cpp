#include "koopcouple/dictionary.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace koopcouple {

std::uint32_t MultiIndex::degree() const {
  return std::accumulate(exps_.begin(), exps_.end(), std::uint32_t{0});
}

MultiIndex MultiIndex::operator+(const MultiIndex& other) const {
  if (other.size() != size()) throw std::invalid_argument("MultiIndex length mismatch");
  MultiIndex sum(*this);
  for (std::size_t i = 0; i < size(); ++i) sum.exps_[i] += other.exps_[i];
  return sum;
}

VariableLayout::VariableLayout(std::vector<std::size_t> subsystem_dims)
    : dims_(std::move(subsystem_dims)) {
  if (dims_.empty()) throw std::invalid_argument("VariableLayout needs at least one subsystem");
  offsets_.reserve(dims_.size() + 1);
  offsets_.push_back(0);
  for (std::size_t d : dims_) {
    if (d == 0) throw std::invalid_argument("subsystem dimension must be positive");
    offsets_.push_back(offsets_.back() + d);
  }
}

std::size_t VariableLayout::owner(std::size_t var) const {
  for (std::size_t s = 0; s < dims_.size(); ++s)
    if (var < offsets_[s + 1]) return s;
  throw std::out_of_range("variable " + std::to_string(var) + " outside layout");
}

namespace {

// Appends every exponent vector of exactly `remaining` total degree over
// slots [pos, n) in descending lexicographic order.
void enumerate_degree(std::vector<std::uint32_t>& current, std::size_t pos,
                      std::uint32_t remaining, std::vector<MultiIndex>& out) {
  if (pos + 1 == current.size()) {
    current[pos] = remaining;
    out.emplace_back(current);
    return;
  }
  for (std::uint32_t e = remaining + 1; e-- > 0;) {
    current[pos] = e;
    enumerate_degree(current, pos + 1, remaining - e, out);
  }
  current[pos] = 0;
}

}  // namespace

Dictionary::Dictionary(std::size_t var_count, std::uint32_t max_degree)
    : var_count_(var_count), max_degree_(max_degree) {
  if (var_count == 0) throw std::invalid_argument("dictionary needs at least one variable");
  if (max_degree == 0) throw std::invalid_argument("dictionary max_degree must be positive");
  entries_.reserve(binomial(var_count + max_degree, max_degree));
  std::vector<std::uint32_t> current(var_count, 0);
  for (std::uint32_t d = 0; d <= max_degree; ++d) enumerate_degree(current, 0, d, entries_);
  for (std::size_t k = 0; k < entries_.size(); ++k) lookup_.emplace(entries_[k], k);
}

std::optional<std::size_t> Dictionary::index_of(const MultiIndex& m) const {
  auto it = lookup_.find(m);
  if (it == lookup_.end()) return std::nullopt;
  return it->second;
}

std::size_t Dictionary::linear_index(std::size_t var) const {
  if (var >= var_count_) throw std::out_of_range("variable index out of range");
  return 1 + var;
}

Eigen::VectorXd Dictionary::evaluate(std::span<const double> x) const {
  if (x.size() != var_count_)
    throw std::invalid_argument("state length " + std::to_string(x.size()) +
                                " does not match dictionary var_count " +
                                std::to_string(var_count_));
  for (double v : x)
    if (!std::isfinite(v)) throw std::invalid_argument("non-finite state passed to evaluate");

  // powers(i, p) = x_i^p
  Eigen::MatrixXd powers(var_count_, max_degree_ + 1);
  for (std::size_t i = 0; i < var_count_; ++i) {
    powers(i, 0) = 1.0;
    for (std::uint32_t p = 1; p <= max_degree_; ++p) powers(i, p) = powers(i, p - 1) * x[i];
  }
  Eigen::VectorXd psi(entries_.size());
  for (std::size_t k = 0; k < entries_.size(); ++k) {
    double v = 1.0;
    const auto& e = entries_[k];
    for (std::size_t i = 0; i < var_count_; ++i)
      if (e[i] != 0) v *= powers(i, e[i]);
    psi[k] = v;
  }
  return psi;
}

Eigen::VectorXd Dictionary::evaluate(const Eigen::VectorXd& x) const {
  return evaluate(std::span<const double>(x.data(), static_cast<std::size_t>(x.size())));
}

Eigen::MatrixXd Dictionary::evaluate_columns(const Eigen::MatrixXd& states) const {
  Eigen::MatrixXd out(entries_.size(), states.cols());
  for (Eigen::Index c = 0; c < states.cols(); ++c) {
    Eigen::VectorXd col = states.col(c);
    out.col(c) = evaluate(col);
  }
  return out;
}

Eigen::MatrixXd Dictionary::state_projector() const {
  Eigen::MatrixXd b = Eigen::MatrixXd::Zero(var_count_, entries_.size());
  for (std::size_t i = 0; i < var_count_; ++i) b(i, linear_index(i)) = 1.0;
  return b;
}

std::uint64_t binomial(std::uint64_t n, std::uint64_t k) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  std::uint64_t r = 1;
  for (std::uint64_t i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

std::vector<std::size_t> embed_indices(const Dictionary& local, const Dictionary& global,
                                       const VariableLayout& layout, std::size_t subsystem) {
  if (subsystem >= layout.subsystem_count()) throw std::out_of_range("subsystem out of range");
  if (local.var_count() != layout.dim(subsystem))
    throw std::invalid_argument("local dictionary var_count does not match subsystem dimension");
  if (global.var_count() != layout.total())
    throw std::invalid_argument("global dictionary var_count does not match layout total");

  const std::size_t offset = layout.offset(subsystem);
  std::vector<std::size_t> map;
  map.reserve(local.size());
  for (const auto& m : local.entries()) {
    MultiIndex padded(global.var_count());
    for (std::size_t i = 0; i < m.size(); ++i) padded[offset + i] = m[i];
    auto g = global.index_of(padded);
    if (!g) throw std::invalid_argument("local monomial absent from global dictionary");
    map.push_back(*g);
  }
  return map;
}

}  // namespace koopcouple
