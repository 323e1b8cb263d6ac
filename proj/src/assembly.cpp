#include "koopcouple/assembly.hpp"

#include <stdexcept>

namespace koopcouple {

bool is_interaction(const MultiIndex& m, const VariableLayout& layout) {
  std::size_t touched = 0;
  for (std::size_t s = 0; s < layout.subsystem_count(); ++s) {
    for (std::size_t i = 0; i < layout.dim(s); ++i) {
      if (m[layout.offset(s) + i] != 0) {
        ++touched;
        break;
      }
    }
  }
  return touched >= 2;
}

KoopmanModel assemble_global(const std::vector<KoopmanModel>& locals,
                             const VariableLayout& layout, const Dictionary& global_dict) {
  if (locals.size() != layout.subsystem_count())
    throw std::invalid_argument("need exactly one local model per subsystem");
  if (global_dict.var_count() != layout.total())
    throw std::invalid_argument("global dictionary does not cover the layout");

  const auto n = static_cast<Eigen::Index>(global_dict.size());
  Eigen::MatrixXd k = Eigen::MatrixXd::Zero(n, n);
  for (std::size_t s = 0; s < locals.size(); ++s) {
    const KoopmanModel& local = locals[s];
    if (local.dict.max_degree() != global_dict.max_degree())
      throw std::invalid_argument("local and global dictionaries differ in max_degree");
    const auto map = embed_indices(local.dict, global_dict, layout, s);
    for (std::size_t a = 0; a < map.size(); ++a) {
      for (std::size_t b = 0; b < map.size(); ++b) {
        if (a == 0 && b == 0) continue;
        k(static_cast<Eigen::Index>(map[a]), static_cast<Eigen::Index>(map[b])) =
            local.matrix(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b));
      }
    }
  }
  k(0, 0) = 1.0;
  return KoopmanModel(global_dict, std::move(k));
}

}  // namespace koopcouple
