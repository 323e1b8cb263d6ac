#pragma once

#include <vector>

#include "koopcouple/dictionary.hpp"
#include "koopcouple/koopman_model.hpp"

namespace koopcouple {

/// Embeds per-subsystem Koopman matrices into the dictionary of the whole
/// coupled system. Entries linking monomials of one subsystem are copied
/// from that subsystem's matrix; every row and column of an interaction
/// monomial stays zero. The shared constant entry is set to 1.
KoopmanModel assemble_global(const std::vector<KoopmanModel>& locals,
                             const VariableLayout& layout, const Dictionary& global_dict);

/// True when the monomial has nonzero exponents in two or more subsystems.
bool is_interaction(const MultiIndex& m, const VariableLayout& layout);

}  // namespace koopcouple
