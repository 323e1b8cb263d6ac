#pragma once

#include <iosfwd>
#include <string>

#include "koopcouple/koopman_model.hpp"

namespace koopcouple {

/// Matrix file: one `# {json}` metadata line (format, rows, cols,
/// var_count, max_degree, ordering, label), then the dense rows as CSV with
/// 17 significant digits.
void write_matrix_csv(std::ostream& out, const KoopmanModel& model, const std::string& label);
void write_matrix_csv(const std::string& path, const KoopmanModel& model, const std::string& label);
KoopmanModel read_matrix_csv(const std::string& path);

/// "%.17g"
std::string format_double(double v);

}  // namespace koopcouple
