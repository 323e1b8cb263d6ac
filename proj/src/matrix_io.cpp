#include "koopcouple/matrix_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace koopcouple {

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_matrix_csv(std::ostream& out, const KoopmanModel& model, const std::string& label) {
  nlohmann::ordered_json meta;
  meta["format"] = "koopcouple-matrix";
  meta["rows"] = model.matrix.rows();
  meta["cols"] = model.matrix.cols();
  meta["var_count"] = model.dict.var_count();
  meta["max_degree"] = model.dict.max_degree();
  meta["ordering"] = "graded-lex";
  meta["label"] = label;
  out << "# " << meta.dump() << '\n';
  for (Eigen::Index r = 0; r < model.matrix.rows(); ++r) {
    for (Eigen::Index c = 0; c < model.matrix.cols(); ++c) {
      if (c) out << ',';
      out << format_double(model.matrix(r, c));
    }
    out << '\n';
  }
}

void write_matrix_csv(const std::string& path, const KoopmanModel& model, const std::string& label) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path);
  write_matrix_csv(out, model, label);
}

KoopmanModel read_matrix_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::string line;
  if (!std::getline(in, line) || line.rfind("# ", 0) != 0)
    throw std::runtime_error(path + ": missing matrix metadata line");
  const auto meta = nlohmann::json::parse(line.substr(2));
  if (meta.at("format") != "koopcouple-matrix")
    throw std::runtime_error(path + ": not a koopcouple matrix file");
  const auto rows = meta.at("rows").get<Eigen::Index>();
  const auto cols = meta.at("cols").get<Eigen::Index>();
  Dictionary dict(meta.at("var_count").get<std::size_t>(),
                  meta.at("max_degree").get<std::uint32_t>());
  Eigen::MatrixXd k(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    if (!std::getline(in, line)) throw std::runtime_error(path + ": truncated matrix");
    std::stringstream ss(line);
    std::string cell;
    for (Eigen::Index c = 0; c < cols; ++c) {
      if (!std::getline(ss, cell, ',')) throw std::runtime_error(path + ": short matrix row");
      k(r, c) = std::stod(cell);
    }
  }
  return KoopmanModel(std::move(dict), std::move(k));
}

}  // namespace koopcouple
