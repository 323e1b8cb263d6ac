#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "koopcouple/assembly.hpp"
#include "koopcouple/config.hpp"
#include "koopcouple/edmd.hpp"
#include "koopcouple/experiment.hpp"
#include "koopcouple/generator.hpp"
#include "koopcouple/spectral.hpp"

namespace py = pybind11;
using namespace koopcouple;

namespace {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Components as [[(exponents, coefficient), ...], ...], one list per coordinate.
using TermList = std::vector<std::vector<std::pair<std::vector<std::uint32_t>, double>>>;

PolynomialVectorField make_field(std::size_t var_count, const TermList& components) {
  if (components.size() > var_count)
    throw std::invalid_argument("more components than variables");
  PolynomialVectorField f(var_count);
  for (std::size_t i = 0; i < components.size(); ++i)
    for (const auto& [exps, coef] : components[i]) f.add_term(i, MultiIndex(exps), coef);
  return f;
}

TermList field_terms(const PolynomialVectorField& f) {
  TermList out(f.var_count());
  for (std::size_t i = 0; i < f.var_count(); ++i)
    for (const auto& t : f.component(i)) out[i].emplace_back(t.exponents.exponents(), t.coefficient);
  return out;
}

std::vector<SnapshotPair> pairs_from_arrays(const RowMatrix& x, const RowMatrix& y) {
  if (x.rows() != y.rows() || x.cols() != y.cols())
    throw std::invalid_argument("X and Y must have the same shape (pairs, variables)");
  std::vector<SnapshotPair> pairs;
  pairs.reserve(static_cast<std::size_t>(x.rows()));
  for (Eigen::Index m = 0; m < x.rows(); ++m)
    pairs.push_back({x.row(m).transpose(), y.row(m).transpose()});
  return pairs;
}

RowMatrix stack(const std::vector<Eigen::VectorXd>& states) {
  if (states.empty()) return RowMatrix(0, 0);
  RowMatrix out(static_cast<Eigen::Index>(states.size()), states.front().size());
  for (std::size_t k = 0; k < states.size(); ++k)
    out.row(static_cast<Eigen::Index>(k)) = states[k].transpose();
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "C++ core of koopcouple";

  py::class_<Dictionary>(m, "Dictionary")
      .def(py::init<std::size_t, std::uint32_t>(), py::arg("var_count"), py::arg("max_degree"))
      .def_property_readonly("var_count", &Dictionary::var_count)
      .def_property_readonly("max_degree", &Dictionary::max_degree)
      .def("__len__", &Dictionary::size)
      .def_property_readonly("entries",
                             [](const Dictionary& d) {
                               std::vector<std::vector<std::uint32_t>> out;
                               for (const auto& e : d.entries()) out.push_back(e.exponents());
                               return out;
                             })
      .def("index_of",
           [](const Dictionary& d, const std::vector<std::uint32_t>& e) {
             return d.index_of(MultiIndex(e));
           })
      .def("linear_index", &Dictionary::linear_index)
      .def("evaluate", py::overload_cast<const Eigen::VectorXd&>(&Dictionary::evaluate, py::const_),
           py::arg("x"))
      .def("state_projector", &Dictionary::state_projector)
      .def("__eq__", &Dictionary::operator==)
      .def("__repr__", [](const Dictionary& d) {
        return "Dictionary(var_count=" + std::to_string(d.var_count()) +
               ", max_degree=" + std::to_string(d.max_degree()) + ", size=" +
               std::to_string(d.size()) + ")";
      });

  py::class_<PolynomialVectorField>(m, "PolynomialVectorField")
      .def(py::init(&make_field), py::arg("var_count"), py::arg("components"))
      .def_property_readonly("var_count", &PolynomialVectorField::var_count)
      .def_property_readonly("degree", &PolynomialVectorField::degree)
      .def_property_readonly("components", &field_terms)
      .def("evaluate",
           py::overload_cast<const Eigen::VectorXd&>(&PolynomialVectorField::evaluate, py::const_));

  py::class_<KoopmanModel>(m, "KoopmanModel")
      .def(py::init<Dictionary, Eigen::MatrixXd>(), py::arg("dict"), py::arg("matrix"))
      .def_readonly("dict", &KoopmanModel::dict)
      .def_readonly("matrix", &KoopmanModel::matrix)
      .def("advance", &KoopmanModel::advance, py::arg("x"));

  py::class_<GeneratorMatrix>(m, "GeneratorMatrix")
      .def_readonly("dict", &GeneratorMatrix::dict)
      .def_readonly("entries", &GeneratorMatrix::entries);

  m.def("build_generator", &build_generator, py::arg("field"), py::arg("dict"));
  m.def(
      "local_koopman",
      [](const GeneratorMatrix& gen, double dt, const std::string& method, int substeps) {
        if (method == "expm") return local_koopman(gen, dt);
        if (method == "rk4") return local_koopman_rk4(gen, dt, substeps);
        throw std::invalid_argument("method must be 'expm' or 'rk4'");
      },
      py::arg("gen"), py::arg("dt"), py::arg("method") = "expm", py::arg("substeps") = 100);
  m.def(
      "assemble_global",
      [](const std::vector<KoopmanModel>& locals, const std::vector<std::size_t>& dims,
         const Dictionary& global) { return assemble_global(locals, VariableLayout(dims), global); },
      py::arg("locals"), py::arg("dims"), py::arg("global_dict"));

  py::class_<BatchEdmdResult>(m, "BatchEdmdResult")
      .def_readonly("model", &BatchEdmdResult::model)
      .def_readonly("rank", &BatchEdmdResult::rank)
      .def_readonly("rank_deficient", &BatchEdmdResult::rank_deficient);
  m.def(
      "batch_edmd",
      [](const Dictionary& dict, const RowMatrix& x, const RowMatrix& y) {
        return batch_edmd(dict, pairs_from_arrays(x, y));
      },
      py::arg("dict"), py::arg("X"), py::arg("Y"),
      "K = Q P^+ from snapshot arrays of shape (pairs, variables).");

  py::class_<OnlineEdmd>(m, "OnlineEdmd")
      .def(py::init<Dictionary, std::optional<Eigen::MatrixXd>, double>(), py::arg("dict"),
           py::arg("seed") = py::none(), py::arg("sigma") = 1.0)
      .def("update", py::overload_cast<const Eigen::VectorXd&, const Eigen::VectorXd&>(
                         &OnlineEdmd::update),
           py::arg("x"), py::arg("y"))
      .def(
          "update_many",
          [](OnlineEdmd& self, const RowMatrix& x, const RowMatrix& y) {
            std::vector<double> gammas;
            for (const auto& p : pairs_from_arrays(x, y)) gammas.push_back(self.update(p));
            return gammas;
          },
          py::arg("X"), py::arg("Y"))
      .def_property_readonly("k", [](const OnlineEdmd& s) { return s.state().k; })
      .def_property_readonly("p_inv", [](const OnlineEdmd& s) { return s.state().p_inv; })
      .def_property_readonly("count", [](const OnlineEdmd& s) { return s.state().count; })
      .def("model", &OnlineEdmd::model);

  py::class_<SpectralDecomposition>(m, "SpectralDecomposition")
      .def_readonly("eigenvalues", &SpectralDecomposition::eigenvalues)
      .def_readonly("right", &SpectralDecomposition::right)
      .def_readonly("left", &SpectralDecomposition::left)
      .def_readonly("modes", &SpectralDecomposition::modes)
      .def_readonly("projector", &SpectralDecomposition::projector)
      .def_readonly("defective", &SpectralDecomposition::defective)
      .def_readonly("biorthogonality_residual", &SpectralDecomposition::biorthogonality_residual)
      .def_readonly("eigen_residual", &SpectralDecomposition::eigen_residual)
      .def_readonly("reconstruction_residual", &SpectralDecomposition::reconstruction_residual)
      .def("eigenfunctions", &SpectralDecomposition::eigenfunctions, py::arg("x"));

  py::register_exception<DefectiveDecomposition>(m, "DefectiveDecomposition", PyExc_RuntimeError);
  m.def("decompose", &decompose, py::arg("model"));
  m.def("predict_one", &predict_one, py::arg("dec"), py::arg("x"));
  m.def("predict_n", &predict_n, py::arg("dec"), py::arg("x0"), py::arg("n"));
  m.def("predict_n_power", &predict_n_power, py::arg("model"), py::arg("x0"), py::arg("n"));
  m.def("relative_l2", &relative_l2, py::arg("y_true"), py::arg("y_pred"));

  py::class_<Predictor>(m, "Predictor")
      .def(py::init<const KoopmanModel&>(), py::arg("model"))
      .def_property_readonly("spectral", &Predictor::spectral)
      .def_property_readonly("max_imaginary_residue", &Predictor::max_imaginary_residue)
      .def("op", &Predictor::op, py::arg("n"))
      .def("predict", &Predictor::predict, py::arg("x0"), py::arg("n"));

  m.def(
      "simulate",
      [](const PolynomialVectorField& f, const Eigen::VectorXd& x0, std::size_t steps, double dt) {
        return stack(simulate(f, x0, steps, dt).states);
      },
      py::arg("field"), py::arg("x0"), py::arg("steps"), py::arg("dt"),
      "RK4 trajectory as an array of shape (steps + 1, variables).");

  py::class_<ExperimentConfig>(m, "ExperimentConfig")
      .def_readonly("name", &ExperimentConfig::name)
      .def_readwrite("degree", &ExperimentConfig::degree)
      .def_readwrite("dt", &ExperimentConfig::dt)
      .def_readwrite("sigma", &ExperimentConfig::sigma)
      .def_readwrite("seed", &ExperimentConfig::seed)
      .def_readwrite("train_length", &ExperimentConfig::train_length)
      .def_readwrite("burn_in", &ExperimentConfig::burn_in)
      .def_readwrite("test_count", &ExperimentConfig::test_count)
      .def_readwrite("test_length", &ExperimentConfig::test_length)
      .def_readonly("subsystems", &ExperimentConfig::subsystems)
      .def("full_field",
           [](const ExperimentConfig& c) { return c.system().full_field(); })
      .def("validate", &ExperimentConfig::validate);
  m.def("load_config", &load_config, py::arg("path"),
        "Load a JSON config file, or a bundled preset as 'preset:duffing' / 'preset:vdp'.");
  m.def("parse_config", &parse_config, py::arg("text"));
  m.def("derive_seed", &derive_seed, py::arg("config"));
  m.def(
      "generate_dataset",
      [](const ExperimentConfig& cfg, std::uint64_t seed) {
        const Dataset d = generate_dataset(cfg, seed);
        std::vector<RowMatrix> tests;
        for (const auto& t : d.tests) tests.push_back(stack(t.states));
        return py::make_tuple(stack(d.train.states), tests);
      },
      py::arg("config"), py::arg("seed"),
      "(train, tests) state arrays with burn-in removed.");
}
