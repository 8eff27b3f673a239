#include <optional>
#include <string>
#include <vector>

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "sympade/config.hpp"
#include "sympade/error.hpp"
#include "sympade/experiment.hpp"
#include "sympade/matrix.hpp"
#include "sympade/pade.hpp"

namespace py = pybind11;
using sympade::Matrix;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

Matrix to_matrix(const Array& a) {
  if (a.ndim() != 2 || a.shape(0) != a.shape(1)) {
    throw sympade::Error(sympade::ErrorCode::dimension_mismatch, "expected a square 2-d array");
  }
  const auto n = static_cast<std::size_t>(a.shape(0));
  return Matrix(n, std::vector<double>(a.data(), a.data() + n * n));
}

Array from_matrix(const Matrix& m) {
  const auto n = static_cast<py::ssize_t>(m.dim());
  Array out({n, n});
  auto view = out.mutable_unchecked<2>();
  for (py::ssize_t i = 0; i < n; ++i) {
    for (py::ssize_t j = 0; j < n; ++j) view(i, j) = m(i, j);
  }
  return out;
}

sympade::Command parse_command(const std::string& name) {
  using sympade::Command;
  for (Command c : {Command::convergence, Command::trajectory, Command::invariants,
                    Command::moment_growth}) {
    if (name == sympade::to_string(c)) return c;
  }
  throw sympade::Error(sympade::ErrorCode::config_error, "unknown command '" + name + "'");
}

py::dict run(const std::string& command, std::optional<std::string> builtin,
             std::optional<std::string> config, std::optional<std::uint64_t> seed,
             std::optional<std::size_t> paths, std::size_t workers) {
  const auto cmd = parse_command(command);
  if (builtin.has_value() == config.has_value()) {
    throw sympade::Error(sympade::ErrorCode::config_error, "give exactly one of builtin or config");
  }
  auto cfg = builtin ? sympade::builtin_config(*builtin, cmd) : sympade::parse_config(*config, cmd);
  if (seed) cfg.seed = *seed;
  if (paths) cfg.paths = *paths;
  sympade::RunOptions options;
  options.workers = workers;
  options.quad_nodes = cfg.quad_nodes;

  sympade::ExperimentResult result;
  {
    py::gil_scoped_release release;
    result = sympade::run_experiment(cmd, cfg, options);
  }
  const auto& table = result.table;
  Array rows({static_cast<py::ssize_t>(table.rows.size()),
              static_cast<py::ssize_t>(table.header.size())});
  auto view = rows.mutable_unchecked<2>();
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    for (std::size_t j = 0; j < table.header.size(); ++j) {
      view(static_cast<py::ssize_t>(i), static_cast<py::ssize_t>(j)) = table.rows[i][j];
    }
  }
  py::list checks;
  for (const auto& c : result.checks) {
    checks.append(py::dict(py::arg("name") = c.name, py::arg("value") = c.value,
                           py::arg("bound") = c.bound, py::arg("passed") = c.passed));
  }
  py::dict out;
  out["header"] = table.header;
  out["rows"] = rows;
  out["footer"] = table.footer;
  out["checks"] = checks;
  out["passed"] = result.passed();
  out["csv"] = table.render();
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Padé-based symplectic integrators for linear stochastic Hamiltonian systems.";

  static py::exception<sympade::Error> error(m, "SympadeError");
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const sympade::Error& e) {
      PyErr_SetObject(error.ptr(), py::make_tuple(std::string(e.what()),
                                                  std::string(sympade::to_string(e.code())))
                                       .ptr());
    }
  });

  m.def(
      "pade_coefficients",
      [](int r, int s) {
        const auto c = sympade::pade_coefficients({r, s});
        return py::make_tuple(c.a, c.b);
      },
      py::arg("r"), py::arg("s"),
      "Numerator and denominator coefficients a_1..a_r, b_1..b_s of P_(r,s).");
  m.def(
      "pade_transfer_matrix",
      [](const Array& b, int r, int s) {
        return from_matrix(sympade::pade_transfer_matrix(to_matrix(b), {r, s}));
      },
      py::arg("b"), py::arg("r"), py::arg("s"), "D_(r,s)(B)^{-1} N_(r,s)(B).");
  m.def(
      "matrix_exp", [](const Array& a) { return from_matrix(sympade::matrix_exp(to_matrix(a))); },
      py::arg("a"));
  m.def(
      "symplectic_defect",
      [](const Array& s) { return sympade::symplectic_defect(to_matrix(s)); }, py::arg("s"),
      "max |S^T J S - J| over entries.");
  m.def(
      "builtin_experiments",
      [] {
        std::vector<std::pair<std::string, std::string>> out;
        for (const auto& b : sympade::builtin_experiments()) out.emplace_back(b.name, b.description);
        return out;
      },
      "(name, description) pairs.");
  m.def("run_experiment", &run, py::arg("command"), py::kw_only(), py::arg("builtin") = py::none(),
        py::arg("config") = py::none(), py::arg("seed") = py::none(),
        py::arg("paths") = py::none(), py::arg("workers") = 1,
        "Runs one command on a builtin or on config text. Returns header, rows, footer, checks, "
        "passed and the rendered CSV.");
  m.attr("DEFAULT_SEED") = sympade::kDefaultSeed;
}
