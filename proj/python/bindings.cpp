#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "slabsn/analytic.hpp"
#include "slabsn/eigen_driver.hpp"
#include "slabsn/error.hpp"
#include "slabsn/fields.hpp"
#include "slabsn/output.hpp"
#include "slabsn/problem_io.hpp"
#include "slabsn/quadrature.hpp"
#include "slabsn/spectral.hpp"
#include "slabsn/sweep.hpp"

namespace py = pybind11;
using namespace slabsn;

namespace {

const MaterialXS& material_named(const Problem& p, const std::string& name) {
  for (const auto& m : p.materials)
    if (m.name == name) return m;
  throw Error(ErrorKind::InvalidArgument, "no material named '" + name + "'");
}

py::dict flux_dict(const FluxField& f) {
  py::dict d;
  d["x"] = f.points;
  d["psi"] = f.psi;
  d["phi"] = f.phi;
  d["groups"] = f.groups;
  d["ordinates"] = f.ordinates;
  return d;
}

SourceField source_from(const FineMesh& mesh, std::size_t dim, const py::object& source) {
  if (py::isinstance<py::float_>(source) || py::isinstance<py::int_>(source)) {
    return initial_source(mesh, dim, InitialSource::flat, source.cast<double>());
  }
  if (py::isinstance<py::str>(source)) {
    const auto s = source.cast<std::string>();
    if (s == "abs_x") return initial_source(mesh, dim, InitialSource::abs_x);
    if (s == "constant") return initial_source(mesh, dim, InitialSource::flat);
    throw Error(ErrorKind::InvalidArgument, "source must be 'constant', 'abs_x', a number or an array");
  }
  SourceField q;
  q.mesh = mesh;
  q.values = source.cast<Eigen::MatrixXd>();
  if (q.values.rows() != static_cast<Eigen::Index>(mesh.cells()) || q.values.cols() != static_cast<Eigen::Index>(dim)) {
    throw Error(ErrorKind::InvalidArgument, "source array must be cells x (G*N) = " + std::to_string(mesh.cells()) +
                                                " x " + std::to_string(dim));
  }
  return q;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Multigroup slab S_N transport: analytic eigen-expansion and sweeping solvers";

  static py::handle error_type = py::exception<Error>(m, "SlabSNError", PyExc_RuntimeError).release();
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::object err = py::reinterpret_borrow<py::object>(error_type)(e.what());
      err.attr("kind") = std::string(to_string(e.kind()));
      PyErr_SetObject(error_type.ptr(), err.ptr());
    }
  });

  py::class_<QuadratureSet>(m, "QuadratureSet")
      .def_readonly("mu", &QuadratureSet::mu)
      .def_readonly("weight", &QuadratureSet::weight)
      .def("__len__", &QuadratureSet::size);
  m.def("gauss_legendre", &gauss_legendre, py::arg("order"));

  py::class_<Problem>(m, "Problem")
      .def_static("load", [](const std::filesystem::path& path) { return load_problem(path); }, py::arg("path"))
      .def_static("parse", &parse_problem, py::arg("text"))
      .def("serialize", &serialize_problem)
      .def("validate", &Problem::validate)
      .def_property_readonly("groups", &Problem::groups)
      .def_property_readonly("regions", [](const Problem& p) { return p.geometry.regions(); })
      .def_property_readonly("edges", [](const Problem& p) { return p.geometry.edges; })
      .def_property_readonly("materials", [](const Problem& p) {
        std::vector<std::string> names;
        for (const auto& mat : p.materials) names.push_back(mat.name);
        return names;
      })
      .def_property(
          "sn_order", [](const Problem& p) { return p.config.sn_order; },
          [](Problem& p, int n) { p.config.sn_order = n; })
      .def_property(
          "mesh_cells", [](const Problem& p) { return p.config.mesh_cells; },
          [](Problem& p, std::size_t n) { p.config.mesh_cells = n; })
      .def_property(
          "tolerance", [](const Problem& p) { return p.config.tolerance; },
          [](Problem& p, double t) { p.config.tolerance = t; })
      .def_property(
          "max_outer", [](const Problem& p) { return p.config.max_outer; },
          [](Problem& p, int n) { p.config.max_outer = n; })
      .def_property(
          "ke", [](const Problem& p) { return p.config.ke; },
          [](Problem& p, std::optional<double> ke) { p.config.ke = ke; })
      .def_property(
          "solver", [](const Problem& p) { return to_string(p.config.solver); },
          [](Problem& p, const std::string& s) { p.config.solver = solver_kind_from_string(s); });

  m.def(
      "transport_matrix",
      [](const Problem& p, const std::string& material, int order, double fission_scale) {
        return assemble_transport_matrix(material_named(p, material), gauss_legendre(order), fission_scale).A;
      },
      py::arg("problem"), py::arg("material"), py::arg("order"), py::arg("fission_scale") = 0.0);

  m.def(
      "block_diagonalize",
      [](const Eigen::MatrixXd& A) {
        const auto s = block_diagonalize(A);
        std::vector<std::complex<double>> eig;
        for (const auto& b : s.blocks) {
          eig.push_back(b.eigenvalue());
          if (b.kind == SpectralBlock::Kind::complex_pair) eig.push_back(std::conj(b.eigenvalue()));
        }
        py::dict d;
        d["P"] = s.P;
        d["B"] = s.B();
        d["eigenvalues"] = eig;
        return d;
      },
      py::arg("A"));

  m.def(
      "fixed_source",
      [](const Problem& p, const py::object& source) {
        p.validate();
        const auto quad = gauss_legendre(p.config.sn_order);
        const auto mesh = build_fine_mesh(p.geometry, p.config.mesh_cells);
        const auto q = source_from(mesh, p.groups() * quad.size(), source);
        FluxField f;
        {
          py::gil_scoped_release release;
          if (p.config.solver == SolverKind::analytic) {
            const auto solver = AnalyticSolver::from_problem(p, quad, mesh, 0.0);
            f = solver.evaluate_centers(solver.solve(q));
          } else {
            const SweepSolver solver(p, quad, mesh, 0.0);
            auto sol = solver.solve(q, p.config.tolerance);
            f = make_flux_field(mesh.centers(), std::move(sol.psi), quad, p.groups());
          }
        }
        return flux_dict(f);
      },
      py::arg("problem"), py::arg("source") = py::float_(1.0),
      "Fixed-source solve (fission excluded). `source` is a number (flat), 'abs_x', or a cells x (G*N) array.");

  py::class_<EigenResult>(m, "EigenResult")
      .def_readonly("k_eff", &EigenResult::k_eff)
      .def_readonly("iterations", &EigenResult::iterations)
      .def_readonly("setup_seconds", &EigenResult::setup_seconds)
      .def_readonly("solve_seconds", &EigenResult::solve_seconds)
      .def_readonly("inner_sweeps", &EigenResult::inner_sweeps)
      .def_property_readonly("history",
                             [](const EigenResult& r) {
                               py::list out;
                               for (const auto& h : r.history)
                                 out.append(py::make_tuple(h.iteration, h.k, h.flux_change, h.seconds));
                               return out;
                             })
      .def_property_readonly("flux", [](const EigenResult& r) { return flux_dict(r.flux); })
      .def("to_json", &result_json);

  m.def(
      "power_iteration",
      [](const Problem& p, double initial_scale) {
        PowerIterationOptions opt;
        opt.initial_scale = initial_scale;
        py::gil_scoped_release release;
        return power_iteration(p, opt);
      },
      py::arg("problem"), py::arg("initial_scale") = 1.0);
}
