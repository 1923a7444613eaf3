#include "banachproj/cli.hpp"
#include "banachproj/convex_sets.hpp"
#include "banachproj/derivatives.hpp"
#include "banachproj/json_io.hpp"
#include "banachproj/lp_space.hpp"
#include "banachproj/moduli.hpp"
#include "banachproj/numdiff.hpp"
#include "banachproj/projection_solver.hpp"

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

namespace py = pybind11;
using namespace banachproj;

namespace {

LpVector lp(const Eigen::VectorXd& x, double p) { return LpVector(x, Exponent(p)); }

ConvexSet parse(const std::string& set_json, std::size_t n, double p) {
  return parse_set(Json::parse(set_json), n, Exponent(p));
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Metric projections in finite-dimensional l_p spaces";

  auto base = py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
  py::register_exception<InfeasibleSet>(m, "InfeasibleSet", base.ptr());
  py::register_exception<SpaceMismatch>(m, "SpaceMismatch", PyExc_ValueError);
  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<NonConvergence>(m, "NonConvergence", PyExc_RuntimeError);

  m.def("norm", [](const Eigen::VectorXd& x, double p) { return lp_norm(lp(x, p)); }, py::arg("x"), py::arg("p"));
  m.def(
      "duality_map", [](const Eigen::VectorXd& x, double p) { return Eigen::VectorXd(duality_map(lp(x, p)).coords()); },
      py::arg("x"), py::arg("p"));
  m.def(
      "inverse_duality_map",
      [](const Eigen::VectorXd& phi, double p) {
        return Eigen::VectorXd(inverse_duality_map(DualVector(phi, Exponent(p))).coords());
      },
      py::arg("phi"), py::arg("p"));
  m.def(
      "psi", [](const Eigen::VectorXd& x, const Eigen::VectorXd& v, double p) { return psi_smoothness(lp(x, p), lp(v, p)); },
      py::arg("x"), py::arg("v"), py::arg("p"));
  m.def(
      "xi",
      [](const Eigen::VectorXd& x, const Eigen::VectorXd& v, double p) {
        const XiEstimate e = xi_smoothness(lp(x, p), lp(v, p));
        return py::make_tuple(e.value, e.converged);
      },
      py::arg("x"), py::arg("v"), py::arg("p"));

  m.def(
      "project",
      [](const std::string& set_json, const Eigen::VectorXd& x, double p) {
        const ConvexSet c = parse(set_json, static_cast<std::size_t>(x.size()), p);
        return Eigen::VectorXd(project(c, lp(x, p)).coords());
      },
      py::arg("set_json"), py::arg("x"), py::arg("p"));
  m.def(
      "certified_projection",
      [](const std::string& set_json, const Eigen::VectorXd& x, double p) {
        const ConvexSet c = parse(set_json, static_cast<std::size_t>(x.size()), p);
        return dump_json(to_json(certified_projection(c, lp(x, p))));
      },
      py::arg("set_json"), py::arg("x"), py::arg("p"));
  m.def(
      "variational_residual",
      [](const std::string& set_json, const Eigen::VectorXd& x, const Eigen::VectorXd& u, double p) {
        const ConvexSet c = parse(set_json, static_cast<std::size_t>(x.size()), p);
        return variational_residual(c, lp(x, p), lp(u, p));
      },
      py::arg("set_json"), py::arg("x"), py::arg("u"), py::arg("p"));
  m.def(
      "derivative",
      [](const std::string& set_json, const Eigen::VectorXd& x, const Eigen::VectorXd& v, double p) {
        const ConvexSet c = parse(set_json, static_cast<std::size_t>(x.size()), p);
        return dump_json(to_json(derivative(c, lp(x, p), lp(v, p))));
      },
      py::arg("set_json"), py::arg("x"), py::arg("v"), py::arg("p"));
  m.def(
      "numdiff",
      [](const std::string& set_json, const Eigen::VectorXd& x, const Eigen::VectorXd& v, double p) {
        const ConvexSet c = parse(set_json, static_cast<std::size_t>(x.size()), p);
        const Projector proj = [&c](const LpVector& z) { return project(c, z); };
        return dump_json(to_json(numdiff_derivative(proj, lp(x, p), lp(v, p))));
      },
      py::arg("set_json"), py::arg("x"), py::arg("v"), py::arg("p"));
  m.def(
      "estimate_moduli",
      [](double p, std::size_t n, std::size_t budget, std::uint64_t seed, unsigned threads) {
        ModuliOptions o;
        o.budget = budget;
        o.seed = seed;
        o.threads = threads == 0 ? configured_threads() : threads;
        const auto grid = default_moduli_grid();
        py::gil_scoped_release release;
        return dump_json(to_json(estimate_moduli(p, n, grid, grid, o)));
      },
      py::arg("p"), py::arg("n") = 2, py::arg("budget") = 100000, py::arg("seed") = 0, py::arg("threads") = 0);
  m.def(
      "run_config",
      [](const std::string& config_json) -> py::tuple {
        std::ostringstream out, err;
        int code;
        try {
          code = run_config(Json::parse(config_json), out, err);
        } catch (const Json::exception& e) {
          return py::make_tuple(static_cast<int>(kExitMalformed), std::string(), std::string(e.what()));
        }
        return py::make_tuple(code, out.str(), err.str());
      },
      py::arg("config_json"));
}
