#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "palm/algorithm.hpp"
#include "palm/io.hpp"
#include "palm/lp.hpp"
#include "palm/model.hpp"
#include "palm/oracle.hpp"
#include "palm/reformulation.hpp"

namespace py = pybind11;
using namespace palm;

PYBIND11_MODULE(_core, m) {
  m.doc() = "Penalty adaptive linearization for bilevel programs with bilinear lower levels";

  py::register_exception<DimensionError>(m, "DimensionError", PyExc_ValueError);
  py::register_exception<NumericalFailure>(m, "NumericalFailure", PyExc_RuntimeError);
  py::register_exception<OracleError>(m, "OracleError", PyExc_RuntimeError);
  py::register_exception<InputError>(m, "InputError", PyExc_ValueError);

  py::class_<BilevelInstance>(m, "BilevelInstance")
      .def(py::init<>())
      .def_readwrite("name", &BilevelInstance::name)
      .def_readwrite("m", &BilevelInstance::m)
      .def_readwrite("n", &BilevelInstance::n)
      .def_readwrite("p", &BilevelInstance::p)
      .def_readwrite("r", &BilevelInstance::r)
      .def_readwrite("C", &BilevelInstance::C)
      .def_readwrite("b", &BilevelInstance::b)
      .def_readwrite("e", &BilevelInstance::e)
      .def_readwrite("P", &BilevelInstance::P)
      .def_readwrite("x0", &BilevelInstance::x0)
      .def_readwrite("cu", &BilevelInstance::cu)
      .def_readwrite("d", &BilevelInstance::d)
      .def_readwrite("Au", &BilevelInstance::Au)
      .def_readwrite("B", &BilevelInstance::B)
      .def_readwrite("a", &BilevelInstance::a)
      .def("__repr__", [](const BilevelInstance& i) {
        return "<BilevelInstance '" + i.name + "' m=" + std::to_string(i.m) + " n=" +
               std::to_string(i.n) + " p=" + std::to_string(i.p) + " r=" + std::to_string(i.r) + ">";
      });

  m.def("example_instance", &example_instance);
  m.def("validate", &validate, py::arg("instance"));
  m.def("vec", [](const Matrix& X) -> Vector { return vec(X); }, py::arg("X"));
  m.def("materialize_X", &materialize_X, py::arg("instance"), py::arg("u"));
  m.def("load_instance", &load_instance, py::arg("path"));
  m.def("parse_instance", &parse_instance, py::arg("text"));
  m.def("dump_instance", &dump_instance, py::arg("instance"));

  py::enum_<LpStatus>(m, "LpStatus")
      .value("Optimal", LpStatus::Optimal)
      .value("Infeasible", LpStatus::Infeasible)
      .value("Unbounded", LpStatus::Unbounded);

  py::class_<LpProblem>(m, "LpProblem")
      .def(py::init(&LpProblem::free_vars), py::arg("nvars"))
      .def_readwrite("nvars", &LpProblem::nvars)
      .def_readwrite("cost", &LpProblem::cost)
      .def_readwrite("G", &LpProblem::G)
      .def_readwrite("h", &LpProblem::h)
      .def_readwrite("H", &LpProblem::H)
      .def_readwrite("k", &LpProblem::k)
      .def_readwrite("lower_bounds", &LpProblem::lower_bounds)
      .def("add_ineq", [](LpProblem& lp, const Vector& row, double rhs) { lp.add_ineq(row, rhs); })
      .def("add_eq", [](LpProblem& lp, const Vector& row, double rhs) { lp.add_eq(row, rhs); })
      .def("__str__", [](const LpProblem& lp) { return dump(lp); });

  py::class_<LpSolution>(m, "LpSolution")
      .def_readonly("status", &LpSolution::status)
      .def_readonly("w", &LpSolution::w)
      .def_readonly("objective", &LpSolution::objective)
      .def_readonly("duals", &LpSolution::duals)
      .def_readonly("iterations", &LpSolution::iterations);

  m.def("solve_lp", &solve_lp, py::arg("lp"));
  m.def(
      "solve_closest",
      [](const LpProblem& lp, const Vector& prev, const std::vector<Index>& measured) {
        return solve_closest(lp, prev, measured);
      },
      py::arg("lp"), py::arg("prev"), py::arg("measured") = std::vector<Index>{});

  py::class_<Expansion>(m, "Expansion")
      .def_readonly("exact", &Expansion::exact)
      .def_readonly("approx", &Expansion::approx)
      .def_readonly("dropped", &Expansion::dropped);
  m.def("linearize_expansion", &linearize_expansion, py::arg("X_bar"), py::arg("y_bar"),
        py::arg("dX"), py::arg("dy"));

  py::class_<Iterate>(m, "Iterate")
      .def_readonly("u_bar", &Iterate::u_bar)
      .def_readonly("y_bar", &Iterate::y_bar)
      .def_readonly("lambda_bar", &Iterate::lambda_bar);

  py::class_<PalmConfig>(m, "PalmConfig")
      .def(py::init<>())
      .def_readwrite("mu0", &PalmConfig::mu0)
      .def_readwrite("growth", &PalmConfig::growth)
      .def_readwrite("eps_opt", &PalmConfig::eps_opt)
      .def_readwrite("eps_apx", &PalmConfig::eps_apx)
      .def_readwrite("max_outer", &PalmConfig::max_outer)
      .def_readwrite("max_inner", &PalmConfig::max_inner)
      .def_readwrite("u0", &PalmConfig::u0);

  py::enum_<PalmStatus>(m, "PalmStatus")
      .value("Converged", PalmStatus::Converged)
      .value("MaxOuterExceeded", PalmStatus::MaxOuterExceeded)
      .value("MasterInfeasible", PalmStatus::MasterInfeasible)
      .value("NumericalFailure", PalmStatus::NumericalFailure);

  py::class_<TraceRecord>(m, "TraceRecord")
      .def_readonly("outer_i", &TraceRecord::outer_i)
      .def_readonly("inner_j", &TraceRecord::inner_j)
      .def_readonly("mu", &TraceRecord::mu)
      .def_readonly("gap", &TraceRecord::gap)
      .def_readonly("dx_inf", &TraceRecord::dx_inf)
      .def_readonly("u_base", &TraceRecord::u_base)
      .def_readonly("u_bar", &TraceRecord::u_bar)
      .def_readonly("y_bar", &TraceRecord::y_bar)
      .def_readonly("lambda_bar", &TraceRecord::lambda_bar)
      .def_readonly("upper_objective", &TraceRecord::upper_objective)
      .def_readonly("inner_cap_hit", &TraceRecord::inner_cap_hit);

  py::class_<PalmResult>(m, "PalmResult")
      .def_readonly("status", &PalmResult::status)
      .def_readonly("iterate", &PalmResult::iterate)
      .def_readonly("gap", &PalmResult::gap)
      .def_readonly("upper_objective", &PalmResult::upper_objective)
      .def_readonly("outer_iterations", &PalmResult::outer_iterations)
      .def_readonly("certified", &PalmResult::certified)
      .def_readonly("detail", &PalmResult::detail)
      .def_readonly("trace", &PalmResult::trace);

  m.def("run_palm", &run_palm, py::arg("instance"), py::arg("config") = PalmConfig{},
        py::call_guard<py::gil_scoped_release>());

  py::class_<FeasibilityReport>(m, "FeasibilityReport")
      .def_readonly("primal_violation", &FeasibilityReport::primal_violation)
      .def_readonly("dual_violation", &FeasibilityReport::dual_violation)
      .def_readonly("upper_violation", &FeasibilityReport::upper_violation)
      .def_readonly("gap", &FeasibilityReport::gap);
  m.def(
      "check_bilevel_feasibility",
      [](const BilevelInstance& inst, const Vector& u, const Vector& y, const Vector& lambda) {
        return check_bilevel_feasibility(inst, Iterate{u, y, lambda});
      },
      py::arg("instance"), py::arg("u"), py::arg("y"), py::arg("lambda_"));

  py::enum_<OracleStatus>(m, "OracleStatus")
      .value("Optimal", OracleStatus::Optimal)
      .value("NoFeasiblePoint", OracleStatus::NoFeasiblePoint);

  py::class_<OracleResult>(m, "OracleResult")
      .def_readonly("status", &OracleResult::status)
      .def_readonly("best_u", &OracleResult::best_u)
      .def_readonly("best_y", &OracleResult::best_y)
      .def_readonly("best_objective", &OracleResult::best_objective)
      .def_readonly("feasible_points", &OracleResult::feasible_points)
      .def_readonly("evaluated_points", &OracleResult::evaluated_points);

  m.def(
      "run_oracle",
      [](const BilevelInstance& inst, const std::string& grid, double tol_lex, int threads) {
        const GridSpec spec = parse_grid(grid, inst.r);
        py::gil_scoped_release release;
        return run_oracle(inst, spec, tol_lex, threads);
      },
      py::arg("instance"), py::arg("grid"), py::arg("tol_lex") = kTolLex, py::arg("threads") = 1,
      "Grid search; `grid` uses the CLI syntax, e.g. 'u0=-0.5:0.5:0.001,u1=free'.");
}
