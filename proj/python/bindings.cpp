#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "qpf/coupling_graph.hpp"
#include "qpf/cycles.hpp"
#include "qpf/errors.hpp"
#include "qpf/oracles.hpp"
#include "qpf/potential.hpp"
#include "qpf/series.hpp"
#include "qpf/thermal.hpp"

namespace py = pybind11;
using namespace qpf;

namespace {

py::object fraction(const Rational& q) {
  static py::object cls = py::module_::import("fractions").attr("Fraction");
  return cls(q.str());
}

CouplingGraph graph_from(int vertices, const std::vector<std::pair<int, int>>& edges) {
  return CouplingGraph::from_edge_list(vertices, edges);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Canonical partition functions of bosons and fermions on a torus as Fourier series.";

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<InternalError>(m, "InternalError", PyExc_RuntimeError);

  py::enum_<Statistics>(m, "Statistics")
      .value("bose", Statistics::bose)
      .value("fermi", Statistics::fermi);

  py::class_<SystemParams>(m, "SystemParams")
      .def(py::init([](int n, int d, double l, double beta, double lambda_, Statistics s) {
             SystemParams p{n, d, l, beta, lambda_, s};
             p.validate();
             return p;
           }),
           py::arg("N"), py::arg("d") = 1, py::arg("L") = 1.0, py::arg("beta") = 1.0,
           py::arg("lambda_") = 1.0, py::arg("statistics") = Statistics::bose)
      .def_readwrite("N", &SystemParams::particles)
      .def_readwrite("d", &SystemParams::dim)
      .def_readwrite("L", &SystemParams::box_length)
      .def_readwrite("beta", &SystemParams::beta)
      .def_readwrite("lambda_", &SystemParams::lambda)
      .def_readwrite("statistics", &SystemParams::statistics)
      .def("cycle_coefficient", &SystemParams::cycle_coefficient)
      .def("__repr__", [](const SystemParams& p) {
        return "SystemParams(N=" + std::to_string(p.particles) + ", d=" + std::to_string(p.dim) +
               ", L=" + std::to_string(p.box_length) + ", beta=" + std::to_string(p.beta) +
               ", lambda_=" + std::to_string(p.lambda) + ", statistics=" +
               std::string(to_string(p.statistics)) + ")";
      });

  py::class_<TruncationPolicy>(m, "TruncationPolicy")
      .def(py::init([](int alpha_max, int z_radius, int coeff_bound, int quad_nodes, double theta_tol,
                       int threads) {
             TruncationPolicy p{alpha_max, z_radius, coeff_bound, quad_nodes, theta_tol, threads};
             p.validate();
             return p;
           }),
           py::arg("alpha_max") = 2, py::arg("z_radius") = 6, py::arg("coeff_bound") = -1,
           py::arg("quad_nodes") = 12, py::arg("theta_tol") = kDefaultThetaTol, py::arg("threads") = 1)
      .def_readwrite("alpha_max", &TruncationPolicy::alpha_max)
      .def_readwrite("z_radius", &TruncationPolicy::z_radius)
      .def_readwrite("coeff_bound", &TruncationPolicy::coeff_bound)
      .def_readwrite("quad_nodes", &TruncationPolicy::quad_nodes)
      .def_readwrite("theta_tol", &TruncationPolicy::theta_tol)
      .def_readwrite("threads", &TruncationPolicy::threads);

  py::class_<DualPotential>(m, "DualPotential")
      .def_static("zero", &DualPotential::zero, py::arg("d"))
      .def_static("gaussian", &DualPotential::gaussian, py::arg("d"), py::arg("g"), py::arg("a"))
      .def_static("tabulated", &DualPotential::tabulated, py::arg("d"), py::arg("L"), py::arg("values"))
      .def_static("load_table_file", &DualPotential::load_table_file, py::arg("path"), py::arg("L"))
      .def_property_readonly("d", &DualPotential::dim)
      .def("u_hat", [](const DualPotential& p, std::vector<double> v) { return p.u_hat(v); })
      .def("at_lattice", [](const DualPotential& p, std::vector<int> z, double l) { return p.at_lattice(z, l); });

  py::class_<EvaluationResult>(m, "EvaluationResult")
      .def_readonly("Q", &EvaluationResult::Q)
      .def_readonly("log_abs_Q", &EvaluationResult::log_abs_Q)
      .def_readonly("sign", &EvaluationResult::sign)
      .def_readonly("prefactor", &EvaluationResult::prefactor)
      .def_readonly("breakdown", &EvaluationResult::breakdown)
      .def_readonly("term_count", &EvaluationResult::term_count)
      .def_readonly("skipped_invalid_alpha", &EvaluationResult::skipped_invalid_alpha)
      .def_readonly("tail_bound_estimate", &EvaluationResult::tail_bound_estimate);

  m.def("theta_sum", py::overload_cast<double, int, double>(&theta_sum), py::arg("c"), py::arg("d"),
        py::arg("tol") = kDefaultThetaTol);
  m.def("theta_sum_shifted",
        [](double c, std::vector<double> shift, double tol) { return theta_sum(c, shift, tol); },
        py::arg("c"), py::arg("shift"), py::arg("tol") = kDefaultThetaTol);
  m.def("ideal_gas_Q", &ideal_gas_Q, py::arg("params"));
  m.def("mean_field_Q", &mean_field_Q, py::arg("params"), py::arg("potential"));
  m.def("evaluate_Q", &evaluate_Q, py::arg("params"), py::arg("potential"),
        py::arg("policy") = TruncationPolicy{}, py::arg("max_particles") = kDefaultMaxParticles,
        py::call_guard<py::gil_scoped_release>());
  m.def("evaluate_G",
        [](std::vector<int> lengths, const SystemParams& p, const DualPotential& pot, const TruncationPolicy& policy) {
          return evaluate_G(CycleStructure{std::move(lengths)}, p, pot, policy);
        },
        py::arg("cycle_lengths"), py::arg("params"), py::arg("potential"), py::arg("policy") = TruncationPolicy{});

  m.def("unity_check", [](int n) {
    const auto s = unity_check(n);
    return py::make_tuple(fraction(s.partition_sum), fraction(s.composition_sum));
  }, py::arg("N"));
  m.def("cycle_types", [](int n) {
    py::list out;
    for (const auto& w : enumerate_cycle_types(n)) out.append(py::make_tuple(w.cycles.lengths, fraction(w.weight)));
    return out;
  }, py::arg("N"));

  m.def("is_valid_merger", [](int v, const std::vector<std::pair<int, int>>& e) {
    return is_valid_merger(graph_from(v, e));
  }, py::arg("vertices"), py::arg("edges"));
  m.def("bridge_edges", [](int v, const std::vector<std::pair<int, int>>& e) {
    return bridge_edges(graph_from(v, e));
  }, py::arg("vertices"), py::arg("edges"));
  m.def("constraint_rank", [](int v, const std::vector<std::pair<int, int>>& e) {
    const auto r = constraint_rank(graph_from(v, e));
    return py::make_tuple(r.rank, r.components);
  }, py::arg("vertices"), py::arg("edges"));
  m.def("nonzero_solution", [](int v, const std::vector<std::pair<int, int>>& e) {
    return nonzero_scalar_solution(graph_from(v, e));
  }, py::arg("vertices"), py::arg("edges"));

  m.def("exact_Q2", [](const SystemParams& p, const DualPotential& pot, int cutoff) {
    ExactDiagResult r;
    {
      py::gil_scoped_release unlocked;
      r = exact_Q2(p, pot, cutoff);
    }
    return py::dict(py::arg("Q") = r.Q, py::arg("boundary_weight") = r.boundary_weight,
                    py::arg("cutoff_adequate") = r.cutoff_adequate);
  }, py::arg("params"), py::arg("potential"), py::arg("cutoff") = 32);
  m.def("matrix_A_check", [](int mm) {
    const auto r = matrix_A_check(mm);
    return py::dict(py::arg("m") = r.m, py::arg("inverse_exact") = r.inverse_exact,
                    py::arg("eigenpairs_ok") = r.eigenpairs_ok, py::arg("degeneracy_ok") = r.degeneracy_ok,
                    py::arg("max_residual") = r.max_residual, py::arg("passed") = r.passed());
  }, py::arg("m"));
}
