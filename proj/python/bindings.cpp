// Python bindings: scenario-level entry points returning numpy arrays and dicts.

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <string>
#include <vector>

#include "ultraheat/boundary.hpp"
#include "ultraheat/errors.hpp"
#include "ultraheat/evolution.hpp"
#include "ultraheat/expr.hpp"
#include "ultraheat/operators.hpp"
#include "ultraheat/scenario.hpp"
#include "ultraheat/stochastic.hpp"

namespace py = pybind11;
using namespace ultraheat;

namespace {

py::dict report_dict(const EvolutionReport& r) {
    py::dict d;
    d["method"] = to_string(r.method);
    d["tag"] = r.tag();
    d["vertex_values"] = Eigen::VectorXcd(r.result.vertex_values());
    d["wavelet_coeffs"] = Eigen::VectorXcd(r.result.wavelet_coeffs());
    d["cells"] = Eigen::VectorXcd(to_cells(r.result).values);
    d["steps"] = r.steps;
    d["quadrature_k"] = r.quadrature_k;
    d["commutation_defect"] = r.commutation_defect;
    d["warnings"] = r.warnings;
    return d;
}

QuadratureConfig quadrature(const Scenario& sc, std::optional<int> k) {
    QuadratureConfig q = sc.quadrature;
    if (k) q.subintervals = *k;
    q.validate();
    return q;
}

}  // namespace

PYBIND11_MODULE(_ultraheat, m) {
    m.doc() = "Non-autonomous p-adic diffusion on time-dependent graphs";

    // Later registrations take precedence, so the subclasses come after the base.
    const auto base = py::register_exception<Error>(m, "UltraheatError", PyExc_RuntimeError);
    py::register_exception<ValidationError>(m, "ValidationError", base.ptr());
    py::register_exception<NumericalRefusal>(m, "NumericalRefusal", base.ptr());

    py::class_<Expr>(m, "Expr")
        .def_static("parse", &Expr::parse, py::arg("source"))
        .def("eval", &Expr::eval, py::arg("t"))
        .def("tree", &Expr::tree)
        .def("__str__", &Expr::to_string);

    py::class_<Scenario>(m, "Scenario")
        .def_readonly("prime", &Scenario::prime)
        .def_readonly("vertices", &Scenario::vertices)
        .def_readonly("resolution", &Scenario::resolution)
        .def_readonly("window_s", &Scenario::window_s)
        .def_readonly("window_t", &Scenario::window_t)
        .def_property_readonly("level", [](const Scenario& s) { return s.embedding.level; })
        .def("snapshot",
             [](const Scenario& s, double t) {
                 const Snapshot snap = s.graph().snapshot(t);
                 py::dict d;
                 d["adjacency"] = snap.adjacency;
                 d["degree"] = snap.degree;
                 d["laplacian"] = snap.laplacian;
                 return d;
             },
             py::arg("t"))
        .def("spectrum",
             [](const Scenario& s, double t) {
                 const SpectralFrame f = spectral_frame(s.graph(), t);
                 return py::make_tuple(f.eigenvalues, f.modal);
             },
             py::arg("t"));

    m.def("parse_scenario", &parse_scenario, py::arg("json_text"));
    m.def("load_scenario", &load_scenario, py::arg("path"));

    m.def(
        "evolve",
        [](const Scenario& sc, const std::string& method, std::optional<double> s, std::optional<double> t, int steps,
           std::optional<int> quad_k) {
            const TimeGraph g = sc.graph();
            const double from = s.value_or(sc.window_s);
            const double to = t.value_or(sc.window_t);
            return report_dict(evolve(parse_method(method), g, from, to, sc.initial_function(), quadrature(sc, quad_k), steps));
        },
        py::arg("scenario"), py::arg("method") = "closed", py::arg("s") = py::none(), py::arg("t") = py::none(),
        py::arg("steps") = 1024, py::arg("quad_k") = py::none());

    m.def(
        "trotter_sweep",
        [](const Scenario& sc, const std::vector<int>& steps) {
            const TrotterSweep r = trotter_error_sweep(sc.graph(), sc.window_s, sc.window_t, sc.initial_function(), steps,
                                                       sc.quadrature);
            py::dict d;
            d["reference"] = to_string(r.reference);
            d["steps"] = r.steps;
            d["errors"] = r.errors;
            d["slope"] = r.slope;
            return d;
        },
        py::arg("scenario"), py::arg("steps"));

    m.def(
        "bound_report",
        [](const Scenario& sc, std::optional<double> t, std::optional<int> resolution) {
            const TimeGraph g = sc.graph();
            const Region s = sc.region_set();
            const BoundReport r = bound_report(g, s, t.value_or(sc.window_s), resolution.value_or(s.finest_scale() + 1),
                                               sc.quotient);
            py::dict d;
            d["dirichlet"] = r.dirichlet;
            d["vonneumann"] = r.vonneumann;
            d["graph_dirichlet"] = r.graph_dirichlet;
            d["graph_vonneumann"] = r.graph_vonneumann;
            d["gamma_hat"] = r.gamma_hat;
            d["dirichlet_le_graph"] = r.dirichlet_le_graph;
            d["dirichlet_le_gamma_hat"] = r.dirichlet_le_gamma_hat;
            d["graph_min_le_one"] = r.graph_min_le_one;
            d["gamma_hat_lt_graph_dirichlet"] = r.gamma_hat_lt_graph_dirichlet;
            d["vonneumann_le_graph"] = r.vonneumann_le_graph;
            d["vonneumann_le_gamma_hat"] = r.vonneumann_le_gamma_hat;
            d["vonneumann_lt_graph"] = r.vonneumann_lt_graph;
            return d;
        },
        py::arg("scenario"), py::arg("t") = py::none(), py::arg("resolution") = py::none());

    m.def(
        "heat_kernel",
        [](const Scenario& sc, std::optional<std::string> start) {
            const PAdic x = parse_point(sc.embedding, start.value_or(sc.stochastic.start));
            return heat_kernel_ball_probs(sc.graph(), sc.window_s, x, sc.window_t, sc.quadrature);
        },
        py::arg("scenario"), py::arg("start") = py::none());

    m.def(
        "validate_markov",
        [](const Scenario& sc, std::optional<std::size_t> paths, std::optional<std::uint64_t> seed) {
            const PAdic x = parse_point(sc.embedding, sc.stochastic.start);
            MarkovValidation v;
            {
                py::gil_scoped_release release;
                v = validate_markov(sc.graph(), sc.window_s, sc.window_t, x, paths.value_or(sc.stochastic.paths),
                                    seed.value_or(sc.stochastic.seed), sc.quadrature);
            }
            py::dict d;
            d["empirical"] = v.empirical.probabilities;
            d["analytic"] = v.analytic;
            d["tv_distance"] = v.tv_distance;
            d["survival_atom"] = v.empirical.survival_atom;
            d["survival_expected"] = v.survival_expected;
            d["survival_within_3sigma"] = v.survival_within_3sigma;
            d["ck_consistent"] = v.ck_consistent;
            return d;
        },
        py::arg("scenario"), py::arg("paths") = py::none(), py::arg("seed") = py::none());
}
