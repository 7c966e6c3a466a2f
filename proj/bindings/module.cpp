#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "senergy/adversary.hpp"
#include "senergy/apps.hpp"
#include "senergy/error.hpp"
#include "senergy/ledger.hpp"
#include "senergy/measure.hpp"
#include "senergy/reduction.hpp"
#include "senergy/simulate.hpp"
#include "senergy/trace.hpp"

namespace py = pybind11;
using namespace senergy;

namespace {

StepGraph edge_graph(std::size_t n, const std::vector<StepGraph::Arc>& edges) {
    return StepGraph::undirected(n, edges);
}

std::vector<std::pair<double, double>> intervals(const std::vector<Interval>& iv) {
    std::vector<std::pair<double, double>> out;
    for (const auto& i : iv) out.emplace_back(i.lo, i.hi);
    return out;
}

std::string to_jsonl(const Trace& t) {
    std::ostringstream os;
    write_trace(os, t);
    return os.str();
}

Trace from_jsonl(const std::string& text) {
    std::istringstream is(text);
    return read_trace(is);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "s-energy of averaging systems";

    py::register_exception<Error>(m, "SenergyError", PyExc_ValueError);

    m.def(
        "interval_union",
        [](const std::vector<double>& x, const std::vector<StepGraph::Arc>& edges) {
            return intervals(interval_union(edge_graph(x.size(), edges), Configuration(x)));
        },
        py::arg("positions"), py::arg("edges"));
    m.def(
        "step_energy",
        [](const std::vector<double>& x, const std::vector<StepGraph::Arc>& edges, double s) {
            return step_energy(interval_union(edge_graph(x.size(), edges), Configuration(x)), s);
        },
        py::arg("positions"), py::arg("edges"), py::arg("s"));
    m.def(
        "validate_step",
        [](const std::vector<double>& x, const std::vector<StepGraph::Arc>& edges, const std::vector<double>& y,
           double rho, double tol) {
            const auto r = validate_averaging_step(Configuration(x), edge_graph(x.size(), edges), Configuration(y),
                                                   AveragingParams(rho, tol));
            return r.ok() ? std::string() : r.describe();
        },
        py::arg("before"), py::arg("edges"), py::arg("after"), py::arg("rho"), py::arg("tol") = kDefaultTolerance,
        "Empty string when the step is valid, otherwise a description of the violations.");

    m.def("bound_theorem1", &bound_theorem1, py::arg("n"), py::arg("rho"), py::arg("s"));
    m.def(
        "bound_comm", [](std::size_t n, double rho, double eps) { return bound_comm(n, rho, eps).bound; },
        py::arg("n"), py::arg("rho"), py::arg("eps"));
    m.def("ineq_sx", &ineq_sx, py::arg("s"), py::arg("x"));

    py::class_<Trace>(m, "Trace")
        .def_property_readonly("n", [](const Trace& t) { return t.n; })
        .def_property_readonly("rho", [](const Trace& t) { return t.params.rho; })
        .def_property_readonly("kind", [](const Trace& t) { return std::string(to_string(t.kind)); })
        .def("__len__", [](const Trace& t) { return t.records.size(); })
        .def("positions",
             [](const Trace& t) {
                 std::vector<std::vector<double>> out;
                 if (t.records.empty()) return out;
                 out.push_back(t.records.front().before.by_id());
                 for (const auto& r : t.records) out.push_back(r.after.by_id());
                 return out;
             })
        .def("to_jsonl", &to_jsonl)
        .def_static("from_jsonl", &from_jsonl)
        .def("check", [](const Trace& t) {
            const auto c = check_trace(t);
            return c.ok ? std::string() : c.message;
        });

    m.def(
        "simulate",
        [](std::size_t n, double rho, const std::string& policy, const std::string& graph, double edge_prob,
           std::size_t steps_cap, double diameter_cutoff, std::uint64_t seed) {
            Rng rng(seed);
            const auto initial = random_configuration(n, rng);
            return simulate(initial, AveragingParams(rho), GraphModel{parse_graph_model(graph), edge_prob},
                            parse_policy(policy), SimulationLimits{steps_cap, diameter_cutoff}, rng);
        },
        py::arg("n"), py::arg("rho"), py::arg("policy") = "midpoint", py::arg("graph") = "erdos-renyi",
        py::arg("edge_prob") = 0.3, py::arg("steps_cap") = 100000, py::arg("diameter_cutoff") = 1e-12,
        py::arg("seed") = 1);
    m.def("reduce", &reduce_trace, py::arg("trace"));
    m.def(
        "energy",
        [](const Trace& t, const std::vector<double>& s) { return accumulate(t, s).totals; },
        py::arg("trace"), py::arg("s"));
    m.def("comm_count", &comm_count, py::arg("trace"), py::arg("eps"));
    m.def(
        "certify",
        [](const Trace& t, double s) {
            const auto c = certify(t, s);
            py::dict d;
            d["steps"] = c.steps;
            d["injected"] = c.injected;
            d["spent"] = c.spent;
            d["discarded"] = c.discarded;
            d["balance"] = c.balance;
            d["conservation_gap"] = c.conservation_gap;
            return d;
        },
        py::arg("trace"), py::arg("s"));

    m.def(
        "lower_bound_trajectory", [](std::size_t n, double rho, double eps) { return lb_trajectory(n, rho, eps).trace; },
        py::arg("n"), py::arg("rho"), py::arg("eps"));
    m.def(
        "lb_recurrence_b", [](std::size_t n, double eps, double rho) { return lb_recurrence_b(n, eps, rho).count; },
        py::arg("n"), py::arg("eps"), py::arg("rho"));
    m.def("lb_recurrence_a", &lb_recurrence_a, py::arg("n"), py::arg("s"), py::arg("rho"));
    m.def(
        "sandwich",
        [](std::size_t n, double rho, double eps) {
            const auto r = lb_sandwich(n, rho, eps);
            py::dict d;
            d["lower"] = r.lower;
            d["measured"] = r.measured;
            d["upper"] = r.upper;
            d["ordered"] = r.ordered();
            return d;
        },
        py::arg("n"), py::arg("rho"), py::arg("eps"));

    m.def(
        "kuramoto_step",
        [](const std::vector<double>& thetas, const std::vector<StepGraph::Arc>& edges, double K, double dt) {
            KuramotoState st;
            st.thetas = thetas;
            st.K = K;
            st.dt = dt;
            return kuramoto_step(st, edge_graph(thetas.size(), edges)).next.thetas;
        },
        py::arg("thetas"), py::arg("edges"), py::arg("K"), py::arg("dt"));
}
