#include "fwflow/analysis.hpp"
#include "fwflow/avgfw.hpp"
#include "fwflow/bench.hpp"
#include "fwflow/multistep.hpp"

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace fwflow;

namespace {

py::dict trace_to_dict(const Trace& t) {
    std::vector<long> k, calls;
    std::vector<double> f, gap, step;
    for (const auto& r : t.records) {
        k.push_back(r.k);
        calls.push_back(r.grad_calls);
        f.push_back(r.f_value);
        gap.push_back(r.duality_gap);
        step.push_back(r.step_size);
    }
    py::dict d;
    d["problem_id"] = t.problem_id;
    d["solver_id"] = t.solver_id;
    d["f_star"] = t.f_star;
    d["k"] = py::array(py::cast(k));
    d["grad_calls"] = py::array(py::cast(calls));
    d["f"] = py::array(py::cast(f));
    d["gap"] = py::array(py::cast(gap));
    d["step"] = py::array(py::cast(step));
    return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Frank-Wolfe solvers, multistep and averaged variants";

    m.def(
        "run_experiment",
        [](const std::string& config_json) {
            auto cfg = config_from_json(nlohmann::json::parse(config_json));
            validate_config(cfg);
            py::gil_scoped_release release;
            auto result = run_experiment(cfg);
            py::gil_scoped_acquire acquire;
            py::dict d = trace_to_dict(result.trace);
            d["files"] = result.files;
            return d;
        },
        py::arg("config_json"), "Runs one experiment from a JSON config and returns its trace.");

    m.def(
        "certificate",
        [](const std::string& tableau, double c, long k) {
            const auto cert = build_certificate(RKTableau::by_name(tableau), c, k);
            py::dict d;
            d["z"] = Vector(cert.z);
            d["feasible"] = cert.feasible;
            return d;
        },
        py::arg("tableau"), py::arg("c") = 2.0, py::arg("k") = 0);

    m.def(
        "averaging_weights", [](double c, double p, long k) { return averaging_weights(AveragingSchedule{c, p}, k); },
        py::arg("c"), py::arg("p"), py::arg("k"));

    m.def(
        "zigzag_energy",
        [](const Eigen::Ref<const Matrix>& points, int window) {
            std::vector<Vector> pts;
            for (Eigen::Index i = 0; i < points.rows(); ++i) pts.emplace_back(points.row(i).transpose());
            return zigzag_energy(pts, window).mean_energy;
        },
        py::arg("points"), py::arg("window"), "Mean zig-zag energy of a trajectory given as rows.");

    m.def(
        "fit_power_law",
        [](const std::vector<double>& ks, const std::vector<double>& values) {
            const auto fit = fit_power_law(ks, values);
            return py::make_tuple(fit.slope, fit.intercept, fit.r_squared);
        },
        py::arg("ks"), py::arg("values"), "Least-squares fit of log values against log k: (slope, intercept, r2).");

    m.def("flow_bound", &flow_bound, py::arg("e0"), py::arg("c"), py::arg("t"));
    m.attr("solvers") = solver_names();
    m.attr("generators") = generator_names();
}
