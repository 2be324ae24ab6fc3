/// @file module.cpp
/// @brief pybind11 surface: fields, config, single runs, ensembles, and the
///        scalar diagnostics. Enums cross the boundary as strings.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <string>
#include <vector>

#include "stfilm/diagnostics.hpp"
#include "stfilm/ensemble.hpp"
#include "stfilm/errors.hpp"
#include "stfilm/io.hpp"
#include "stfilm/splitting.hpp"

namespace py = pybind11;
using namespace stfilm;

namespace {

ShiftMethod shift_from_string(const std::string& s) {
    if (s == "spectral") return ShiftMethod::spectral;
    if (s == "cubic") return ShiftMethod::cubic;
    throw ConfigError("shift method must be 'spectral' or 'cubic', got '" + s + "'");
}

std::string shift_to_string(ShiftMethod m) {
    return m == ShiftMethod::spectral ? "spectral" : "cubic";
}

EdgeRule rule_from_string(const std::string& s) {
    if (s == "entropy_consistent") return EdgeRule::entropy_consistent;
    if (s == "arithmetic") return EdgeRule::arithmetic;
    if (s == "harmonic") return EdgeRule::harmonic;
    throw ConfigError("averaging must be 'entropy_consistent', 'arithmetic' or 'harmonic'");
}

std::string rule_to_string(EdgeRule r) {
    switch (r) {
    case EdgeRule::entropy_consistent: return "entropy_consistent";
    case EdgeRule::arithmetic: return "arithmetic";
    default: return "harmonic";
    }
}

InitialCondition ic_from_string(const std::string& s) {
    if (s == "constant") return InitialCondition::constant;
    if (s == "sine_bump") return InitialCondition::sine_bump;
    if (s == "gaussian_bump") return InitialCondition::gaussian_bump;
    if (s == "from_file") return InitialCondition::from_file;
    throw ConfigError("unknown initial condition '" + s + "'");
}

std::string ic_to_string(InitialCondition ic) {
    switch (ic) {
    case InitialCondition::constant: return "constant";
    case InitialCondition::sine_bump: return "sine_bump";
    case InitialCondition::gaussian_bump: return "gaussian_bump";
    default: return "from_file";
    }
}

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Stochastic thin-film equation simulator (periodic 1-D, "
              "entropy-stable operator splitting)";

    py::register_exception<SimError>(m, "SimError");

    py::class_<Field>(m, "Field")
        .def(py::init([](double L, int n, const std::vector<double>& values) {
                 const GridPtr g = TorusGrid::make(L, n);
                 if (static_cast<int>(values.size()) != n)
                     throw ConfigError("values has " + std::to_string(values.size()) +
                                       " entries, grid has " + std::to_string(n));
                 return Field(g, values);
             }),
             py::arg("L"), py::arg("n"), py::arg("values"))
        .def_property_readonly("L", [](const Field& f) { return f.grid->L; })
        .def_property_readonly("n", [](const Field& f) { return f.grid->n; })
        .def_property_readonly("h", [](const Field& f) { return f.grid->h; })
        .def_property_readonly("x", [](const Field& f) { return f.grid->x; })
        .def_property_readonly("values", [](const Field& f) { return f.v; })
        .def("__len__", [](const Field& f) { return f.v.size(); })
        .def("__getitem__", [](const Field& f, int j) {
            if (j < 0 || j >= f.size()) throw py::index_error();
            return f[j];
        });

    m.def("mean", &mean, py::arg("field"));
    m.def("min_value", &min_value, py::arg("field"));
    m.def("max_value", &max_value, py::arg("field"));
    m.def("energy_J", &energy_J, py::arg("field"));
    m.def("sup_deviation", &sup_deviation, py::arg("field"), py::arg("ref_mean"));
    m.def(
        "sobolev_constant", [](const Field& f) { return sobolev_constant(*f.grid); },
        py::arg("field"));
    m.def(
        "stochastic_shift",
        [](const Field& f, double delta_beta, const std::string& method) {
            return stochastic_shift(f, delta_beta, shift_from_string(method));
        },
        py::arg("field"), py::arg("delta_beta"), py::arg("method") = "spectral");
    m.def(
        "k_epsilon",
        [](double epsilon, double theta, double K_bound) {
            const KEps k = k_epsilon(epsilon, theta, K_bound);
            return py::make_tuple(k.value, k.limit);
        },
        py::arg("epsilon"), py::arg("theta"), py::arg("K_bound"),
        "returns (value, zero-epsilon limit)");

    py::class_<DiagnosticsRecord>(m, "DiagnosticsRecord")
        .def_readonly("t", &DiagnosticsRecord::t)
        .def_readonly("mass", &DiagnosticsRecord::mass)
        .def_readonly("energy_J", &DiagnosticsRecord::energy_J)
        .def_readonly("entropy", &DiagnosticsRecord::entropy)
        .def_readonly("min_u", &DiagnosticsRecord::min_u)
        .def_readonly("max_u", &DiagnosticsRecord::max_u)
        .def_readonly("sup_dev", &DiagnosticsRecord::sup_dev)
        .def_readonly("cum_dissipation", &DiagnosticsRecord::cum_dissipation)
        .def_readonly("cum_d2", &DiagnosticsRecord::cum_d2)
        .def("__repr__", [](const DiagnosticsRecord& r) {
            return "<record t=" + std::to_string(r.t) + " J=" + std::to_string(r.energy_J) +
                   " sup_dev=" + std::to_string(r.sup_dev) + ">";
        });

    m.def(
        "decay_fit",
        [](const std::vector<DiagnosticsRecord>& records, double t_start) {
            const DecayFit f = decay_fit(records, t_start);
            return py::make_tuple(f.rate, f.r_squared);
        },
        py::arg("records"), py::arg("t_start"), "returns (rate, r_squared)");

    py::class_<Telemetry>(m, "Telemetry")
        .def_readonly("newton_iters", &Telemetry::newton_iters)
        .def_readonly("accepted", &Telemetry::accepted)
        .def_readonly("rejected", &Telemetry::rejected)
        .def_readonly("cubic_fallbacks", &Telemetry::cubic_fallbacks);

    py::class_<Trajectory>(m, "Trajectory")
        .def_readonly("times", &Trajectory::times)
        .def_readonly("diagnostics", &Trajectory::diagnostics)
        .def_readonly("telemetry", &Trajectory::telemetry)
        .def_readonly("ref_mean", &Trajectory::ref_mean)
        .def_property_readonly("snapshots",
                               [](const Trajectory& t) {
                                   std::vector<std::vector<double>> out;
                                   out.reserve(t.snapshots.size());
                                   for (const Field& f : t.snapshots) out.push_back(f.v);
                                   return out;
                               })
        .def_property_readonly("kinds", [](const Trajectory& t) {
            std::vector<int> out;
            out.reserve(t.kinds.size());
            for (RecordKind k : t.kinds) out.push_back(static_cast<int>(k));
            return out;
        });

    py::class_<RunConfig>(m, "RunConfig")
        .def(py::init<>())
        .def_readwrite("L", &RunConfig::L)
        .def_readwrite("n", &RunConfig::n)
        .def_readwrite("T", &RunConfig::T)
        .def_readwrite("N_plus_1", &RunConfig::N_plus_1)
        .def_readwrite("epsilon", &RunConfig::epsilon)
        .def_readwrite("theta", &RunConfig::theta)
        .def_readwrite("record_every", &RunConfig::record_every)
        .def_readwrite("seed", &RunConfig::seed)
        .def_property(
            "shift_method",
            [](const RunConfig& c) { return shift_to_string(c.shift_method); },
            [](RunConfig& c, const std::string& s) { c.shift_method = shift_from_string(s); })
        .def_property(
            "dt_internal", [](const RunConfig& c) { return c.det.dt_internal; },
            [](RunConfig& c, double v) { c.det.dt_internal = v; })
        .def_property(
            "averaging", [](const RunConfig& c) { return rule_to_string(c.det.averaging); },
            [](RunConfig& c, const std::string& s) { c.det.averaging = rule_from_string(s); })
        .def_property(
            "newton_tol", [](const RunConfig& c) { return c.det.newton_tol; },
            [](RunConfig& c, double v) { c.det.newton_tol = v; })
        .def_property(
            "initial_condition",
            [](const RunConfig& c) { return ic_to_string(c.initial_condition); },
            [](RunConfig& c, const std::string& s) { c.initial_condition = ic_from_string(s); })
        .def_readwrite("amplitude", &RunConfig::amplitude)
        .def_readwrite("mean_level", &RunConfig::mean_level)
        .def_readwrite("initial_file", &RunConfig::initial_file)
        .def_readwrite("output_dir", &RunConfig::output_dir)
        .def_readwrite("ensemble_size", &RunConfig::ensemble_size)
        .def_readwrite("epsilon_sweep_values", &RunConfig::epsilon_sweep_values)
        .def_readwrite("n_doublings", &RunConfig::n_doublings)
        .def_readwrite("decay_tol", &RunConfig::decay_tol)
        .def_readwrite("threads", &RunConfig::threads);

    m.def("parse_config_text", &parse_config_text, py::arg("text"));
    m.def("parse_config_file", &parse_config_file, py::arg("path"));
    m.def("config_to_text", &config_to_text, py::arg("config"));
    m.def("build_initial_condition", &build_initial_condition, py::arg("config"));
    m.def("run_single", &run_single, py::arg("config"),
          py::call_guard<py::gil_scoped_release>());

    py::class_<EnsembleStats>(m, "EnsembleStats")
        .def_readonly("times", &EnsembleStats::times)
        .def_readonly("J_mean", &EnsembleStats::J_mean)
        .def_readonly("J_q05", &EnsembleStats::J_q05)
        .def_readonly("J_q95", &EnsembleStats::J_q95)
        .def_readonly("supdev_mean", &EnsembleStats::supdev_mean)
        .def_readonly("supdev_max", &EnsembleStats::supdev_max)
        .def_readonly("fraction_decayed", &EnsembleStats::fraction_decayed)
        .def_readonly("failed_replicas", &EnsembleStats::failed_replicas)
        .def_readonly("completed", &EnsembleStats::completed);

    m.def("run_ensemble", &run_ensemble, py::arg("config"),
          py::call_guard<py::gil_scoped_release>());

    m.def("read_trajectory_csv", &read_trajectory_csv, py::arg("path"));

    m.attr("__version__") = "1.0.0";
}
