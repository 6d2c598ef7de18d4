// Copyright 2026 The phq Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <string>
#include <vector>

#include <nlohmann/json.hpp>
#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "phq/phq.hpp"

namespace py = pybind11;

namespace {

// Structured values cross the boundary as JSON so the Python side sees the
// same dicts that the file formats use.
py::object to_py(const nlohmann::json& j) {
    return py::module_::import("json").attr("loads")(j.dump());
}

nlohmann::json from_py(const py::object& o) {
    return nlohmann::json::parse(py::module_::import("json").attr("dumps")(o).cast<std::string>());
}

phq::BinaryState state_arg(const std::string& s) {
    return phq::BinaryState::from_string(s);
}

phq::ReadoutVector readout_arg(const phq::RealVector& v) {
    return phq::ReadoutVector{v};
}

py::dict campaign_summary(const phq::CampaignResult& r) {
    py::dict out;
    out["c_min"] = r.ground_truth.c_min;
    out["s_min"] = r.ground_truth.s_min.to_string();
    out["detector_sigma"] = r.detector_sigma ? py::cast(*r.detector_sigma) : py::none();
    py::dict curves;
    for (const auto& c : r.curves) {
        curves[py::float_(c.eta)] = py::array_t<double>(static_cast<py::ssize_t>(c.probability.size()),
                                                        c.probability.data());
    }
    out["curves"] = curves;
    out["stability"] = to_py(phq::stability_to_json(r.stability));
    std::vector<double> best;
    for (const auto& run : r.runs) best.push_back(run.best_theoretical_cost);
    out["best_costs"] = best;
    out["weights"] = r.problem.weights();
    return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Photonic QUBO annealing simulator.";

    py::register_exception<phq::Error>(m, "PhqError", PyExc_ValueError);

    m.def("version", &phq::version);
    m.def("derive_seed", &phq::derive_seed, py::arg("master"), py::arg("index"));

    // mesh
    m.def("build_topology", [](std::size_t n) { return to_py(phq::topology_to_json(phq::build_topology(n))); },
          py::arg("n_ports") = 16);
    m.def(
        "voltages_to_phases",
        [](const std::vector<double>& v, double phase_per_volt_sq, double max_voltage) {
            phq::ThermoOpticParams p;
            p.phase_per_volt_sq = phase_per_volt_sq;
            p.max_voltage = max_voltage;
            return phq::voltages_to_phases(v, p);
        },
        py::arg("voltages"), py::arg("phase_per_volt_sq") = 0.25, py::arg("max_voltage") = 5.0);
    m.def("mzi_transfer", [](double a, double b) { return phq::ComplexMatrix(phq::mzi_transfer(a, b)); });
    m.def(
        "compose_unitary",
        [](const py::object& topology, const std::vector<double>& phases) {
            return phq::compose_unitary(phq::topology_from_json(from_py(topology)), phases);
        },
        py::arg("topology"), py::arg("phases"));
    m.def("unitarity_error", &phq::unitarity_error);
    m.def(
        "homodyne_readout",
        [](const phq::ComplexMatrix& u, const std::string& s, double e_ref) {
            phq::ReferenceArm ref;
            ref.e_ref = e_ref;
            return phq::RealVector(phq::homodyne_readout(u, state_arg(s), ref).readout.i_bpd);
        },
        py::arg("u"), py::arg("state"), py::arg("e_ref") = 0.5);

    // qubo
    m.def("cost", [](const phq::RealMatrix& k, const std::string& s) { return phq::cost(phq::QuboProblem(k), state_arg(s)); },
          py::arg("k"), py::arg("state"));
    m.def("cost_from_readout", [](const phq::RealVector& r) { return phq::cost_from_readout(readout_arg(r)); });
    m.def(
        "decompose",
        [](const phq::RealMatrix& k) {
            const auto d = phq::decompose(phq::QuboProblem(k));
            return py::make_tuple(d.spectral.eigenvalues, d.spectral.eigenvectors, d.transform.matrix());
        },
        py::arg("k"));
    m.def("problem_from_transform",
          [](const phq::RealMatrix& a) { return phq::problem_from_transform(phq::TransformMatrix(a)).weights(); });
    m.def(
        "brute_force_min",
        [](const phq::RealMatrix& k) {
            const auto g = phq::brute_force_min(phq::QuboProblem(k));
            return py::make_tuple(g.s_min.to_string(), g.c_min);
        },
        py::arg("k"));

    // noise
    m.def(
        "apply_noise",
        [](const phq::RealVector& r, double detector_sigma, double laser_rel_sigma, std::uint64_t seed) {
            phq::NoiseParams np;
            np.detector_sigma = detector_sigma;
            np.laser_rel_sigma = laser_rel_sigma;
            np.validate();
            phq::Rng rng(seed);
            return phq::RealVector(phq::apply_noise(readout_arg(r), np, rng).i_bpd);
        },
        py::arg("readout"), py::arg("detector_sigma") = 0.0, py::arg("laser_rel_sigma") = 0.0, py::arg("seed") = 0);
    m.def("fidelity", [](const phq::RealVector& a, const phq::RealVector& b) {
        return phq::fidelity(readout_arg(a), readout_arg(b));
    });
    m.def("scale_factor", [](const phq::RealVector& a, const phq::RealVector& b) {
        return phq::scale_factor(readout_arg(a), readout_arg(b));
    });
    m.def("snr_and_resolution", [](const std::vector<double>& p) {
        const auto r = phq::snr_and_resolution(p);
        return py::make_tuple(r.snr, r.snr_db, r.resolution);
    });
    m.def("resolution_from_db", &phq::resolution_from_db);
    m.def("wrong_acceptance_fraction",
          [](const std::vector<double>& c, double r) { return phq::wrong_acceptance_fraction(c, r); });

    // campaign
    m.def(
        "run_campaign",
        [](const py::object& config) {
            const auto cfg = phq::config_from_json(from_py(config));
            py::gil_scoped_release release;
            auto r = phq::run_campaign(cfg);
            py::gil_scoped_acquire acquire;
            return campaign_summary(r);
        },
        py::arg("config") = py::dict(),
        "Run a campaign described by a config dict (same keys as the JSON config file).");
    m.def(
        "solve_and_export",
        [](const py::object& config, const std::filesystem::path& dir) {
            const auto cfg = phq::config_from_json(from_py(config));
            py::gil_scoped_release release;
            phq::export_campaign(phq::run_campaign(cfg), dir);
        },
        py::arg("config"), py::arg("out_dir"));
    m.def("default_config", [] { return to_py(phq::config_to_json(phq::ExperimentConfig{})); });

    // timing
    m.def(
        "timing_report",
        [](const py::dict& overrides) {
            phq::timing::TimingParams p;
            for (auto [key, value] : overrides) {
                const auto k = key.cast<std::string>();
                if (k == "clock_hz") p.clock_hz = value.cast<double>();
                else if (k == "mod_bandwidth_hz") p.mod_bandwidth_hz = value.cast<double>();
                else if (k == "pd_bandwidth_hz") p.pd_bandwidth_hz = value.cast<double>();
                else if (k == "path_length_m") p.path_length_m = value.cast<double>();
                else if (k == "group_index") p.group_index = value.cast<double>();
                else if (k == "iter_time_s") p.iter_time_s = value.cast<double>();
                else if (k == "chip_area_mm2") p.chip_area_mm2 = value.cast<double>();
                else if (k == "n") p.n = value.cast<std::size_t>();
                else if (k == "dac_latency_s") p.dac_latency_s = value.cast<double>();
                else if (k == "adc_latency_s") p.adc_latency_s = value.cast<double>();
                else throw phq::ConfigError("unknown timing parameter: " + k);
            }
            const auto b = phq::timing::latency_breakdown(p);
            return to_py(phq::timing::report_json(p, b, phq::timing::throughput(p, b)));
        },
        py::arg("overrides") = py::dict());
}
