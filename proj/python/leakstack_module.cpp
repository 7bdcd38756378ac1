// Copyright 2026 The leakstack Authors
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


#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "leakstack/capnet.hpp"
#include "leakstack/channel.hpp"
#include "leakstack/device.hpp"
#include "leakstack/dynamics.hpp"
#include "leakstack/errors.hpp"
#include "leakstack/ini.hpp"
#include "leakstack/io.hpp"
#include "leakstack/rb.hpp"
#include "leakstack/readout.hpp"
#include "leakstack/stabilizer.hpp"

namespace py = pybind11;
using namespace leakstack;

namespace {

py::dict couplings_dict(const CouplingSet &c) {
    py::dict d;
    d["g_qc"] = c.g_qc;
    d["g_cc_direct"] = c.g_cc_direct;
    d["g_cc_net"] = c.g_cc_net;
    return d;
}

py::dict transmon_dict(const TransmonParams &q) {
    py::dict d;
    d["label"] = q.label;
    d["omega_max"] = q.omega_max;
    d["omega_idle"] = q.omega_idle;
    d["alpha"] = q.alpha;
    d["T1"] = q.T1;
    d["T2_star"] = q.T2_star;
    d["T2_echo"] = q.T2_echo;
    return d;
}

GmmModel model_from_centroids(const std::vector<std::pair<double, double>> &centroids, double sigma) {
    GmmModel m;
    for (size_t k = 0; k < centroids.size(); ++k) {
        m.components.push_back({static_cast<int>(k), {centroids[k].first, centroids[k].second}, sigma});
    }
    m.validate();
    return m;
}

}  // namespace

PYBIND11_MODULE(_leakstack, m) {
    m.doc() = "Leakage reduction units in tunable-coupler transmon devices.";
    m.attr("__version__") = tool_version();

    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
    py::register_exception<NumericalError>(m, "NumericalError", PyExc_ArithmeticError);

    py::enum_<CouplingTopology>(m, "CouplingTopology")
        .value("Symmetric", CouplingTopology::Symmetric)
        .value("Asymmetric", CouplingTopology::Asymmetric);

    py::class_<CapacitanceNetwork>(m, "CapacitanceNetwork")
        .def(py::init([](double C_pc, double C_pp, double C_gp, double C_gc, double C_cc) {
                 CapacitanceNetwork n{C_pc, C_pp, C_gp, C_gc, C_cc};
                 n.validate();
                 return n;
             }),
             py::arg("C_pc"), py::arg("C_pp"), py::arg("C_gp"), py::arg("C_gc"), py::arg("C_cc") = 0.0)
        .def_readwrite("C_pc", &CapacitanceNetwork::C_pc)
        .def_readwrite("C_pp", &CapacitanceNetwork::C_pp)
        .def_readwrite("C_gp", &CapacitanceNetwork::C_gp)
        .def_readwrite("C_gc", &CapacitanceNetwork::C_gc)
        .def_readwrite("C_cc", &CapacitanceNetwork::C_cc)
        .def("scaled", &CapacitanceNetwork::scaled);

    m.def(
        "closed_form_couplings",
        [](const CapacitanceNetwork &net, CouplingTopology topo, double omega_q, double omega_c) {
            return couplings_dict(closed_form_couplings(net, topo, omega_q, omega_c));
        },
        py::arg("net"), py::arg("topology"), py::arg("omega_q"), py::arg("omega_c"));
    m.def(
        "maxwell_couplings",
        [](const CapacitanceNetwork &net, CouplingTopology topo, double omega_q, double omega_c) {
            const auto cap = maxwell_matrix(net, topo);
            return couplings_dict(maxwell_oracle(cap, junction_inductances_for(cap, omega_q, omega_c, omega_c)).couplings);
        },
        py::arg("net"), py::arg("topology"), py::arg("omega_q"), py::arg("omega_c"),
        "Couplings from the inverse Maxwell capacitance matrix.");

    m.def(
        "effective_parametric_coupling",
        [](int harmonic, double A_p, double omega_p, int n_ex, double g_qc) {
            return effective_parametric_coupling(ParametricDrive{harmonic, A_p, omega_p, n_ex}, g_qc);
        },
        py::arg("m"), py::arg("A_p"), py::arg("omega_p"), py::arg("n_ex"), py::arg("g_qc"));
    m.def(
        "sideband_coupling",
        [](int harmonic, double A_p, double omega_p, int n_ex, double g_qc) {
            return sideband_coupling(ParametricDrive{harmonic, A_p, omega_p, n_ex}, g_qc);
        },
        py::arg("m"), py::arg("A_p"), py::arg("omega_p"), py::arg("n_ex"), py::arg("g_qc"));

    py::class_<DeviceGraph>(m, "Device")
        .def_readonly("name", &DeviceGraph::name)
        .def_property_readonly("qubits",
                               [](const DeviceGraph &d) {
                                   py::list out;
                                   for (const auto &q : d.qubits) out.append(transmon_dict(q));
                                   return out;
                               })
        .def("qubit", [](const DeviceGraph &d, const std::string &label) { return transmon_dict(d.qubit(label)); })
        .def(
            "transition_frequency",
            [](const DeviceGraph &d, const std::string &label, int i, int j) {
                return transition_frequency(d.qubit(label), i, j);
            },
            py::arg("qubit"), py::arg("i"), py::arg("j"))
        .def("serialize", &serialize_device)
        .def("__eq__", [](const DeviceGraph &a, const DeviceGraph &b) { return a == b; });

    m.def("load_device", &load_device, py::arg("config"));
    m.def("parse_device", &parse_device, py::arg("text"), py::arg("source_name") = "<string>");

    m.def(
        "fit_rb",
        [](const std::vector<double> &lengths, const std::vector<double> &F) {
            const auto f = fit_rb(lengths, F);
            py::dict d;
            d["A"] = f.A;
            d["B"] = f.B;
            d["p"] = f.p;
            d["r"] = f.r;
            d["rss"] = f.rss;
            d["converged"] = f.converged;
            return d;
        },
        py::arg("m"), py::arg("F"));
    m.def("markov_steady_state", &markov_steady_state, py::arg("L"), py::arg("eta"));

    m.def(
        "run_stabilizer",
        [](const std::string &config, int cycles, int shots, bool lru, uint64_t seed, std::string inject_qubit,
           int inject_cycle, int workers) {
            const std::string text = ini::read_config_text(config);
            StabilizerConfig cfg = parse_stabilizer_config(text, parse_channel_model(text, config), config);
            cfg.n_cycles = cycles;
            cfg.shots = shots;
            cfg.lru_enabled = lru;
            cfg.seed = seed;
            if (!inject_qubit.empty()) cfg.injection = Injection{inject_qubit, inject_cycle};
            CycleTrace t;
            {
                py::gil_scoped_release release;
                t = run_stabilizer(cfg, workers);
            }
            py::dict d;
            d["qubits"] = t.qubits;
            d["P_f"] = t.P_f;
            d["leaked"] = t.leaked;
            d["detection"] = t.detection;
            d["shots"] = t.shots;
            return d;
        },
        py::arg("config"), py::arg("cycles") = 25, py::arg("shots") = 10000, py::arg("lru") = true,
        py::arg("seed") = 0, py::arg("inject_qubit") = "", py::arg("inject_cycle") = 0, py::arg("workers") = 1);

    m.def(
        "classify_synthetic",
        [](const std::vector<std::pair<double, double>> &centroids, double sigma, size_t shots_per_state,
           uint64_t seed, double k) {
            const GmmModel truth = model_from_centroids(centroids, sigma);
            std::vector<ShotBatch> prepared;
            ShotBatch all;
            for (size_t s = 0; s < truth.size(); ++s) {
                std::vector<double> dist(truth.size(), 0.0);
                dist[s] = 1.0;
                prepared.push_back(simulate_iq(truth, dist, shots_per_state, seed + s));
                all.points.insert(all.points.end(), prepared.back().points.begin(), prepared.back().points.end());
            }
            const auto fit = fit_gmm(all, static_cast<int>(truth.size()), seed, prepared);
            const auto err = assignment_error(fit.model, prepared, k);
            py::dict d;
            std::vector<std::pair<double, double>> fitted;
            for (const auto &c : fit.model.components) fitted.emplace_back(c.centroid.i, c.centroid.q);
            d["centroids"] = fitted;
            d["P_ii"] = err.P_ii;
            d["epsilon_n"] = err.epsilon_n;
            return d;
        },
        py::arg("centroids"), py::arg("sigma"), py::arg("shots_per_state") = 4096, py::arg("seed") = 0,
        py::arg("k") = kNoThreshold,
        "Simulate prepared-state shots, fit the mixture and report assignment fidelity.");
}
