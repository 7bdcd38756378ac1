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

#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "leakstack/capnet.hpp"

namespace leakstack {

// Units: frequencies GHz, coherence times us, linewidths and dispersive
// shifts MHz, pulse durations ns.

struct TransmonParams {
    std::string label;
    double omega_max = 0.0;
    double omega_idle = 0.0;
    double alpha = 0.0;
    double T1 = 0.0;
    double T2_star = 0.0;
    double T2_echo = 0.0;
    double single_qubit_gate_error = 0.0;  // metadata only

    bool operator==(const TransmonParams &) const = default;
};

struct CouplerParams {
    std::string label;
    double omega_max = 0.0;
    double omega_idle = 0.0;
    double alpha = 0.0;
    double T1 = 0.0;
    double two_qubit_gate_error = 0.0;  // metadata only

    bool operator==(const CouplerParams &) const = default;
};

struct ResonatorParams {
    std::string label;
    std::string qubit;  // the qubit this resonator reads out
    double omega_r = 0.0;
    double kappa_r = 0.0;  // MHz, kappa_r / 2pi
    double chi = 0.0;      // MHz, the full 2chi / 2pi

    bool operator==(const ResonatorParams &) const = default;
};

enum class EdgeKind { QubitCoupler, CouplerCoupler, CouplerResonator, QubitResonator };

const char *to_string(EdgeKind k);
EdgeKind edge_kind_from_string(const std::string &s);

struct Edge {
    EdgeKind kind = EdgeKind::QubitCoupler;
    std::string a;
    std::string b;
    double coupling = 0.0;  // GHz
    CouplingTopology topology = CouplingTopology::Asymmetric;

    bool operator==(const Edge &) const = default;
};

enum class LruTarget { EReset, FLru, HLru };

const char *to_string(LruTarget t);
LruTarget lru_target_from_string(const std::string &s);
/// Qubit level holding the excitation the operation removes (1, 2 or 3).
int target_level(LruTarget t);

struct LruOperatingPoint {
    int harmonic = 1;
    double omega_p = 0.0;      // GHz, modulation frequency
    double omega_bar_c = 0.0;  // GHz, time-averaged coupler frequency
    double amplitude = 0.0;    // GHz, frequency excursion A_p
    double plateau_ns = 60.0;
    double edge_ns = 10.0;
    double efficiency = 0.0;  // reported value, metadata

    double total_ns() const { return plateau_ns + 2 * edge_ns; }
    bool operator==(const LruOperatingPoint &) const = default;
};

/// Qubit/coupler/resonator triplet used for a qubit's LRUs.
struct LruAssignment {
    std::string qubit;
    std::string coupler;
    std::string resonator;
    std::map<LruTarget, LruOperatingPoint> operations;

    bool operator==(const LruAssignment &) const = default;
};

struct Band {
    double lo = 0.0;
    double hi = 0.0;
    bool contains(double f) const { return f >= lo && f <= hi; }
    double center() const { return 0.5 * (lo + hi); }
    bool operator==(const Band &) const = default;
};

struct FrequencyRegimes {
    Band qubit_band;
    Band coupler_active_band;
    Band coupler_idle_band;
    Band dissipative_band;

    void validate() const;
    bool operator==(const FrequencyRegimes &) const = default;
};

struct DeviceGraph {
    std::string name;
    std::vector<TransmonParams> qubits;
    std::vector<CouplerParams> couplers;
    std::vector<ResonatorParams> resonators;
    std::vector<Edge> edges;
    std::vector<LruAssignment> lru;
    FrequencyRegimes regimes;
    std::optional<CapacitanceNetwork> capacitance;

    const TransmonParams &qubit(const std::string &label) const;
    const CouplerParams &coupler(const std::string &label) const;
    const ResonatorParams &resonator(const std::string &label) const;
    const LruAssignment &lru_for_qubit(const std::string &qubit) const;
    const LruAssignment &lru_for_coupler(const std::string &coupler) const;
    bool has_element(const std::string &label) const;
    /// Edge between two elements in either order, if any.
    const Edge *find_edge(const std::string &a, const std::string &b) const;
    /// The resonator edge of a coupler; throws if the coupler has none.
    const Edge &resonator_edge(const std::string &coupler) const;

    /// Checks every invariant; throws InvariantError naming the element.
    void validate() const;
    bool operator==(const DeviceGraph &) const = default;
};

/// Reads a device config. Accepts a path, or a bare name such as
/// "paper_device" resolved against the shipped configs directory.
DeviceGraph load_device(const std::string &config_path);
DeviceGraph parse_device(const std::string &text, const std::string &source_name = "<string>");
std::string serialize_device(const DeviceGraph &device);
std::string resolve_config_path(const std::string &config_path);

/// Duffing ladder: omega_ge + i * alpha for the i -> i+1 transition.
double transition_frequency(const TransmonParams &q, int i, int j, int truncation = 4);

double parametric_resonance_frequency(LruTarget target, int m, const TransmonParams &q, double omega_bar_c);

/// 1/T_phi = 1/T2* - 1/(2 T1), floored at 0. Returns the rate in 1/us.
double pure_dephasing_rate(double T1, double T2_star);

/// g_qr from chi = g^2 alpha / (Delta (Delta + alpha)), GHz.
double backsolve_qubit_resonator_coupling(const TransmonParams &q, const ResonatorParams &r);

struct RegimeEntry {
    std::string label;
    std::string element_kind;  // qubit | coupler | resonator
    double frequency = 0.0;
    std::string band;  // name of the band containing it, or "none"
    bool ok = true;
};

struct RegimeReport {
    std::vector<RegimeEntry> entries;
    std::vector<std::string> violations;
};

RegimeReport validate_regimes(const DeviceGraph &device, const FrequencyRegimes &regimes);

}  // namespace leakstack
