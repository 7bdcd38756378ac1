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


// Repeated weight-two Z-stabilizer cycles (D1, D2 measured through the
// ancilla A) simulated as a shot-by-shot Monte Carlo on {g, e, f}^3.

#ifndef LEAKSTACK_STABILIZER_HPP
#define LEAKSTACK_STABILIZER_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "leakstack/channel.hpp"

namespace leakstack {

enum class DataInit {
    Y2,      // Y/2 on both data qubits: each starts in g or e with probability 1/2
    Ground,  // data left in |00>
};

const char *to_string(DataInit d);
DataInit data_init_from_string(const std::string &s);

/// X_ef on `qubit` during cycle `cycle` (1-based). Data qubits are hit at the
/// start of the cycle, the ancilla between the two CNOTs.
struct Injection {
    std::string qubit;
    int cycle = 0;
};

struct StabilizerConfig {
    int n_cycles = 25;
    bool lru_enabled = true;
    std::optional<Injection> injection;
    DataInit data_init = DataInit::Y2;
    int shots = 10000;
    uint64_t seed = 0;
    std::string data1 = "D1";
    std::string ancilla = "A";
    std::string data2 = "D2";
    LeakageChannelModel channel;

    void validate() const;
};

/// Optional [stabilizer] section: cycles, shots, lru, data_init, inject_qubit, inject_cycle.
StabilizerConfig parse_stabilizer_config(const std::string &text, LeakageChannelModel channel,
                                         const std::string &source_name = "<string>");

struct CycleTrace {
    std::vector<std::string> qubits;  // data1, ancilla, data2
    /// P_f[q][k] as reported by the three-state readout after k cycles (k = 0..n).
    std::vector<std::vector<double>> P_f;
    /// Fraction actually in |f> at the same points.
    std::vector<std::vector<double>> leaked;
    /// detection[k - 1] for cycles k = 1..n.
    std::vector<double> detection;
    /// syndromes[shot][k - 1]: reported ancilla bit.
    std::vector<std::vector<uint8_t>> syndromes;
    /// Noise-free ancilla outcomes for data starting in |00>.
    std::vector<uint8_t> expected;
    /// Per shot, D1 xor D2 right after data initialization. A Y/2 start is
    /// projected by the first parity readout; this is the projected value.
    std::vector<uint8_t> initial_parity;
    int shots = 0;
};

CycleTrace run_stabilizer(const StabilizerConfig &config, int workers = 1);

/// Cycle 1 is compared with the expected outcome (offset by the shot's
/// initial parity when given), later cycles with the previous outcome after
/// removing the expected flip pattern.
std::vector<double> detection_fraction(const std::vector<std::vector<uint8_t>> &syndromes,
                                       const std::vector<uint8_t> &expected,
                                       const std::vector<uint8_t> &initial_parity = {});

struct LeakageTraceFit {
    std::string qubit;
    double slope = 0.0;  // per cycle
    double intercept = 0.0;
    double growth = 0.0;  // P_f(n) - P_f(0)
};

/// Linear fit of reported P_f against cycle for each qubit.
std::vector<LeakageTraceFit> leakage_trace(const CycleTrace &trace);

/// P_f(n) with LRUs off minus with LRUs on, per qubit.
std::vector<double> leakage_delta(const CycleTrace &lru_off, const CycleTrace &lru_on);

struct LeakageRates {
    double L = 0.0;    // computational -> f between two readout points
    double eta = 0.0;  // f -> computational between two readout points
};

/// Per-cycle transition probabilities of the simulated cycle, for the
/// two-state Markov description of a qubit's leakage.
LeakageRates per_cycle_rates(const StabilizerConfig &config, const std::string &qubit);

}  // namespace leakstack

#endif  // LEAKSTACK_STABILIZER_HPP
