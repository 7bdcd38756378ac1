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


// Phenomenological {g, e, f} error channels used by the circuit-level
// experiments (randomized benchmarking and repeated stabilizer cycles).

#ifndef LEAKSTACK_CHANNEL_HPP
#define LEAKSTACK_CHANNEL_HPP

#include <cstdint>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include "leakstack/readout.hpp"

namespace leakstack {

enum class InterleavedOp { None, DataLru, AncillaLru, Idle, Echo };

const char *to_string(InterleavedOp op);
InterleavedOp interleaved_op_from_string(const std::string &s);

struct QubitChannel {
    std::string qubit;
    bool ancilla = false;
    // Stabilizer cycle.
    double gate_leakage = 0.0;         // per two-qubit gate, to |f>, any computational state
    double measurement_leakage = 0.0;  // per measurement, to |f>
    double gate_error = 0.0;           // bit flip per two-qubit gate
    double thermal_excitation = 0.0;   // |g> -> |e> per cycle
    double lru_efficiency = 0.0;       // |f> -> |e> per f-LRU
    double lru_error = 0.0;            // bit flip per f-LRU
    double t1_us = std::numeric_limits<double>::infinity();
    ConfusionMatrix readout = ConfusionMatrix::identity(3);  // rows: true g, e, f
    // Randomized benchmarking.
    double clifford_error = 0.0;    // average error per Clifford
    double clifford_leakage = 0.0;  // |e> -> |f> per Clifford
    std::map<InterleavedOp, double> interleaved_error;  // average error per op
};

struct CycleTiming {
    double cycle_ns = 1900.0;
    double readout_ns = 1024.0;
    double cnot_ns = 240.0;
};

struct LeakageChannelModel {
    std::map<std::string, QubitChannel> qubits;
    CycleTiming timing;
    double syndrome_error = 0.0;  // symmetric flip of the reported ancilla bit

    void validate() const;
    const QubitChannel &qubit(const std::string &name) const;
    /// Idle decay probabilities over one cycle from T1: e -> g and f -> e
    /// (the f level decays twice as fast).
    double decay_e(const std::string &name) const;
    double decay_f(const std::string &name) const;
};

/// Every probability zero, perfect readout and LRUs of efficiency one.
LeakageChannelModel ideal_channel_model(const std::vector<std::string> &qubits);

/// [channel] and [channel.<qubit>] sections; T1 defaults to [qubit.<q>] t1.
LeakageChannelModel parse_channel_model(const std::string &text, const std::string &source_name = "<string>");
LeakageChannelModel load_channel_model(const std::string &config_path);

/// Stationary leaked fraction of the two-state chain with per-cycle leakage
/// L and per-cycle return probability eta: L / (L + eta).
double markov_steady_state(double L, double eta);

}  // namespace leakstack

#endif  // LEAKSTACK_CHANNEL_HPP
