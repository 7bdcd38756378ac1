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


#include "leakstack/channel.hpp"

#include <cmath>

#include "leakstack/errors.hpp"
#include "leakstack/ini.hpp"

namespace leakstack {

namespace {

void check_probability(double p, const std::string &what) {
    if (!(p >= 0.0 && p <= 1.0)) throw InvariantError(what + " must be a probability in [0, 1]");
}

constexpr InterleavedOp kOps[] = {InterleavedOp::DataLru, InterleavedOp::AncillaLru, InterleavedOp::Idle,
                                  InterleavedOp::Echo};

}  // namespace

const char *to_string(InterleavedOp op) {
    switch (op) {
        case InterleavedOp::None: return "none";
        case InterleavedOp::DataLru: return "data_lru";
        case InterleavedOp::AncillaLru: return "ancilla_lru";
        case InterleavedOp::Idle: return "idle";
        case InterleavedOp::Echo: return "echo";
    }
    return "?";
}

InterleavedOp interleaved_op_from_string(const std::string &s) {
    for (auto op : {InterleavedOp::None, InterleavedOp::DataLru, InterleavedOp::AncillaLru, InterleavedOp::Idle,
                    InterleavedOp::Echo}) {
        if (s == to_string(op)) return op;
    }
    if (s == "dataLRU" || s == "data-lru") return InterleavedOp::DataLru;
    if (s == "ancillaLRU" || s == "ancilla-lru") return InterleavedOp::AncillaLru;
    throw ConfigError("unknown interleaved operation '" + s + "'");
}

void LeakageChannelModel::validate() const {
    if (qubits.empty()) throw InvariantError("channel model has no qubits");
    check_probability(syndrome_error, "syndrome_error");
    if (!(timing.cycle_ns > 0)) throw InvariantError("cycle duration must be > 0");
    for (const auto &[name, q] : qubits) {
        const std::string w = "channel." + name + ": ";
        check_probability(q.gate_leakage, w + "gate_leakage");
        check_probability(q.measurement_leakage, w + "measurement_leakage");
        check_probability(q.gate_error, w + "gate_error");
        check_probability(q.thermal_excitation, w + "thermal_excitation");
        check_probability(q.lru_efficiency, w + "lru_efficiency");
        check_probability(q.lru_error, w + "lru_error");
        check_probability(q.clifford_error, w + "clifford_error");
        check_probability(q.clifford_leakage, w + "clifford_leakage");
        for (const auto &[op, r] : q.interleaved_error) check_probability(r, w + "interleaved " + to_string(op));
        if (!(q.t1_us > 0)) throw InvariantError(w + "t1 must be > 0");
        if (q.readout.size() != 3) throw InvariantError(w + "readout confusion must be 3x3");
        q.readout.validate();
    }
}

const QubitChannel &LeakageChannelModel::qubit(const std::string &name) const {
    auto it = qubits.find(name);
    if (it == qubits.end()) throw InvariantError("channel model has no qubit '" + name + "'");
    return it->second;
}

double LeakageChannelModel::decay_e(const std::string &name) const {
    return -std::expm1(-timing.cycle_ns * 1e-3 / qubit(name).t1_us);
}

double LeakageChannelModel::decay_f(const std::string &name) const {
    return -std::expm1(-2.0 * timing.cycle_ns * 1e-3 / qubit(name).t1_us);
}

LeakageChannelModel ideal_channel_model(const std::vector<std::string> &qubits) {
    LeakageChannelModel m;
    for (const auto &q : qubits) {
        QubitChannel c;
        c.qubit = q;
        c.lru_efficiency = 1.0;
        m.qubits[q] = c;
    }
    return m;
}

LeakageChannelModel parse_channel_model(const std::string &text, const std::string &source_name) {
    namespace pt = boost::property_tree;
    const pt::ptree tree = ini::parse(text, source_name);
    LeakageChannelModel m;
    for (const auto &[name, body] : tree) {
        if (name == "channel") {
            ini::Section s(name, body);
            m.timing.cycle_ns = s.num_or("cycle_ns", m.timing.cycle_ns);
            m.timing.readout_ns = s.num_or("readout_ns", m.timing.readout_ns);
            m.timing.cnot_ns = s.num_or("cnot_ns", m.timing.cnot_ns);
            m.syndrome_error = s.num_or("syndrome_error", 0.0);
        } else if (ini::starts_with(name, "channel.")) {
            ini::Section s(name, body);
            QubitChannel c;
            c.qubit = name.substr(8);
            const std::string role = s.str_or("role", "data");
            if (role != "data" && role != "ancilla") {
                throw ConfigError("section [" + name + "]: role must be data or ancilla");
            }
            c.ancilla = role == "ancilla";
            c.gate_leakage = s.num_or("gate_leakage", 0.0);
            c.measurement_leakage = s.num_or("measurement_leakage", 0.0);
            c.gate_error = s.num_or("gate_error", 0.0);
            c.thermal_excitation = s.num_or("thermal_excitation", 0.0);
            c.lru_efficiency = s.num_or("lru_efficiency", 1.0);
            c.lru_error = s.num_or("lru_error", 0.0);
            if (s.has("t1")) {
                c.t1_us = s.num("t1");
            } else if (auto q = tree.find("qubit." + c.qubit); q != tree.not_found()) {
                c.t1_us = ini::Section("qubit." + c.qubit, q->second).num_or("t1", c.t1_us);
            }
            if (s.has("confusion_g") || s.has("confusion_e") || s.has("confusion_f")) {
                c.readout.m = {s.list("confusion_g"), s.list("confusion_e"), s.list("confusion_f")};
                for (const auto &row : c.readout.m) {
                    if (row.size() != 3) throw ConfigError("section [" + name + "]: confusion rows need 3 entries");
                }
            }
            c.clifford_error = s.num_or("clifford_error", 0.0);
            c.clifford_leakage = s.num_or("clifford_leakage", 0.0);
            for (auto op : kOps) {
                const std::string key = std::string("interleaved_") + to_string(op);
                if (s.has(key)) c.interleaved_error[op] = s.num(key);
            }
            m.qubits[c.qubit] = c;
        }
    }
    if (m.qubits.empty()) throw ConfigError(source_name + ": no [channel.<qubit>] sections");
    m.validate();
    return m;
}

LeakageChannelModel load_channel_model(const std::string &config_path) {
    std::string path;
    const std::string text = ini::read_config_text(config_path, &path);
    return parse_channel_model(text, path);
}

double markov_steady_state(double L, double eta) {
    if (!(L >= 0 && eta >= 0) || L + eta == 0) throw InvariantError("steady state needs L + eta > 0");
    return L / (L + eta);
}

}  // namespace leakstack
