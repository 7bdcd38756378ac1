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


#include "leakstack/stabilizer.hpp"

#include <array>
#include <cmath>

#include "leakstack/errors.hpp"
#include "leakstack/ini.hpp"
#include "leakstack/parallel.hpp"

namespace leakstack {

const char *to_string(DataInit d) {
    return d == DataInit::Y2 ? "y2" : "ground";
}

DataInit data_init_from_string(const std::string &s) {
    if (s == "y2" || s == "Y2") return DataInit::Y2;
    if (s == "ground") return DataInit::Ground;
    throw ConfigError("unknown data initialization '" + s + "' (expected y2 or ground)");
}

void StabilizerConfig::validate() const {
    if (n_cycles < 1) throw InvariantError("stabilizer needs at least one cycle");
    if (shots < 1) throw InvariantError("stabilizer needs at least one shot");
    channel.validate();
    for (const auto *q : {&data1, &ancilla, &data2}) channel.qubit(*q);
    if (injection) {
        if (injection->cycle < 1 || injection->cycle > n_cycles) {
            throw InvariantError("injection cycle must lie in [1, n_cycles]");
        }
        if (injection->qubit != data1 && injection->qubit != ancilla && injection->qubit != data2) {
            throw InvariantError("injection qubit '" + injection->qubit + "' is not part of the stabilizer");
        }
    }
}

StabilizerConfig parse_stabilizer_config(const std::string &text, LeakageChannelModel channel,
                                         const std::string &source_name) {
    const auto tree = ini::parse(text, source_name);
    StabilizerConfig c;
    c.channel = std::move(channel);
    auto it = tree.find("stabilizer");
    if (it != tree.not_found()) {
        ini::Section s("stabilizer", it->second);
        c.n_cycles = static_cast<int>(s.num_or("cycles", c.n_cycles));
        c.shots = static_cast<int>(s.num_or("shots", c.shots));
        c.lru_enabled = s.flag_or("lru", c.lru_enabled);
        if (s.has("data_init")) c.data_init = data_init_from_string(s.str("data_init"));
        if (s.has("inject_qubit")) {
            c.injection = Injection{s.str("inject_qubit"), static_cast<int>(s.num("inject_cycle"))};
        }
    }
    c.validate();
    return c;
}

namespace {

constexpr uint8_t G = 0, E = 1, F = 2;

struct QubitParams {
    double gate_leak, meas_leak, gate_error, thermal, eta, lru_error, decay_e, decay_f;
};

QubitParams params_of(const LeakageChannelModel &ch, const std::string &q) {
    const auto &c = ch.qubit(q);
    return {c.gate_leakage, c.measurement_leakage, c.gate_error, c.thermal_excitation,
            c.lru_efficiency, c.lru_error, ch.decay_e(q), ch.decay_f(q)};
}

struct ShotRecord {
    std::vector<std::array<uint8_t, 3>> states;  // at readout points 0..n
    std::vector<uint8_t> outcomes;
    uint8_t initial_parity = 0;
};

class Shot {
   public:
    Shot(const StabilizerConfig &cfg, const std::array<QubitParams, 3> &p, Rng &rng) : cfg_(cfg), p_(p), rng_(rng) {}

    ShotRecord run() {
        ShotRecord rec;
        std::array<uint8_t, 3> s{G, G, G};
        if (cfg_.data_init == DataInit::Y2) {
            s[0] = bernoulli(0.5) ? E : G;
            s[2] = bernoulli(0.5) ? E : G;
        }
        rec.initial_parity = static_cast<uint8_t>((s[0] == E) ^ (s[2] == E));
        rec.states.push_back(s);
        const int inject_q = injection_index();
        for (int k = 1; k <= cfg_.n_cycles; ++k) {
            const bool inject_now = cfg_.injection && cfg_.injection->cycle == k;
            if (inject_now && inject_q != 1) s[inject_q] = x_ef(s[inject_q]);
            bool scrambled = cnot(s, 0);
            if (inject_now && inject_q == 1) s[1] = x_ef(s[1]);
            scrambled = cnot(s, 2) || scrambled;
            rec.states.push_back(s);

            // Ancilla readout; echo pulses on the data meanwhile.
            uint8_t bit = (s[1] == F || scrambled) ? static_cast<uint8_t>(bernoulli(0.5)) : (s[1] == E ? 1 : 0);
            if (bernoulli(cfg_.channel.syndrome_error)) bit ^= 1;
            rec.outcomes.push_back(bit);
            if (s[1] != F && bernoulli(p_[1].meas_leak)) s[1] = F;
            for (int d : {0, 2}) s[d] = x_ge(s[d]);

            if (cfg_.lru_enabled) {
                for (int q = 0; q < 3; ++q) {
                    if (s[q] == F) {
                        if (bernoulli(p_[q].eta)) s[q] = E;
                    } else if (bernoulli(p_[q].lru_error)) {
                        s[q] = x_ge(s[q]);
                    }
                }
            }
            if (s[1] == E) s[1] = G;  // ancilla reset

            // Idle relaxation and heating over the rest of the cycle.
            for (int q = 0; q < 3; ++q) {
                if (s[q] == F) {
                    if (bernoulli(p_[q].decay_f)) s[q] = E;
                } else if (s[q] == E) {
                    if (bernoulli(p_[q].decay_e)) s[q] = G;
                } else if (bernoulli(p_[q].thermal)) {
                    s[q] = E;
                }
            }
        }
        return rec;
    }

   private:
    int injection_index() const {
        if (!cfg_.injection) return -1;
        if (cfg_.injection->qubit == cfg_.data1) return 0;
        if (cfg_.injection->qubit == cfg_.ancilla) return 1;
        return 2;
    }

    bool bernoulli(double p) {
        if (p <= 0) return false;
        return uniform01(rng_) < p;
    }

    static uint8_t x_ef(uint8_t v) { return v == E ? F : (v == F ? E : v); }
    static uint8_t x_ge(uint8_t v) { return v == G ? E : (v == E ? G : v); }

    // CNOT from data qubit `d` onto the ancilla. A leaked control leaves the
    // target alone and scrambles the parity; a leaked target is untouched.
    bool cnot(std::array<uint8_t, 3> &s, int d) {
        bool scrambled = false;
        if (s[d] == F) {
            scrambled = true;
        } else if (s[1] != F && s[d] == E) {
            s[1] = x_ge(s[1]);
        }
        for (int q : {d, 1}) {
            if (s[q] == F) continue;
            if (bernoulli(p_[q].gate_leak)) {
                s[q] = F;
            } else if (bernoulli(p_[q].gate_error)) {
                s[q] = x_ge(s[q]);
            }
        }
        return scrambled;
    }

    const StabilizerConfig &cfg_;
    const std::array<QubitParams, 3> &p_;
    Rng &rng_;
};

std::vector<uint8_t> expected_outcomes(const StabilizerConfig &config) {
    StabilizerConfig ideal = config;
    ideal.channel = ideal_channel_model({config.data1, config.ancilla, config.data2});
    ideal.injection.reset();
    ideal.data_init = DataInit::Ground;
    const std::array<QubitParams, 3> p{params_of(ideal.channel, ideal.data1), params_of(ideal.channel, ideal.ancilla),
                                       params_of(ideal.channel, ideal.data2)};
    Rng rng = make_stream(0, 0);
    return Shot(ideal, p, rng).run().outcomes;
}

}  // namespace

CycleTrace run_stabilizer(const StabilizerConfig &config, int workers) {
    config.validate();
    const std::array<QubitParams, 3> p{params_of(config.channel, config.data1),
                                       params_of(config.channel, config.ancilla),
                                       params_of(config.channel, config.data2)};
    const auto shots = static_cast<size_t>(config.shots);
    std::vector<ShotRecord> records(shots);
    parallel_for(shots, workers, [&](size_t i) {
        Rng rng = make_stream(config.seed, i);
        records[i] = Shot(config, p, rng).run();
    });

    CycleTrace trace;
    trace.qubits = {config.data1, config.ancilla, config.data2};
    trace.shots = config.shots;
    trace.expected = expected_outcomes(config);
    const auto n_points = static_cast<size_t>(config.n_cycles) + 1;
    std::vector<std::array<std::array<size_t, 3>, 3>> counts(n_points);  // [k][qubit][level]
    for (auto &c : counts) {
        for (auto &row : c) row.fill(0);
    }
    trace.syndromes.reserve(shots);
    trace.initial_parity.reserve(shots);
    for (auto &rec : records) {
        trace.initial_parity.push_back(rec.initial_parity);
        for (size_t k = 0; k < n_points; ++k) {
            for (size_t q = 0; q < 3; ++q) ++counts[k][q][rec.states[k][q]];
        }
        trace.syndromes.push_back(std::move(rec.outcomes));
    }
    trace.P_f.assign(3, std::vector<double>(n_points, 0.0));
    trace.leaked.assign(3, std::vector<double>(n_points, 0.0));
    for (size_t q = 0; q < 3; ++q) {
        const auto &conf = config.channel.qubit(trace.qubits[q]).readout;
        for (size_t k = 0; k < n_points; ++k) {
            double reported = 0;
            for (size_t s = 0; s < 3; ++s) reported += static_cast<double>(counts[k][q][s]) * conf.m[s][2];
            trace.P_f[q][k] = reported / static_cast<double>(shots);
            trace.leaked[q][k] = static_cast<double>(counts[k][q][2]) / static_cast<double>(shots);
        }
    }
    trace.detection = detection_fraction(trace.syndromes, trace.expected, trace.initial_parity);
    return trace;
}

std::vector<double> detection_fraction(const std::vector<std::vector<uint8_t>> &syndromes,
                                       const std::vector<uint8_t> &expected,
                                       const std::vector<uint8_t> &initial_parity) {
    const size_t n = expected.size();
    std::vector<double> out(n, 0.0);
    if (syndromes.empty()) return out;
    if (!initial_parity.empty() && initial_parity.size() != syndromes.size()) {
        throw InvariantError("initial parity needs one entry per shot");
    }
    for (size_t shot = 0; shot < syndromes.size(); ++shot) {
        const auto &s = syndromes[shot];
        if (s.size() != n) throw InvariantError("syndrome record length differs from the expected pattern");
        for (size_t k = 0; k < n; ++k) {
            uint8_t d = s[k] ^ expected[k];
            if (k == 0 && !initial_parity.empty()) d ^= initial_parity[shot];
            if (k > 0) d ^= s[k - 1] ^ expected[k - 1];
            out[k] += d;
        }
    }
    for (auto &v : out) v /= static_cast<double>(syndromes.size());
    return out;
}

std::vector<LeakageTraceFit> leakage_trace(const CycleTrace &trace) {
    std::vector<LeakageTraceFit> out;
    for (size_t q = 0; q < trace.qubits.size(); ++q) {
        const auto &y = trace.P_f[q];
        if (y.size() < 2) throw InvariantError("leakage_trace needs >= 2 points");
        const double n = static_cast<double>(y.size());
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        for (size_t k = 0; k < y.size(); ++k) {
            const double x = static_cast<double>(k);
            sx += x;
            sy += y[k];
            sxx += x * x;
            sxy += x * y[k];
        }
        LeakageTraceFit f;
        f.qubit = trace.qubits[q];
        f.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
        f.intercept = (sy - f.slope * sx) / n;
        f.growth = y.back() - y.front();
        out.push_back(f);
    }
    return out;
}

std::vector<double> leakage_delta(const CycleTrace &lru_off, const CycleTrace &lru_on) {
    if (lru_off.qubits != lru_on.qubits || lru_off.P_f.empty() || lru_on.P_f.empty() ||
        lru_off.P_f[0].size() != lru_on.P_f[0].size()) {
        throw InvariantError("leakage_delta: traces are not comparable");
    }
    std::vector<double> out;
    for (size_t q = 0; q < lru_off.qubits.size(); ++q) out.push_back(lru_off.P_f[q].back() - lru_on.P_f[q].back());
    return out;
}

LeakageRates per_cycle_rates(const StabilizerConfig &config, const std::string &qubit) {
    const QubitParams p = params_of(config.channel, qubit);
    const double eta = config.lru_enabled ? p.eta : 0.0;
    const double removal = 1.0 - (1.0 - eta) * (1.0 - p.decay_f);
    LeakageRates r;
    if (qubit == config.ancilla) {
        // readout point -> measurement leakage -> LRU and decay -> two CNOTs -> readout point
        const double q = 1.0 - (1.0 - p.gate_leak) * (1.0 - p.gate_leak);
        const double after_meas = p.meas_leak * (1.0 - removal);
        r.L = after_meas + (1.0 - after_meas) * q;
        r.eta = removal * (1.0 - q);
    } else if (qubit == config.data1 || qubit == config.data2) {
        r.L = p.gate_leak;
        r.eta = removal * (1.0 - p.gate_leak);
    } else {
        throw InvariantError("qubit '" + qubit + "' is not part of the stabilizer");
    }
    return r;
}

}  // namespace leakstack
