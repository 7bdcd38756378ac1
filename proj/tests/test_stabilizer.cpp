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


#include <cmath>

#include <gtest/gtest.h>

#include "leakstack/errors.hpp"
#include "leakstack/ini.hpp"
#include "leakstack/parallel.hpp"
#include "leakstack/stabilizer.hpp"

using namespace leakstack;

namespace {

StabilizerConfig ideal_config(int shots = 2000) {
    StabilizerConfig c;
    c.channel = ideal_channel_model({"D1", "A", "D2"});
    c.channel.qubits["A"].ancilla = true;
    c.n_cycles = 12;
    c.shots = shots;
    c.seed = 5;
    return c;
}

StabilizerConfig paper_config(int shots) {
    auto text = ini::read_config_text("paper_device");
    auto c = parse_stabilizer_config(text, parse_channel_model(text));
    c.shots = shots;
    return c;
}

double binomial_sigma(double p, int n) { return std::sqrt(p * (1 - p) / n); }

}  // namespace

TEST(stabilizer, noiseless_has_no_detections) {
    for (auto init : {DataInit::Y2, DataInit::Ground}) {
        auto c = ideal_config();
        c.data_init = init;
        auto t = run_stabilizer(c);
        ASSERT_EQ(t.detection.size(), 12u);
        for (double d : t.detection) EXPECT_EQ(d, 0.0);
        for (const auto &q : t.P_f)
            for (double p : q) EXPECT_EQ(p, 0.0);
        for (auto f : leakage_trace(t)) EXPECT_EQ(f.slope, 0.0);
    }
}

TEST(stabilizer, readout_floor_sets_intercept) {
    auto c = ideal_config(20000);
    c.data_init = DataInit::Ground;
    c.channel.qubits["D1"].readout = ConfusionMatrix{{{0.97, 0.01, 0.02}, {0.02, 0.95, 0.03}, {0.0, 0.1, 0.9}}};
    auto t = run_stabilizer(c);
    EXPECT_NEAR(t.P_f[0][0], 0.02, 4 * binomial_sigma(0.02, c.shots));
    for (double d : t.detection) EXPECT_EQ(d, 0.0);
}

TEST(stabilizer, ancilla_injection_randomizes_outcome) {
    auto c = ideal_config(20000);
    c.data_init = DataInit::Ground;
    // Data echoes put D1 in |e> on even cycles, so the ancilla is in |e>
    // between the CNOTs there and X_ef leaks it.
    c.injection = Injection{"A", 6};
    auto t = run_stabilizer(c);
    // Cycle 6 reads a leaked ancilla (random), cycle 7 compares with it.
    EXPECT_NEAR(t.detection[5], 0.5, 4 * binomial_sigma(0.5, c.shots));
    EXPECT_NEAR(t.detection[6], 0.5, 4 * binomial_sigma(0.5, c.shots));
    for (int k : {0, 1, 2, 3, 4}) EXPECT_EQ(t.detection[k], 0.0);
    // Odd cycle: the ancilla sits in |g>, X_ef does nothing.
    c.injection = Injection{"A", 5};
    for (double d : run_stabilizer(c).detection) EXPECT_EQ(d, 0.0);
}

TEST(stabilizer, detection_fraction_rules) {
    std::vector<uint8_t> expected{1, 0, 1, 0};
    std::vector<std::vector<uint8_t>> same(10, expected);
    for (double d : detection_fraction(same, expected)) EXPECT_EQ(d, 0.0);
    // An odd initial parity flips every outcome; only cycle 1 sees it.
    std::vector<std::vector<uint8_t>> flipped(10, std::vector<uint8_t>{0, 1, 0, 1});
    auto odd = detection_fraction(flipped, expected, std::vector<uint8_t>(10, 1));
    for (double d : odd) EXPECT_EQ(d, 0.0);

    Rng rng = make_stream(1, 0);
    const int n = 20000;
    std::vector<std::vector<uint8_t>> random(n, std::vector<uint8_t>(4));
    for (auto &s : random)
        for (auto &b : s) b = uniform01(rng) < 0.5;
    for (double d : detection_fraction(random, expected)) EXPECT_NEAR(d, 0.5, 4 * binomial_sigma(0.5, n));
    EXPECT_THROW(detection_fraction({{1, 0}}, expected), InvariantError);
}

TEST(stabilizer, deterministic_across_workers) {
    auto c = paper_config(600);
    c.seed = 9;
    c.injection = Injection{"D1", 4};
    auto a = run_stabilizer(c, 1);
    auto b = run_stabilizer(c, 5);
    EXPECT_EQ(a.P_f, b.P_f);
    EXPECT_EQ(a.detection, b.detection);
    EXPECT_EQ(a.syndromes, b.syndromes);
}

TEST(stabilizer, lru_reduces_leakage) {
    auto on = paper_config(3000);
    auto off = on;
    off.lru_enabled = false;
    auto t_on = run_stabilizer(on, 4), t_off = run_stabilizer(off, 4);
    for (double d : leakage_delta(t_off, t_on)) EXPECT_GT(d, 0.0);
}

TEST(stabilizer, markov_steady_state) {
    EXPECT_NEAR(markov_steady_state(0.01, 0.99), 0.01 / 1.0, 1e-15);
    EXPECT_EQ(markov_steady_state(0.0, 0.5), 0.0);
    auto c = paper_config(8000);
    c.n_cycles = 40;
    auto t = run_stabilizer(c, 4);
    for (size_t q = 0; q < t.qubits.size(); ++q) {
        auto r = per_cycle_rates(c, t.qubits[q]);
        double ss = markov_steady_state(r.L, r.eta);
        // Average the tail to reduce noise; consecutive cycles are nearly
        // independent at these removal rates.
        double mean = 0;
        int n = 0;
        for (size_t k = 20; k < t.leaked[q].size(); ++k, ++n) mean += t.leaked[q][k];
        mean /= n;
        EXPECT_NEAR(mean, ss, 4 * binomial_sigma(ss, c.shots)) << t.qubits[q];
    }
}

TEST(stabilizer, config_errors) {
    auto c = ideal_config();
    c.injection = Injection{"D1", 13};
    EXPECT_THROW(c.validate(), InvariantError);
    c.injection = Injection{"Q9", 3};
    EXPECT_THROW(c.validate(), InvariantError);
    EXPECT_THROW(data_init_from_string("plus"), ConfigError);
}
