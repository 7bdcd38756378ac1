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
#include <numbers>
#include <sstream>

#include <gtest/gtest.h>

#include "leakstack/errors.hpp"
#include "leakstack/experiments.hpp"

using namespace leakstack;

namespace {

const DeviceGraph &paper() {
    static const DeviceGraph d = load_device("paper_device");
    return d;
}

}  // namespace

TEST(propagation, zero_stray_coupling_means_no_transfer) {
    auto d = paper();
    for (auto &e : d.edges)
        if (e.kind == EdgeKind::CouplerCoupler) e.coupling = 0.0;
    PropagationOptions o;
    o.workers = 4;
    auto r = run_propagation(d, o);
    ASSERT_EQ(r.occupancy.size(), 1u);
    for (size_t p = 0; p < 3; ++p)
        for (size_t m = 0; m < 3; ++m)
            if (p != m) EXPECT_LT(r.occupancy[0][p][m], 1e-3) << p << "->" << m;
}

TEST(propagation, missing_stray_edge_is_rejected) {
    auto d = paper();
    std::erase_if(d.edges, [](const Edge &e) {
        return e.kind == EdgeKind::CouplerCoupler && ((e.a == "C1" && e.b == "C2") || (e.a == "C2" && e.b == "C1"));
    });
    EXPECT_THROW(run_propagation(d), InvariantError);
}

TEST(propagation, csv_columns) {
    PropagationResult r;
    r.couplers = {"C1", "C2"};
    r.waits = {0.0};
    r.occupancy = {{{0.9, 0.1}, {0.05, 0.8}}};
    std::stringstream ss;
    write_propagation_csv(r, ss);
    std::string header;
    std::getline(ss, header);
    EXPECT_EQ(header, "wait_ns,populated,measured,occupancy");
}

TEST(joint_decay, envelope_rate_is_half_linewidth) {
    auto r = measure_joint_decay(paper(), "C2");
    EXPECT_NEAR(r.expected_rate, 2 * std::numbers::pi * 3.0e-3 / 2, 1e-12);
    EXPECT_LT(r.relative_error, 0.10);
}

TEST(swap_rate, first_harmonic_follows_bessel_law) {
    auto p = measure_swap_rate(paper(), "A", LruTarget::EReset, 1, 0.5);
    EXPECT_NEAR(p.x, 0.5, 1e-12);
    EXPECT_LT(p.relative_error, 0.05);
    EXPECT_NEAR(p.g_floquet, p.g_formula, 0.05 * p.g_formula);
}

TEST(reprate, residual_without_reset) {
    ResetModel m;
    m.thermal_population = 0.0;
    m.t1_us = 71.0;
    auto pts = repetition_rate_study(m, {10.0}, false);
    EXPECT_NEAR(pts[0].residual / m.previous_excited, std::exp(-100.0 / 71.0), 1e-15);
    EXPECT_NEAR(std::exp(-100.0 / 71.0), 0.245, 5e-4);
}

TEST(reprate, slow_repetition_reaches_thermal_floor) {
    auto m = load_reset_model("paper_device", paper());
    auto off = repetition_rate_study(m, {1e-4}, false);
    auto on = repetition_rate_study(m, {1e-4}, true);
    EXPECT_NEAR(off[0].residual, m.thermal_population, 1e-12);
    EXPECT_NEAR(on[0].residual, (1 - m.efficiency) * m.thermal_population, 1e-12);
}

TEST(reprate, reset_keeps_errors_low) {
    auto m = load_reset_model("paper_device", paper());
    std::vector<double> rates{1, 2, 5, 10, 20, 50, 100};
    auto on = repetition_rate_study(m, rates, true);
    auto off = repetition_rate_study(m, rates, false);
    for (size_t i = 0; i < rates.size(); ++i) {
        EXPECT_LT(on[i].error_g, 0.02);
        EXPECT_LT(on[i].error_e, 0.02);
        EXPECT_GE(on[i].fidelity, off[i].fidelity);
    }
    EXPECT_THROW(repetition_rate_study(m, {0.0}, true), InvariantError);
}
