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
#include "leakstack/protocols.hpp"

using namespace leakstack;

namespace {

const DeviceGraph &paper() {
    static const DeviceGraph d = load_device("paper_device");
    return d;
}

}  // namespace

TEST(protocols, efficiency_arithmetic) {
    EXPECT_NEAR(lru_efficiency(0.95, 0.01, 0.028).eta, 1 - 0.018 / 0.95, 1e-12);
    EXPECT_NEAR(lru_efficiency(0.95, 0.01, 0.028).eta, 0.9811, 5e-5);
    EXPECT_EQ(lru_efficiency(0.9, 0.02, 0.02).eta, 1.0);
    // Binary-exact inputs so the offset identity holds bit for bit.
    EXPECT_EQ(lru_efficiency(0.75, 0.125, 0.25).eta, lru_efficiency(0.75, 0.125 + 0.0625, 0.25 + 0.0625).eta);
    EXPECT_THROW(lru_efficiency(0.0, 0.0, 0.0), InvariantError);
    auto over = lru_efficiency(0.5, 0.2, 0.1);
    EXPECT_GT(over.eta, 1.0);
    EXPECT_FALSE(over.warnings.empty());
}

TEST(protocols, table_durations) {
    const auto &d = paper();
    EXPECT_NEAR(d.lru_for_qubit("A").operations.at(LruTarget::FLru).total_ns(), 98.0, 1.0);
    EXPECT_NEAR(d.lru_for_qubit("D1").operations.at(LruTarget::EReset).total_ns(), 76.0, 1.0);
}

TEST(protocols, c_lru_schedules) {
    const auto &d = paper();
    auto iswap = schedule_c_lru(d, {"C2"});
    const auto &traj = iswap.channels.at("C2");
    ASSERT_GE(traj.segments().size(), 1u);
    EXPECT_NEAR(traj.segments()[0].duration, 1 / (4 * 0.030), 1e-9);
    EXPECT_NEAR(cr_half_exchange_time(d, "C2"), 8.33, 0.01);

    CLruOptions hold;
    hold.mode = CLruMode::Hold;
    hold.hold_ns = 0;
    auto idle = schedule_c_lru(d, {"C1", "C2"}, hold);
    for (const auto &[name, t] : idle.channels)
        for (double time = 0; time <= idle.duration; time += 1.0)
            EXPECT_EQ(t.frequency(time), d.coupler(name).omega_idle);
    EXPECT_THROW(schedule_c_lru(d, {"A"}), InvariantError);
}

TEST(protocols, empty_schedule_returns_initial_state) {
    const auto &d = paper();
    auto space = qcr_subsystem(d, "A", "C2", "R_A");
    std::vector<int> f{2, 0, 0};
    auto rho = DensityMatrix::from_state(basis_state(space, f));
    auto r = run_schedule(d, space, PulseSchedule{}, rho, true);
    EXPECT_LT((r.final_rho.matrix - rho.matrix).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(protocols, f_lru_selectivity) {
    const auto &d = paper();
    auto cal = calibrate_qc_swap_floquet(d, "A", LruTarget::FLru);
    EXPECT_LT(cal.residual_population, 0.02);
    auto s = schedule_f_lru(d, "A", "C2", cal);
    auto space = qcr_subsystem(d, "A", "C2", "R_A");
    auto V = idle_dressed_basis(d, space);
    RunOptions ro;
    ro.sample_step_ns = 10;
    for (int level : {0, 1, 2}) {
        std::vector<int> lv{level, 0, 0};
        auto r = run_schedule(d, space, s, dressed_basis_state(space, V, lv), false, ro);
        auto p = dressed_mode_populations(r.final_rho, V, 0);
        if (level == 0) EXPECT_GT(p[0], 1 - 1e-3);
        if (level == 1) EXPECT_NEAR(p[1], 1.0, 1e-2);
        if (level == 2) EXPECT_LT(p[2], 0.02);
    }
}

TEST(protocols, schedule_requires_matching_calibration) {
    const auto &d = paper();
    CalibrationResult cal;
    cal.qubit = "A";
    cal.coupler = "C2";
    cal.transition = LruTarget::EReset;
    EXPECT_THROW(schedule_f_lru(d, "A", "C2", cal), InvariantError);
}

TEST(protocols, calibration_json_round_trip) {
    CalibrationResult cal;
    cal.qubit = "A";
    cal.coupler = "C2";
    cal.omega_bar_c = 4.584;
    cal.omega_p_opt = 0.7061234567890123;
    cal.A_p_opt = 0.03774;
    cal.duration_opt = 78.25;
    cal.residual_population = 0.0123;
    cal.virtual_z = -1.25;
    cal.axis_x = {0.7, 0.71};
    cal.axis_y = {0, 10};
    cal.surface = {{1, 0.5}, {1, 0.25}};
    auto back = calibration_from_json(calibration_to_json(cal));
    EXPECT_EQ(back.omega_p_opt, cal.omega_p_opt);
    EXPECT_EQ(back.surface, cal.surface);
    EXPECT_EQ(back.qubit, "A");
    EXPECT_EQ(back.transition, LruTarget::FLru);
    EXPECT_THROW(calibration_from_json("{not json"), ConfigError);
}

TEST(protocols, chevron_deterministic_across_workers) {
    const auto &d = paper();
    std::vector<double> f{0.700, 0.706, 0.712}, t{0, 40, 80};
    ChevronOptions one, three;
    three.workers = 3;
    auto a = calibrate_qc_swap(d, "A", "C2", LruTarget::FLru, f, t, one);
    auto b = calibrate_qc_swap(d, "A", "C2", LruTarget::FLru, f, t, three);
    EXPECT_EQ(a.surface, b.surface);
    EXPECT_EQ(calibration_to_json(a), calibration_to_json(b));
    EXPECT_THROW(calibrate_qc_swap(d, "A", "C2", LruTarget::FLru, {}, t), InvariantError);
}
