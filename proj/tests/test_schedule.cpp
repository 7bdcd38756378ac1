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
#include "leakstack/schedule.hpp"

using namespace leakstack;

TEST(schedule, ramp_is_continuous_and_smooth) {
    FluxTrajectory t("C1", 5.5);
    t.ramp_to(4.6, 10).hold(20).ramp_to(5.5, 10);
    EXPECT_DOUBLE_EQ(t.duration(), 40.0);
    EXPECT_DOUBLE_EQ(t.frequency(0), 5.5);
    EXPECT_NEAR(t.frequency(5), 0.5 * (5.5 + 4.6), 1e-12);
    EXPECT_DOUBLE_EQ(t.frequency(25), 4.6);
    EXPECT_DOUBLE_EQ(t.final_frequency(), 5.5);
    // Raised cosine: zero slope at both ends.
    EXPECT_NEAR(t.frequency(1e-4) - t.frequency(0), 0.0, 1e-7);
    EXPECT_NO_THROW(t.validate());
}

TEST(schedule, parametric_segment) {
    FluxTrajectory t("C2", 4.584);
    t.parametric(4.584, 0.04, 0.706, 0.0, 60);
    EXPECT_NEAR(t.frequency(0.25 / 0.706), 4.584 + 0.04, 1e-12);
    EXPECT_NEAR(t.frequency(0.75 / 0.706), 4.584 - 0.04, 1e-12);
    EXPECT_NO_THROW(t.validate());
}

TEST(schedule, discontinuity_rejected_unless_square) {
    FluxTrajectory t("C1", 5.5);
    FluxSegment jump;
    jump.kind = SegmentKind::Flat;
    jump.duration = 5;
    jump.start = jump.end = 5.0;
    t.append(jump);
    EXPECT_THROW(t.validate(), InvariantError);

    FluxTrajectory s("C1", 5.5);
    s.square(6.0, 8.3).square(5.5, 1.0);
    EXPECT_NO_THROW(s.validate());
    EXPECT_THROW(FluxTrajectory("C1", 5.5).hold(-1), InvariantError);
}

TEST(schedule, padding_and_composition) {
    PulseSchedule a;
    a.add_channel(FluxTrajectory("C1", 5.5).square(6.0, 8.0).square(5.5, 2.0));
    a.add_channel(FluxTrajectory("C2", 5.4).hold(4.0));
    a.duration = 10;
    a.pad();
    EXPECT_NO_THROW(a.validate());
    EXPECT_DOUBLE_EQ(a.channels.at("C2").duration(), 10.0);

    PulseSchedule b;
    b.add_channel(FluxTrajectory("C3", 5.3).hold(5.0));
    b.duration = 5;
    b.add_gate(GateEvent{1.0, GateKind::Xef, "A", "", 0.0});
    auto c = a.then(b);
    EXPECT_DOUBLE_EQ(c.duration, 15.0);
    EXPECT_EQ(c.channels.size(), 3u);
    EXPECT_DOUBLE_EQ(c.channels.at("C3").frequency(2.0), 5.3);
    EXPECT_DOUBLE_EQ(c.channels.at("C1").frequency(14.0), 5.5);
    ASSERT_EQ(c.gates.size(), 1u);
    EXPECT_DOUBLE_EQ(c.gates[0].time, 11.0);
    EXPECT_NO_THROW(c.validate());
}
