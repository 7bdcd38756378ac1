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
#include <string>
#include <vector>

namespace leakstack {

enum class SegmentKind { Flat, Edge, Square, Parametric };

const char *to_string(SegmentKind k);

/// One piece of a coupler frequency trajectory. Times in ns, frequencies GHz.
struct FluxSegment {
    SegmentKind kind = SegmentKind::Flat;
    double duration = 0.0;
    double start = 0.0;  // level at the segment start; omega_bar_c for Parametric
    double end = 0.0;    // Edge target; equal to start otherwise
    double amplitude = 0.0;
    double omega_p = 0.0;
    double phase = 0.0;

    /// Frequency at local time tau in [0, duration].
    double frequency_at(double tau) const;
    double initial_value() const { return frequency_at(0.0); }
    double final_value() const { return frequency_at(duration); }
};

/// Piecewise frequency trajectory of one tunable element. Segments are built
/// from the current end value so ramps are continuous by construction; only
/// square segments may jump.
class FluxTrajectory {
   public:
    FluxTrajectory() = default;
    FluxTrajectory(std::string channel, double initial_frequency);

    const std::string &channel() const { return channel_; }
    double initial_frequency() const { return initial_; }
    double final_frequency() const;
    double duration() const { return starts_.empty() ? 0.0 : starts_.back() + segments_.back().duration; }
    const std::vector<FluxSegment> &segments() const { return segments_; }

    FluxTrajectory &hold(double duration);
    /// Raised-cosine ramp from the current value to target.
    FluxTrajectory &ramp_to(double target, double duration);
    /// Jumps to level and stays there for duration.
    FluxTrajectory &square(double level, double duration);
    /// omega(t) = omega_bar_c + amplitude * sin(2 pi omega_p t + phase), t local.
    FluxTrajectory &parametric(double omega_bar_c, double amplitude, double omega_p, double phase,
                               double duration);
    FluxTrajectory &append(const FluxSegment &segment);
    /// Appends another trajectory of the same channel.
    FluxTrajectory &append(const FluxTrajectory &other);
    /// Extends with a flat hold so the total equals duration.
    FluxTrajectory &pad_to(double duration);

    /// Frequency at absolute time t; clamps outside [0, duration].
    double frequency(double t) const;

    /// Checks durations and continuity (jumps below 1 MHz unless square).
    void validate() const;

   private:
    std::string channel_;
    double initial_ = 0.0;
    std::vector<FluxSegment> segments_;
    std::vector<double> starts_;
};

enum class GateKind { X, Xef, Xfh, Y2, VirtualZ, Swap };

const char *to_string(GateKind k);

/// Instantaneous ideal operation. Swap exchanges the one-excitation
/// populations of `target` and `partner` (an ideal qubit-coupler swap).
struct GateEvent {
    double time = 0.0;
    GateKind kind = GateKind::X;
    std::string target;
    std::string partner;
    double angle = 0.0;
};

struct PulseSchedule {
    double duration = 0.0;
    std::map<std::string, FluxTrajectory> channels;
    std::vector<GateEvent> gates;
    /// Recorded, not applied: virtual-Z corrections, conditional phases.
    std::map<std::string, double> metadata;

    void add_channel(const FluxTrajectory &trajectory);
    void add_gate(const GateEvent &gate);
    /// Pads every channel with a flat hold up to the schedule duration.
    void pad();
    void validate() const;
    /// Sequential composition; channels absent on one side hold their level.
    PulseSchedule then(const PulseSchedule &next) const;
    bool empty() const { return duration <= 0.0 && gates.empty(); }
};

}  // namespace leakstack
