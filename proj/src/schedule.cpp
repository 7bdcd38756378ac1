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

#include "leakstack/schedule.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "leakstack/errors.hpp"

namespace leakstack {

namespace {

constexpr double kContinuityTolerance = 1e-3;  // GHz

}  // namespace

const char *to_string(SegmentKind k) {
    switch (k) {
        case SegmentKind::Flat: return "flat";
        case SegmentKind::Edge: return "edge";
        case SegmentKind::Square: return "square";
        case SegmentKind::Parametric: return "parametric";
    }
    return "?";
}

const char *to_string(GateKind k) {
    switch (k) {
        case GateKind::X: return "X";
        case GateKind::Xef: return "X_ef";
        case GateKind::Xfh: return "X_fh";
        case GateKind::Y2: return "Y/2";
        case GateKind::VirtualZ: return "virtual_Z";
        case GateKind::Swap: return "swap";
    }
    return "?";
}

double FluxSegment::frequency_at(double tau) const {
    switch (kind) {
        case SegmentKind::Flat:
        case SegmentKind::Square:
            return start;
        case SegmentKind::Edge: {
            if (duration <= 0) return end;
            const double s = std::clamp(tau / duration, 0.0, 1.0);
            return start + (end - start) * 0.5 * (1.0 - std::cos(std::numbers::pi * s));
        }
        case SegmentKind::Parametric:
            return start + amplitude * std::sin(2 * std::numbers::pi * omega_p * tau + phase);
    }
    return start;
}

FluxTrajectory::FluxTrajectory(std::string channel, double initial_frequency)
    : channel_(std::move(channel)), initial_(initial_frequency) {}

double FluxTrajectory::final_frequency() const {
    return segments_.empty() ? initial_ : segments_.back().final_value();
}

FluxTrajectory &FluxTrajectory::append(const FluxSegment &segment) {
    if (!(segment.duration >= 0)) {
        throw InvariantError("trajectory '" + channel_ + "': negative segment duration");
    }
    if (segment.duration == 0) return *this;
    starts_.push_back(duration());
    segments_.push_back(segment);
    return *this;
}

FluxTrajectory &FluxTrajectory::hold(double duration) {
    const double f = final_frequency();
    return append(FluxSegment{SegmentKind::Flat, duration, f, f});
}

FluxTrajectory &FluxTrajectory::ramp_to(double target, double duration) {
    if (duration == 0) {
        return square(target, 0);
    }
    return append(FluxSegment{SegmentKind::Edge, duration, final_frequency(), target});
}

FluxTrajectory &FluxTrajectory::square(double level, double duration) {
    return append(FluxSegment{SegmentKind::Square, duration, level, level});
}

FluxTrajectory &FluxTrajectory::parametric(double omega_bar_c, double amplitude, double omega_p, double phase,
                                           double duration) {
    FluxSegment s{SegmentKind::Parametric, duration, omega_bar_c, omega_bar_c};
    s.amplitude = amplitude;
    s.omega_p = omega_p;
    s.phase = phase;
    return append(s);
}

FluxTrajectory &FluxTrajectory::append(const FluxTrajectory &other) {
    if (!other.channel_.empty() && !channel_.empty() && other.channel_ != channel_) {
        throw InvariantError("cannot append trajectory '" + other.channel_ + "' to '" + channel_ + "'");
    }
    if (segments_.empty() && channel_.empty()) {
        *this = other;
        return *this;
    }
    for (const auto &s : other.segments_) append(s);
    return *this;
}

FluxTrajectory &FluxTrajectory::pad_to(double total) {
    const double d = duration();
    if (total > d + 1e-12) hold(total - d);
    return *this;
}

double FluxTrajectory::frequency(double t) const {
    if (segments_.empty() || t <= 0) {
        return segments_.empty() ? initial_ : segments_.front().initial_value();
    }
    auto it = std::upper_bound(starts_.begin(), starts_.end(), t);
    const size_t k = static_cast<size_t>(std::distance(starts_.begin(), it)) - 1;
    const auto &seg = segments_[k];
    const double tau = t - starts_[k];
    if (tau >= seg.duration) return seg.final_value();
    return seg.frequency_at(tau);
}

void FluxTrajectory::validate() const {
    double prev = initial_;
    for (size_t k = 0; k < segments_.size(); ++k) {
        const auto &s = segments_[k];
        if (!(s.duration > 0)) {
            throw InvariantError("trajectory '" + channel_ + "': segment " + std::to_string(k) +
                                 " has non-positive duration");
        }
        if (s.kind == SegmentKind::Parametric && !(s.omega_p > 0)) {
            throw InvariantError("trajectory '" + channel_ + "': parametric segment needs omega_p > 0");
        }
        const bool may_jump = s.kind == SegmentKind::Square ||
                              (k > 0 && segments_[k - 1].kind == SegmentKind::Square);
        if (!may_jump && std::abs(s.initial_value() - prev) > kContinuityTolerance) {
            std::ostringstream msg;
            msg << "trajectory '" << channel_ << "': discontinuity of " << (s.initial_value() - prev) * 1e3
                << " MHz at segment " << k << " (" << to_string(s.kind) << ")";
            throw InvariantError(msg.str());
        }
        prev = s.final_value();
    }
}

void PulseSchedule::add_channel(const FluxTrajectory &trajectory) {
    channels[trajectory.channel()] = trajectory;
    duration = std::max(duration, trajectory.duration());
}

void PulseSchedule::add_gate(const GateEvent &gate) {
    if (gate.time < 0) throw InvariantError("gate event at negative time");
    auto pos = std::upper_bound(gates.begin(), gates.end(), gate.time,
                                [](double t, const GateEvent &g) { return t < g.time; });
    gates.insert(pos, gate);
    duration = std::max(duration, gate.time);
}

void PulseSchedule::pad() {
    for (auto &[name, traj] : channels) traj.pad_to(duration);
}

void PulseSchedule::validate() const {
    for (const auto &[name, traj] : channels) {
        traj.validate();
        if (std::abs(traj.duration() - duration) > 1e-9) {
            throw InvariantError("schedule channel '" + name + "' spans " + std::to_string(traj.duration()) +
                                 " ns, schedule spans " + std::to_string(duration) + " ns");
        }
    }
    for (const auto &g : gates) {
        if (g.time < 0 || g.time > duration + 1e-9) throw InvariantError("gate event outside schedule");
    }
}

PulseSchedule PulseSchedule::then(const PulseSchedule &next) const {
    PulseSchedule out = *this;
    out.pad();
    const double offset = duration;
    for (const auto &[name, traj] : next.channels) {
        auto it = out.channels.find(name);
        if (it == out.channels.end()) {
            FluxTrajectory lead(name, traj.initial_frequency());
            lead.hold(offset);
            lead.append(traj);
            out.channels[name] = lead;
        } else {
            it->second.append(traj);
        }
    }
    for (auto g : next.gates) {
        g.time += offset;
        out.gates.push_back(g);
    }
    for (const auto &[k, v] : next.metadata) out.metadata[k] += v;
    out.duration = offset + next.duration;
    out.pad();
    return out;
}

}  // namespace leakstack
