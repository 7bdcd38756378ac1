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


// Single-qubit (simultaneous) randomized benchmarking on the {g, e, f}
// channel model, and the exponential-decay fitter.

#ifndef LEAKSTACK_RB_HPP
#define LEAKSTACK_RB_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "leakstack/channel.hpp"

namespace leakstack {

struct RbConfig {
    std::vector<int> m_values{1, 10, 20, 30, 40, 50, 60, 70, 80, 90, 100, 110, 120, 130, 140, 150};
    int sequences = 30;
    InterleavedOp interleaved = InterleavedOp::None;
    uint64_t seed = 0;

    void validate() const;
};

/// Optional [rb] section: m_values, sequences, interleaved.
RbConfig parse_rb_config(const std::string &text, const std::string &source_name = "<string>");

struct RbFit {
    double A = 0.0;
    double B = 0.0;
    double p = 1.0;
    double r = 0.0;  // (1 - p) (d - 1) / d with d = 2
    double rss = 0.0;
    bool converged = true;
};

/// Least squares of F(m) = A p^m + B. Needs >= 3 distinct m.
RbFit fit_rb(const std::vector<double> &m, const std::vector<double> &F);

/// r_op = r_int - r_ref, reported as is.
double interleaved_error(double r_ref, double r_int);

struct RbQubitResult {
    std::string qubit;
    std::vector<double> F_ref;
    RbFit ref;
    std::vector<double> F_int;  // empty without an interleaved op
    std::optional<RbFit> interleaved;
    std::optional<double> r_op;
};

struct RbResult {
    RbConfig config;
    std::vector<RbQubitResult> qubits;
};

/// Ground-state population after m random Cliffords plus recovery, averaged
/// over sequences, for every qubit of the channel model. Reference and
/// interleaved runs share their random sequences.
RbResult run_rb(const LeakageChannelModel &channel, const RbConfig &config, int workers = 1);

}  // namespace leakstack

#endif  // LEAKSTACK_RB_HPP
