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


#ifndef LEAKSTACK_EXPERIMENTS_HPP
#define LEAKSTACK_EXPERIMENTS_HPP

#include <iosfwd>
#include <string>
#include <vector>

#include "leakstack/device.hpp"
#include "leakstack/protocols.hpp"

namespace leakstack {

// ---------------------------------------------------------------------------
// Coupler excitation propagation.
//
// One coupler is populated by an ideal QC swap and returns from its swap
// point to idle, crossing the paths of its neighbours. After an idle wait
// and optional simultaneous c-LRUs, each coupler is swapped out in turn and
// its excitation read. Couplers and their readout resonators are simulated
// with two levels each (one excitation at most).

struct PropagationOptions {
    /// Coupler chain; empty selects every coupler in config order.
    std::vector<std::string> couplers;
    bool c_lru = false;
    CLruOptions c_lru_options;
    std::vector<double> waits{0.0};  // ns at idle before the c-LRUs
    bool noise = true;
    int workers = 1;
    RunOptions run;
};

struct PropagationResult {
    std::vector<std::string> couplers;
    std::vector<double> waits;
    bool c_lru = false;
    /// occupancy[wait][populated][measured]
    std::vector<std::vector<std::vector<double>>> occupancy;
};

PropagationResult run_propagation(const DeviceGraph &device, const PropagationOptions &options = {});
/// Columns: wait_ns,populated,measured,occupancy
void write_propagation_csv(const PropagationResult &result, std::ostream &out);

// ---------------------------------------------------------------------------
// Joint coupler-resonator dissipation with the coupler parked on resonance.

struct JointDecayResult {
    std::string coupler;
    std::string resonator;
    double expected_rate = 0.0;  // 1/ns, kappa_r / 2
    double fitted_rate = 0.0;    // 1/ns, from the coupler population envelope
    double relative_error = 0.0;
    std::vector<double> times;
    std::vector<double> coupler_population;
};

JointDecayResult measure_joint_decay(const DeviceGraph &device, const std::string &coupler, double hold_ns = 300.0,
                                     const RunOptions &options = {});

// ---------------------------------------------------------------------------
// Parametric swap rate versus drive strength.

struct SwapRatePoint {
    int m = 1;
    double x = 0.0;  // A_p / (m omega_p)
    double A_p = 0.0;
    double omega_p = 0.0;
    double g_time_domain = 0.0;  // from the first swap minimum
    double g_floquet = 0.0;      // half the quasienergy gap
    double g_formula = 0.0;      // sqrt(n_ex) g_qc J_m(A_p / (m omega_p))
    double relative_error = 0.0;  // time domain vs formula
};

SwapRatePoint measure_swap_rate(const DeviceGraph &device, const std::string &qubit, LruTarget transition, int m,
                                double x, const EvolutionOptions &options = {});

// ---------------------------------------------------------------------------
// Readout error versus experiment repetition rate, with and without reset.

struct ResetModel {
    std::string qubit = "A";
    double t1_us = 71.0;
    double efficiency = 0.995;       // removal probability of the reset
    double duration_ns = 200.0;      // c-LRUs + e-Reset + c-LRUs
    double thermal_population = 0.008;
    double previous_excited = 0.5;   // excited population left by the previous run
    double readout_error_g = 0.005;  // P(report e | g), intrinsic
    double readout_error_e = 0.012;  // P(report g | e), intrinsic

    void validate() const;
};

/// Reads the [reset] section; t1 falls back to the qubit's configured T1.
ResetModel parse_reset_model(const std::string &text, const DeviceGraph &device,
                             const std::string &source_name = "<string>");
ResetModel load_reset_model(const std::string &config_path, const DeviceGraph &device);

struct RepRatePoint {
    double rate_khz = 0.0;
    double residual = 0.0;  // excited population at the start of a run
    double error_g = 0.0;
    double error_e = 0.0;
    double fidelity = 0.0;  // 1 - (error_g + error_e) / 2
};

std::vector<RepRatePoint> repetition_rate_study(const ResetModel &model, const std::vector<double> &rates_khz,
                                                bool reset);
/// Columns: rate_khz,reset,residual,error_g,error_e,fidelity
void write_reprate_csv(const std::vector<RepRatePoint> &without, const std::vector<RepRatePoint> &with,
                       std::ostream &out);

}  // namespace leakstack

#endif  // LEAKSTACK_EXPERIMENTS_HPP
