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

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "leakstack/device.hpp"
#include "leakstack/dynamics.hpp"
#include "leakstack/readout.hpp"
#include "leakstack/schedule.hpp"

namespace leakstack {

/// Qubit (4 levels), coupler (3) and, when named, resonator (3).
TensorSpace qcr_subsystem(const DeviceGraph &device, const std::string &qubit, const std::string &coupler,
                          const std::string &resonator = "", int qubit_dim = 4, int coupler_dim = 3,
                          int resonator_dim = 3);

enum class SwapKind { QubitCoupler, CouplerResonator };

struct CalibrationResult {
    SwapKind kind = SwapKind::QubitCoupler;
    std::string qubit;
    std::string coupler;
    LruTarget transition = LruTarget::FLru;
    int harmonic = 1;
    double omega_bar_c = 0.0;  // GHz
    double edge_ns = 10.0;
    double omega_p_opt = 0.0;   // GHz; for CR swaps the coupler frequency on the plateau
    double A_p_opt = 0.0;       // GHz; for CR swaps the square-pulse amplitude
    double duration_opt = 0.0;  // ns, plateau
    double residual_population = 1.0;
    double virtual_z = 0.0;  // rad, phase of |e> relative to |g> after the pulse
    bool interior = true;
    std::vector<double> axis_x;  // frequency (QC) or amplitude (CR) grid
    std::vector<double> axis_y;  // duration grid
    std::vector<std::vector<double>> surface;  // [x][y]

    void validate() const;
};

/// Coupler pulse of a QC swap: raised-cosine ramp to omega_bar_c, modulation
/// at (omega_p_opt, A_p_opt) for duration_opt, ramp back to idle.
FluxTrajectory qc_swap_trajectory(const DeviceGraph &device, const CalibrationResult &cal);

struct ChevronOptions {
    int workers = 1;
    EvolutionOptions evolution;
};

/// Runs the calibration sequence (prepare the target level, parametric pulse,
/// measure) at every grid point with noise off, populations read in the idle
/// dressed basis. Amplitude, omega_bar_c and edges come from the device
/// LRU assignment unless `amplitude` is given.
CalibrationResult calibrate_qc_swap(const DeviceGraph &device, const std::string &qubit, const std::string &coupler,
                                    LruTarget transition, const std::vector<double> &freq_grid,
                                    const std::vector<double> &dur_grid, const ChevronOptions &options = {},
                                    std::optional<double> amplitude = std::nullopt);

/// Fast path: locates the dressed resonance with a Floquet scan and sets the
/// plateau to a full swap at the configured amplitude.
CalibrationResult calibrate_qc_swap_floquet(const DeviceGraph &device, const std::string &qubit,
                                            LruTarget transition, const EvolutionOptions &options = {});

/// Amplitude giving a full swap over `plateau_ns` at the dressed resonance.
struct AmplitudeCalibration {
    double A_p = 0.0;
    double omega_p = 0.0;
    double g_eff = 0.0;
};
AmplitudeCalibration calibrate_amplitude(const DeviceGraph &device, const std::string &qubit, LruTarget transition,
                                         double plateau_ns = 60.0, const EvolutionOptions &options = {});

/// CR swap chevron: coupler starts with one excitation, a square pulse of
/// amplitude A (coupler at idle + A) for tau, then the coupler population.
/// Noise on, so the zero-amplitude row decays at the coupler T1.
/// Dressed parametric resonance of a qubit's QC swap at its operating point,
/// for drive amplitude A_p and harmonic m (0 keeps the configured harmonic).
FloquetResonance locate_qc_resonance(const DeviceGraph &device, const std::string &qubit, LruTarget transition,
                                     double A_p, int harmonic = 0, const EvolutionOptions &options = {});

CalibrationResult calibrate_cr_swap(const DeviceGraph &device, const std::string &coupler,
                                    const std::vector<double> &amp_grid, const std::vector<double> &dur_grid,
                                    const ChevronOptions &options = {});

/// 1 / (4 g_cr): vacuum-Rabi half period for the coupler's resonator edge.
double cr_half_exchange_time(const DeviceGraph &device, const std::string &coupler);

enum class CLruMode { ISwap, Hold };

struct CLruOptions {
    CLruMode mode = CLruMode::ISwap;
    double hold_ns = 0.0;
    double iswap_ns = 0.0;     // 0 selects cr_half_exchange_time
    double ringdown_ns = 50.0;  // idle for resonator decay afterwards
};

PulseSchedule schedule_c_lru(const DeviceGraph &device, const std::vector<std::string> &couplers,
                             const CLruOptions &options = {});

struct LruScheduleOptions {
    CLruOptions c_lru;
    double max_duration_ns = 1000.0;
};

PulseSchedule schedule_e_reset(const DeviceGraph &device, const std::string &qubit, const std::string &coupler,
                               const CalibrationResult &cal, const LruScheduleOptions &options = {});
PulseSchedule schedule_f_lru(const DeviceGraph &device, const std::string &qubit, const std::string &coupler,
                             const CalibrationResult &cal, const LruScheduleOptions &options = {});
/// h -> f swap with the coupler, c-LRU, then the f-LRU.
PulseSchedule schedule_h_lru(const DeviceGraph &device, const std::string &qubit, const std::string &coupler,
                             const CalibrationResult &cal_h, const CalibrationResult &cal_f,
                             const LruScheduleOptions &options = {});

struct EfficiencyReport {
    double eta = 0.0;
    double P_target_prepared = 0.0;  // target read, target prepared (P_ff)
    double P_lower_prepared = 0.0;   // target read, lower level prepared (P_fe)
    double P_target_after_lru = 0.0;
    std::vector<std::string> warnings;
};

/// eta = 1 - (P_after - P_lower) / P_target; not clamped.
EfficiencyReport lru_efficiency(double P_target_prepared, double P_lower_prepared, double P_target_after_lru);

struct RunOptions {
    double sample_step_ns = 1.0;
    EvolutionOptions evolution;
};

/// Evolves through the schedule; gate events act as instantaneous ideal
/// unitaries between integration windows.
EvolutionResult run_schedule(const DeviceGraph &device, const TensorSpace &space, const PulseSchedule &schedule,
                             const DensityMatrix &initial, bool noise, const RunOptions &options = {});

/// Ideal unitary for a gate event on the space.
DenseMatrix gate_unitary(const TensorSpace &space, const GateEvent &gate);

/// Dressed eigenbasis of the subsystem with every element at idle.
DenseMatrix idle_dressed_basis(const DeviceGraph &device, const TensorSpace &space);

/// Density matrix of the dressed state adiabatically connected to |levels>.
DensityMatrix dressed_basis_state(const TensorSpace &space, const DenseMatrix &basis, std::span<const int> levels);

/// Qubit level populations measured in the dressed basis.
std::vector<double> dressed_mode_populations(const DensityMatrix &rho, const DenseMatrix &basis, size_t mode);

struct LruMeasurement {
    EfficiencyReport report;
    std::vector<double> populations_after;  // true qubit populations after the LRU
    double duration_ns = 0.0;
};

/// Prepares the target level, runs the LRU schedule, and applies the readout
/// confusion to form the efficiency inputs.
LruMeasurement measure_lru_efficiency(const DeviceGraph &device, const std::string &qubit, LruTarget target,
                                      bool noise, const ConfusionMatrix &readout,
                                      const RunOptions &options = {});

std::string calibration_to_json(const CalibrationResult &cal);
CalibrationResult calibration_from_json(const std::string &text);
/// Columns x, duration_ns, population.
void write_surface_csv(const CalibrationResult &cal, std::ostream &out);

}  // namespace leakstack
