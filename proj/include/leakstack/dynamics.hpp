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
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "leakstack/device.hpp"
#include "leakstack/schedule.hpp"
#include "leakstack/tensorspace.hpp"

namespace leakstack {

/// Subsystem of device elements with per-mode truncations, in the given order.
TensorSpace make_subsystem(const DeviceGraph &device, const std::vector<std::pair<std::string, int>> &modes);

struct HamiltonianOptions {
    /// Qubit-resonator dispersive edges are left out by default: readout
    /// enters through the readout module and the resonators act as sinks.
    bool include_dispersive = false;
};

/// Element frequency at idle: omega_idle for transmons, omega_r for resonators.
double idle_frequency(const DeviceGraph &device, const std::string &label);
/// Anharmonicity; zero for resonators.
double anharmonicity(const DeviceGraph &device, const std::string &label);

/// H/h in GHz: Duffing modes plus RWA exchange over every device edge inside
/// the subsystem. Modes missing from `frequencies` sit at idle.
Operator build_hamiltonian(const DeviceGraph &device, const TensorSpace &space,
                           const std::map<std::string, double> &frequencies = {},
                           const HamiltonianOptions &options = {});

enum class CollapseKind { Lowering, Number };

struct CollapseOp {
    CollapseKind kind = CollapseKind::Lowering;
    size_t mode = 0;
    double rate = 0.0;  // 1/ns; the dissipator uses sqrt(rate) * op
    std::string description;

    Operator op(const TensorSpace &space) const;
};

struct LindbladModel {
    std::vector<CollapseOp> collapse_ops;

    void validate() const;
};

/// Relaxation 1/T1 on transmons, pure dephasing 2/T_phi on qubits and
/// 2 pi kappa_r on resonators, all converted to 1/ns.
LindbladModel collapse_operators(const DeviceGraph &device, const TensorSpace &space);

struct ParametricDrive {
    int m = 1;
    double A_p = 0.0;      // GHz
    double omega_p = 0.0;  // GHz
    int n_ex = 1;

    void validate() const;
};

/// sqrt(n_ex) g_qc J_m(A_p / (m omega_p)).
double effective_parametric_coupling(const ParametricDrive &drive, double g_qc);

/// Sideband coupling of omega(t) = omega_bar + A_p sin(2 pi omega_p t):
/// the phase it imprints is (A_p / omega_p) cos, so the m-th sideband
/// carries sqrt(n_ex) g_qc J_m(A_p / omega_p). Agrees with the formula above
/// for m = 1.
double sideband_coupling(const ParametricDrive &drive, double g_qc);

struct EvolutionOptions {
    double abs_tol = 1e-8;
    double rel_tol = 1e-8;
    double max_step = 0.0;  // ns, 0 for none
    /// Uniform rotating-frame frequency omega_f N (exact, N is conserved);
    /// negative selects the mean initial mode frequency.
    double frame_frequency = -1.0;
    bool store_states = false;
    HamiltonianOptions hamiltonian;
};

struct EvolutionResult {
    TensorSpace space;
    std::vector<double> times;
    /// populations[mode][time][level]
    std::vector<std::vector<std::vector<double>>> populations;
    std::vector<DensityMatrix> rho_trajectory;  // when store_states
    std::vector<StateVector> psi_trajectory;    // when store_states
    DensityMatrix final_rho;
    StateVector final_psi;
    bool unitary = false;
    double max_trace_error = 0.0;
    std::vector<std::string> warnings;
};

/// Master equation with H(t) from the trajectories, integrated from
/// times.front() to times.back() with results sampled at `times`. Uses the
/// device collapse operators when `model` is null.
EvolutionResult evolve_lindblad(const DeviceGraph &device, const TensorSpace &space,
                                const std::vector<FluxTrajectory> &trajectories, const DensityMatrix &rho0,
                                const std::vector<double> &times, const EvolutionOptions &options = {},
                                const LindbladModel *model = nullptr);

EvolutionResult evolve_unitary(const DeviceGraph &device, const TensorSpace &space,
                               const std::vector<FluxTrajectory> &trajectories, const StateVector &psi0,
                               const std::vector<double> &times, const EvolutionOptions &options = {});

/// Evolves the given basis columns from t0 to t1 in the rotating frame.
/// Returns a dim x columns.size() matrix.
DenseMatrix propagate_columns(const DeviceGraph &device, const TensorSpace &space,
                              const std::vector<FluxTrajectory> &trajectories, const std::vector<size_t> &columns,
                              double t0, double t1, const EvolutionOptions &options = {});

/// population(result, mode, level)[k] at result.times[k].
std::vector<double> population(const EvolutionResult &result, const std::string &mode, int level);

/// Columns time_ns, then <mode>_<level> for every mode and level.
void write_populations_csv(const EvolutionResult &result, std::ostream &out);

/// Eigenbasis of H at the given frequencies with column k the eigenvector
/// adiabatically labelled by bare basis state k (maximum overlap).
DenseMatrix dressed_basis(const DeviceGraph &device, const TensorSpace &space,
                          const std::map<std::string, double> &frequencies = {},
                          const HamiltonianOptions &options = {});

/// Diagonal of V^dagger rho V.
std::vector<double> dressed_populations(const DensityMatrix &rho, const DenseMatrix &basis);

/// Smallest quasi-energy splitting (GHz) of the two Floquet states that carry
/// basis states a and b, for the coupler held at omega_bar_c and modulated
/// with amplitude A_p at omega_p. Near resonance this equals 2 g.
double floquet_gap(const DeviceGraph &device, const TensorSpace &space, const std::string &coupler,
                   double omega_bar_c, double A_p, double omega_p, size_t a, size_t b,
                   const EvolutionOptions &options = {});

struct FloquetResonance {
    double omega_p = 0.0;
    double gap = 0.0;  // GHz, = 2 g_eff
};

/// Minimizes floquet_gap over omega_p in [lo, hi].
FloquetResonance floquet_resonance(const DeviceGraph &device, const TensorSpace &space, const std::string &coupler,
                                   double omega_bar_c, double A_p, double lo, double hi, size_t a, size_t b,
                                   const EvolutionOptions &options = {});

}  // namespace leakstack
