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

#include <string>

#include <Eigen/Dense>

namespace leakstack {

/// Floating-transmon capacitance network, all values in fF.
struct CapacitanceNetwork {
    double C_pc = 0.0;  // qubit pad to coupler pad
    double C_pp = 0.0;  // pad to pad
    double C_gp = 0.0;  // pad to ground
    double C_gc = 0.0;  // coupler to ground
    double C_cc = 0.0;  // coupler to coupler, may be zero

    void validate() const;
    CapacitanceNetwork scaled(double factor) const;
    bool operator==(const CapacitanceNetwork &) const = default;
};

/// asymmetric: both couplers (or coupler and resonator) on the same qubit pad.
enum class CouplingTopology { Symmetric, Asymmetric };

const char *to_string(CouplingTopology t);
CouplingTopology topology_from_string(const std::string &s);

/// Couplings in GHz (ordinary frequency).
struct CouplingSet {
    double g_qc = 0.0;
    double g_cc_direct = 0.0;
    double g_cc_net = 0.0;
    double g_cr_net = 0.0;
};

double qubit_coupler_coupling(const CapacitanceNetwork &net, double omega_q, double omega_c);

// The undefined C_qc of the published asymmetric formula is taken as C_gc.
double direct_coupler_coupling(const CapacitanceNetwork &net, CouplingTopology topology, double omega_c);

/// Direct plus qubit-mediated coupler-coupler coupling. Throws when the
/// coupler sits on the qubit frequency.
double net_coupler_coupling(double g_cc_direct, double g_qc, CouplingTopology topology, double omega_c,
                            double omega_q);

double net_coupler_resonator_coupling(double g_cr, double g_qc, double g_qr, double omega_c, double omega_q,
                                      double omega_r);

/// g_qc, g_cc_direct and g_cc_net from the closed forms (g_cr_net left 0).
CouplingSet closed_form_couplings(const CapacitanceNetwork &net, CouplingTopology topology, double omega_q,
                                  double omega_c);

/// Maxwell capacitance matrix (fF) over nodes [pad1, pad2, coupler1, coupler2].
Eigen::Matrix4d maxwell_matrix(const CapacitanceNetwork &net, CouplingTopology topology);

struct MaxwellOracleResult {
    CouplingSet couplings;
    /// Bare mode frequencies (GHz) of [qubit differential mode, coupler1, coupler2].
    Eigen::Vector3d mode_frequencies;
    /// Signed qubit couplings to coupler1 and coupler2.
    double g_qc1 = 0.0;
    double g_qc2 = 0.0;
};

/// Junction inductances (nH) that put the bare modes of `cap` at the requested
/// frequencies; ordering [qubit junction (pad1-pad2), coupler1, coupler2].
Eigen::Vector3d junction_inductances_for(const Eigen::Matrix4d &cap_fF, double omega_q, double omega_c1,
                                         double omega_c2);

/// Linearised-circuit reference for the closed forms. The floating qubit's
/// common mode carries no inductance and is eliminated; bare-mode couplings
/// come from the inverse capacitance matrix, and the net coupler-coupler
/// coupling from a block diagonalisation of the one-excitation normal modes.
MaxwellOracleResult maxwell_oracle(const Eigen::Matrix4d &cap_fF, const Eigen::Vector3d &inductances_nH);

}  // namespace leakstack
