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

#include "leakstack/capnet.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "leakstack/errors.hpp"

namespace leakstack {

void CapacitanceNetwork::validate() const {
    if (!(C_pc > 0 && C_pp > 0 && C_gp > 0 && C_gc > 0)) {
        throw InvariantError("capacitances C_pc, C_pp, C_gp, C_gc must be > 0");
    }
    if (!(C_cc >= 0)) {
        throw InvariantError("capacitance C_cc must be >= 0");
    }
}

CapacitanceNetwork CapacitanceNetwork::scaled(double factor) const {
    return {C_pc * factor, C_pp * factor, C_gp * factor, C_gc * factor, C_cc * factor};
}

const char *to_string(CouplingTopology t) {
    return t == CouplingTopology::Symmetric ? "symmetric" : "asymmetric";
}

CouplingTopology topology_from_string(const std::string &s) {
    if (s == "symmetric") return CouplingTopology::Symmetric;
    if (s == "asymmetric") return CouplingTopology::Asymmetric;
    throw InvariantError("unknown coupling topology '" + s + "'");
}

namespace {

void require_positive(double v, const char *what) {
    if (!(v > 0)) {
        throw InvariantError(std::string(what) + " must be > 0");
    }
}

}  // namespace

double qubit_coupler_coupling(const CapacitanceNetwork &net, double omega_q, double omega_c) {
    net.validate();
    require_positive(omega_q, "omega_q");
    require_positive(omega_c, "omega_c");
    return 0.25 * net.C_pc / std::sqrt((net.C_pp + net.C_gp / 2) * net.C_gc) * std::sqrt(omega_q * omega_c);
}

double direct_coupler_coupling(const CapacitanceNetwork &net, CouplingTopology topology, double omega_c) {
    net.validate();
    require_positive(omega_c, "omega_c");
    const double numerator = topology == CouplingTopology::Asymmetric ? net.C_gp + net.C_pp : net.C_pp;
    const double pad_term =
        net.C_pc * net.C_pc * numerator / (net.C_gp * (net.C_pp + net.C_gp / 2) * net.C_gc);
    return 0.25 * (pad_term + 2 * net.C_cc / net.C_gc) * omega_c;
}

double net_coupler_coupling(double g_cc_direct, double g_qc, CouplingTopology topology, double omega_c,
                            double omega_q) {
    const double detuning = omega_c - omega_q;
    if (detuning == 0.0) {
        throw InvariantError("net_coupler_coupling: coupler on qubit resonance (omega_c == omega_q)");
    }
    const double mediated = g_qc * g_qc / detuning;
    return topology == CouplingTopology::Asymmetric ? g_cc_direct + mediated : g_cc_direct - mediated;
}

double net_coupler_resonator_coupling(double g_cr, double g_qc, double g_qr, double omega_c, double omega_q,
                                      double omega_r) {
    const double d_cq = omega_c - omega_q;
    const double d_rq = omega_r - omega_q;
    if (d_cq == 0.0 || d_rq == 0.0) {
        throw InvariantError("net_coupler_resonator_coupling: zero detuning from the qubit");
    }
    return g_cr + 0.5 * g_qc * g_qr * (1.0 / d_cq + 1.0 / d_rq);
}

CouplingSet closed_form_couplings(const CapacitanceNetwork &net, CouplingTopology topology, double omega_q,
                                  double omega_c) {
    CouplingSet s;
    s.g_qc = qubit_coupler_coupling(net, omega_q, omega_c);
    s.g_cc_direct = direct_coupler_coupling(net, topology, omega_c);
    s.g_cc_net = net_coupler_coupling(s.g_cc_direct, s.g_qc, topology, omega_c, omega_q);
    return s;
}

Eigen::Matrix4d maxwell_matrix(const CapacitanceNetwork &net, CouplingTopology topology) {
    Eigen::Matrix4d c = Eigen::Matrix4d::Zero();
    auto to_ground = [&](int i, double v) { c(i, i) += v; };
    auto between = [&](int i, int j, double v) {
        c(i, i) += v;
        c(j, j) += v;
        c(i, j) -= v;
        c(j, i) -= v;
    };
    to_ground(0, net.C_gp);
    to_ground(1, net.C_gp);
    between(0, 1, net.C_pp);
    to_ground(2, net.C_gc);
    to_ground(3, net.C_gc);
    between(2, 3, net.C_cc);
    between(2, 0, net.C_pc);
    between(3, topology == CouplingTopology::Asymmetric ? 0 : 1, net.C_pc);
    return c;
}

namespace {

// Inverse capacitance (1/fF) over [differential qubit flux, coupler1, coupler2]
// with the free common mode eliminated (its charge is conserved and zero).
Eigen::Matrix3d reduced_inverse_capacitance(const Eigen::Matrix4d &cap_fF) {
    Eigen::Matrix4d t;
    t << 0.5, 1, 0, 0,  //
        -0.5, 1, 0, 0,  //
        0, 0, 1, 0,     //
        0, 0, 0, 1;
    const Eigen::Matrix4d transformed = t.transpose() * cap_fF * t;
    Eigen::FullPivLU<Eigen::Matrix4d> lu(transformed);
    if (!lu.isInvertible()) {
        throw NumericalError("maxwell_oracle: singular capacitance matrix");
    }
    const Eigen::Matrix4d k = lu.inverse();
    const int keep[3] = {0, 2, 3};
    Eigen::Matrix3d out;
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
            out(i, j) = k(keep[i], keep[j]);
        }
    }
    return out;
}

constexpr double kTwoPi = 2 * std::numbers::pi;

}  // namespace

Eigen::Vector3d junction_inductances_for(const Eigen::Matrix4d &cap_fF, double omega_q, double omega_c1,
                                         double omega_c2) {
    const Eigen::Matrix3d k = reduced_inverse_capacitance(cap_fF);
    const double w[3] = {omega_q, omega_c1, omega_c2};
    Eigen::Vector3d l;
    for (int i = 0; i < 3; ++i) {
        require_positive(w[i], "mode frequency");
        const double w_ang = kTwoPi * w[i] * 1e9;
        l(i) = k(i, i) * 1e15 / (w_ang * w_ang) * 1e9;  // H -> nH
    }
    return l;
}

MaxwellOracleResult maxwell_oracle(const Eigen::Matrix4d &cap_fF, const Eigen::Vector3d &inductances_nH) {
    if ((cap_fF - cap_fF.transpose()).cwiseAbs().maxCoeff() > 1e-12 * cap_fF.cwiseAbs().maxCoeff()) {
        throw InvariantError("maxwell_oracle: capacitance matrix is not symmetric");
    }
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d> es(cap_fF, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() <= 0) {
        throw NumericalError("maxwell_oracle: capacitance matrix is not positive definite");
    }
    const Eigen::Matrix3d k = reduced_inverse_capacitance(cap_fF);

    MaxwellOracleResult r;
    for (int i = 0; i < 3; ++i) {
        require_positive(inductances_nH(i), "junction inductance");
        r.mode_frequencies(i) = std::sqrt(k(i, i) * 1e15 / (inductances_nH(i) * 1e-9)) / kTwoPi / 1e9;
    }
    Eigen::Matrix3d g = Eigen::Matrix3d::Zero();
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
            if (i != j) {
                g(i, j) = 0.5 * k(i, j) / std::sqrt(k(i, i) * k(j, j)) *
                          std::sqrt(r.mode_frequencies(i) * r.mode_frequencies(j));
            }
        }
    }
    r.g_qc1 = g(0, 1);
    r.g_qc2 = g(0, 2);
    r.couplings.g_qc = std::abs(g(0, 1));
    r.couplings.g_cc_direct = g(1, 2);

    // One-excitation normal modes; the two coupler-like eigenvectors define an
    // effective 2x2 coupler Hamiltonian (des Cloizeaux construction).
    Eigen::Matrix3d h = g;
    h.diagonal() = r.mode_frequencies;
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> modes(h);
    const Eigen::Matrix3d &v = modes.eigenvectors();
    int qubit_like = 0;
    for (int c = 1; c < 3; ++c) {
        if (std::abs(v(0, c)) > std::abs(v(0, qubit_like))) qubit_like = c;
    }
    Eigen::Matrix2d p;
    Eigen::Vector2d e;
    int col = 0;
    for (int c = 0; c < 3; ++c) {
        if (c == qubit_like) continue;
        p(0, col) = v(1, c);
        p(1, col) = v(2, c);
        e(col) = modes.eigenvalues()(c);
        ++col;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> overlap(p.transpose() * p);
    const Eigen::Matrix2d inv_sqrt = overlap.eigenvectors() *
                                     overlap.eigenvalues().cwiseSqrt().cwiseInverse().asDiagonal() *
                                     overlap.eigenvectors().transpose();
    const Eigen::Matrix2d q = p * inv_sqrt;
    const Eigen::Matrix2d h_eff = q * e.asDiagonal() * q.transpose();
    r.couplings.g_cc_net = h_eff(0, 1);
    return r;
}

}  // namespace leakstack
