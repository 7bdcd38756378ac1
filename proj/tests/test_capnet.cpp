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

#include "leakstack/capnet.hpp"
#include "leakstack/errors.hpp"

using namespace leakstack;

namespace {

CapacitanceNetwork paper_net() { return CapacitanceNetwork{11.0, 20.0, 140.0, 150.0, 0.04}; }

}  // namespace

// Reference values from a 40-digit evaluation of the closed forms.
TEST(capnet, closed_form_reference_values) {
    auto net = paper_net();
    EXPECT_NEAR(qubit_coupler_coupling(net, 4.2, 5.5), 0.11375534175491618546, 1e-15);
    EXPECT_NEAR(direct_coupler_coupling(net, CouplingTopology::Asymmetric, 5.5), 0.014817989417989417989, 1e-15);
    EXPECT_NEAR(direct_coupler_coupling(net, CouplingTopology::Symmetric, 5.5), 0.0024939153439153439153, 1e-15);
    auto a = closed_form_couplings(net, CouplingTopology::Asymmetric, 4.2, 5.5);
    auto s = closed_form_couplings(net, CouplingTopology::Symmetric, 4.2, 5.5);
    EXPECT_NEAR(a.g_cc_net, 0.024772049247049247049, 1e-14);
    EXPECT_NEAR(s.g_cc_net, -0.0074601444851444851445, 1e-14);
}

TEST(capnet, qubit_coupler_scaling) {
    auto net = paper_net();
    net.C_pc = 1e-9;
    EXPECT_LT(qubit_coupler_coupling(net, 4.2, 5.5), 1e-10);
    net = paper_net();
    // g scales with sqrt(omega_q omega_c): a fourfold product doubles it.
    EXPECT_NEAR(qubit_coupler_coupling(net, 8.4, 11.0), 2.0 * qubit_coupler_coupling(net, 4.2, 5.5), 1e-14);
    EXPECT_NEAR(qubit_coupler_coupling(net, 16.8, 5.5), 2.0 * qubit_coupler_coupling(net, 4.2, 5.5), 1e-14);
    EXPECT_THROW(qubit_coupler_coupling(net, 0.0, 5.5), InvariantError);
    net.C_gp = -1.0;
    EXPECT_THROW(qubit_coupler_coupling(net, 4.2, 5.5), InvariantError);
}

TEST(capnet, direct_coupling_topologies) {
    auto net = paper_net();
    net.C_pc = 1e-9;
    net.C_cc = 0.0;
    EXPECT_LT(direct_coupler_coupling(net, CouplingTopology::Asymmetric, 5.5), 1e-15);
    EXPECT_LT(direct_coupler_coupling(net, CouplingTopology::Symmetric, 5.5), 1e-15);
    net = paper_net();
    EXPECT_GE(direct_coupler_coupling(net, CouplingTopology::Asymmetric, 5.5),
              direct_coupler_coupling(net, CouplingTopology::Symmetric, 5.5));
}

TEST(capnet, net_coupling) {
    for (auto t : {CouplingTopology::Asymmetric, CouplingTopology::Symmetric})
        EXPECT_EQ(net_coupler_coupling(0.01, 0.0, t, 5.5, 4.2), 0.01);
    double g = 0.1, dc = 5.5 - 4.2;
    EXPECT_EQ(net_coupler_coupling(g * g / dc, g, CouplingTopology::Symmetric, 5.5, 4.2), 0.0);
    EXPECT_THROW(net_coupler_coupling(0.01, g, CouplingTopology::Symmetric, 4.2, 4.2), InvariantError);

    // Sign rule over a grid of positive inputs.
    for (double gq : {0.02, 0.08, 0.15})
        for (double wc : {5.0, 5.5, 6.1}) {
            double a = net_coupler_coupling(0.003, gq, CouplingTopology::Asymmetric, wc, 4.2);
            double s = net_coupler_coupling(0.003, gq, CouplingTopology::Symmetric, wc, 4.2);
            EXPECT_NEAR(a - s, 2 * gq * gq / (wc - 4.2), 1e-15);
        }
}

TEST(capnet, net_coupler_resonator) {
    EXPECT_EQ(net_coupler_resonator_coupling(0.02, 0.0, 0.05, 6.0, 4.2, 6.1), 0.02);
    EXPECT_EQ(net_coupler_resonator_coupling(0.02, 0.1, 0.0, 6.0, 4.2, 6.1), 0.02);
    double m1 = net_coupler_resonator_coupling(0.0, 0.1, 0.05, 6.0, 4.2, 6.1);
    double m2 = net_coupler_resonator_coupling(0.0, 0.1, 0.05, 7.8, 4.2, 8.0);
    EXPECT_NEAR(m2, m1 / 2, 1e-15);
    EXPECT_THROW(net_coupler_resonator_coupling(0.02, 0.1, 0.05, 6.0, 4.2, 4.2), InvariantError);
}

TEST(capnet, monotone_in_pad_coupler_capacitance) {
    auto net = paper_net();
    double prev_g = 0, prev_a = 0, prev_s = 0;
    for (int i = 1; i <= 10; ++i) {
        net.C_pc = net.C_gp * i / 11.0;
        double g = qubit_coupler_coupling(net, 4.2, 5.5);
        double a = direct_coupler_coupling(net, CouplingTopology::Asymmetric, 5.5);
        double s = direct_coupler_coupling(net, CouplingTopology::Symmetric, 5.5);
        EXPECT_GT(g, prev_g);
        EXPECT_GT(a, prev_a);
        EXPECT_GT(s, prev_s);
        prev_g = g, prev_a = a, prev_s = s;
    }
}

TEST(capnet, maxwell_diagonal_gives_zero) {
    Eigen::Matrix4d cap = Eigen::Vector4d(100, 100, 150, 150).asDiagonal();
    auto r = maxwell_oracle(cap, Eigen::Vector3d(10, 8, 8));
    EXPECT_NEAR(r.couplings.g_qc, 0.0, 1e-12);
    EXPECT_NEAR(r.couplings.g_cc_direct, 0.0, 1e-12);
    EXPECT_NEAR(r.couplings.g_cc_net, 0.0, 1e-12);
}

TEST(capnet, maxwell_homogeneous) {
    auto net = paper_net();
    for (auto t : {CouplingTopology::Asymmetric, CouplingTopology::Symmetric}) {
        auto c1 = maxwell_matrix(net, t);
        auto c2 = maxwell_matrix(net.scaled(1.7), t);
        auto r1 = maxwell_oracle(c1, junction_inductances_for(c1, 4.2, 5.5, 5.5));
        auto r2 = maxwell_oracle(c2, junction_inductances_for(c2, 4.2, 5.5, 5.5));
        EXPECT_NEAR(r1.couplings.g_cc_direct / r1.couplings.g_qc, r2.couplings.g_cc_direct / r2.couplings.g_qc,
                    1e-10);
        EXPECT_NEAR(r1.mode_frequencies(0), 4.2, 1e-9);
        EXPECT_NEAR(r1.mode_frequencies(1), 5.5, 1e-9);
    }
}

TEST(capnet, maxwell_paper_point_qubit_coupler) {
    auto net = paper_net();
    auto cap = maxwell_matrix(net, CouplingTopology::Asymmetric);
    auto r = maxwell_oracle(cap, junction_inductances_for(cap, 4.2, 5.5, 5.5));
    double closed = qubit_coupler_coupling(net, 4.2, 5.5);
    EXPECT_LT(std::abs(r.couplings.g_qc - closed) / closed, 0.25);
}

TEST(capnet, maxwell_rejects_bad_matrix) {
    Eigen::Matrix4d cap = Eigen::Matrix4d::Identity();
    cap(0, 1) = 0.5;
    EXPECT_THROW(maxwell_oracle(cap, Eigen::Vector3d(10, 8, 8)), InvariantError);
}
