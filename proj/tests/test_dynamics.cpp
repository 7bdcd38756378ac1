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
#include <numbers>

#include <gtest/gtest.h>

#include "leakstack/dynamics.hpp"
#include "leakstack/errors.hpp"

using namespace leakstack;

namespace {

// Qubit Q, coupler C and resonator R on an exchange chain Q-C-R.
DeviceGraph toy_device(double g_qc = 0.1, double g_cr = 0.030) {
    DeviceGraph d;
    d.name = "toy";
    d.qubits.push_back(TransmonParams{"Q", 4.5, 4.2, -0.2, 1.0, 2.0, 2.0, 0.0});
    d.couplers.push_back(CouplerParams{"C", 7.0, 5.0, -0.2, 1e9, 0.0});
    d.resonators.push_back(ResonatorParams{"R", "Q", 5.0, 3.0, 0.5});
    d.edges.push_back(Edge{EdgeKind::QubitCoupler, "Q", "C", g_qc, CouplingTopology::Asymmetric});
    d.edges.push_back(Edge{EdgeKind::CouplerResonator, "C", "R", g_cr, CouplingTopology::Asymmetric});
    return d;
}

std::vector<double> grid(double t1, int n) {
    std::vector<double> t;
    for (int k = 0; k <= n; ++k) t.push_back(t1 * k / n);
    return t;
}

// Power series of the Bessel function of the first kind.
double bessel_series(int m, double x) {
    double term = std::pow(x / 2, m) / std::tgamma(m + 1.0), sum = term;
    for (int k = 1; k < 40; ++k) {
        term *= -(x / 2) * (x / 2) / (k * double(k + m));
        sum += term;
    }
    return sum;
}

}  // namespace

TEST(dynamics, duffing_ladder_diagonal) {
    auto d = toy_device();
    auto space = make_subsystem(d, {{"C", 3}});
    auto h = build_hamiltonian(d, space, {{"C", 5.0}}).dense();
    EXPECT_NEAR(h(0, 0).real(), 0.0, 1e-14);
    EXPECT_NEAR(h(1, 1).real(), 5.0, 1e-14);
    EXPECT_NEAR(h(2, 2).real(), 9.8, 1e-14);
    EXPECT_THROW(make_subsystem(d, {{"X", 2}}), InvariantError);
}

TEST(dynamics, resonant_splitting_is_2g) {
    auto d = toy_device();
    auto space = make_subsystem(d, {{"C", 2}, {"R", 2}});
    Eigen::SelfAdjointEigenSolver<DenseMatrix> es(build_hamiltonian(d, space).dense());
    // Levels: 0, then the one-excitation doublet 5 -/+ g.
    EXPECT_NEAR(es.eigenvalues()(2) - es.eigenvalues()(1), 2 * 0.030, 1e-12);
}

TEST(dynamics, collapse_rates) {
    auto d = toy_device();
    auto space = make_subsystem(d, {{"Q", 3}, {"R", 3}});
    auto lm = collapse_operators(d, space);
    double relax = 0, deph = 0, res = 0;
    for (const auto &c : lm.collapse_ops) {
        if (c.mode == 0 && c.kind == CollapseKind::Lowering) relax = c.rate;
        if (c.mode == 0 && c.kind == CollapseKind::Number) deph = c.rate;
        if (c.mode == 1) res = c.rate;
    }
    EXPECT_NEAR(relax, 1e-3, 1e-15);  // 1/T1 with T1 = 1 us
    EXPECT_EQ(deph, 0.0);             // T2* = 2 T1
    EXPECT_NEAR(res, 2 * std::numbers::pi * 3.0e-3, 1e-15);

    auto paper = load_device("paper_device");
    auto qa = make_subsystem(paper, {{"A", 2}});
    for (const auto &c : collapse_operators(paper, qa).collapse_ops)
        if (c.kind == CollapseKind::Lowering) EXPECT_NEAR(c.rate, 1e-3 / 71.0, 1e-15);
}

TEST(dynamics, pure_relaxation_matches_exponential) {
    auto d = toy_device();
    auto space = make_subsystem(d, {{"Q", 2}});
    std::vector<int> e{1};
    auto times = grid(3000.0, 30);
    auto r = evolve_lindblad(d, space, {}, DensityMatrix::from_state(basis_state(space, e)), times);
    auto pe = population(r, "Q", 1);
    for (size_t k = 0; k < times.size(); ++k) EXPECT_NEAR(pe[k], std::exp(-times[k] / 1000.0), 1e-6);
    EXPECT_LT(r.max_trace_error, 1e-7);
}

TEST(dynamics, vacuum_rabi_transfer) {
    auto d = toy_device();
    auto space = make_subsystem(d, {{"C", 3}, {"R", 3}});
    std::vector<int> c1{1, 0};
    double t_full = 1 / (4 * 0.030);
    auto times = grid(2 * t_full, 200);
    auto r = evolve_unitary(d, space, {}, basis_state(space, c1), times);
    auto pr = population(r, "R", 1);
    for (size_t k = 0; k < times.size(); ++k) {
        double s = std::sin(2 * std::numbers::pi * 0.030 * times[k]);
        EXPECT_NEAR(pr[k], s * s, 1e-6);
    }
    EXPECT_NEAR(pr[100], 1.0, 1e-6);
    EXPECT_NEAR(t_full, 8.33, 0.01);
    // Populations start on the basis state and every row sums to one.
    EXPECT_DOUBLE_EQ(population(r, "C", 1)[0], 1.0);
    for (size_t k = 0; k < times.size(); ++k) {
        double sum = 0;
        for (int l = 0; l < 3; ++l) sum += r.populations[0][k][l];
        EXPECT_NEAR(sum, 1.0, 1e-9);
    }
    EXPECT_THROW(population(r, "C", 3), InvariantError);
}

TEST(dynamics, off_resonant_exchange_suppressed) {
    auto d = toy_device(0.1, 0.010);
    d.resonators[0].omega_r = 5.5;  // detuning 50x the coupling
    auto space = make_subsystem(d, {{"C", 2}, {"R", 2}});
    std::vector<int> c1{1, 0};
    auto r = evolve_unitary(d, space, {}, basis_state(space, c1), grid(200.0, 400));
    double worst = 0;
    for (double p : population(r, "R", 1)) worst = std::max(worst, p);
    EXPECT_LT(worst, 0.01);
}

TEST(dynamics, unitary_matches_lindblad_without_noise_on_qc_swap) {
    auto d = toy_device();
    auto space = make_subsystem(d, {{"Q", 3}, {"C", 3}});
    double wbar = 4.9, wp = wbar - 4.2;
    FluxTrajectory traj("C", 5.0);
    traj.ramp_to(wbar, 10).parametric(wbar, 0.3, wp, 0.0, 40).ramp_to(5.0, 10);
    std::vector<int> e0{1, 0};
    auto times = grid(60.0, 60);
    LindbladModel none;
    auto u = evolve_unitary(d, space, {traj}, basis_state(space, e0), times);
    auto l = evolve_lindblad(d, space, {traj}, DensityMatrix::from_state(basis_state(space, e0)), times, {}, &none);
    auto pu = population(u, "Q", 1), pl = population(l, "Q", 1);
    double moved = 0;
    for (size_t k = 0; k < times.size(); ++k) {
        EXPECT_NEAR(pu[k], pl[k], 1e-6);
        moved = std::max(moved, 1 - pu[k]);
    }
    EXPECT_GT(moved, 0.05);  // the swap actually does something
    EXPECT_NEAR(u.final_psi.norm(), 1.0, 1e-9);
}

TEST(dynamics, tighter_tolerance_converges) {
    auto d = toy_device();
    auto space = make_subsystem(d, {{"Q", 3}, {"C", 3}});
    FluxTrajectory traj("C", 5.0);
    traj.ramp_to(4.9, 10).parametric(4.9, 0.3, 0.7, 0.0, 40).ramp_to(5.0, 10);
    std::vector<int> e0{1, 0};
    EvolutionOptions loose, tight;
    tight.abs_tol = tight.rel_tol = 5e-9;
    auto a = evolve_unitary(d, space, {traj}, basis_state(space, e0), {0.0, 60.0}, loose);
    auto b = evolve_unitary(d, space, {traj}, basis_state(space, e0), {0.0, 60.0}, tight);
    EXPECT_NEAR(population(a, "Q", 1).back(), population(b, "Q", 1).back(), 1e-6);
}

TEST(dynamics, bessel_coupling_law) {
    ParametricDrive drv{1, 0.0, 0.7, 1};
    EXPECT_EQ(effective_parametric_coupling(drv, 0.1), 0.0);
    drv.A_p = 0.35;
    double g1 = effective_parametric_coupling(drv, 0.1);
    EXPECT_NEAR(g1, 0.1 * bessel_series(1, 0.5), 1e-15);
    EXPECT_NEAR(bessel_series(1, 0.5), 0.2422684576748739, 1e-15);
    drv.n_ex = 2;
    EXPECT_NEAR(effective_parametric_coupling(drv, 0.1), std::sqrt(2.0) * g1, 1e-15);
    drv.m = 2;
    drv.n_ex = 1;
    EXPECT_NEAR(effective_parametric_coupling(drv, 0.1), 0.1 * bessel_series(2, 0.35 / 1.4), 1e-15);
    EXPECT_NEAR(sideband_coupling(drv, 0.1), 0.1 * bessel_series(2, 0.5), 1e-15);
    drv.omega_p = 0.0;
    EXPECT_THROW(effective_parametric_coupling(drv, 0.1), InvariantError);
}

TEST(dynamics, floquet_gap_near_resonance_is_2g) {
    auto d = toy_device();
    auto space = make_subsystem(d, {{"Q", 2}, {"C", 2}});
    std::vector<int> e0{1, 0}, g1{0, 1};
    double wbar = 4.9, A = 0.2;
    auto res = floquet_resonance(d, space, "C", wbar, A, 0.6, 0.8, space.flat_index(e0), space.flat_index(g1));
    double g = sideband_coupling(ParametricDrive{1, A, res.omega_p, 1}, 0.1);
    EXPECT_NEAR(res.gap, 2 * g, 0.05 * 2 * g);
}
