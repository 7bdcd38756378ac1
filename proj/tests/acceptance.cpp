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


// Acceptance checks. One line per criterion: PASS, FAIL, or FAIL (known
// deviation) for failures analysed and recorded as expected. The exit code
// is nonzero only for unexpected failures, or for any failure with --strict.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <numbers>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <unistd.h>
#include <vector>

#include "leakstack/capnet.hpp"
#include "leakstack/experiments.hpp"
#include "leakstack/ini.hpp"
#include "leakstack/parallel.hpp"
#include "leakstack/protocols.hpp"
#include "leakstack/rb.hpp"
#include "leakstack/readout.hpp"
#include "leakstack/stabilizer.hpp"

using namespace leakstack;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

struct Criterion {
    int id;
    const char *name;
    double budget_s;  // 0 when the runtime is not separately bounded
    bool known_deviation;
    std::function<Outcome()> run;
};

std::string fmt(const char *f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

const DeviceGraph &paper() {
    static const DeviceGraph d = load_device("paper_device");
    return d;
}

int workers() { return std::max(4, default_workers()); }

std::vector<double> linspace(double lo, double hi, int n) {
    std::vector<double> v;
    for (int i = 0; i < n; ++i) v.push_back(n == 1 ? lo : lo + (hi - lo) * i / (n - 1));
    return v;
}

// 1. Coupler-resonator exchange time.
Outcome cr_swap_time() {
    const auto &d = paper();
    const auto &edge = d.resonator_edge("C2");
    const auto &res = d.resonator(edge.a == "C2" ? edge.b : edge.a);
    const double center = res.omega_r - d.coupler("C2").omega_idle;
    ChevronOptions o;
    o.workers = workers();
    auto cal = calibrate_cr_swap(d, "C2", linspace(center - 0.02, center + 0.02, 21), linspace(0, 20, 201), o);
    const double target = 8.3;
    const bool ok = std::abs(cal.duration_opt - target) <= 0.2 * target && cal.interior;
    return {ok, fmt("full exchange %.2f ns at amplitude %.4f GHz (target 8.3 ns +/- 20%%), residual %.4f",
                    cal.duration_opt, cal.A_p_opt, cal.residual_population)};
}

// 2. Joint coupler-resonator decay.
Outcome joint_decay() {
    double worst = 0;
    std::string detail;
    for (const char *c : {"C1", "C2", "C3"}) {
        auto r = measure_joint_decay(paper(), c);
        worst = std::max(worst, r.relative_error);
        detail += fmt("%s %.5f/%.5f ns^-1 ", c, r.fitted_rate, r.expected_rate);
    }
    return {worst < 0.10, detail + fmt("worst error %.2f%% (limit 10%%)", 100 * worst)};
}

// 3. f-LRU chevron minimum on qubit A.
Outcome qc_chevron() {
    const auto &d = paper();
    ChevronOptions o;
    o.workers = workers();
    auto f = linspace(0.676, 0.736, 31), t = linspace(0, 120, 31);
    auto cal = calibrate_qc_swap(d, "A", "C2", LruTarget::FLru, f, t, o);
    // Resonance envelope: the deepest transfer reached at each frequency.
    std::vector<double> env;
    for (const auto &row : cal.surface) env.push_back(1 - *std::min_element(row.begin(), row.end()));
    const size_t peak = static_cast<size_t>(std::max_element(env.begin(), env.end()) - env.begin());
    auto crossing = [&](int dir) {
        for (int i = static_cast<int>(peak); i >= 0 && i < static_cast<int>(env.size()); i += dir) {
            if (env[i] < env[peak] / 2) {
                const double x0 = f[i], x1 = f[i - dir], y0 = env[i], y1 = env[i - dir];
                return x0 + (env[peak] / 2 - y0) * (x1 - x0) / (y1 - y0);
            }
        }
        return dir < 0 ? f.front() : f.back();
    };
    const double hwhm = 0.5 * (crossing(1) - crossing(-1));
    const auto &op = d.lru_for_qubit("A").operations.at(LruTarget::FLru);
    const double offset = std::abs(cal.omega_p_opt - op.omega_p);
    const double g_eff = locate_qc_resonance(d, "A", LruTarget::FLru, cal.A_p_opt).gap / 2;
    return {offset <= hwhm && cal.interior,
            fmt("minimum at %.4f GHz, %.1f MHz from %.3f; chevron half width %.1f MHz (2 g_eff = %.1f MHz), "
                "residual %.4f",
                cal.omega_p_opt, 1e3 * offset, op.omega_p, 1e3 * hwhm, 2e3 * g_eff, cal.residual_population)};
}

// 4. Bessel law for the parametric swap rate.
Outcome bessel_law() {
    const auto xs = linspace(0.1, 1.0, 7);
    std::vector<SwapRatePoint> pts(2 * xs.size());
    parallel_for(pts.size(), workers(), [&](size_t k) {
        pts[k] = measure_swap_rate(paper(), "A", LruTarget::EReset, 1 + int(k / xs.size()), xs[k % xs.size()]);
    });
    double worst[2] = {0, 0}, alt = 0;
    for (const auto &p : pts) {
        worst[p.m - 1] = std::max(worst[p.m - 1], p.relative_error);
        // Same law with the plain modulation index A_p / omega_p as the argument.
        const double g = p.g_formula / std::cyl_bessel_j(p.m, p.x) * std::cyl_bessel_j(p.m, p.A_p / p.omega_p);
        alt = std::max(alt, std::abs(p.g_time_domain - g) / g);
    }
    return {worst[0] < 0.05 && worst[1] < 0.05,
            fmt("worst relative error m=1 %.2f%%, m=2 %.1f%% (limit 5%%) over x in [0.1, 1]; "
                "against J_m(A_p/omega_p) worst %.1f%%",
                100 * worst[0], 100 * worst[1], 100 * alt)};
}

// 5. Every LRU is an identity on the computational states and removes its target.
Outcome lru_identity() {
    const auto &d = paper();
    struct Job {
        std::string qubit;
        LruTarget target;
        int level;
        double value = 0;
    };
    std::vector<Job> jobs;
    for (const auto &as : d.lru)
        for (const auto &[t, op] : as.operations) {
            if (t != LruTarget::EReset)
                for (int l = 0; l < 2; ++l) jobs.push_back({as.qubit, t, l});
            jobs.push_back({as.qubit, t, target_level(t)});
        }
    parallel_for(jobs.size(), workers(), [&](size_t k) {
        auto &j = jobs[k];
        const auto &as = d.lru_for_qubit(j.qubit);
        auto cal = calibrate_qc_swap_floquet(d, j.qubit, j.target);
        PulseSchedule s;
        if (j.target == LruTarget::HLru)
            s = schedule_h_lru(d, j.qubit, as.coupler, cal, calibrate_qc_swap_floquet(d, j.qubit, LruTarget::FLru));
        else if (j.target == LruTarget::FLru)
            s = schedule_f_lru(d, j.qubit, as.coupler, cal);
        else
            s = schedule_e_reset(d, j.qubit, as.coupler, cal);
        auto space = qcr_subsystem(d, j.qubit, as.coupler, as.resonator);
        auto V = idle_dressed_basis(d, space);
        const int lv[3] = {j.level, 0, 0};
        RunOptions ro;
        ro.sample_step_ns = 10;
        auto r = run_schedule(d, space, s, dressed_basis_state(space, V, lv), false, ro);
        auto p = dressed_mode_populations(r.final_rho, V, 0);
        j.value = j.level == target_level(j.target) ? p[j.level] : 1 - p[j.level];
    });
    double worst_residual = 0, worst_perturb = 0;
    std::string detail;
    for (const auto &j : jobs) {
        if (j.level == target_level(j.target)) {
            worst_residual = std::max(worst_residual, j.value);
            detail += fmt("%s/%s %.4f ", j.qubit.c_str(), to_string(j.target), j.value);
        } else {
            worst_perturb = std::max(worst_perturb, j.value);
        }
    }
    return {worst_residual < 0.02 && worst_perturb < 1e-2,
            fmt("target residuals: %sworst %.4f (limit 0.02); computational perturbation %.4f (limit 0.01)",
                detail.c_str(), worst_residual, worst_perturb)};
}

// 6. Coupler leakage propagation with and without c-LRUs.
Outcome propagation() {
    PropagationOptions o;
    o.workers = workers();
    auto off = run_propagation(paper(), o);
    o.c_lru = true;
    auto on = run_propagation(paper(), o);
    const auto &a = off.occupancy[0];
    double worst_on = 0;
    for (const auto &row : on.occupancy[0])
        for (double v : row) worst_on = std::max(worst_on, v);
    const bool ok = a[0][1] > 0.01 && a[0][2] * 5 <= a[0][1] && worst_on < 0.05;
    return {ok, fmt("c-LRU off: C1->C2 %.4f, C1->C3 %.4f (ratio %.1f, needs >= 5); c-LRU on: max %.4f (limit 0.05)",
                    a[0][1], a[0][2], a[0][1] / std::max(a[0][2], 1e-12), worst_on)};
}

// 7. RB fitter on binomially sampled synthetic decays.
Outcome rb_fitter() {
    const RbConfig cfg;
    const double A = 0.5, B = 0.5, p = 0.99, r_true = (1 - p) / 2;
    std::vector<double> m(cfg.m_values.begin(), cfg.m_values.end());
    double sum = 0, worst = 0;
    for (uint64_t seed = 0; seed < 30; ++seed) {
        Rng rng = make_stream(seed, 0);
        std::vector<double> F;
        for (double mm : m) {
            const double f = A * std::pow(p, mm) + B;
            int hits = 0;
            for (int s = 0; s < 1000; ++s) hits += uniform01(rng) < f;
            F.push_back(hits / 1000.0);
        }
        const double err = fit_rb(m, F).r - r_true;
        sum += err;
        worst = std::max(worst, std::abs(err));
    }
    const double mean = sum / 30;
    return {std::abs(mean) < 5e-4,
            fmt("mean r error over 30 seeds %+.5f%% (limit 0.05%%); single-seed worst %.3f%%", 100 * mean,
                100 * worst)};
}

StabilizerConfig stabilizer_base() {
    auto text = ini::read_config_text("paper_device");
    auto c = parse_stabilizer_config(text, parse_channel_model(text));
    c.shots = 10000;
    c.n_cycles = 25;
    c.seed = 11;
    return c;
}

double excess_z(const CycleTrace &t, const CycleTrace &ref, size_t k) {
    const double p = ref.detection[k];
    const double sigma = std::sqrt(2 * std::max(p * (1 - p), 1e-12) / t.shots);
    return (t.detection[k] - p) / sigma;
}

// 8a. Ancilla X_ef injection randomizes the next two comparisons.
Outcome stabilizer_ancilla() {
    auto c = stabilizer_base();
    c.data_init = DataInit::Ground;
    c.injection = Injection{"A", 10};
    auto t = run_stabilizer(c, workers());
    const double d1 = t.detection[9], d2 = t.detection[10];
    return {std::abs(d1 - 0.5) <= 0.05 && std::abs(d2 - 0.5) <= 0.05,
            fmt("detection fraction %.3f and %.3f at cycles 10 and 11 (target 0.50 +/- 0.05)", d1, d2)};
}

// 8b and 8d. Data injection response with LRUs off and on.
Outcome stabilizer_data(bool parity_check) {
    auto base = stabilizer_base();
    base.data_init = DataInit::Ground;
    auto run = [&](bool lru, std::optional<Injection> inj) {
        auto c = base;
        c.lru_enabled = lru;
        c.injection = inj;
        return run_stabilizer(c, workers());
    };
    std::string detail;
    bool ok = true;
    for (bool lru : {false, true}) {
        auto ref = run(lru, std::nullopt);
        if (!parity_check) {
            // Significant excess: z > 5 against the paired reference run.
            auto t = run(lru, Injection{"D1", 10});
            int span = 0, last = -1;
            for (size_t k = 9; k < t.detection.size(); ++k)
                if (excess_z(t, ref, k) > 5) span = static_cast<int>(k) - 8, last = static_cast<int>(k);
            (void)last;
            ok = ok && (lru ? span <= 2 && span >= 1 : span >= 3);
            detail += fmt("LRU %s: excess %+.3f at injection, significant over %d cycles; ", lru ? "on" : "off",
                          t.detection[9] - ref.detection[9], span);
        } else {
            auto peak = [&](int cycle) {
                auto t = run(lru, Injection{"D1", cycle});
                double best = 0;
                for (size_t k = cycle - 1; k < t.detection.size(); ++k)
                    best = std::max(best, t.detection[k] - ref.detection[k]);
                return best;
            };
            const double odd = peak(9), even = peak(10);
            ok = ok && odd < even;
            detail += fmt("LRU %s: peak excess cycle 9 %.3f vs cycle 10 %.3f; ", lru ? "on" : "off", odd, even);
        }
    }
    return {ok, detail};
}

// 8c. LRUs reduce the 25-cycle P_f growth for every qubit.
Outcome stabilizer_growth() {
    auto on = stabilizer_base();
    auto off = on;
    off.lru_enabled = false;
    auto t_on = run_stabilizer(on, workers()), t_off = run_stabilizer(off, workers());
    bool ok = true;
    std::string detail;
    const double n = on.shots;
    for (size_t q = 0; q < t_on.qubits.size(); ++q) {
        const double g_on = t_on.P_f[q].back() - t_on.P_f[q].front();
        const double g_off = t_off.P_f[q].back() - t_off.P_f[q].front();
        const double a = t_on.P_f[q].back(), b = t_off.P_f[q].back();
        const double sigma = std::sqrt((a * (1 - a) + b * (1 - b)) / n);
        const double z = (g_off - g_on) / sigma;
        ok = ok && z > 2.326;  // one-sided 99%
        detail += fmt("%s %.3f (z %.0f) ", t_on.qubits[q].c_str(), g_off - g_on, z);
    }
    return {ok, "growth reduction " + detail + "(needs z > 2.33)"};
}

// 9. Asymptotic leaked fraction versus the two-state Markov chain.
Outcome steady_state() {
    auto c = stabilizer_base();
    c.n_cycles = 50;
    auto t = run_stabilizer(c, workers());
    bool ok = true;
    std::string detail;
    for (size_t q = 0; q < t.qubits.size(); ++q) {
        auto r = per_cycle_rates(c, t.qubits[q]);
        const double ss = markov_steady_state(r.L, r.eta);
        const double mc = t.leaked[q].back();
        const double z = (mc - ss) / std::sqrt(ss * (1 - ss) / c.shots);
        ok = ok && std::abs(z) < 3;
        detail += fmt("%s MC %.4f vs %.4f (%.1f sigma) ", t.qubits[q].c_str(), mc, ss, z);
    }
    return {ok, detail};
}

// 10. GMM assignment error at 4 sigma separation and outlier removal.
Outcome gmm_metrics() {
    GmmModel truth;
    truth.components.push_back({0, {0.0, 0.0}, 1.0});
    truth.components.push_back({1, {4.0, 0.0}, 1.0});
    const size_t n = 1 << 14;
    std::vector<ShotBatch> prepared{simulate_iq(truth, {1, 0}, n, 100), simulate_iq(truth, {0, 1}, n, 101)};
    ShotBatch mixed;
    for (const auto &b : prepared) {
        mixed.points.insert(mixed.points.end(), b.points.begin(), b.points.end());
        mixed.true_labels.insert(mixed.true_labels.end(), b.true_labels.begin(), b.true_labels.end());
    }
    std::vector<ShotBatch> refs{simulate_iq(truth, {1, 0}, 2000, 102), simulate_iq(truth, {0, 1}, 2000, 103)};
    auto fit = fit_gmm(mixed, 2, 7, refs);
    const double oracle = 0.5 * std::erfc(2.0 / std::sqrt(2.0));
    const double tol = 3 * std::sqrt(oracle * (1 - oracle) / n);
    auto full = assignment_error(fit.model, prepared);
    auto cut = assignment_error(fit.model, prepared, 1.0);
    bool ok = true;
    for (double pii : full.P_ii) ok = ok && std::abs((1 - pii) - oracle) <= tol;
    // With outlier removal, P_ii is over kept shots only.
    ok = ok && cut.epsilon_n < full.epsilon_n;
    return {ok, fmt("per-state error %.4f / %.4f vs %.4f +/- %.4f; misassignment %.4f -> %.4f at k = 1",
                    1 - full.P_ii[0], 1 - full.P_ii[1], oracle, tol, full.epsilon_n, cut.epsilon_n)};
}

// 11. Closed forms against the Maxwell-matrix oracle over +/-50% capacitances.
Outcome capnet_fidelity() {
    const CapacitanceNetwork base{11.0, 20.0, 140.0, 150.0, 0.04};
    const double wq = 4.2, wc = 5.5;
    const double factors[] = {0.5, 0.75, 1.0, 1.25, 1.5};
    int total = 0, within = 0;
    double worst[3] = {0, 0, 0};
    double sign_err = 0;
    for (auto topo : {CouplingTopology::Asymmetric, CouplingTopology::Symmetric})
        for (double a : factors)
            for (double b : factors)
                for (double c : factors)
                    for (double e : factors) {
                        CapacitanceNetwork net = base;
                        net.C_pc *= a, net.C_pp *= b, net.C_gp *= c, net.C_gc *= e;
                        auto closed = closed_form_couplings(net, topo, wq, wc);
                        auto cap = maxwell_matrix(net, topo);
                        auto oracle = maxwell_oracle(cap, junction_inductances_for(cap, wq, wc, wc));
                        const double pairs[3][2] = {{closed.g_qc, oracle.couplings.g_qc},
                                                    {closed.g_cc_direct, oracle.couplings.g_cc_direct},
                                                    {closed.g_cc_net, oracle.couplings.g_cc_net}};
                        bool all = true;
                        for (int k = 0; k < 3; ++k) {
                            const double rel = std::abs(pairs[k][0] - pairs[k][1]) / std::abs(pairs[k][1]);
                            worst[k] = std::max(worst[k], rel);
                            all = all && rel <= 0.25;
                        }
                        within += all;
                        ++total;
                        const double g = closed.g_qc;
                        const double diff =
                            net_coupler_coupling(closed.g_cc_direct, g, CouplingTopology::Asymmetric, wc, wq) -
                            net_coupler_coupling(closed.g_cc_direct, g, CouplingTopology::Symmetric, wc, wq);
                        const double expect = 2 * g * g / (wc - wq);
                        sign_err = std::max(sign_err, std::abs(diff - expect) / expect);
                    }
    const bool ok = within == total && sign_err < 1e-12;
    return {ok, fmt("%d/%d grid points within 25%% (worst g_qc %.0f%%, g_cc direct %.0f%%, g_cc net %.0f%%); "
                    "sign identity relative error %.1e",
                    within, total, 100 * worst[0], 100 * worst[1], 100 * worst[2], sign_err)};
}

// 12. CLI byte determinism across runs and worker counts.
std::string slurp(const fs::path &p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

Outcome cli_determinism(const std::string &cli) {
    if (cli.empty() || !fs::exists(cli)) return {false, "CLI executable not available (pass --cli PATH)"};
    const fs::path dir = fs::temp_directory_path() / ("leakstack_acceptance_" + std::to_string(::getpid()));
    fs::create_directories(dir);
    {
        GmmModel m;
        m.components.push_back({0, {0.0, 0.0}, 1.0});
        m.components.push_back({1, {3.0, 1.0}, 1.0});
        m.components.push_back({2, {1.0, 3.5}, 1.2});
        std::ofstream out(dir / "shots.csv");
        write_shots_csv(simulate_iq(m, {0.5, 0.3, 0.2}, 3000, 4), out);
    }
    const std::vector<std::pair<std::string, std::string>> commands = {
        {"capnet", "capnet"},
        {"chevron", "chevron --qubit A --op f-lru --steps 7 --dur-steps 7"},
        {"lru-eff", "lru-eff --qubit A --op f-lru"},
        {"rb", "rb --interleaved data_lru --sequences 10"},
        {"stabilizer", "stabilizer --shots 2000 --inject D1:10"},
        {"propagation", "propagation --c-lru on"},
        {"classify", "classify --input " + (dir / "shots.csv").string() + " --components 3 --k 2"},
        {"reprate", "reprate"},
    };
    std::vector<std::string> bad;
    for (const auto &[name, args] : commands) {
        const fs::path out = dir / name;
        std::vector<std::string> snapshots;
        for (int w : {1, 4, 1}) {
            fs::remove_all(out);
            const std::string cmd = "\"" + cli + "\" --seed 7 --workers " + std::to_string(w) + " --out \"" +
                                    out.string() + "\" " + args + " 2>/dev/null";
            if (std::system(cmd.c_str()) != 0) {
                bad.push_back(name + " (exit)");
                break;
            }
            std::string all;
            std::set<fs::path> files;
            for (const auto &e : fs::directory_iterator(out)) files.insert(e.path());
            for (const auto &f : files) all += f.filename().string() + "\n" + slurp(f);
            snapshots.push_back(all);
        }
        if (snapshots.size() == 3 && (snapshots[0] != snapshots[1] || snapshots[0] != snapshots[2]))
            bad.push_back(name);
    }
    fs::remove_all(dir);
    std::string detail = fmt("%zu commands, each run with 1, 4 and 1 workers", commands.size());
    for (const auto &b : bad) detail += "; differs: " + b;
    return {bad.empty(), detail};
}

}  // namespace

int main(int argc, char **argv) {
    std::string cli;
    bool strict = false;
    std::set<std::string> only;
    for (int i = 1; i < argc; ++i) {
        std::string a = argv[i];
        if (a == "--cli" && i + 1 < argc) cli = argv[++i];
        else if (a == "--strict") strict = true;
        else if (a == "--only" && i + 1 < argc) only.insert(argv[++i]);
        else {
            std::fprintf(stderr, "usage: %s [--cli PATH] [--strict] [--only ID]...\n", argv[0]);
            return 2;
        }
    }

    const std::vector<Criterion> criteria = {
        {1, "coupler-resonator swap time", 1, false, cr_swap_time},
        {2, "joint dissipation rate", 10, false, joint_decay},
        {3, "parametric resonance location", 120, false, qc_chevron},
        {4, "Bessel coupling law", 300, true, bessel_law},
        {5, "LRU identity on computational states", 60, false, lru_identity},
        {6, "propagation suppression", 300, false, propagation},
        {7, "RB fitter recovery", 30, false, rb_fitter},
        {8, "stabilizer (a) ancilla injection", 0, true, stabilizer_ancilla},
        {8, "stabilizer (b) data injection decay", 0, false, [] { return stabilizer_data(false); }},
        {8, "stabilizer (c) P_f growth reduction", 0, false, stabilizer_growth},
        {8, "stabilizer (d) odd versus even injection", 0, false, [] { return stabilizer_data(true); }},
        {9, "steady-state leakage", 60, false, steady_state},
        {10, "GMM metrics", 10, false, gmm_metrics},
        {11, "capnet formula fidelity", 5, true, capnet_fidelity},
        {12, "CLI determinism", 0, false, [&] { return cli_determinism(cli); }},
    };

    int unexpected = 0, failed = 0;
    double stabilizer_total = 0;
    for (const auto &c : criteria) {
        if (!only.empty() && !only.count(std::to_string(c.id))) continue;
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception &e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (c.id == 8) stabilizer_total += dt;
        std::string timing = c.budget_s > 0 ? fmt(" [%.1f s, budget %.0f s]", dt, c.budget_s) : fmt(" [%.1f s]", dt);
        if (c.budget_s > 0 && dt > c.budget_s) {
            o.pass = false;
            o.detail += "; over the runtime budget";
        }
        const char *status = o.pass ? "PASS" : (c.known_deviation ? "FAIL (known deviation)" : "FAIL");
        std::printf("criterion %2d %-42s %s: %s%s\n", c.id, c.name, status, o.detail.c_str(), timing.c_str());
        std::fflush(stdout);
        if (!o.pass) {
            ++failed;
            if (!c.known_deviation) ++unexpected;
        }
    }
    if (stabilizer_total > 0)
        std::printf("criterion  8 runtime %.1f s for all stabilizer parts (budget 120 s)%s\n", stabilizer_total,
                    stabilizer_total > 120 ? " OVER BUDGET" : "");
    if (stabilizer_total > 120) ++unexpected, ++failed;
    std::printf("%d failed (%d unexpected)\n", failed, unexpected);
    return (strict ? failed : unexpected) > 0 ? 1 : 0;
}
