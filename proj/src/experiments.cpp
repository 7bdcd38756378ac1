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


#include "leakstack/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>

#include "leakstack/errors.hpp"
#include "leakstack/ini.hpp"
#include "leakstack/parallel.hpp"

namespace leakstack {

namespace {

struct SwapPoint {
    double omega = 0.0;  // coupler frequency holding the swapped excitation
    double edge = 0.0;   // ns
};

SwapPoint coupler_swap_point(const DeviceGraph &device, const std::string &coupler) {
    const auto &assignment = device.lru_for_coupler(coupler);
    if (assignment.operations.empty()) throw InvariantError("coupler '" + coupler + "' has no operating point");
    auto it = assignment.operations.find(LruTarget::EReset);
    if (it == assignment.operations.end()) it = assignment.operations.begin();
    return {it->second.omega_bar_c, it->second.edge_ns};
}

std::string resonator_of(const DeviceGraph &device, const std::string &coupler) {
    const Edge &e = device.resonator_edge(coupler);
    return e.a == coupler ? e.b : e.a;
}

// Parabola through three equally spaced samples; returns the vertex offset
// in units of the spacing and the vertex value.
std::pair<double, double> parabola_vertex(double y0, double y1, double y2) {
    const double den = y0 - 2 * y1 + y2;
    if (den == 0) return {0.0, y1};
    const double off = 0.5 * (y0 - y2) / den;
    return {off, y1 - 0.25 * (y0 - y2) * off};
}

}  // namespace

// ---------------------------------------------------------------------------

PropagationResult run_propagation(const DeviceGraph &device, const PropagationOptions &options) {
    PropagationResult out;
    out.c_lru = options.c_lru;
    out.waits = options.waits;
    out.couplers = options.couplers;
    if (out.couplers.empty()) {
        for (const auto &c : device.couplers) out.couplers.push_back(c.label);
    }
    const size_t n = out.couplers.size();
    if (n < 2) throw InvariantError("propagation needs at least two couplers");
    if (out.waits.empty()) throw InvariantError("propagation needs at least one wait time");
    for (double w : out.waits) {
        if (!(w >= 0)) throw InvariantError("propagation wait times must be >= 0");
    }
    for (size_t i = 0; i + 1 < n; ++i) {
        const Edge *e = device.find_edge(out.couplers[i], out.couplers[i + 1]);
        if (!e || e->kind != EdgeKind::CouplerCoupler) {
            throw InvariantError("couplers '" + out.couplers[i] + "' and '" + out.couplers[i + 1] +
                                 "' share no stray coupling edge");
        }
    }

    std::vector<std::pair<std::string, int>> modes;
    std::vector<SwapPoint> points;
    for (const auto &c : out.couplers) {
        modes.emplace_back(c, 2);
        points.push_back(coupler_swap_point(device, c));
    }
    for (const auto &c : out.couplers) modes.emplace_back(resonator_of(device, c), 2);
    const TensorSpace space = make_subsystem(device, modes);

    const size_t nw = out.waits.size();
    std::vector<DensityMatrix> prefix(nw * n);
    parallel_for(nw * n, options.workers, [&](size_t job) {
        const double wait = out.waits[job / n];
        const size_t p = job % n;
        PulseSchedule s;
        for (size_t c = 0; c < n; ++c) {
            const double idle = device.coupler(out.couplers[c]).omega_idle;
            FluxTrajectory t(out.couplers[c], c == p ? points[p].omega : idle);
            if (c == p) {
                t.ramp_to(idle, points[p].edge);
                if (wait > 0) t.hold(wait);
            } else {
                t.hold(points[p].edge + wait);
            }
            s.add_channel(t);
        }
        s.pad();
        if (options.c_lru) s = s.then(schedule_c_lru(device, out.couplers, options.c_lru_options));
        const DenseMatrix basis = dressed_basis(device, space, {{out.couplers[p], points[p].omega}});
        std::vector<int> levels(space.num_modes(), 0);
        levels[p] = 1;
        const DensityMatrix rho0 = dressed_basis_state(space, basis, levels);
        prefix[job] = run_schedule(device, space, s, rho0, options.noise, options.run).final_rho;
    });

    std::vector<double> flat(nw * n * n, 0.0);
    parallel_for(nw * n * n, options.workers, [&](size_t job) {
        const size_t j = job % n;
        const size_t base = job / n;  // wait * n + populated
        PulseSchedule s;
        for (size_t c = 0; c < n; ++c) {
            const double idle = device.coupler(out.couplers[c]).omega_idle;
            FluxTrajectory t(out.couplers[c], idle);
            if (c == j) {
                t.ramp_to(points[j].omega, points[j].edge);
            } else {
                t.hold(points[j].edge);
            }
            s.add_channel(t);
        }
        s.pad();
        const auto result = run_schedule(device, space, s, prefix[base], options.noise, options.run);
        flat[job] = result.populations[j].back()[1];
    });

    out.occupancy.assign(nw, std::vector<std::vector<double>>(n, std::vector<double>(n, 0.0)));
    for (size_t w = 0; w < nw; ++w) {
        for (size_t p = 0; p < n; ++p) {
            for (size_t j = 0; j < n; ++j) out.occupancy[w][p][j] = flat[(w * n + p) * n + j];
        }
    }
    return out;
}

void write_propagation_csv(const PropagationResult &result, std::ostream &out) {
    out << "wait_ns,populated,measured,occupancy\n";
    for (size_t w = 0; w < result.waits.size(); ++w) {
        for (size_t p = 0; p < result.couplers.size(); ++p) {
            for (size_t j = 0; j < result.couplers.size(); ++j) {
                out << ini::format_double(result.waits[w]) << ',' << result.couplers[p] << ','
                    << result.couplers[j] << ',' << ini::format_double(result.occupancy[w][p][j]) << '\n';
            }
        }
    }
}

// ---------------------------------------------------------------------------

JointDecayResult measure_joint_decay(const DeviceGraph &device, const std::string &coupler, double hold_ns,
                                     const RunOptions &options) {
    if (!(hold_ns > 0)) throw InvariantError("joint decay hold must be > 0");
    JointDecayResult out;
    out.coupler = coupler;
    out.resonator = resonator_of(device, coupler);
    const auto &res = device.resonator(out.resonator);
    out.expected_rate = 2 * std::numbers::pi * res.kappa_r * 1e-3 / 2;

    const TensorSpace space = make_subsystem(device, {{coupler, 2}, {out.resonator, 2}});
    const int excited[2] = {1, 0};
    StateVector psi{space, ComplexVector::Zero(static_cast<Eigen::Index>(space.dimension()))};
    psi.amplitudes[static_cast<Eigen::Index>(space.flat_index(excited))] = 1.0;
    FluxTrajectory traj(coupler, res.omega_r);
    traj.hold(hold_ns);
    const double step = options.sample_step_ns > 0 ? std::min(options.sample_step_ns, 0.1) : 0.1;
    for (double t = 0; t < hold_ns; t += step) out.times.push_back(t);
    out.times.push_back(hold_ns);
    const LindbladModel model = collapse_operators(device, space);
    const auto result = evolve_lindblad(device, space, {traj}, DensityMatrix::from_state(psi), out.times,
                                        options.evolution, &model);
    const auto &pc = result.populations[space.mode_index(coupler)];
    for (const auto &row : pc) out.coupler_population.push_back(row[1]);

    // Envelope from the vacuum-Rabi maxima, then a log-linear fit.
    std::vector<double> tp{out.times[0]}, lp{std::log(out.coupler_population[0])};
    const auto &y = out.coupler_population;
    for (size_t i = 1; i + 1 < y.size(); ++i) {
        if (y[i] > y[i - 1] && y[i] >= y[i + 1]) {
            const auto [off, val] = parabola_vertex(y[i - 1], y[i], y[i + 1]);
            tp.push_back(out.times[i] + off * step);
            lp.push_back(std::log(val));
        }
    }
    if (tp.size() < 3) throw NumericalError("joint decay: fewer than three envelope maxima");
    const double k = static_cast<double>(tp.size());
    const double mt = std::accumulate(tp.begin(), tp.end(), 0.0) / k;
    const double ml = std::accumulate(lp.begin(), lp.end(), 0.0) / k;
    double sxy = 0, sxx = 0;
    for (size_t i = 0; i < tp.size(); ++i) {
        sxy += (tp[i] - mt) * (lp[i] - ml);
        sxx += (tp[i] - mt) * (tp[i] - mt);
    }
    out.fitted_rate = -sxy / sxx;
    out.relative_error = std::abs(out.fitted_rate - out.expected_rate) / out.expected_rate;
    return out;
}

// ---------------------------------------------------------------------------

SwapRatePoint measure_swap_rate(const DeviceGraph &device, const std::string &qubit, LruTarget transition, int m,
                                double x, const EvolutionOptions &options) {
    if (m < 1) throw InvariantError("harmonic must be >= 1");
    if (!(x > 0)) throw InvariantError("drive strength x must be > 0");
    const auto &assignment = device.lru_for_qubit(qubit);
    const auto op_it = assignment.operations.find(transition);
    if (op_it == assignment.operations.end()) {
        throw InvariantError(std::string("qubit '") + qubit + "' has no " + to_string(transition) + " operating point");
    }
    const double omega_bar_c = op_it->second.omega_bar_c;
    const Edge *edge = device.find_edge(qubit, assignment.coupler);
    if (!edge) throw InvariantError("no qubit-coupler edge for '" + qubit + "'");

    SwapRatePoint out;
    out.m = m;
    out.x = x;
    // The resonance shifts with A_p, so A_p = x m omega_p is iterated.
    out.omega_p = parametric_resonance_frequency(transition, m, device.qubit(qubit), omega_bar_c);
    FloquetResonance res;
    for (int it = 0; it < 3; ++it) {
        out.A_p = x * m * out.omega_p;
        res = locate_qc_resonance(device, qubit, transition, out.A_p, m, options);
        out.omega_p = res.omega_p;
    }
    out.A_p = x * m * out.omega_p;
    out.g_floquet = res.gap / 2;
    const int n_ex = target_level(transition);
    out.g_formula = effective_parametric_coupling(ParametricDrive{m, out.A_p, out.omega_p, n_ex}, edge->coupling);
    if (!(out.g_floquet > 0)) throw NumericalError("measure_swap_rate: zero effective coupling");

    const TensorSpace space = qcr_subsystem(device, qubit, assignment.coupler);
    const int level = target_level(transition);
    const int upper[2] = {level, 0};
    const auto a = static_cast<Eigen::Index>(space.flat_index(upper));
    const DenseMatrix basis = dressed_basis(device, space, {{assignment.coupler, omega_bar_c}});
    const StateVector psi{space, basis.col(a)};

    const double t_est = 1.0 / (4.0 * out.g_floquet);
    const double span = 1.6 * t_est;
    const size_t samples = 1600;
    std::vector<double> times(samples + 1);
    for (size_t i = 0; i <= samples; ++i) times[i] = span * static_cast<double>(i) / samples;
    FluxTrajectory traj(assignment.coupler, omega_bar_c);
    traj.parametric(omega_bar_c, out.A_p, out.omega_p, 0.0, span);
    EvolutionOptions opts = options;
    opts.store_states = true;
    const auto result = evolve_unitary(device, space, {traj}, psi, times, opts);
    std::vector<double> p(times.size());
    for (size_t i = 0; i < times.size(); ++i) {
        p[i] = std::norm(basis.col(a).dot(result.psi_trajectory[i].amplitudes));
    }
    const auto it_min = std::min_element(p.begin() + 1, p.end() - 1);
    const auto i = static_cast<size_t>(it_min - p.begin());
    const auto [off, val] = parabola_vertex(p[i - 1], p[i], p[i + 1]);
    (void)val;
    const double t_min = times[i] + off * (span / samples);
    out.g_time_domain = 1.0 / (4.0 * t_min);
    out.relative_error = std::abs(out.g_time_domain - out.g_formula) / out.g_formula;
    return out;
}

// ---------------------------------------------------------------------------

void ResetModel::validate() const {
    auto prob = [](double v, const char *name) {
        if (!(v >= 0 && v <= 1)) throw InvariantError(std::string("reset model: ") + name + " must be in [0, 1]");
    };
    prob(efficiency, "efficiency");
    prob(thermal_population, "thermal_population");
    prob(previous_excited, "previous_excited");
    prob(readout_error_g, "readout_error_g");
    prob(readout_error_e, "readout_error_e");
    if (!(t1_us > 0)) throw InvariantError("reset model: t1 must be > 0");
    if (!(duration_ns >= 0)) throw InvariantError("reset model: duration must be >= 0");
}

ResetModel parse_reset_model(const std::string &text, const DeviceGraph &device, const std::string &source_name) {
    const auto tree = ini::parse(text, source_name);
    ResetModel m;
    auto it = tree.find("reset");
    if (it != tree.not_found()) {
        ini::Section s("reset", it->second);
        m.qubit = s.str_or("qubit", m.qubit);
        m.efficiency = s.num_or("efficiency", m.efficiency);
        m.duration_ns = s.num_or("duration_ns", m.duration_ns);
        m.thermal_population = s.num_or("thermal_population", m.thermal_population);
        m.previous_excited = s.num_or("previous_excited", m.previous_excited);
        m.readout_error_g = s.num_or("readout_error_g", m.readout_error_g);
        m.readout_error_e = s.num_or("readout_error_e", m.readout_error_e);
        if (s.has("t1")) {
            m.t1_us = s.num("t1");
        } else if (device.has_element(m.qubit)) {
            m.t1_us = device.qubit(m.qubit).T1;
        }
    } else if (device.has_element(m.qubit)) {
        m.t1_us = device.qubit(m.qubit).T1;
    }
    m.validate();
    return m;
}

ResetModel load_reset_model(const std::string &config_path, const DeviceGraph &device) {
    std::string path;
    const std::string text = ini::read_config_text(config_path, &path);
    return parse_reset_model(text, device, path);
}

std::vector<RepRatePoint> repetition_rate_study(const ResetModel &model, const std::vector<double> &rates_khz,
                                                bool reset) {
    model.validate();
    // Excited population relaxing from the previous run towards the
    // thermal floor; the reset removes a fraction eta of whatever is left.
    auto relaxed = [&](double t_us) {
        return model.thermal_population +
               (model.previous_excited - model.thermal_population) * std::exp(-t_us / model.t1_us);
    };
    std::vector<RepRatePoint> out;
    for (double rate : rates_khz) {
        if (!(rate > 0)) throw InvariantError("repetition rates must be > 0");
        RepRatePoint pt;
        pt.rate_khz = rate;
        const double delay_us = 1e3 / rate;
        if (reset) {
            const double wait = std::max(0.0, delay_us - model.duration_ns * 1e-3);
            pt.residual = (1 - model.efficiency) * relaxed(wait);
        } else {
            pt.residual = relaxed(delay_us);
        }
        const double r = pt.residual;
        // A pi pulse maps the residual excitation of an |e> preparation to |g>.
        pt.error_g = r * (1 - model.readout_error_e) + (1 - r) * model.readout_error_g;
        pt.error_e = r * (1 - model.readout_error_g) + (1 - r) * model.readout_error_e;
        pt.fidelity = 1 - 0.5 * (pt.error_g + pt.error_e);
        out.push_back(pt);
    }
    return out;
}

void write_reprate_csv(const std::vector<RepRatePoint> &without, const std::vector<RepRatePoint> &with,
                       std::ostream &out) {
    out << "rate_khz,reset,residual,error_g,error_e,fidelity\n";
    auto rows = [&](const std::vector<RepRatePoint> &pts, const char *tag) {
        for (const auto &p : pts) {
            out << ini::format_double(p.rate_khz) << ',' << tag << ',' << ini::format_double(p.residual) << ','
                << ini::format_double(p.error_g) << ',' << ini::format_double(p.error_e) << ','
                << ini::format_double(p.fidelity) << '\n';
        }
    };
    rows(without, "off");
    rows(with, "on");
}

}  // namespace leakstack
