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

#include "leakstack/protocols.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <numbers>
#include <ostream>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <boost/math/special_functions/bessel.hpp>
#include <boost/math/tools/roots.hpp>

#include "json.hpp"
#include "leakstack/errors.hpp"
#include "leakstack/parallel.hpp"

namespace leakstack {

namespace {

const LruOperatingPoint &operating_point(const DeviceGraph &device, const std::string &qubit, LruTarget t) {
    const auto &assignment = device.lru_for_qubit(qubit);
    auto it = assignment.operations.find(t);
    if (it == assignment.operations.end()) {
        throw InvariantError(std::string("qubit '") + qubit + "' has no " + to_string(t) + " operating point");
    }
    return it->second;
}

double qc_coupling(const DeviceGraph &device, const std::string &qubit, const std::string &coupler) {
    const Edge *e = device.find_edge(qubit, coupler);
    if (!e || e->kind != EdgeKind::QubitCoupler) {
        throw InvariantError("no qubit-coupler edge between '" + qubit + "' and '" + coupler + "'");
    }
    return e->coupling;
}

std::vector<double> sample_grid(double t0, double t1, double step) {
    std::vector<double> out{t0};
    if (t1 <= t0) return out;
    const auto n = static_cast<size_t>(std::ceil((t1 - t0) / step - 1e-9));
    for (size_t k = 1; k < n; ++k) out.push_back(t0 + k * step);
    out.push_back(t1);
    return out;
}

// Population of `level` on `mode` in the dressed basis for a pure state.
double dressed_level_population(const TensorSpace &space, const DenseMatrix &basis, const ComplexVector &psi,
                                size_t mode, int level) {
    const ComplexVector amp = basis.adjoint() * psi;
    double p = 0;
    for (size_t i = 0; i < space.dimension(); ++i) {
        if (space.level_of(i, mode) == level) p += std::norm(amp[static_cast<Eigen::Index>(i)]);
    }
    return p;
}

CalibrationResult base_calibration(const DeviceGraph &device, const std::string &qubit, const std::string &coupler,
                                   LruTarget transition) {
    const auto &op = operating_point(device, qubit, transition);
    CalibrationResult cal;
    cal.kind = SwapKind::QubitCoupler;
    cal.qubit = qubit;
    cal.coupler = coupler;
    cal.transition = transition;
    cal.harmonic = op.harmonic;
    cal.omega_bar_c = op.omega_bar_c;
    cal.edge_ns = op.edge_ns;
    cal.A_p_opt = op.amplitude;
    cal.omega_p_opt = op.omega_p;
    cal.duration_opt = op.plateau_ns;
    return cal;
}

struct QcPair {
    size_t a = 0;  // |target, 0>
    size_t b = 0;  // |target - 1, 1>
};

QcPair qc_pair(const TensorSpace &space, LruTarget transition) {
    const int level = target_level(transition);
    const int upper[2] = {level, 0};
    const int lower[2] = {level - 1, 1};
    return {space.flat_index(upper), space.flat_index(lower)};
}

// Window in which the dressed resonance is searched, from the static
// dressed splitting at omega_bar_c.
std::pair<double, double> resonance_window(const DeviceGraph &device, const TensorSpace &space,
                                           const std::string &coupler, double omega_bar_c, int harmonic,
                                           const QcPair &pair) {
    const DenseMatrix h = build_hamiltonian(device, space, {{coupler, omega_bar_c}}).dense();
    const DenseMatrix v = dressed_basis(device, space, {{coupler, omega_bar_c}});
    const DenseMatrix d = v.adjoint() * h * v;
    const double split = std::abs(d(static_cast<Eigen::Index>(pair.a), static_cast<Eigen::Index>(pair.a)).real() -
                                  d(static_cast<Eigen::Index>(pair.b), static_cast<Eigen::Index>(pair.b)).real());
    const double center = split / harmonic;
    return {center * 0.93, center * 1.07};
}

FloquetResonance locate_resonance(const DeviceGraph &device, const TensorSpace &space, const std::string &coupler,
                                  double omega_bar_c, double amplitude, int harmonic, const QcPair &pair,
                                  const EvolutionOptions &options) {
    const auto [lo, hi] = resonance_window(device, space, coupler, omega_bar_c, harmonic, pair);
    const int steps = 70;
    const double step = (hi - lo) / steps;
    double best_gap = std::numeric_limits<double>::infinity(), best_wp = lo;
    for (int k = 0; k <= steps; ++k) {
        const double wp = lo + k * step;
        const double gap = floquet_gap(device, space, coupler, omega_bar_c, amplitude, wp, pair.a, pair.b, options);
        if (gap < best_gap) {
            best_gap = gap;
            best_wp = wp;
        }
    }
    return floquet_resonance(device, space, coupler, omega_bar_c, amplitude, best_wp - step, best_wp + step, pair.a,
                             pair.b, options);
}

}  // namespace

TensorSpace qcr_subsystem(const DeviceGraph &device, const std::string &qubit, const std::string &coupler,
                          const std::string &resonator, int qubit_dim, int coupler_dim, int resonator_dim) {
    std::vector<std::pair<std::string, int>> modes{{qubit, qubit_dim}, {coupler, coupler_dim}};
    if (!resonator.empty()) modes.emplace_back(resonator, resonator_dim);
    device.qubit(qubit);
    device.coupler(coupler);
    return make_subsystem(device, modes);
}

void CalibrationResult::validate() const {
    if (!(residual_population >= -1e-9 && residual_population <= 1 + 1e-9)) {
        throw InvariantError("calibration residual outside [0, 1]");
    }
    if (!(duration_opt >= 0)) throw InvariantError("calibration duration must be >= 0");
}

FluxTrajectory qc_swap_trajectory(const DeviceGraph &device, const CalibrationResult &cal) {
    const double idle = device.coupler(cal.coupler).omega_idle;
    FluxTrajectory traj(cal.coupler, idle);
    traj.ramp_to(cal.omega_bar_c, cal.edge_ns);
    traj.parametric(cal.omega_bar_c, cal.A_p_opt, cal.omega_p_opt, 0.0, cal.duration_opt);
    traj.ramp_to(idle, cal.edge_ns);
    return traj;
}

CalibrationResult calibrate_qc_swap(const DeviceGraph &device, const std::string &qubit, const std::string &coupler,
                                    LruTarget transition, const std::vector<double> &freq_grid,
                                    const std::vector<double> &dur_grid, const ChevronOptions &options,
                                    std::optional<double> amplitude) {
    if (freq_grid.empty() || dur_grid.empty()) throw InvariantError("calibration grids must be non-empty");
    CalibrationResult cal = base_calibration(device, qubit, coupler, transition);
    if (amplitude) cal.A_p_opt = *amplitude;
    const TensorSpace space = qcr_subsystem(device, qubit, coupler);
    const DenseMatrix basis = idle_dressed_basis(device, space);
    const QcPair pair = qc_pair(space, transition);
    const ComplexVector psi0 = basis.col(static_cast<Eigen::Index>(pair.a));
    const size_t qmode = space.mode_index(qubit);
    const int level = target_level(transition);

    cal.axis_x = freq_grid;
    cal.axis_y = dur_grid;
    cal.surface.assign(freq_grid.size(), std::vector<double>(dur_grid.size(), 0.0));
    const size_t total = freq_grid.size() * dur_grid.size();
    parallel_for(total, options.workers, [&](size_t idx) {
        const size_t i = idx / dur_grid.size(), j = idx % dur_grid.size();
        CalibrationResult point = cal;
        point.omega_p_opt = freq_grid[i];
        point.duration_opt = dur_grid[j];
        const FluxTrajectory traj = qc_swap_trajectory(device, point);
        const auto result =
            evolve_unitary(device, space, {traj}, StateVector{space, psi0}, {0.0, traj.duration()}, options.evolution);
        cal.surface[i][j] = dressed_level_population(space, basis, result.final_psi.amplitudes, qmode, level);
    });

    size_t bi = 0, bj = 0;
    for (size_t i = 0; i < freq_grid.size(); ++i) {
        for (size_t j = 0; j < dur_grid.size(); ++j) {
            if (cal.surface[i][j] < cal.surface[bi][bj]) {
                bi = i;
                bj = j;
            }
        }
    }
    cal.omega_p_opt = freq_grid[bi];
    cal.duration_opt = dur_grid[bj];
    cal.residual_population = std::clamp(cal.surface[bi][bj], 0.0, 1.0);
    cal.interior = freq_grid.size() < 3 || (bi > 0 && bi + 1 < freq_grid.size());

    // Virtual-Z: phase of |e> relative to |g> after the pulse, referenced to idling.
    const int g_levels[2] = {0, 0};
    const int e_levels[2] = {1, 0};
    const size_t ig = space.flat_index(g_levels), ie = space.flat_index(e_levels);
    const FluxTrajectory traj = qc_swap_trajectory(device, cal);
    FluxTrajectory idle(coupler, device.coupler(coupler).omega_idle);
    idle.hold(traj.duration());
    auto relative_phase = [&](const FluxTrajectory &t) {
        const DenseMatrix cols = propagate_columns(device, space, {t}, {ig, ie}, 0.0, t.duration(), options.evolution);
        const ComplexVector psi_g = cols.col(0), psi_e = cols.col(1);
        const ComplexVector dg = basis.adjoint() * psi_g, de = basis.adjoint() * psi_e;
        return std::arg(de[static_cast<Eigen::Index>(ie)]) - std::arg(dg[static_cast<Eigen::Index>(ig)]);
    };
    if (traj.duration() > 0) {
        double phase = relative_phase(traj) - relative_phase(idle);
        cal.virtual_z = std::remainder(phase, 2 * std::numbers::pi);
    }
    return cal;
}

AmplitudeCalibration calibrate_amplitude(const DeviceGraph &device, const std::string &qubit, LruTarget transition,
                                         double plateau_ns, const EvolutionOptions &options) {
    if (!(plateau_ns > 0)) throw InvariantError("plateau must be > 0");
    const auto &assignment = device.lru_for_qubit(qubit);
    const auto &op = operating_point(device, qubit, transition);
    const TensorSpace space = qcr_subsystem(device, qubit, assignment.coupler);
    const QcPair pair = qc_pair(space, transition);
    const double g_qc = qc_coupling(device, qubit, assignment.coupler);
    const double target = 1.0 / (4.0 * plateau_ns);

    // Starting bracket from the sideband law, then refine on the Floquet gap.
    const ParametricDrive probe{op.harmonic, 0.0, op.omega_p, target_level(transition)};
    auto law = [&](double a) {
        ParametricDrive d = probe;
        d.A_p = a;
        return sideband_coupling(d, g_qc) - target;
    };
    double hi = 0.05 * op.omega_p;
    while (law(hi) < 0 && hi < 1.5 * op.omega_p) hi *= 1.5;
    auto mismatch = [&](double a) {
        return locate_resonance(device, space, assignment.coupler, op.omega_bar_c, a, op.harmonic, pair, options).gap /
                   2 -
               target;
    };
    double lo = 0.2 * hi;
    hi = 2.0 * hi;
    if (mismatch(lo) > 0 || mismatch(hi) < 0) {
        throw NumericalError("calibrate_amplitude: could not bracket the swap amplitude");
    }
    boost::uintmax_t iterations = 60;
    const auto root = boost::math::tools::toms748_solve(
        mismatch, lo, hi, boost::math::tools::eps_tolerance<double>(30), iterations);
    AmplitudeCalibration out;
    out.A_p = 0.5 * (root.first + root.second);
    const auto res = locate_resonance(device, space, assignment.coupler, op.omega_bar_c, out.A_p, op.harmonic, pair, options);
    out.omega_p = res.omega_p;
    out.g_eff = res.gap / 2;
    return out;
}

CalibrationResult calibrate_qc_swap_floquet(const DeviceGraph &device, const std::string &qubit,
                                            LruTarget transition, const EvolutionOptions &options) {
    const auto &assignment = device.lru_for_qubit(qubit);
    CalibrationResult cal = base_calibration(device, qubit, assignment.coupler, transition);
    const TensorSpace space = qcr_subsystem(device, qubit, assignment.coupler);
    const QcPair pair = qc_pair(space, transition);
    const auto res = locate_resonance(device, space, assignment.coupler, cal.omega_bar_c, cal.A_p_opt, cal.harmonic,
                                      pair, options);
    cal.omega_p_opt = res.omega_p;
    if (!(res.gap > 0)) throw NumericalError("calibrate_qc_swap_floquet: zero effective coupling");
    cal.duration_opt = 1.0 / (2.0 * res.gap);
    // One-point chevron fills in residual and virtual-Z.
    const auto point = calibrate_qc_swap(device, qubit, assignment.coupler, transition, {cal.omega_p_opt},
                                         {cal.duration_opt}, ChevronOptions{1, options}, cal.A_p_opt);
    cal.residual_population = point.residual_population;
    cal.virtual_z = point.virtual_z;
    cal.axis_x = point.axis_x;
    cal.axis_y = point.axis_y;
    cal.surface = point.surface;
    return cal;
}

FloquetResonance locate_qc_resonance(const DeviceGraph &device, const std::string &qubit, LruTarget transition,
                                     double A_p, int harmonic, const EvolutionOptions &options) {
    const auto &assignment = device.lru_for_qubit(qubit);
    const auto &op = operating_point(device, qubit, transition);
    const int m = harmonic > 0 ? harmonic : op.harmonic;
    const TensorSpace space = qcr_subsystem(device, qubit, assignment.coupler);
    return locate_resonance(device, space, assignment.coupler, op.omega_bar_c, A_p, m, qc_pair(space, transition),
                            options);
}

double cr_half_exchange_time(const DeviceGraph &device, const std::string &coupler) {
    const Edge &e = device.resonator_edge(coupler);
    if (!(e.coupling > 0)) throw InvariantError("coupler '" + coupler + "' has no positive resonator coupling");
    return 1.0 / (4.0 * e.coupling);
}

CalibrationResult calibrate_cr_swap(const DeviceGraph &device, const std::string &coupler,
                                    const std::vector<double> &amp_grid, const std::vector<double> &dur_grid,
                                    const ChevronOptions &options) {
    if (amp_grid.empty() || dur_grid.empty()) throw InvariantError("calibration grids must be non-empty");
    const Edge &edge = device.resonator_edge(coupler);
    const std::string resonator = edge.a == coupler ? edge.b : edge.a;
    const TensorSpace space = make_subsystem(device, {{coupler, 3}, {resonator, 3}});
    const DenseMatrix basis = idle_dressed_basis(device, space);
    const int one[2] = {1, 0};
    const DensityMatrix rho0 = dressed_basis_state(space, basis, one);
    const double idle = device.coupler(coupler).omega_idle;

    std::vector<double> times = dur_grid;
    std::sort(times.begin(), times.end());
    if (times.front() > 0) times.insert(times.begin(), 0.0);

    CalibrationResult cal;
    cal.kind = SwapKind::CouplerResonator;
    cal.coupler = coupler;
    cal.axis_x = amp_grid;
    cal.axis_y = dur_grid;
    cal.surface.assign(amp_grid.size(), std::vector<double>(dur_grid.size(), 0.0));
    parallel_for(amp_grid.size(), options.workers, [&](size_t i) {
        FluxTrajectory traj(coupler, idle);
        traj.square(idle + amp_grid[i], times.back() > 0 ? times.back() : 1e-9);
        EvolutionOptions opts = options.evolution;
        opts.store_states = true;
        const auto result = evolve_lindblad(device, space, {traj}, rho0, times, opts);
        for (size_t j = 0; j < dur_grid.size(); ++j) {
            const size_t k = static_cast<size_t>(std::find(times.begin(), times.end(), dur_grid[j]) - times.begin());
            cal.surface[i][j] = dressed_mode_populations(result.rho_trajectory[k], basis, 0)[1];
        }
    });

    size_t bi = 0;
    double best = std::numeric_limits<double>::infinity();
    for (size_t i = 0; i < amp_grid.size(); ++i) {
        const double row_min = *std::min_element(cal.surface[i].begin(), cal.surface[i].end());
        if (row_min < best) {
            best = row_min;
            bi = i;
        }
    }
    if (best > 0.5) throw NumericalError("calibrate_cr_swap: no resonance inside the amplitude grid");
    // First local minimum along duration on the resonant row.
    std::vector<size_t> order(dur_grid.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](size_t a, size_t b) { return dur_grid[a] < dur_grid[b]; });
    const auto &row = cal.surface[bi];
    size_t bj = order.front();
    for (size_t k = 1; k + 1 < order.size(); ++k) {
        if (row[order[k]] <= row[order[k - 1]] && row[order[k]] <= row[order[k + 1]] && row[order[k]] < 0.5) {
            bj = order[k];
            break;
        }
        bj = order[k + 1];
    }
    double t_opt = dur_grid[bj];
    const size_t pos = static_cast<size_t>(std::find(order.begin(), order.end(), bj) - order.begin());
    if (pos > 0 && pos + 1 < order.size()) {
        // Parabolic refinement through the three neighbouring samples.
        const double x0 = dur_grid[order[pos - 1]], x1 = dur_grid[order[pos]], x2 = dur_grid[order[pos + 1]];
        const double y0 = row[order[pos - 1]], y1 = row[order[pos]], y2 = row[order[pos + 1]];
        const double denom = (x0 - x1) * (x0 - x2) * (x1 - x2);
        const double a = (x2 * (y1 - y0) + x1 * (y0 - y2) + x0 * (y2 - y1)) / denom;
        const double b = (x2 * x2 * (y0 - y1) + x1 * x1 * (y2 - y0) + x0 * x0 * (y1 - y2)) / denom;
        if (a > 0) t_opt = std::clamp(-b / (2 * a), x0, x2);
    }
    cal.A_p_opt = amp_grid[bi];
    cal.omega_p_opt = idle + amp_grid[bi];
    cal.duration_opt = t_opt;
    cal.residual_population = std::clamp(row[bj], 0.0, 1.0);
    cal.interior = amp_grid.size() < 3 || (bi > 0 && bi + 1 < amp_grid.size());
    cal.edge_ns = 0.0;
    return cal;
}

PulseSchedule schedule_c_lru(const DeviceGraph &device, const std::vector<std::string> &couplers,
                             const CLruOptions &options) {
    PulseSchedule schedule;
    for (const auto &c : couplers) {
        const Edge &edge = device.resonator_edge(c);
        const std::string resonator = edge.a == c ? edge.b : edge.a;
        const double idle = device.coupler(c).omega_idle;
        const double target = device.resonator(resonator).omega_r;
        FluxTrajectory traj(c, idle);
        double plateau = 0.0;
        if (options.mode == CLruMode::ISwap) {
            plateau = options.iswap_ns > 0 ? options.iswap_ns : cr_half_exchange_time(device, c);
        } else {
            if (options.hold_ns < 0) throw InvariantError("c-LRU hold duration must be >= 0");
            plateau = options.hold_ns;
        }
        if (plateau > 0) {
            traj.square(target, plateau);
            traj.square(idle, options.ringdown_ns > 0 ? options.ringdown_ns : 0.0);
        } else {
            traj.hold(options.ringdown_ns);
        }
        schedule.add_channel(traj);
    }
    schedule.pad();
    return schedule;
}

namespace {

PulseSchedule swap_schedule(const DeviceGraph &device, const std::string &qubit, const std::string &coupler,
                            const CalibrationResult &cal, LruTarget expected) {
    if (cal.kind != SwapKind::QubitCoupler || cal.transition != expected) {
        throw InvariantError(std::string("missing ") + to_string(expected) + " calibration");
    }
    if (cal.qubit != qubit || cal.coupler != coupler) {
        throw InvariantError("calibration belongs to " + cal.qubit + "/" + cal.coupler);
    }
    PulseSchedule s;
    s.add_channel(qc_swap_trajectory(device, cal));
    s.metadata[std::string("virtual_z.") + qubit] = cal.virtual_z;
    return s;
}

void check_duration(const PulseSchedule &s, const LruScheduleOptions &options) {
    if (s.duration > options.max_duration_ns) {
        throw InvariantError("schedule lasts " + std::to_string(s.duration) + " ns, above the configured maximum");
    }
}

}  // namespace

PulseSchedule schedule_e_reset(const DeviceGraph &device, const std::string &qubit, const std::string &coupler,
                               const CalibrationResult &cal, const LruScheduleOptions &options) {
    auto s = swap_schedule(device, qubit, coupler, cal, LruTarget::EReset).then(
        schedule_c_lru(device, {coupler}, options.c_lru));
    check_duration(s, options);
    return s;
}

PulseSchedule schedule_f_lru(const DeviceGraph &device, const std::string &qubit, const std::string &coupler,
                             const CalibrationResult &cal, const LruScheduleOptions &options) {
    auto s = swap_schedule(device, qubit, coupler, cal, LruTarget::FLru).then(
        schedule_c_lru(device, {coupler}, options.c_lru));
    check_duration(s, options);
    return s;
}

PulseSchedule schedule_h_lru(const DeviceGraph &device, const std::string &qubit, const std::string &coupler,
                             const CalibrationResult &cal_h, const CalibrationResult &cal_f,
                             const LruScheduleOptions &options) {
    CLruOptions between = options.c_lru;
    between.ringdown_ns = 0.0;
    auto s = swap_schedule(device, qubit, coupler, cal_h, LruTarget::HLru)
                 .then(schedule_c_lru(device, {coupler}, between))
                 .then(swap_schedule(device, qubit, coupler, cal_f, LruTarget::FLru))
                 .then(schedule_c_lru(device, {coupler}, options.c_lru));
    check_duration(s, options);
    return s;
}

EfficiencyReport lru_efficiency(double P_target_prepared, double P_lower_prepared, double P_target_after_lru) {
    for (double p : {P_target_prepared, P_lower_prepared, P_target_after_lru}) {
        if (!(p >= 0 && p <= 1)) throw InvariantError("efficiency inputs must be probabilities in [0, 1]");
    }
    if (P_target_prepared == 0) throw InvariantError("efficiency undefined for P_target_prepared = 0");
    EfficiencyReport r;
    r.P_target_prepared = P_target_prepared;
    r.P_lower_prepared = P_lower_prepared;
    r.P_target_after_lru = P_target_after_lru;
    r.eta = 1.0 - (P_target_after_lru - P_lower_prepared) / P_target_prepared;
    if (r.eta > 1.0 || r.eta < 0.0) r.warnings.push_back("efficiency outside [0, 1]");
    return r;
}

DenseMatrix gate_unitary(const TensorSpace &space, const GateEvent &gate) {
    const size_t dim = space.dimension();
    if (!space.has_mode(gate.target)) throw InvariantError("gate target '" + gate.target + "' not in the subsystem");
    const size_t mode = space.mode_index(gate.target);
    const int d = space.mode_dim(mode);
    if (gate.kind == GateKind::Swap) {
        if (!space.has_mode(gate.partner)) {
            throw InvariantError("swap partner '" + gate.partner + "' not in the subsystem");
        }
        const size_t other = space.mode_index(gate.partner);
        const int lim = std::min(d, space.mode_dim(other));
        DenseMatrix u = DenseMatrix::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
        for (size_t i = 0; i < dim; ++i) {
            const int la = space.level_of(i, mode), lb = space.level_of(i, other);
            size_t j = i;
            if (la < lim && lb < lim) {
                j = i + (static_cast<size_t>(lb) * space.stride(mode) + static_cast<size_t>(la) * space.stride(other)) -
                    (static_cast<size_t>(la) * space.stride(mode) + static_cast<size_t>(lb) * space.stride(other));
            }
            u(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = 1.0;
        }
        return u;
    }
    DenseMatrix local = DenseMatrix::Identity(d, d);
    auto flip = [&](int a, int b) {
        if (b >= d) throw InvariantError(std::string(to_string(gate.kind)) + " needs more levels on " + gate.target);
        local(a, a) = 0;
        local(b, b) = 0;
        local(a, b) = 1;
        local(b, a) = 1;
    };
    switch (gate.kind) {
        case GateKind::X: flip(0, 1); break;
        case GateKind::Xef: flip(1, 2); break;
        case GateKind::Xfh: flip(2, 3); break;
        case GateKind::Y2: {
            const double s = std::sqrt(0.5);
            local(0, 0) = s;
            local(0, 1) = -s;
            local(1, 0) = s;
            local(1, 1) = s;
            break;
        }
        case GateKind::VirtualZ:
            for (int n = 0; n < d; ++n) local(n, n) = std::polar(1.0, n * gate.angle);
            break;
        case GateKind::Swap: break;
    }
    return embed(space, mode, local).dense();
}

DenseMatrix idle_dressed_basis(const DeviceGraph &device, const TensorSpace &space) {
    return dressed_basis(device, space, {});
}

DensityMatrix dressed_basis_state(const TensorSpace &space, const DenseMatrix &basis, std::span<const int> levels) {
    const ComplexVector psi = basis.col(static_cast<Eigen::Index>(space.flat_index(levels)));
    return DensityMatrix::from_state(StateVector{space, psi});
}

std::vector<double> dressed_mode_populations(const DensityMatrix &rho, const DenseMatrix &basis, size_t mode) {
    const auto diag = dressed_populations(rho, basis);
    std::vector<double> out(static_cast<size_t>(rho.space.mode_dim(mode)), 0.0);
    for (size_t i = 0; i < diag.size(); ++i) out[static_cast<size_t>(rho.space.level_of(i, mode))] += diag[i];
    return out;
}

EvolutionResult run_schedule(const DeviceGraph &device, const TensorSpace &space, const PulseSchedule &schedule,
                             const DensityMatrix &initial, bool noise, const RunOptions &options) {
    schedule.validate();
    std::vector<FluxTrajectory> trajectories;
    for (const auto &[name, traj] : schedule.channels) {
        if (!device.has_element(name)) throw InvariantError("schedule channel '" + name + "' is not in the device");
        if (!space.has_mode(name)) {
            throw InvariantError("schedule channel '" + name + "' is not in the simulated subsystem");
        }
        trajectories.push_back(traj);
    }
    const LindbladModel model = noise ? collapse_operators(device, space) : LindbladModel{};
    EvolutionOptions evo = options.evolution;
    if (evo.frame_frequency < 0) {
        // One frame for every window so gate phases stay consistent.
        double mean = 0;
        for (size_t m = 0; m < space.num_modes(); ++m) {
            auto it = schedule.channels.find(space.label(m));
            mean += it != schedule.channels.end() ? it->second.frequency(0.0) : idle_frequency(device, space.label(m));
        }
        evo.frame_frequency = mean / static_cast<double>(space.num_modes());
    }

    // Noise-free pure states are propagated as kets, which keeps them exactly
    // positive over long schedules.
    std::optional<StateVector> psi;
    if (!noise) {
        Eigen::SelfAdjointEigenSolver<DenseMatrix> eig(initial.matrix);
        const Eigen::Index top = eig.eigenvalues().size() - 1;
        if (std::abs(eig.eigenvalues()[top] - 1.0) < 1e-10) psi = StateVector{space, eig.eigenvectors().col(top)};
    }

    EvolutionResult out;
    out.space = space;
    out.unitary = psi.has_value();
    out.populations.assign(space.num_modes(), {});
    DensityMatrix rho = initial;
    std::vector<double> cuts{0.0};
    for (const auto &g : schedule.gates) cuts.push_back(g.time);
    cuts.push_back(schedule.duration);
    size_t next_gate = 0;
    for (size_t w = 0; w + 1 < cuts.size(); ++w) {
        const double ta = cuts[w], tb = cuts[w + 1];
        if (tb > ta) {
            const auto times = sample_grid(ta, tb, options.sample_step_ns);
            const auto piece = psi ? evolve_unitary(device, space, trajectories, *psi, times, evo)
                                   : evolve_lindblad(device, space, trajectories, rho, times, evo, &model);
            const size_t skip = out.times.empty() ? 0 : 1;
            for (size_t k = skip; k < piece.times.size(); ++k) {
                out.times.push_back(piece.times[k]);
                for (size_t m = 0; m < space.num_modes(); ++m) out.populations[m].push_back(piece.populations[m][k]);
            }
            out.max_trace_error = std::max(out.max_trace_error, piece.max_trace_error);
            out.warnings.insert(out.warnings.end(), piece.warnings.begin(), piece.warnings.end());
            if (psi) {
                psi = piece.final_psi;
            } else {
                rho = nearest_physical(piece.final_rho);
            }
        }
        while (next_gate < schedule.gates.size() && schedule.gates[next_gate].time <= tb + 1e-12) {
            const DenseMatrix u = gate_unitary(space, schedule.gates[next_gate]);
            if (psi) {
                psi->amplitudes = u * psi->amplitudes;
            } else {
                rho.matrix = u * rho.matrix * u.adjoint();
            }
            ++next_gate;
        }
    }
    if (psi) {
        rho = DensityMatrix::from_state(*psi);
        out.final_psi = *psi;
    }
    if (out.times.empty()) {
        out.times = {0.0};
        for (size_t m = 0; m < space.num_modes(); ++m) out.populations[m].push_back(mode_populations(rho, m));
    }
    out.final_rho = rho;
    return out;
}

LruMeasurement measure_lru_efficiency(const DeviceGraph &device, const std::string &qubit, LruTarget target,
                                      bool noise, const ConfusionMatrix &readout, const RunOptions &options) {
    readout.validate();
    const int level = target_level(target);
    if (static_cast<int>(readout.size()) <= level) {
        throw InvariantError("readout confusion does not resolve the target level");
    }
    const auto &assignment = device.lru_for_qubit(qubit);
    const std::string &coupler = assignment.coupler;
    PulseSchedule schedule;
    if (target == LruTarget::HLru) {
        const auto cal_h = calibrate_qc_swap_floquet(device, qubit, LruTarget::HLru, options.evolution);
        const auto cal_f = calibrate_qc_swap_floquet(device, qubit, LruTarget::FLru, options.evolution);
        schedule = schedule_h_lru(device, qubit, coupler, cal_h, cal_f);
    } else {
        const auto cal = calibrate_qc_swap_floquet(device, qubit, target, options.evolution);
        schedule = target == LruTarget::FLru ? schedule_f_lru(device, qubit, coupler, cal)
                                             : schedule_e_reset(device, qubit, coupler, cal);
    }
    const TensorSpace space = qcr_subsystem(device, qubit, coupler, assignment.resonator);
    const DenseMatrix basis = idle_dressed_basis(device, space);
    const int levels[3] = {level, 0, 0};
    const auto result = run_schedule(device, space, schedule, dressed_basis_state(space, basis, levels), noise, options);

    LruMeasurement m;
    m.duration_ns = schedule.duration;
    m.populations_after = dressed_mode_populations(result.final_rho, basis, space.mode_index(qubit));
    // Levels the readout cannot resolve are dropped.
    std::vector<double> resolved = m.populations_after;
    resolved.resize(std::min(resolved.size(), readout.size()));
    const auto measured = readout.apply(resolved);
    const auto L = static_cast<size_t>(level);
    m.report = lru_efficiency(readout.m[L][L], readout.m[L - 1][L], std::clamp(measured[L], 0.0, 1.0));
    return m;
}

std::string calibration_to_json(const CalibrationResult &cal) {
    nlohmann::ordered_json j;
    j["schema_version"] = 1;
    j["kind"] = cal.kind == SwapKind::QubitCoupler ? "qc" : "cr";
    j["qubit"] = cal.qubit;
    j["coupler"] = cal.coupler;
    j["transition"] = to_string(cal.transition);
    j["harmonic"] = cal.harmonic;
    j["omega_bar_c"] = cal.omega_bar_c;
    j["edge_ns"] = cal.edge_ns;
    j["omega_p_opt"] = cal.omega_p_opt;
    j["A_p_opt"] = cal.A_p_opt;
    j["duration_opt"] = cal.duration_opt;
    j["residual_population"] = cal.residual_population;
    j["virtual_z"] = cal.virtual_z;
    j["interior"] = cal.interior;
    j["axis_x"] = cal.axis_x;
    j["axis_y"] = cal.axis_y;
    j["surface"] = cal.surface;
    return j.dump(2);
}

CalibrationResult calibration_from_json(const std::string &text) {
    CalibrationResult cal;
    try {
        const auto j = nlohmann::json::parse(text);
        cal.kind = j.at("kind").get<std::string>() == "cr" ? SwapKind::CouplerResonator : SwapKind::QubitCoupler;
        cal.qubit = j.at("qubit").get<std::string>();
        cal.coupler = j.at("coupler").get<std::string>();
        cal.transition = lru_target_from_string(j.at("transition").get<std::string>());
        cal.harmonic = j.at("harmonic").get<int>();
        cal.omega_bar_c = j.at("omega_bar_c").get<double>();
        cal.edge_ns = j.at("edge_ns").get<double>();
        cal.omega_p_opt = j.at("omega_p_opt").get<double>();
        cal.A_p_opt = j.at("A_p_opt").get<double>();
        cal.duration_opt = j.at("duration_opt").get<double>();
        cal.residual_population = j.at("residual_population").get<double>();
        cal.virtual_z = j.at("virtual_z").get<double>();
        cal.interior = j.at("interior").get<bool>();
        cal.axis_x = j.at("axis_x").get<std::vector<double>>();
        cal.axis_y = j.at("axis_y").get<std::vector<double>>();
        cal.surface = j.at("surface").get<std::vector<std::vector<double>>>();
    } catch (const nlohmann::json::exception &e) {
        throw ConfigError(std::string("calibration JSON: ") + e.what());
    }
    cal.validate();
    return cal;
}

void write_surface_csv(const CalibrationResult &cal, std::ostream &out) {
    out << (cal.kind == SwapKind::QubitCoupler ? "omega_p_ghz" : "amplitude_ghz") << ",duration_ns,population\n";
    out << std::setprecision(10);
    for (size_t i = 0; i < cal.axis_x.size(); ++i) {
        for (size_t j = 0; j < cal.axis_y.size(); ++j) {
            out << cal.axis_x[i] << ',' << cal.axis_y[j] << ',' << cal.surface[i][j] << '\n';
        }
    }
}

}  // namespace leakstack
