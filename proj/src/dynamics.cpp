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

#include "leakstack/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <numbers>
#include <ostream>
#include <set>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <boost/math/special_functions/bessel.hpp>
#include <boost/math/tools/minima.hpp>
#include <boost/numeric/odeint.hpp>

#include "leakstack/errors.hpp"

namespace leakstack {

namespace odeint = boost::numeric::odeint;

namespace {

constexpr double kTwoPi = 2 * std::numbers::pi;
constexpr double kGuardThreshold = 1e-3;

bool is_coupler(const DeviceGraph &d, const std::string &label) {
    return std::any_of(d.couplers.begin(), d.couplers.end(), [&](const CouplerParams &c) { return c.label == label; });
}
bool is_qubit(const DeviceGraph &d, const std::string &label) {
    return std::any_of(d.qubits.begin(), d.qubits.end(), [&](const TransmonParams &q) { return q.label == label; });
}
bool is_resonator(const DeviceGraph &d, const std::string &label) {
    return std::any_of(d.resonators.begin(), d.resonators.end(),
                       [&](const ResonatorParams &r) { return r.label == label; });
}

// Pieces of H that do not depend on time: per-mode number diagonals,
// anharmonic diagonal and the exchange matrix.
struct HamiltonianParts {
    std::vector<Eigen::VectorXd> number_diag;
    Eigen::VectorXd anharmonic_diag;
    Eigen::VectorXd total_number;
    std::vector<double> idle;
    SparseMatrix exchange;
};

HamiltonianParts hamiltonian_parts(const DeviceGraph &device, const TensorSpace &space,
                                   const HamiltonianOptions &options) {
    const size_t dim = space.dimension();
    const size_t n = space.num_modes();
    HamiltonianParts parts;
    parts.number_diag.assign(n, Eigen::VectorXd::Zero(static_cast<Eigen::Index>(dim)));
    parts.anharmonic_diag = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(dim));
    parts.total_number = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(dim));
    for (size_t m = 0; m < n; ++m) {
        const std::string &label = space.label(m);
        if (!device.has_element(label)) {
            throw InvariantError("unknown mode '" + label + "'");
        }
        parts.idle.push_back(idle_frequency(device, label));
        const double alpha = anharmonicity(device, label);
        for (size_t i = 0; i < dim; ++i) {
            const double level = space.level_of(i, m);
            parts.number_diag[m][static_cast<Eigen::Index>(i)] = level;
            parts.total_number[static_cast<Eigen::Index>(i)] += level;
            parts.anharmonic_diag[static_cast<Eigen::Index>(i)] += 0.5 * alpha * level * (level - 1);
        }
    }

    std::vector<Eigen::Triplet<Complex>> triplets;
    for (const auto &edge : device.edges) {
        if (!space.has_mode(edge.a) || !space.has_mode(edge.b)) continue;
        if (edge.kind == EdgeKind::QubitResonator && !options.include_dispersive) continue;
        if (!std::isfinite(edge.coupling)) {
            throw InvariantError("edge " + edge.a + "-" + edge.b + " has no coupling value");
        }
        const size_t ma = space.mode_index(edge.a);
        const size_t mb = space.mode_index(edge.b);
        const size_t sa = space.stride(ma), sb = space.stride(mb);
        for (size_t i = 0; i < dim; ++i) {
            const int la = space.level_of(i, ma);
            const int lb = space.level_of(i, mb);
            // a_a^dag a_b: moves one excitation from b to a.
            if (lb > 0 && la + 1 < space.mode_dim(ma)) {
                const size_t j = i + sa - sb;
                const double amp = edge.coupling * std::sqrt(double(la + 1) * lb);
                triplets.emplace_back(static_cast<int>(j), static_cast<int>(i), amp);
                triplets.emplace_back(static_cast<int>(i), static_cast<int>(j), amp);
            }
        }
    }
    parts.exchange.resize(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
    parts.exchange.setFromTriplets(triplets.begin(), triplets.end());
    return parts;
}

// Time-dependent diagonal in the rotating frame, angular units (rad/ns).
struct DiagonalDrive {
    Eigen::VectorXd static_diag;
    std::vector<std::pair<size_t, const FluxTrajectory *>> driven;
    const std::vector<Eigen::VectorXd> *number_diag = nullptr;

    Eigen::VectorXd at(double t) const {
        Eigen::VectorXd d = static_diag;
        for (const auto &[m, traj] : driven) d += ((*number_diag)[m]) * traj->frequency(t);
        return kTwoPi * d;
    }
};

struct Engine {
    TensorSpace space;
    HamiltonianParts parts;
    DiagonalDrive drive;
    SparseMatrix exchange_angular;
    std::vector<double> breakpoints;
    double frame = 0.0;

    Engine(const DeviceGraph &device, const TensorSpace &sp, const std::vector<FluxTrajectory> &trajectories,
           double t0, const EvolutionOptions &options)
        : space(sp), parts(hamiltonian_parts(device, sp, options.hamiltonian)) {
        const size_t n = space.num_modes();
        std::vector<const FluxTrajectory *> by_mode(n, nullptr);
        for (const auto &traj : trajectories) {
            if (!space.has_mode(traj.channel())) {
                throw InvariantError("trajectory for '" + traj.channel() + "' which is not in the subsystem");
            }
            by_mode[space.mode_index(traj.channel())] = &traj;
            double t = 0;
            for (const auto &seg : traj.segments()) {
                breakpoints.push_back(t);
                t += seg.duration;
            }
            breakpoints.push_back(t);
        }
        std::sort(breakpoints.begin(), breakpoints.end());
        breakpoints.erase(std::unique(breakpoints.begin(), breakpoints.end()), breakpoints.end());

        double mean = 0;
        for (size_t m = 0; m < n; ++m) {
            mean += by_mode[m] ? by_mode[m]->frequency(t0) : parts.idle[m];
        }
        frame = options.frame_frequency >= 0 ? options.frame_frequency : mean / static_cast<double>(n);

        drive.number_diag = &parts.number_diag;
        drive.static_diag = parts.anharmonic_diag - frame * parts.total_number;
        for (size_t m = 0; m < n; ++m) {
            if (by_mode[m]) {
                drive.driven.emplace_back(m, by_mode[m]);
            } else {
                drive.static_diag += parts.number_diag[m] * parts.idle[m];
            }
        }
        exchange_angular = parts.exchange * Complex(kTwoPi, 0.0);
    }
};

using State = std::vector<double>;

Eigen::Map<DenseMatrix> as_matrix(State &x, Eigen::Index rows, Eigen::Index cols) {
    return Eigen::Map<DenseMatrix>(reinterpret_cast<Complex *>(x.data()), rows, cols);
}
Eigen::Map<const DenseMatrix> as_matrix(const State &x, Eigen::Index rows, Eigen::Index cols) {
    return Eigen::Map<const DenseMatrix>(reinterpret_cast<const Complex *>(x.data()), rows, cols);
}

struct UnitarySystem {
    const Engine *engine;
    Eigen::Index rows, cols;

    void operator()(const State &x, State &dxdt, double t) const {
        auto psi = as_matrix(x, rows, cols);
        auto out = as_matrix(dxdt, rows, cols);
        const Eigen::VectorXd w = engine->drive.at(t);
        out.noalias() = engine->exchange_angular * psi;
        out += w.asDiagonal() * psi;
        out *= Complex(0.0, -1.0);
    }
};

struct LindbladSystem {
    const Engine *engine;
    Eigen::Index dim;
    Eigen::VectorXd gamma_half;
    std::vector<std::tuple<SparseMatrix, SparseMatrix, double>> lowering;
    std::vector<std::pair<Eigen::MatrixXd, double>> number;

    void operator()(const State &x, State &dxdt, double t) const {
        auto rho = as_matrix(x, dim, dim);
        auto out = as_matrix(dxdt, dim, dim);
        const Eigen::VectorXd w = engine->drive.at(t);
        DenseMatrix k = engine->exchange_angular * rho;
        k += w.asDiagonal() * rho;
        k *= Complex(0.0, -1.0);
        k -= gamma_half.asDiagonal() * rho;
        out = k + k.adjoint();
        for (const auto &[a, a_dag, rate] : lowering) {
            DenseMatrix tmp = a * rho;
            out += rate * (tmp * a_dag);
        }
        for (const auto &[nn, rate] : number) {
            out += rate * nn.cwiseProduct(rho);
        }
    }
};

template <typename System, typename Observer>
void integrate_piecewise(const System &system, State &x, const std::vector<double> &samples,
                         const std::vector<double> &breakpoints, const EvolutionOptions &options, Observer observe) {
    const double t0 = samples.front();
    const double t1 = samples.back();
    observe(x, 0);
    std::vector<double> bounds{t0};
    for (double b : breakpoints) {
        if (b > t0 + 1e-12 && b < t1 - 1e-12) bounds.push_back(b);
    }
    bounds.push_back(t1);

    size_t next_sample = 1;
    for (size_t p = 0; p + 1 < bounds.size(); ++p) {
        const double pa = bounds[p], pb = bounds[p + 1];
        std::vector<double> ts{pa};
        std::vector<long> sample_id{-1};
        while (next_sample < samples.size() && samples[next_sample] <= pb + 1e-12) {
            if (samples[next_sample] > pa + 1e-12) {
                ts.push_back(samples[next_sample]);
                sample_id.push_back(static_cast<long>(next_sample));
            } else {
                observe(x, next_sample);
            }
            ++next_sample;
        }
        if (ts.back() < pb - 1e-12) {
            ts.push_back(pb);
            sample_id.push_back(-1);
        }
        if (ts.size() < 2) continue;
        size_t cursor = 0;
        auto obs = [&](const State &s, double) {
            const long id = sample_id[cursor++];
            if (id >= 0) observe(s, static_cast<size_t>(id));
        };
        const double dt0 = std::min(0.01, pb - pa);
        using Stepper = odeint::runge_kutta_dopri5<State>;
        try {
            if (options.max_step > 0) {
                auto stepper = odeint::make_dense_output(options.abs_tol, options.rel_tol, options.max_step, Stepper());
                odeint::integrate_times(stepper, system, x, ts.begin(), ts.end(), dt0, obs);
            } else {
                auto stepper = odeint::make_dense_output(options.abs_tol, options.rel_tol, Stepper());
                odeint::integrate_times(stepper, system, x, ts.begin(), ts.end(), dt0, obs);
            }
        } catch (const odeint::step_adjustment_error &e) {
            throw NumericalError(std::string("integrator step-size underflow: ") + e.what());
        }
        for (double v : x) {
            if (!std::isfinite(v)) throw NumericalError("integrator produced a non-finite state");
        }
    }
}

std::vector<double> checked_times(const std::vector<double> &times) {
    if (times.size() < 2) {
        if (times.size() == 1) return {times[0], times[0]};
        throw InvariantError("evolution needs at least one sample time");
    }
    for (size_t i = 1; i < times.size(); ++i) {
        if (!(times[i] >= times[i - 1])) throw InvariantError("sample times must be non-decreasing");
    }
    return times;
}

void check_guard_levels(const DeviceGraph &device, EvolutionResult &result) {
    for (size_t m = 0; m < result.space.num_modes(); ++m) {
        const std::string &label = result.space.label(m);
        if (!is_coupler(device, label) || result.space.mode_dim(m) < 3) continue;
        double worst = 0;
        for (const auto &row : result.populations[m]) worst = std::max(worst, row.back());
        if (worst > kGuardThreshold) {
            std::ostringstream msg;
            msg << "coupler '" << label << "' guard level reached population " << worst;
            result.warnings.push_back(msg.str());
        }
    }
}

}  // namespace

TensorSpace make_subsystem(const DeviceGraph &device, const std::vector<std::pair<std::string, int>> &modes) {
    std::vector<int> dims;
    std::vector<std::string> labels;
    for (const auto &[label, dim] : modes) {
        if (!device.has_element(label)) throw InvariantError("unknown mode '" + label + "'");
        labels.push_back(label);
        dims.push_back(dim);
    }
    return make_space(dims, labels);
}

double idle_frequency(const DeviceGraph &device, const std::string &label) {
    if (is_qubit(device, label)) return device.qubit(label).omega_idle;
    if (is_coupler(device, label)) return device.coupler(label).omega_idle;
    if (is_resonator(device, label)) return device.resonator(label).omega_r;
    throw InvariantError("unknown mode '" + label + "'");
}

double anharmonicity(const DeviceGraph &device, const std::string &label) {
    if (is_qubit(device, label)) return device.qubit(label).alpha;
    if (is_coupler(device, label)) return device.coupler(label).alpha;
    if (is_resonator(device, label)) return 0.0;
    throw InvariantError("unknown mode '" + label + "'");
}

Operator build_hamiltonian(const DeviceGraph &device, const TensorSpace &space,
                           const std::map<std::string, double> &frequencies, const HamiltonianOptions &options) {
    HamiltonianParts parts = hamiltonian_parts(device, space, options);
    Eigen::VectorXd diag = parts.anharmonic_diag;
    for (size_t m = 0; m < space.num_modes(); ++m) {
        auto it = frequencies.find(space.label(m));
        const double f = it == frequencies.end() ? parts.idle[m] : it->second;
        if (!(f > 0)) throw InvariantError("mode '" + space.label(m) + "' needs a positive frequency");
        diag += parts.number_diag[m] * f;
    }
    for (const auto &[label, f] : frequencies) {
        if (!space.has_mode(label)) throw InvariantError("unknown mode '" + label + "'");
    }
    SparseMatrix h = parts.exchange;
    SparseMatrix d(h.rows(), h.cols());
    std::vector<Eigen::Triplet<Complex>> t;
    for (Eigen::Index i = 0; i < diag.size(); ++i) t.emplace_back(static_cast<int>(i), static_cast<int>(i), diag[i]);
    d.setFromTriplets(t.begin(), t.end());
    h += d;
    return {space, h};
}

Operator CollapseOp::op(const TensorSpace &space) const {
    const int dim = space.mode_dim(mode);
    return embed(space, mode, kind == CollapseKind::Lowering ? lowering_operator(dim) : number_operator(dim));
}

void LindbladModel::validate() const {
    for (const auto &c : collapse_ops) {
        if (!(c.rate >= 0) || !std::isfinite(c.rate)) {
            throw InvariantError("collapse operator '" + c.description + "' has invalid rate");
        }
    }
}

LindbladModel collapse_operators(const DeviceGraph &device, const TensorSpace &space) {
    LindbladModel model;
    for (size_t m = 0; m < space.num_modes(); ++m) {
        const std::string &label = space.label(m);
        if (is_qubit(device, label)) {
            const auto &q = device.qubit(label);
            if (std::isfinite(q.T1) && q.T1 > 0) {
                model.collapse_ops.push_back({CollapseKind::Lowering, m, 1e-3 / q.T1, "relaxation " + label});
            }
            const double gamma_phi = pure_dephasing_rate(q.T1, q.T2_star);  // 1/us
            if (gamma_phi > 0) {
                model.collapse_ops.push_back({CollapseKind::Number, m, 2e-3 * gamma_phi, "dephasing " + label});
            }
        } else if (is_coupler(device, label)) {
            const auto &c = device.coupler(label);
            if (std::isfinite(c.T1) && c.T1 > 0) {
                model.collapse_ops.push_back({CollapseKind::Lowering, m, 1e-3 / c.T1, "relaxation " + label});
            }
        } else if (is_resonator(device, label)) {
            const auto &r = device.resonator(label);
            model.collapse_ops.push_back({CollapseKind::Lowering, m, kTwoPi * r.kappa_r * 1e-3, "decay " + label});
        } else {
            throw InvariantError("unknown mode '" + label + "'");
        }
    }
    model.validate();
    return model;
}

void ParametricDrive::validate() const {
    if (m < 1) throw InvariantError("parametric drive: harmonic order must be >= 1");
    if (n_ex < 1) throw InvariantError("parametric drive: n_ex must be >= 1");
    if (!(omega_p > 0)) throw InvariantError("parametric drive: omega_p must be > 0");
}

double effective_parametric_coupling(const ParametricDrive &drive, double g_qc) {
    drive.validate();
    return std::sqrt(double(drive.n_ex)) * g_qc * boost::math::cyl_bessel_j(drive.m, drive.A_p / (drive.m * drive.omega_p));
}

double sideband_coupling(const ParametricDrive &drive, double g_qc) {
    drive.validate();
    return std::sqrt(double(drive.n_ex)) * g_qc * boost::math::cyl_bessel_j(drive.m, drive.A_p / drive.omega_p);
}

EvolutionResult evolve_unitary(const DeviceGraph &device, const TensorSpace &space,
                               const std::vector<FluxTrajectory> &trajectories, const StateVector &psi0,
                               const std::vector<double> &times_in, const EvolutionOptions &options) {
    if (!(psi0.space == space)) throw InvariantError("initial state lives on a different space");
    const auto times = checked_times(times_in);
    Engine engine(device, space, trajectories, times.front(), options);
    const auto dim = static_cast<Eigen::Index>(space.dimension());
    UnitarySystem system{&engine, dim, 1};

    EvolutionResult result;
    result.space = space;
    result.times = times;
    result.unitary = true;
    result.populations.assign(space.num_modes(), std::vector<std::vector<double>>(times.size()));

    State x(static_cast<size_t>(2 * dim));
    as_matrix(x, dim, 1) = psi0.amplitudes;
    // Reported states are projected back onto unit norm; the drift removed
    // (integrator error only) is kept in max_trace_error.
    const double norm0 = psi0.amplitudes.norm();
    auto observe = [&](const State &s, size_t k) {
        StateVector psi{space, as_matrix(s, dim, 1)};
        const double n = psi.amplitudes.norm();
        result.max_trace_error = std::max(result.max_trace_error, std::abs(n * n - norm0 * norm0));
        if (n > 0) psi.amplitudes *= norm0 / n;
        for (size_t m = 0; m < space.num_modes(); ++m) result.populations[m][k] = mode_populations(psi, m);
        if (options.store_states) result.psi_trajectory.push_back(psi);
    };
    integrate_piecewise(system, x, times, engine.breakpoints, options, observe);
    result.final_psi = StateVector{space, as_matrix(x, dim, 1)};
    if (const double n = result.final_psi.amplitudes.norm(); n > 0) result.final_psi.amplitudes *= norm0 / n;
    result.final_rho = DensityMatrix::from_state(result.final_psi);
    check_guard_levels(device, result);
    return result;
}

EvolutionResult evolve_lindblad(const DeviceGraph &device, const TensorSpace &space,
                                const std::vector<FluxTrajectory> &trajectories, const DensityMatrix &rho0,
                                const std::vector<double> &times_in, const EvolutionOptions &options,
                                const LindbladModel *model) {
    if (!(rho0.space == space)) throw InvariantError("initial state lives on a different space");
    if (!diagnose(rho0).valid()) throw InvariantError("initial density matrix is not valid");
    const auto times = checked_times(times_in);
    Engine engine(device, space, trajectories, times.front(), options);
    const LindbladModel owned = model ? LindbladModel{} : collapse_operators(device, space);
    const LindbladModel &lm = model ? *model : owned;
    lm.validate();

    const auto dim = static_cast<Eigen::Index>(space.dimension());
    LindbladSystem system{&engine, dim, Eigen::VectorXd::Zero(dim), {}, {}};
    for (const auto &c : lm.collapse_ops) {
        if (c.rate == 0) continue;
        const Eigen::VectorXd &n = engine.parts.number_diag.at(c.mode);
        if (c.kind == CollapseKind::Lowering) {
            system.gamma_half += 0.5 * c.rate * n;
            SparseMatrix a = c.op(space).matrix;
            SparseMatrix a_dag = a.adjoint();
            system.lowering.emplace_back(a, a_dag, c.rate);
        } else {
            system.gamma_half += 0.5 * c.rate * n.cwiseProduct(n);
            system.number.emplace_back(n * n.transpose(), c.rate);
        }
    }

    EvolutionResult result;
    result.space = space;
    result.times = times;
    result.populations.assign(space.num_modes(), std::vector<std::vector<double>>(times.size()));

    State x(static_cast<size_t>(2 * dim * dim));
    as_matrix(x, dim, dim) = rho0.matrix;
    auto observe = [&](const State &s, size_t k) {
        DensityMatrix rho{space, as_matrix(s, dim, dim)};
        for (size_t m = 0; m < space.num_modes(); ++m) result.populations[m][k] = mode_populations(rho, m);
        result.max_trace_error = std::max(result.max_trace_error, std::abs(rho.trace().real() - 1.0));
        if (options.store_states) result.rho_trajectory.push_back(rho);
    };
    integrate_piecewise(system, x, times, engine.breakpoints, options, observe);
    result.final_rho = DensityMatrix{space, as_matrix(x, dim, dim)};
    const auto diag = diagnose(result.final_rho);
    if (diag.trace_error > 1e-6 || diag.hermiticity_error > 1e-6 || diag.min_eigenvalue < -1e-6) {
        std::ostringstream msg;
        msg << "density matrix left the physical set (trace error " << diag.trace_error << ", hermiticity "
            << diag.hermiticity_error << ", min eigenvalue " << diag.min_eigenvalue << ")";
        throw NumericalError(msg.str());
    }
    check_guard_levels(device, result);
    return result;
}

DenseMatrix propagate_columns(const DeviceGraph &device, const TensorSpace &space,
                              const std::vector<FluxTrajectory> &trajectories, const std::vector<size_t> &columns,
                              double t0, double t1, const EvolutionOptions &options) {
    Engine engine(device, space, trajectories, t0, options);
    const auto dim = static_cast<Eigen::Index>(space.dimension());
    const auto cols = static_cast<Eigen::Index>(columns.size());
    UnitarySystem system{&engine, dim, cols};
    State x(static_cast<size_t>(2 * dim * cols), 0.0);
    auto m = as_matrix(x, dim, cols);
    for (Eigen::Index c = 0; c < cols; ++c) {
        if (columns[static_cast<size_t>(c)] >= space.dimension()) throw InvariantError("column out of range");
        m(static_cast<Eigen::Index>(columns[static_cast<size_t>(c)]), c) = 1.0;
    }
    integrate_piecewise(system, x, {t0, t1}, engine.breakpoints, options, [](const State &, size_t) {});
    return as_matrix(x, dim, cols);
}

std::vector<double> population(const EvolutionResult &result, const std::string &mode, int level) {
    if (!result.space.has_mode(mode)) throw InvariantError("unknown mode '" + mode + "'");
    const size_t m = result.space.mode_index(mode);
    if (level < 0 || level >= result.space.mode_dim(m)) {
        throw InvariantError("level " + std::to_string(level) + " outside mode '" + mode + "'");
    }
    std::vector<double> out;
    out.reserve(result.times.size());
    for (const auto &row : result.populations[m]) out.push_back(row[static_cast<size_t>(level)]);
    return out;
}

void write_populations_csv(const EvolutionResult &result, std::ostream &out) {
    out << "time_ns";
    for (size_t m = 0; m < result.space.num_modes(); ++m) {
        for (int l = 0; l < result.space.mode_dim(m); ++l) out << ',' << result.space.label(m) << '_' << l;
    }
    out << '\n' << std::setprecision(10);
    for (size_t k = 0; k < result.times.size(); ++k) {
        out << result.times[k];
        for (size_t m = 0; m < result.space.num_modes(); ++m) {
            for (double p : result.populations[m][k]) out << ',' << p;
        }
        out << '\n';
    }
}

DenseMatrix dressed_basis(const DeviceGraph &device, const TensorSpace &space,
                          const std::map<std::string, double> &frequencies, const HamiltonianOptions &options) {
    const DenseMatrix h = build_hamiltonian(device, space, frequencies, options).dense();
    Eigen::SelfAdjointEigenSolver<DenseMatrix> solver(h);
    if (solver.info() != Eigen::Success) throw NumericalError("Hamiltonian diagonalization failed");
    const DenseMatrix &v = solver.eigenvectors();
    const auto n = v.rows();
    std::vector<std::tuple<double, Eigen::Index, Eigen::Index>> pairs;
    pairs.reserve(static_cast<size_t>(n * n));
    for (Eigen::Index k = 0; k < n; ++k) {
        for (Eigen::Index e = 0; e < n; ++e) pairs.emplace_back(std::norm(v(k, e)), k, e);
    }
    std::sort(pairs.begin(), pairs.end(), [](const auto &a, const auto &b) {
        if (std::get<0>(a) != std::get<0>(b)) return std::get<0>(a) > std::get<0>(b);
        return std::make_pair(std::get<1>(a), std::get<2>(a)) < std::make_pair(std::get<1>(b), std::get<2>(b));
    });
    std::vector<bool> bare_used(static_cast<size_t>(n)), eig_used(static_cast<size_t>(n));
    DenseMatrix out(n, n);
    for (const auto &[w, k, e] : pairs) {
        if (bare_used[static_cast<size_t>(k)] || eig_used[static_cast<size_t>(e)]) continue;
        bare_used[static_cast<size_t>(k)] = eig_used[static_cast<size_t>(e)] = true;
        const Complex phase = v(k, e) / std::abs(v(k, e));
        out.col(k) = v.col(e) / phase;
    }
    return out;
}

std::vector<double> dressed_populations(const DensityMatrix &rho, const DenseMatrix &basis) {
    const DenseMatrix r = basis.adjoint() * rho.matrix * basis;
    std::vector<double> out(static_cast<size_t>(r.rows()));
    for (Eigen::Index i = 0; i < r.rows(); ++i) out[static_cast<size_t>(i)] = r(i, i).real();
    return out;
}

double floquet_gap(const DeviceGraph &device, const TensorSpace &space, const std::string &coupler,
                   double omega_bar_c, double A_p, double omega_p, size_t a, size_t b,
                   const EvolutionOptions &options) {
    if (!(omega_p > 0)) throw InvariantError("floquet_gap: omega_p must be > 0");
    auto excitations = [&](size_t i) {
        int n = 0;
        for (size_t m = 0; m < space.num_modes(); ++m) n += space.level_of(i, m);
        return n;
    };
    if (excitations(a) != excitations(b)) {
        throw InvariantError("floquet_gap: states must share the excitation number");
    }
    std::vector<size_t> cols;
    for (size_t i = 0; i < space.dimension(); ++i) {
        if (excitations(i) == excitations(a)) cols.push_back(i);
    }
    const double period = 1.0 / omega_p;
    FluxTrajectory traj(coupler, omega_bar_c);
    traj.parametric(omega_bar_c, A_p, omega_p, 0.0, period);
    const DenseMatrix full = propagate_columns(device, space, {traj}, cols, 0.0, period, options);
    const auto k = static_cast<Eigen::Index>(cols.size());
    DenseMatrix u(k, k);
    for (Eigen::Index r = 0; r < k; ++r) u.row(r) = full.row(static_cast<Eigen::Index>(cols[static_cast<size_t>(r)]));
    Eigen::ComplexEigenSolver<DenseMatrix> solver(u);
    if (solver.info() != Eigen::Success) throw NumericalError("Floquet diagonalization failed");
    const auto ia = static_cast<Eigen::Index>(std::find(cols.begin(), cols.end(), a) - cols.begin());
    const auto ib = static_cast<Eigen::Index>(std::find(cols.begin(), cols.end(), b) - cols.begin());
    std::vector<std::pair<double, Eigen::Index>> weight;
    for (Eigen::Index e = 0; e < k; ++e) {
        const auto &v = solver.eigenvectors().col(e);
        weight.emplace_back(std::norm(v(ia)) + std::norm(v(ib)), e);
    }
    std::sort(weight.begin(), weight.end(), [](const auto &x, const auto &y) { return x.first > y.first; });
    auto quasi = [&](Eigen::Index e) { return -std::arg(solver.eigenvalues()(e)) / (kTwoPi * period); };
    double gap = std::abs(quasi(weight[0].second) - quasi(weight[1].second));
    gap = std::fmod(gap, omega_p);
    return std::min(gap, omega_p - gap);
}

FloquetResonance floquet_resonance(const DeviceGraph &device, const TensorSpace &space, const std::string &coupler,
                                   double omega_bar_c, double A_p, double lo, double hi, size_t a, size_t b,
                                   const EvolutionOptions &options) {
    if (!(lo > 0) || !(hi > lo)) throw InvariantError("floquet_resonance: invalid search interval");
    auto f = [&](double wp) { return floquet_gap(device, space, coupler, omega_bar_c, A_p, wp, a, b, options); };
    boost::uintmax_t iterations = 200;
    const auto best = boost::math::tools::brent_find_minima(f, lo, hi, 40, iterations);
    return {best.first, best.second};
}

}  // namespace leakstack
