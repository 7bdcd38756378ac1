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


#include "leakstack/rb.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include <Eigen/Dense>
#include <boost/math/tools/minima.hpp>

#include "leakstack/clifford.hpp"
#include "leakstack/errors.hpp"
#include "leakstack/ini.hpp"
#include "leakstack/parallel.hpp"

namespace leakstack {

void RbConfig::validate() const {
    if (m_values.empty()) throw InvariantError("RB needs at least one sequence length");
    for (size_t i = 0; i < m_values.size(); ++i) {
        if (m_values[i] < 0) throw InvariantError("RB sequence lengths must be >= 0");
        if (i > 0 && m_values[i] <= m_values[i - 1]) throw InvariantError("RB sequence lengths must increase");
    }
    if (sequences < 1) throw InvariantError("RB needs at least one sequence per length");
}

RbConfig parse_rb_config(const std::string &text, const std::string &source_name) {
    const auto tree = ini::parse(text, source_name);
    RbConfig c;
    auto it = tree.find("rb");
    if (it != tree.not_found()) {
        ini::Section s("rb", it->second);
        if (s.has("m_values")) {
            c.m_values.clear();
            for (double v : s.list("m_values")) {
                if (v != std::floor(v)) throw ConfigError("section [rb]: m_values must be integers");
                c.m_values.push_back(static_cast<int>(v));
            }
        }
        c.sequences = static_cast<int>(s.num_or("sequences", c.sequences));
        if (s.has("interleaved")) c.interleaved = interleaved_op_from_string(s.str("interleaved"));
    }
    c.validate();
    return c;
}

namespace {

struct LinearFit {
    double A = 0.0, B = 0.0, rss = std::numeric_limits<double>::infinity();
};

LinearFit linear_part(const std::vector<double> &m, const std::vector<double> &F, double p) {
    Eigen::MatrixXd X(static_cast<Eigen::Index>(m.size()), 2);
    Eigen::VectorXd y(static_cast<Eigen::Index>(m.size()));
    for (size_t i = 0; i < m.size(); ++i) {
        X(static_cast<Eigen::Index>(i), 0) = std::pow(p, m[i]);
        X(static_cast<Eigen::Index>(i), 1) = 1.0;
        y[static_cast<Eigen::Index>(i)] = F[i];
    }
    const Eigen::Vector2d c = X.completeOrthogonalDecomposition().solve(y);
    LinearFit f;
    f.A = c[0];
    f.B = c[1];
    f.rss = (X * c - y).squaredNorm();
    return f;
}

double rss_of(const std::vector<double> &m, const std::vector<double> &F, double A, double B, double p) {
    double s = 0;
    for (size_t i = 0; i < m.size(); ++i) {
        const double r = A * std::pow(p, m[i]) + B - F[i];
        s += r * r;
    }
    return s;
}

}  // namespace

RbFit fit_rb(const std::vector<double> &m, const std::vector<double> &F) {
    if (m.size() != F.size()) throw InvariantError("fit_rb: m and F differ in length");
    if (std::set<double>(m.begin(), m.end()).size() < 3) throw InvariantError("fit_rb needs >= 3 distinct m values");
    RbFit fit;
    const auto [lo_it, hi_it] = std::minmax_element(F.begin(), F.end());
    if (*hi_it - *lo_it < 1e-12) {
        fit.A = 0.0;
        fit.B = F.front();
        fit.p = 1.0;
        fit.r = 0.0;
        return fit;
    }

    // Profile over p: coarse scan in log(1 - p), then Brent.
    auto profile = [&](double p) { return linear_part(m, F, p).rss; };
    const int n_scan = 240;
    double best_q = 1.0, best = std::numeric_limits<double>::infinity();
    std::vector<double> qs;
    for (int k = 0; k <= n_scan; ++k) qs.push_back(std::pow(10.0, -7.0 + 7.0 * k / n_scan));
    size_t best_k = 0;
    for (size_t k = 0; k < qs.size(); ++k) {
        const double v = profile(1.0 - qs[k]);
        if (v < best) {
            best = v;
            best_q = qs[k];
            best_k = k;
        }
    }
    const double q_lo = best_k > 0 ? qs[best_k - 1] : 0.0;
    const double q_hi = best_k + 1 < qs.size() ? qs[best_k + 1] : 1.0;
    boost::uintmax_t iters = 200;
    const auto res = boost::math::tools::brent_find_minima([&](double q) { return profile(1.0 - q); }, q_lo, q_hi,
                                                           std::numeric_limits<double>::digits, iters);
    if (res.second <= best) best_q = res.first;
    LinearFit lin = linear_part(m, F, 1.0 - best_q);
    double A = lin.A, B = lin.B, p = 1.0 - best_q;
    double rss = rss_of(m, F, A, B, p);

    // Gauss-Newton polish on (A, B, p).
    fit.converged = false;
    for (int it = 0; it < 50; ++it) {
        Eigen::MatrixXd J(static_cast<Eigen::Index>(m.size()), 3);
        Eigen::VectorXd r(static_cast<Eigen::Index>(m.size()));
        for (size_t i = 0; i < m.size(); ++i) {
            const auto k = static_cast<Eigen::Index>(i);
            const double pm = std::pow(p, m[i]);
            J(k, 0) = pm;
            J(k, 1) = 1.0;
            J(k, 2) = m[i] == 0 ? 0.0 : A * m[i] * std::pow(p, m[i] - 1);
            r[k] = A * pm + B - F[i];
        }
        const Eigen::Vector3d step = J.completeOrthogonalDecomposition().solve(-r);
        const double pn = std::min(1.0, p + step[2]);
        const double An = A + step[0], Bn = B + step[1];
        const double rn = rss_of(m, F, An, Bn, pn);
        if (!(rn <= rss)) {
            fit.converged = true;
            break;
        }
        const bool small = std::abs(step[2]) < 1e-15 && std::abs(step[0]) < 1e-14 && std::abs(step[1]) < 1e-14;
        A = An;
        B = Bn;
        p = pn;
        rss = rn;
        if (small) {
            fit.converged = true;
            break;
        }
    }
    if (!fit.converged && rss <= best) fit.converged = true;
    if (!(p > 0.0 && p <= 1.0)) throw NumericalError("fit_rb: decay parameter outside (0, 1]");
    fit.A = A;
    fit.B = B;
    fit.p = p;
    fit.r = (1.0 - p) / 2.0;
    fit.rss = rss;
    return fit;
}

double interleaved_error(double r_ref, double r_int) {
    return r_int - r_ref;
}

namespace {

using Qutrit = Eigen::Matrix3cd;

void apply_unitary(Qutrit &rho, const Unitary2 &u) {
    Qutrit U = Qutrit::Identity();
    U.topLeftCorner<2, 2>() = u;
    rho = U * rho * U.adjoint();
}

// Depolarizing channel on the g/e block with average gate error r.
void depolarize(Qutrit &rho, double r) {
    if (r <= 0) return;
    const double lambda = std::min(1.0, 2.0 * r);
    const std::complex<double> tr = rho(0, 0) + rho(1, 1);
    Eigen::Matrix2cd block = rho.topLeftCorner<2, 2>();
    block = (1.0 - lambda) * block + lambda * 0.5 * tr * Eigen::Matrix2cd::Identity();
    rho.topLeftCorner<2, 2>() = block;
}

// |e> -> |f> with probability L.
void leak(Qutrit &rho, double L) {
    if (L <= 0) return;
    const double keep = std::sqrt(1.0 - L);
    const std::complex<double> pe = rho(1, 1);
    rho(2, 2) += L * pe;
    rho(1, 1) *= 1.0 - L;
    rho(0, 1) *= keep;
    rho(1, 0) *= keep;
    rho(1, 2) *= keep;
    rho(2, 1) *= keep;
}

// |f> -> |e> with probability eta; coherences with |f> are lost.
void remove_leakage(Qutrit &rho, double eta) {
    const std::complex<double> pf = rho(2, 2);
    rho(1, 1) += eta * pf;
    rho(2, 2) *= 1.0 - eta;
    const double keep = std::sqrt(1.0 - eta);
    for (int k = 0; k < 2; ++k) {
        rho(k, 2) *= keep;
        rho(2, k) *= keep;
    }
}

bool applies_lru(InterleavedOp op, const QubitChannel &q) {
    return (op == InterleavedOp::DataLru && !q.ancilla) || (op == InterleavedOp::AncillaLru && q.ancilla);
}

double sequence_fidelity(const QubitChannel &q, const std::vector<size_t> &seq, InterleavedOp op) {
    const auto &group = CliffordGroup::instance();
    Qutrit rho = Qutrit::Zero();
    rho(0, 0) = 1.0;
    const double r_op = op == InterleavedOp::None ? 0.0 : [&] {
        auto it = q.interleaved_error.find(op);
        return it == q.interleaved_error.end() ? 0.0 : it->second;
    }();
    auto step = [&](size_t c, bool interleave) {
        apply_unitary(rho, group.unitary(c));
        depolarize(rho, q.clifford_error);
        leak(rho, q.clifford_leakage);
        if (interleave) {
            depolarize(rho, r_op);
            if (applies_lru(op, q)) remove_leakage(rho, q.lru_efficiency);
        }
    };
    for (size_t c : seq) step(c, op != InterleavedOp::None);
    step(recovery_clifford(seq), false);
    return std::clamp(rho(0, 0).real(), 0.0, 1.0);
}

}  // namespace

RbResult run_rb(const LeakageChannelModel &channel, const RbConfig &config, int workers) {
    channel.validate();
    config.validate();
    const auto &group = CliffordGroup::instance();
    RbResult out;
    out.config = config;
    const size_t n_m = config.m_values.size();
    const auto n_seq = static_cast<size_t>(config.sequences);

    // Sequences depend only on (seed, m index, sequence index), so every qubit
    // and both arms see the same draws.
    std::vector<std::vector<size_t>> sequences(n_m * n_seq);
    for (size_t i = 0; i < n_m; ++i) {
        for (size_t s = 0; s < n_seq; ++s) {
            Rng rng = make_stream(config.seed, i * n_seq + s);
            auto &seq = sequences[i * n_seq + s];
            seq.resize(static_cast<size_t>(config.m_values[i]));
            for (auto &c : seq) c = uniform_index(rng, group.size());
        }
    }
    std::vector<double> m(config.m_values.begin(), config.m_values.end());
    for (const auto &[name, q] : channel.qubits) {
        RbQubitResult res;
        res.qubit = name;
        const bool interleaved = config.interleaved != InterleavedOp::None;
        std::vector<double> f_ref(sequences.size()), f_int(interleaved ? sequences.size() : 0);
        parallel_for(sequences.size(), workers, [&](size_t k) {
            f_ref[k] = sequence_fidelity(q, sequences[k], InterleavedOp::None);
            if (interleaved) f_int[k] = sequence_fidelity(q, sequences[k], config.interleaved);
        });
        auto average = [&](const std::vector<double> &f) {
            std::vector<double> avg(n_m, 0.0);
            for (size_t i = 0; i < n_m; ++i) {
                for (size_t s = 0; s < n_seq; ++s) avg[i] += f[i * n_seq + s];
                avg[i] /= static_cast<double>(n_seq);
            }
            return avg;
        };
        res.F_ref = average(f_ref);
        res.ref = fit_rb(m, res.F_ref);
        if (interleaved) {
            res.F_int = average(f_int);
            res.interleaved = fit_rb(m, res.F_int);
            res.r_op = interleaved_error(res.ref.r, res.interleaved->r);
        }
        out.qubits.push_back(std::move(res));
    }
    return out;
}

}  // namespace leakstack
