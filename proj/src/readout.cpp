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

#include "leakstack/readout.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <iomanip>
#include <istream>
#include <numbers>
#include <numeric>
#include <ostream>
#include <sstream>

#include <boost/math/distributions/normal.hpp>

#include "json.hpp"
#include "leakstack/errors.hpp"
#include "leakstack/parallel.hpp"

namespace leakstack {

namespace {

double dist2(const IQPoint &a, const IQPoint &b) {
    const double di = a.i - b.i, dq = a.q - b.q;
    return di * di + dq * dq;
}

double log_density(const GaussianComponent &c, const IQPoint &p) {
    return -dist2(p, c.centroid) / (2 * c.sigma * c.sigma) - std::log(2 * std::numbers::pi * c.sigma * c.sigma);
}

}  // namespace

const GaussianComponent &GmmModel::state(int index) const {
    for (const auto &c : components) {
        if (c.state_index == index) return c;
    }
    throw InvariantError("GMM has no component for state " + std::to_string(index));
}

void GmmModel::validate() const {
    std::vector<bool> seen(components.size(), false);
    for (const auto &c : components) {
        if (c.state_index < 0 || static_cast<size_t>(c.state_index) >= components.size() || seen[c.state_index]) {
            throw InvariantError("GMM state indices must be unique and contiguous from 0");
        }
        seen[c.state_index] = true;
        if (!(c.sigma >= 0) || !std::isfinite(c.centroid.i) || !std::isfinite(c.centroid.q)) {
            throw InvariantError("GMM component " + std::to_string(c.state_index) + " is invalid");
        }
    }
}

ShotBatch simulate_iq(const GmmModel &truth, const std::vector<double> &dist, size_t n_shots, uint64_t seed) {
    truth.validate();
    if (dist.size() != truth.size()) throw InvariantError("state distribution length must match the model");
    double total = 0;
    for (double p : dist) {
        if (!(p >= 0)) throw InvariantError("state distribution has a negative entry");
        total += p;
    }
    if (std::abs(total - 1.0) > 1e-9) throw InvariantError("state distribution must sum to 1");
    if (n_shots == 0) throw InvariantError("n_shots must be > 0");

    ShotBatch batch;
    batch.seed = seed;
    batch.points.resize(n_shots);
    batch.true_labels.resize(n_shots);
    for (size_t s = 0; s < n_shots; ++s) {
        Rng rng = make_stream(seed, s);
        const double u = uniform01(rng);
        int label = static_cast<int>(dist.size()) - 1;
        double acc = 0;
        for (size_t k = 0; k < dist.size(); ++k) {
            acc += dist[k];
            if (u < acc && dist[k] > 0) {
                label = static_cast<int>(k);
                break;
            }
        }
        while (label > 0 && dist[static_cast<size_t>(label)] == 0) --label;
        const auto &c = truth.state(label);
        batch.true_labels[s] = label;
        batch.points[s] = {c.centroid.i + c.sigma * normal01(rng), c.centroid.q + c.sigma * normal01(rng)};
    }
    return batch;
}

GmmFit fit_gmm(const ShotBatch &shots, int n_components, uint64_t seed, const std::vector<ShotBatch> &references,
               const GmmFitOptions &options) {
    const auto &x = shots.points;
    const size_t n = x.size();
    const auto k = static_cast<size_t>(n_components);
    if (n_components < 1) throw InvariantError("fit_gmm: n_components must be >= 1");
    if (n < 10 * k) throw InvariantError("fit_gmm: need at least 10 shots per component");

    IQPoint mean{0, 0};
    for (const auto &p : x) {
        mean.i += p.i / n;
        mean.q += p.q / n;
    }
    double spread = 0;
    for (const auto &p : x) spread += dist2(p, mean) / n;
    spread = std::sqrt(spread / 2);
    const double sigma_floor = std::max(1e-6 * spread, 1e-300);

    // k-means++ seeding.
    Rng rng = make_stream(seed, 0);
    std::vector<IQPoint> centers{x[uniform_index(rng, n)]};
    std::vector<double> d2(n);
    while (centers.size() < k) {
        double total = 0;
        for (size_t i = 0; i < n; ++i) {
            double best = std::numeric_limits<double>::infinity();
            for (const auto &c : centers) best = std::min(best, dist2(x[i], c));
            d2[i] = best;
            total += best;
        }
        if (total <= 0) {
            centers.push_back(x[uniform_index(rng, n)]);
            continue;
        }
        double target = uniform01(rng) * total;
        size_t pick = n - 1;
        for (size_t i = 0; i < n; ++i) {
            target -= d2[i];
            if (target < 0) {
                pick = i;
                break;
            }
        }
        centers.push_back(x[pick]);
    }

    GmmFit fit;
    fit.model.components.resize(k);
    fit.weights.assign(k, 1.0 / k);
    for (size_t c = 0; c < k; ++c) {
        fit.model.components[c] = {static_cast<int>(c), centers[c], std::max(spread / std::sqrt(double(k)), sigma_floor)};
    }

    std::vector<double> resp(n * k);
    double prev = -std::numeric_limits<double>::infinity();
    for (int it = 0; it < options.max_iterations; ++it) {
        // E step with log-sum-exp.
        double ll = 0;
        for (size_t i = 0; i < n; ++i) {
            double mx = -std::numeric_limits<double>::infinity();
            for (size_t c = 0; c < k; ++c) {
                resp[i * k + c] = std::log(fit.weights[c]) + log_density(fit.model.components[c], x[i]);
                mx = std::max(mx, resp[i * k + c]);
            }
            double s = 0;
            for (size_t c = 0; c < k; ++c) s += std::exp(resp[i * k + c] - mx);
            const double lse = mx + std::log(s);
            ll += lse;
            for (size_t c = 0; c < k; ++c) resp[i * k + c] = std::exp(resp[i * k + c] - lse);
        }
        fit.log_likelihood.push_back(ll);
        fit.iterations = it + 1;
        if (it > 0 && std::abs(ll - prev) <= options.tolerance * std::max(1.0, std::abs(ll))) {
            fit.converged = true;
            break;
        }
        prev = ll;
        // M step.
        for (size_t c = 0; c < k; ++c) {
            double nk = 0, si = 0, sq = 0;
            for (size_t i = 0; i < n; ++i) {
                const double r = resp[i * k + c];
                nk += r;
                si += r * x[i].i;
                sq += r * x[i].q;
            }
            auto &comp = fit.model.components[c];
            if (nk <= 0) {
                comp.sigma = sigma_floor;
                fit.weights[c] = 0;
                continue;
            }
            comp.centroid = {si / nk, sq / nk};
            double ss = 0;
            for (size_t i = 0; i < n; ++i) ss += resp[i * k + c] * dist2(x[i], comp.centroid);
            comp.sigma = std::max(std::sqrt(ss / (2 * nk)), sigma_floor);
            fit.weights[c] = nk / n;
        }
    }

    if (!references.empty()) {
        if (references.size() != k) throw InvariantError("fit_gmm: need one reference batch per state");
        // score[c][s]: mean responsibility of component c over batch s.
        std::vector<std::vector<double>> score(k, std::vector<double>(k, 0.0));
        for (size_t s = 0; s < k; ++s) {
            for (const auto &p : references[s].points) {
                std::vector<double> lr(k);
                double mx = -std::numeric_limits<double>::infinity();
                for (size_t c = 0; c < k; ++c) {
                    lr[c] = std::log(std::max(fit.weights[c], 1e-300)) + log_density(fit.model.components[c], p);
                    mx = std::max(mx, lr[c]);
                }
                double tot = 0;
                for (double v : lr) tot += std::exp(v - mx);
                for (size_t c = 0; c < k; ++c) score[c][s] += std::exp(lr[c] - mx) / tot;
            }
            for (size_t c = 0; c < k; ++c) score[c][s] /= std::max<size_t>(1, references[s].points.size());
        }
        std::vector<size_t> perm(k), best_perm;
        std::iota(perm.begin(), perm.end(), 0);
        double best = -1;
        do {
            double total = 0;
            for (size_t c = 0; c < k; ++c) total += score[c][perm[c]];
            if (total > best) {
                best = total;
                best_perm = perm;
            }
        } while (std::next_permutation(perm.begin(), perm.end()));
        GmmModel relabeled;
        std::vector<double> weights(k);
        relabeled.components.resize(k);
        for (size_t c = 0; c < k; ++c) {
            auto comp = fit.model.components[c];
            comp.state_index = static_cast<int>(best_perm[c]);
            relabeled.components[best_perm[c]] = comp;
            weights[best_perm[c]] = fit.weights[c];
        }
        fit.model = relabeled;
        fit.weights = weights;
    }
    return fit;
}

double component_density(const GaussianComponent &c, const IQPoint &p) {
    if (c.sigma <= 0) return dist2(p, c.centroid) == 0 ? std::numeric_limits<double>::infinity() : 0.0;
    return std::exp(log_density(c, p));
}

double outlier_threshold(const GmmModel &model, double k) {
    if (!(k > 0)) throw InvariantError("outlier threshold k must be > 0");
    if (std::isinf(k)) return 0.0;
    const double sg = model.state(0).sigma;
    return std::exp(-0.5 * k * k) / (2 * std::numbers::pi * sg * sg);
}

int assign(const GmmModel &model, const IQPoint &point, double k) {
    const double threshold = outlier_threshold(model, k);
    int best_state = kOutlier;
    double best = -1;
    for (int s = 0; s < static_cast<int>(model.size()); ++s) {
        const double p = component_density(model.state(s), point);
        if (p > best) {
            best = p;
            best_state = s;
        }
    }
    if (best < threshold) return kOutlier;
    return best_state;
}

AssignmentReport state_probabilities(const GmmModel &model, const ShotBatch &batch, double k) {
    model.validate();
    if (batch.points.empty()) throw InvariantError("state_probabilities: empty batch");
    const size_t n = model.size();
    AssignmentReport report;
    report.shots = batch.points.size();
    std::vector<size_t> counts(n, 0);
    std::vector<size_t> label_total(n, 0), label_correct(n, 0);
    const bool labeled = batch.true_labels.size() == batch.points.size();
    for (size_t s = 0; s < batch.points.size(); ++s) {
        const int a = assign(model, batch.points[s], k);
        if (a == kOutlier) {
            ++report.outliers;
            continue;
        }
        ++counts[static_cast<size_t>(a)];
        if (labeled) {
            const int t = batch.true_labels[s];
            if (t < 0 || static_cast<size_t>(t) >= n) throw InvariantError("batch label outside the model");
            ++label_total[static_cast<size_t>(t)];
            if (t == a) ++label_correct[static_cast<size_t>(t)];
        }
    }
    const size_t kept = report.shots - report.outliers;
    if (kept == 0) throw NumericalError("state_probabilities: every shot is an outlier");
    report.P.resize(n);
    for (size_t i = 0; i < n; ++i) report.P[i] = double(counts[i]) / double(kept);
    report.outlier_fraction = double(report.outliers) / double(report.shots);
    if (labeled) {
        double acc = 0;
        int present = 0;
        for (size_t i = 0; i < n; ++i) {
            if (label_total[i] == 0) continue;
            acc += double(label_correct[i]) / double(label_total[i]);
            ++present;
        }
        if (present > 0) report.epsilon_n = 1.0 - acc / present;
    }
    return report;
}

AssignmentErrorReport assignment_error(const GmmModel &model, const std::vector<ShotBatch> &prepared, double k) {
    if (prepared.size() != model.size()) {
        throw InvariantError("assignment_error: need one prepared batch per state");
    }
    AssignmentErrorReport out;
    double acc = 0;
    for (size_t i = 0; i < prepared.size(); ++i) {
        const auto rep = state_probabilities(model, prepared[i], k);
        out.P_ii.push_back(rep.P[i]);
        acc += rep.P[i];
    }
    out.epsilon_n = 1.0 - acc / double(prepared.size());
    return out;
}

void ConfusionMatrix::validate() const {
    for (const auto &row : m) {
        if (row.size() != m.size()) throw InvariantError("confusion matrix must be square");
        double s = 0;
        for (double v : row) {
            if (!(v >= 0 && v <= 1)) throw InvariantError("confusion matrix entries must lie in [0, 1]");
            s += v;
        }
        if (std::abs(s - 1.0) > 1e-9) throw InvariantError("confusion matrix rows must sum to 1");
    }
}

std::vector<double> ConfusionMatrix::apply(const std::vector<double> &populations) const {
    if (populations.size() > m.size()) throw InvariantError("more populations than confusion states");
    std::vector<double> out(m.size(), 0.0);
    for (size_t i = 0; i < populations.size(); ++i) {
        for (size_t j = 0; j < m.size(); ++j) out[j] += populations[i] * m[i][j];
    }
    return out;
}

ConfusionMatrix ConfusionMatrix::identity(size_t n) {
    ConfusionMatrix c;
    c.m.assign(n, std::vector<double>(n, 0.0));
    for (size_t i = 0; i < n; ++i) c.m[i][i] = 1.0;
    return c;
}

ConfusionMatrix confusion_from_model(const GmmModel &model, double k, size_t shots_per_state, uint64_t seed) {
    const size_t n = model.size();
    ConfusionMatrix c;
    for (size_t s = 0; s < n; ++s) {
        std::vector<double> dist(n, 0.0);
        dist[s] = 1.0;
        const auto batch = simulate_iq(model, dist, shots_per_state, stream_seed(seed, s));
        c.m.push_back(state_probabilities(model, batch, k).P);
    }
    return c;
}

double separation_for_error(double epsilon2) {
    if (!(epsilon2 > 0 && epsilon2 < 0.5)) throw InvariantError("two-state error must lie in (0, 0.5)");
    const boost::math::normal_distribution<double> unit;
    return -2.0 * boost::math::quantile(unit, epsilon2);
}

double dispersive_pull(const TransmonParams &q, const ResonatorParams &r, double g_qr, int level) {
    auto term = [&](int j) {
        // Transition j -> j+1 coupled with g sqrt(j+1).
        const double delta = q.omega_idle + j * q.alpha - r.omega_r;
        return g_qr * g_qr * (j + 1) / delta;
    };
    double pull = -term(level);
    if (level > 0) pull += term(level - 1);
    return pull * 1e3;
}

GmmModel dispersive_readout_model(const TransmonParams &q, const ResonatorParams &r, double g_qr, int n_states,
                                  double separation_ge, double integration_us, double reference_us) {
    if (n_states < 2) throw InvariantError("readout model needs at least two states");
    if (!(integration_us > 0) || !(reference_us > 0)) throw InvariantError("integration time must be > 0");
    const double chi0 = dispersive_pull(q, r, g_qr, 0);
    const double chi1 = dispersive_pull(q, r, g_qr, 1);
    const double probe = 0.5 * (chi0 + chi1);
    const double half_kappa = 0.5 * r.kappa_r;
    std::vector<std::complex<double>> response;
    for (int j = 0; j < n_states; ++j) {
        const double detuning = probe - dispersive_pull(q, r, g_qr, j);
        response.push_back(half_kappa / std::complex<double>(half_kappa, -detuning));
    }
    const double scale =
        separation_ge * std::sqrt(integration_us / reference_us) / std::abs(response[1] - response[0]);
    GmmModel model;
    for (int j = 0; j < n_states; ++j) {
        const auto c = scale * (response[static_cast<size_t>(j)] - response[0]);
        model.components.push_back({j, {c.real(), c.imag()}, 1.0});
    }
    return model;
}

void write_shots_csv(const ShotBatch &batch, std::ostream &out) {
    const bool labeled = batch.true_labels.size() == batch.points.size();
    out << "shot_index,i,q" << (labeled ? ",true_label" : "") << '\n' << std::setprecision(17);
    for (size_t s = 0; s < batch.points.size(); ++s) {
        out << s << ',' << batch.points[s].i << ',' << batch.points[s].q;
        if (labeled) out << ',' << batch.true_labels[s];
        out << '\n';
    }
}

ShotBatch read_shots_csv(std::istream &in) {
    std::string line;
    if (!std::getline(in, line)) throw ConfigError("shot CSV is empty");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    bool labeled;
    if (line == "shot_index,i,q") {
        labeled = false;
    } else if (line == "shot_index,i,q,true_label") {
        labeled = true;
    } else {
        throw ConfigError("shot CSV: unexpected header '" + line + "'");
    }
    ShotBatch batch;
    size_t row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (line.empty() || line == "\r") continue;
        std::stringstream ss(line);
        std::string idx, i, q, lab;
        if (!std::getline(ss, idx, ',') || !std::getline(ss, i, ',') || !std::getline(ss, q, ',')) {
            throw ConfigError("shot CSV line " + std::to_string(row) + ": expected at least 3 columns");
        }
        try {
            batch.points.push_back({std::stod(i), std::stod(q)});
            if (labeled) {
                if (!std::getline(ss, lab, ',')) throw ConfigError("missing true_label");
                batch.true_labels.push_back(std::stoi(lab));
            }
        } catch (const std::logic_error &) {
            throw ConfigError("shot CSV line " + std::to_string(row) + ": malformed number");
        }
    }
    return batch;
}

std::string gmm_to_json(const GmmModel &model) {
    nlohmann::ordered_json j;
    j["schema_version"] = 1;
    j["components"] = nlohmann::ordered_json::array();
    for (int s = 0; s < static_cast<int>(model.size()); ++s) {
        const auto &c = model.state(s);
        j["components"].push_back({{"state_index", c.state_index},
                                   {"centroid", {c.centroid.i, c.centroid.q}},
                                   {"sigma", c.sigma}});
    }
    return j.dump(2);
}

GmmModel gmm_from_json(const std::string &text) {
    GmmModel model;
    try {
        const auto j = nlohmann::json::parse(text);
        for (const auto &c : j.at("components")) {
            model.components.push_back({c.at("state_index").get<int>(),
                                        {c.at("centroid").at(0).get<double>(), c.at("centroid").at(1).get<double>()},
                                        c.at("sigma").get<double>()});
        }
    } catch (const nlohmann::json::exception &e) {
        throw ConfigError(std::string("GMM JSON: ") + e.what());
    }
    model.validate();
    return model;
}

}  // namespace leakstack
