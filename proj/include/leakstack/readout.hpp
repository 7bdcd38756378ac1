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

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "leakstack/device.hpp"

namespace leakstack {

struct IQPoint {
    double i = 0.0;
    double q = 0.0;
};

struct GaussianComponent {
    int state_index = 0;
    IQPoint centroid;
    double sigma = 1.0;
};

/// Isotropic per-state Gaussians, state indices 0..n-1.
struct GmmModel {
    std::vector<GaussianComponent> components;

    size_t size() const { return components.size(); }
    const GaussianComponent &state(int index) const;
    void validate() const;
};

struct ShotBatch {
    std::vector<IQPoint> points;
    std::vector<int> true_labels;  // empty when unlabeled
    uint64_t seed = 0;
};

constexpr int kOutlier = -1;
constexpr double kNoThreshold = std::numeric_limits<double>::infinity();

struct AssignmentReport {
    std::vector<double> P;
    double outlier_fraction = 0.0;
    size_t shots = 0;
    size_t outliers = 0;
    /// Average assignment error over the labels present, when labeled.
    std::optional<double> epsilon_n;
};

/// Labeled shots drawn from the mixture; one random stream per shot.
ShotBatch simulate_iq(const GmmModel &truth, const std::vector<double> &state_distribution, size_t n_shots,
                      uint64_t seed);

struct GmmFitOptions {
    int max_iterations = 500;
    double tolerance = 1e-10;  // relative log-likelihood change
};

struct GmmFit {
    GmmModel model;
    std::vector<double> weights;
    std::vector<double> log_likelihood;  // one entry per EM step
    int iterations = 0;
    bool converged = false;
};

/// EM with k-means++ seeding. When `references` holds one prepared batch per
/// state, components are relabeled to the states they capture best;
/// otherwise they keep the fitted order.
GmmFit fit_gmm(const ShotBatch &shots, int n_components, uint64_t seed,
               const std::vector<ShotBatch> &references = {}, const GmmFitOptions &options = {});

/// Likelihood of point under component: exp(-r^2 / 2 sigma^2) / (2 pi sigma^2).
double component_density(const GaussianComponent &c, const IQPoint &p);
/// p_th = exp(-k^2 / 2) / (2 pi sigma_g^2).
double outlier_threshold(const GmmModel &model, double k);

/// Most likely state, lowest index on ties, or kOutlier below p_th.
int assign(const GmmModel &model, const IQPoint &point, double k = kNoThreshold);

AssignmentReport state_probabilities(const GmmModel &model, const ShotBatch &batch, double k = kNoThreshold);

struct AssignmentErrorReport {
    double epsilon_n = 0.0;
    std::vector<double> P_ii;
};

/// eps_n = 1 - mean_i P_ii with batch i prepared in state i.
AssignmentErrorReport assignment_error(const GmmModel &model, const std::vector<ShotBatch> &prepared,
                                       double k = kNoThreshold);

/// Rows: prepared state; columns: reported state.
struct ConfusionMatrix {
    std::vector<std::vector<double>> m;

    size_t size() const { return m.size(); }
    void validate() const;
    /// Reported-state distribution for the given true populations.
    std::vector<double> apply(const std::vector<double> &populations) const;
    static ConfusionMatrix identity(size_t n);
};

/// Monte Carlo estimate of the confusion matrix of `model` with outliers
/// dropped; deterministic for a seed.
ConfusionMatrix confusion_from_model(const GmmModel &model, double k, size_t shots_per_state, uint64_t seed);

/// g-e centroid separation (in sigma) whose two-state error is `epsilon2`:
/// eps = Phi(-d / 2).
double separation_for_error(double epsilon2);

/// Resonator pull for transmon level j (MHz), multilevel dispersive model.
double dispersive_pull(const TransmonParams &q, const ResonatorParams &r, double g_qr, int level);

/// Readout clouds from the steady resonator response per level, probed
/// midway between the g and e pulls, scaled so |c_g - c_e| equals the
/// separation (sigma = 1) at the reference integration time. Longer
/// integration scales the separation as sqrt(t / t_ref).
GmmModel dispersive_readout_model(const TransmonParams &q, const ResonatorParams &r, double g_qr, int n_states,
                                  double separation_ge, double integration_us = 1.024,
                                  double reference_us = 1.024);

void write_shots_csv(const ShotBatch &batch, std::ostream &out);
ShotBatch read_shots_csv(std::istream &in);
std::string gmm_to_json(const GmmModel &model);
GmmModel gmm_from_json(const std::string &text);

}  // namespace leakstack
