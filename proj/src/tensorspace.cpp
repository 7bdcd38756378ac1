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

#include "leakstack/tensorspace.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

#include "leakstack/errors.hpp"

namespace leakstack {

TensorSpace::TensorSpace(std::vector<int> mode_dims, std::vector<std::string> mode_labels)
    : dims_(std::move(mode_dims)), labels_(std::move(mode_labels)) {
    if (dims_.empty()) {
        throw InvariantError("TensorSpace needs at least one mode");
    }
    if (dims_.size() != labels_.size()) {
        throw InvariantError("TensorSpace: mode_dims and mode_labels differ in length");
    }
    std::set<std::string> seen;
    for (size_t k = 0; k < dims_.size(); ++k) {
        if (dims_[k] < 2) {
            throw InvariantError("TensorSpace: mode '" + labels_[k] + "' has dimension < 2");
        }
        if (!seen.insert(labels_[k]).second) {
            throw InvariantError("TensorSpace: duplicate mode label '" + labels_[k] + "'");
        }
    }
    strides_.assign(dims_.size(), 1);
    for (size_t k = dims_.size() - 1; k > 0; --k) {
        strides_[k - 1] = strides_[k] * static_cast<size_t>(dims_[k]);
    }
    total_ = strides_[0] * static_cast<size_t>(dims_[0]);
}

size_t TensorSpace::mode_index(const std::string &label) const {
    auto it = std::find(labels_.begin(), labels_.end(), label);
    if (it == labels_.end()) {
        throw std::out_of_range("unknown mode '" + label + "'");
    }
    return static_cast<size_t>(it - labels_.begin());
}

bool TensorSpace::has_mode(const std::string &label) const {
    return std::find(labels_.begin(), labels_.end(), label) != labels_.end();
}

size_t TensorSpace::flat_index(std::span<const int> levels) const {
    if (levels.size() != dims_.size()) {
        throw std::invalid_argument("flat_index: expected one level per mode");
    }
    size_t idx = 0;
    for (size_t k = 0; k < dims_.size(); ++k) {
        if (levels[k] < 0 || levels[k] >= dims_[k]) {
            throw std::out_of_range("level " + std::to_string(levels[k]) + " out of range for mode '" +
                                    labels_[k] + "'");
        }
        idx += static_cast<size_t>(levels[k]) * strides_[k];
    }
    return idx;
}

TensorSpace TensorSpace::subspace(std::span<const size_t> modes) const {
    std::vector<int> d;
    std::vector<std::string> l;
    for (size_t m : modes) {
        d.push_back(dims_.at(m));
        l.push_back(labels_.at(m));
    }
    return TensorSpace(std::move(d), std::move(l));
}

TensorSpace make_space(std::vector<int> mode_dims, std::vector<std::string> mode_labels) {
    return TensorSpace(std::move(mode_dims), std::move(mode_labels));
}

DenseMatrix lowering_operator(int dim) {
    if (dim < 2) {
        throw InvariantError("lowering_operator: dim < 2");
    }
    DenseMatrix a = DenseMatrix::Zero(dim, dim);
    for (int n = 1; n < dim; ++n) {
        a(n - 1, n) = std::sqrt(static_cast<double>(n));
    }
    return a;
}

DenseMatrix number_operator(int dim) {
    if (dim < 2) {
        throw InvariantError("number_operator: dim < 2");
    }
    DenseMatrix n = DenseMatrix::Zero(dim, dim);
    for (int k = 0; k < dim; ++k) {
        n(k, k) = k;
    }
    return n;
}

namespace {

void require_same_space(const Operator &a, const Operator &b) {
    if (!(a.space == b.space)) {
        throw std::invalid_argument("operators act on different spaces");
    }
}

}  // namespace

Operator Operator::adjoint() const {
    SparseMatrix m = matrix.adjoint();
    return {space, std::move(m)};
}

Operator operator*(const Operator &a, const Operator &b) {
    require_same_space(a, b);
    SparseMatrix m = a.matrix * b.matrix;
    return {a.space, std::move(m)};
}

Operator operator+(const Operator &a, const Operator &b) {
    require_same_space(a, b);
    SparseMatrix m = a.matrix + b.matrix;
    return {a.space, std::move(m)};
}

Operator operator-(const Operator &a, const Operator &b) {
    require_same_space(a, b);
    SparseMatrix m = a.matrix - b.matrix;
    return {a.space, std::move(m)};
}

Operator identity_operator(const TensorSpace &space) {
    const auto n = static_cast<Eigen::Index>(space.dimension());
    SparseMatrix m(n, n);
    m.setIdentity();
    return {space, std::move(m)};
}

Operator embed(const TensorSpace &space, size_t mode_index, const DenseMatrix &local_op) {
    if (mode_index >= space.num_modes()) {
        throw std::out_of_range("embed: mode index out of range");
    }
    const int d = space.mode_dim(mode_index);
    if (local_op.rows() != d || local_op.cols() != d) {
        throw std::invalid_argument("embed: local operator dimension " + std::to_string(local_op.rows()) +
                                    " does not match mode dimension " + std::to_string(d));
    }
    const size_t n = space.dimension();
    const size_t stride = space.stride(mode_index);
    std::vector<Eigen::Triplet<Complex>> entries;
    for (size_t col = 0; col < n; ++col) {
        const int c = space.level_of(col, mode_index);
        for (int r = 0; r < d; ++r) {
            const Complex v = local_op(r, c);
            if (v == Complex(0.0)) {
                continue;
            }
            const size_t row = col + static_cast<size_t>(r) * stride - static_cast<size_t>(c) * stride;
            entries.emplace_back(static_cast<int>(row), static_cast<int>(col), v);
        }
    }
    SparseMatrix m(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    m.setFromTriplets(entries.begin(), entries.end());
    return {space, std::move(m)};
}

DensityMatrix DensityMatrix::from_state(const StateVector &psi) {
    return {psi.space, psi.amplitudes * psi.amplitudes.adjoint()};
}

StateVector basis_state(const TensorSpace &space, std::span<const int> levels) {
    ComplexVector v = ComplexVector::Zero(static_cast<Eigen::Index>(space.dimension()));
    v(static_cast<Eigen::Index>(space.flat_index(levels))) = 1.0;
    return {space, std::move(v)};
}

DensityMatrix partial_trace(const DensityMatrix &rho, std::vector<size_t> keep_modes) {
    const TensorSpace &space = rho.space;
    if (keep_modes.empty()) {
        throw std::invalid_argument("partial_trace: keep_modes is empty");
    }
    std::sort(keep_modes.begin(), keep_modes.end());
    if (std::adjacent_find(keep_modes.begin(), keep_modes.end()) != keep_modes.end()) {
        throw std::invalid_argument("partial_trace: repeated mode");
    }
    if (keep_modes.back() >= space.num_modes()) {
        throw std::out_of_range("partial_trace: mode index out of range");
    }
    std::vector<size_t> traced;
    for (size_t k = 0; k < space.num_modes(); ++k) {
        if (!std::binary_search(keep_modes.begin(), keep_modes.end(), k)) {
            traced.push_back(k);
        }
    }
    TensorSpace reduced = space.subspace(keep_modes);
    const size_t n = space.dimension();

    // Split every full index into (kept index, traced index).
    std::vector<size_t> kept_idx(n), traced_idx(n);
    for (size_t i = 0; i < n; ++i) {
        size_t k = 0;
        for (size_t j = 0; j < keep_modes.size(); ++j) {
            k += static_cast<size_t>(space.level_of(i, keep_modes[j])) * reduced.stride(j);
        }
        size_t t = 0;
        for (size_t m : traced) {
            t = t * static_cast<size_t>(space.mode_dim(m)) + static_cast<size_t>(space.level_of(i, m));
        }
        kept_idx[i] = k;
        traced_idx[i] = t;
    }
    DenseMatrix out = DenseMatrix::Zero(static_cast<Eigen::Index>(reduced.dimension()),
                                        static_cast<Eigen::Index>(reduced.dimension()));
    for (size_t j = 0; j < n; ++j) {
        for (size_t i = 0; i < n; ++i) {
            if (traced_idx[i] == traced_idx[j]) {
                out(static_cast<Eigen::Index>(kept_idx[i]), static_cast<Eigen::Index>(kept_idx[j])) +=
                    rho.matrix(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
            }
        }
    }
    return {std::move(reduced), std::move(out)};
}

std::vector<double> mode_populations(const DensityMatrix &rho, size_t mode) {
    const TensorSpace &space = rho.space;
    std::vector<double> pops(static_cast<size_t>(space.mode_dim(mode)), 0.0);
    for (size_t i = 0; i < space.dimension(); ++i) {
        const auto ii = static_cast<Eigen::Index>(i);
        pops[static_cast<size_t>(space.level_of(i, mode))] += rho.matrix(ii, ii).real();
    }
    return pops;
}

std::vector<double> mode_populations(const StateVector &psi, size_t mode) {
    const TensorSpace &space = psi.space;
    std::vector<double> pops(static_cast<size_t>(space.mode_dim(mode)), 0.0);
    for (size_t i = 0; i < space.dimension(); ++i) {
        pops[static_cast<size_t>(space.level_of(i, mode))] += std::norm(psi.amplitudes(static_cast<Eigen::Index>(i)));
    }
    return pops;
}

DensityDiagnostics diagnose(const DensityMatrix &rho) {
    DensityDiagnostics d;
    d.hermiticity_error = (rho.matrix - rho.matrix.adjoint()).cwiseAbs().maxCoeff();
    d.trace_error = std::abs(rho.matrix.trace() - Complex(1.0));
    DenseMatrix herm = 0.5 * (rho.matrix + rho.matrix.adjoint());
    Eigen::SelfAdjointEigenSolver<DenseMatrix> es(herm, Eigen::EigenvaluesOnly);
    d.min_eigenvalue = es.eigenvalues().minCoeff();
    return d;
}

DensityMatrix nearest_physical(const DensityMatrix &rho) {
    const DenseMatrix herm = 0.5 * (rho.matrix + rho.matrix.adjoint());
    Eigen::SelfAdjointEigenSolver<DenseMatrix> es(herm);
    if (es.info() != Eigen::Success) throw NumericalError("density matrix diagonalization failed");
    Eigen::VectorXd w = es.eigenvalues().cwiseMax(0.0);
    const double total = w.sum();
    if (!(total > 0)) throw NumericalError("density matrix has no positive weight");
    w /= total;
    const DenseMatrix &v = es.eigenvectors();
    return DensityMatrix{rho.space, v * w.cast<Complex>().asDiagonal() * v.adjoint()};
}

}  // namespace leakstack
