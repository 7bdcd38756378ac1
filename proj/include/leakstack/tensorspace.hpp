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

#include <complex>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace leakstack {

using Complex = std::complex<double>;
using DenseMatrix = Eigen::MatrixXcd;
using SparseMatrix = Eigen::SparseMatrix<Complex, Eigen::RowMajor>;
using ComplexVector = Eigen::VectorXcd;

/// Truncated multi-mode Hilbert space. Mode 0 is the most significant digit
/// of the flat basis index, so |l0 l1 ... ln> maps to
/// sum_k l_k * stride(k) with stride(n) = 1.
class TensorSpace {
   public:
    TensorSpace() = default;
    TensorSpace(std::vector<int> mode_dims, std::vector<std::string> mode_labels);

    size_t num_modes() const { return dims_.size(); }
    size_t dimension() const { return total_; }
    int mode_dim(size_t mode) const { return dims_.at(mode); }
    const std::string &label(size_t mode) const { return labels_.at(mode); }
    const std::vector<int> &mode_dims() const { return dims_; }
    const std::vector<std::string> &mode_labels() const { return labels_; }
    size_t stride(size_t mode) const { return strides_.at(mode); }

    /// Index of the mode carrying `label`; throws std::out_of_range if absent.
    size_t mode_index(const std::string &label) const;
    bool has_mode(const std::string &label) const;

    size_t flat_index(std::span<const int> levels) const;
    int level_of(size_t flat, size_t mode) const {
        return static_cast<int>((flat / strides_[mode]) % static_cast<size_t>(dims_[mode]));
    }

    /// Subspace over the given modes, in the order given.
    TensorSpace subspace(std::span<const size_t> modes) const;

    bool operator==(const TensorSpace &other) const {
        return dims_ == other.dims_ && labels_ == other.labels_;
    }

   private:
    std::vector<int> dims_;
    std::vector<std::string> labels_;
    std::vector<size_t> strides_;
    size_t total_ = 0;
};

TensorSpace make_space(std::vector<int> mode_dims, std::vector<std::string> mode_labels);

/// Truncated annihilation operator: a[n-1, n] = sqrt(n).
DenseMatrix lowering_operator(int dim);
DenseMatrix number_operator(int dim);

struct Operator {
    TensorSpace space;
    SparseMatrix matrix;

    DenseMatrix dense() const { return DenseMatrix(matrix); }
    Operator adjoint() const;
};

Operator operator*(const Operator &a, const Operator &b);
Operator operator+(const Operator &a, const Operator &b);
Operator operator-(const Operator &a, const Operator &b);

Operator identity_operator(const TensorSpace &space);

/// Kronecker embedding of a local operator on one mode, identity elsewhere.
Operator embed(const TensorSpace &space, size_t mode_index, const DenseMatrix &local_op);

struct StateVector {
    TensorSpace space;
    ComplexVector amplitudes;

    double norm() const { return amplitudes.norm(); }
};

struct DensityMatrix {
    TensorSpace space;
    DenseMatrix matrix;

    Complex trace() const { return matrix.trace(); }
    static DensityMatrix from_state(const StateVector &psi);
};

StateVector basis_state(const TensorSpace &space, std::span<const int> levels);

/// Reduced state over `keep_modes` (sorted ascending in the result).
DensityMatrix partial_trace(const DensityMatrix &rho, std::vector<size_t> keep_modes);

/// Diagonal of the single-mode reduced state of `mode`, computed directly from
/// the diagonal of rho.
std::vector<double> mode_populations(const DensityMatrix &rho, size_t mode);
std::vector<double> mode_populations(const StateVector &psi, size_t mode);

struct DensityDiagnostics {
    double hermiticity_error = 0.0;  // max |rho - rho^dagger|
    double trace_error = 0.0;        // |tr rho - 1|
    double min_eigenvalue = 0.0;

    bool valid() const {
        return hermiticity_error <= 1e-9 && trace_error <= 1e-8 && min_eigenvalue >= -1e-8;
    }
};

DensityDiagnostics diagnose(const DensityMatrix &rho);

/// Hermitian part with negative eigenvalues clipped and unit trace. Used to
/// hand integrator output, accurate to the solver tolerance, to a new run.
DensityMatrix nearest_physical(const DensityMatrix &rho);

}  // namespace leakstack
