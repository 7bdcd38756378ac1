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
#include <stdexcept>

#include <gtest/gtest.h>

#include "leakstack/errors.hpp"
#include "leakstack/tensorspace.hpp"

using namespace leakstack;

namespace {

DensityMatrix pure(const TensorSpace &space, std::vector<int> levels) {
    return DensityMatrix::from_state(basis_state(space, levels));
}

}  // namespace

TEST(tensorspace, dimensions) {
    EXPECT_EQ(make_space({4, 4, 3}, {"q", "c", "r"}).dimension(), 48u);
    EXPECT_EQ(make_space({2}, {"q"}).dimension(), 2u);
    EXPECT_EQ(make_space({4, 3, 3, 3}, {"q", "c1", "c2", "c3"}).dimension(), 108u);
    EXPECT_THROW(make_space({1}, {"q"}), InvariantError);
    EXPECT_THROW(make_space({2, 2}, {"q", "q"}), InvariantError);
}

TEST(tensorspace, lowering_operator) {
    auto a2 = lowering_operator(2);
    EXPECT_EQ(a2(0, 1), Complex(1.0));
    auto a3 = lowering_operator(3);
    ComplexVector two = ComplexVector::Zero(3);
    two(2) = 1.0;
    ComplexVector out = a3 * two;
    EXPECT_NEAR(out(1).real(), std::sqrt(2.0), 1e-15);
    EXPECT_NEAR(out.norm(), std::sqrt(2.0), 1e-15);
    for (int d = 2; d <= 6; ++d) {
        auto a = lowering_operator(d);
        DenseMatrix n = a.adjoint() * a;
        for (int k = 0; k < d; ++k) EXPECT_NEAR(n(k, k).real(), k, 1e-14);
        EXPECT_TRUE(n.isApprox(number_operator(d)));
    }
    EXPECT_THROW(lowering_operator(1), InvariantError);
}

TEST(tensorspace, embed) {
    auto space = make_space({2, 2}, {"a", "b"});
    auto id = embed(space, 0, DenseMatrix::Identity(2, 2));
    EXPECT_TRUE(id.dense().isApprox(DenseMatrix::Identity(4, 4)));

    auto a0 = embed(space, 0, lowering_operator(2));
    auto a1 = embed(space, 1, lowering_operator(2));
    std::vector<int> one_zero{1, 0};
    std::vector<int> zero_zero{0, 0};
    ComplexVector out = a0.matrix * basis_state(space, one_zero).amplitudes;
    EXPECT_NEAR((out - basis_state(space, zero_zero).amplitudes).norm(), 0.0, 1e-15);

    DenseMatrix comm = (a0 * a1 - a1 * a0).dense();
    EXPECT_EQ(comm.cwiseAbs().maxCoeff(), 0.0);

    EXPECT_THROW(embed(space, 2, lowering_operator(2)), std::out_of_range);
    EXPECT_THROW(embed(space, 0, lowering_operator(3)), std::invalid_argument);
}

TEST(tensorspace, truncated_commutator) {
    auto space = make_space({3, 4}, {"q", "c"});
    auto a = embed(space, 1, lowering_operator(4));
    DenseMatrix comm = (a * a.adjoint() - a.adjoint() * a).dense();
    for (size_t i = 0; i < space.dimension(); ++i) {
        double expected = space.level_of(i, 1) == 3 ? -3.0 : 1.0;
        // sqrt(n)^2 rounds, so "exact" means to the last bit or two.
        EXPECT_NEAR(std::abs(comm(i, i) - Complex(expected)), 0.0, 1e-14);
    }
    EXPECT_EQ((comm - DenseMatrix(comm.diagonal().asDiagonal())).cwiseAbs().maxCoeff(), 0.0);
}

TEST(tensorspace, basis_state) {
    auto space = make_space({4, 4, 3}, {"q", "c", "r"});
    std::vector<int> ggo{0, 0, 0}, fg0{2, 0, 0}, ee0{1, 1, 0};
    auto v = basis_state(space, ggo);
    EXPECT_EQ(v.amplitudes(0), Complex(1.0));
    EXPECT_DOUBLE_EQ(v.norm(), 1.0);
    EXPECT_EQ(basis_state(space, fg0).amplitudes.dot(basis_state(space, ee0).amplitudes), Complex(0.0));
    std::vector<int> bad{0, 0, 3};
    EXPECT_THROW(basis_state(space, bad), std::out_of_range);
}

TEST(tensorspace, partial_trace_product) {
    auto space = make_space({2, 3}, {"a", "b"});
    auto rho = pure(space, {1, 2});
    auto ra = partial_trace(rho, {0});
    EXPECT_NEAR(ra.matrix(1, 1).real(), 1.0, 1e-15);
    EXPECT_NEAR(std::abs(ra.trace() - Complex(1.0)), 0.0, 1e-10);
    EXPECT_THROW(partial_trace(rho, {}), std::invalid_argument);
    EXPECT_THROW(partial_trace(rho, {5}), std::out_of_range);
}

TEST(tensorspace, partial_trace_bell) {
    auto space = make_space({2, 2}, {"a", "b"});
    StateVector psi{space, ComplexVector::Zero(4)};
    psi.amplitudes(0) = psi.amplitudes(3) = 1.0 / std::sqrt(2.0);
    auto r = partial_trace(DensityMatrix::from_state(psi), {1});
    EXPECT_TRUE(r.matrix.isApprox(0.5 * DenseMatrix::Identity(2, 2), 1e-14));
}

TEST(tensorspace, partial_trace_composes) {
    auto space = make_space({2, 3, 2}, {"a", "b", "c"});
    // Random mixed state from a random Gram matrix.
    DenseMatrix x = DenseMatrix::Random(12, 12);
    DensityMatrix rho{space, x * x.adjoint()};
    rho.matrix /= rho.trace();
    auto step = partial_trace(partial_trace(rho, {0, 2}), {0});
    auto direct = partial_trace(rho, {0});
    EXPECT_LT((step.matrix - direct.matrix).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_NEAR(std::abs(direct.trace() - rho.trace()), 0.0, 1e-10);
}

TEST(tensorspace, nearest_physical) {
    auto space = make_space({2}, {"q"});
    DensityMatrix rho{space, DenseMatrix::Zero(2, 2)};
    rho.matrix(0, 0) = 1.0 + 1e-7;
    rho.matrix(1, 1) = -1e-7;
    rho.matrix(0, 1) = Complex(0.0, 1e-9);
    EXPECT_FALSE(diagnose(rho).valid());
    auto fixed = nearest_physical(rho);
    EXPECT_TRUE(diagnose(fixed).valid());
    EXPECT_NEAR(fixed.matrix(0, 0).real(), 1.0, 1e-8);
}
