// SPDX-License-Identifier: Apache-2.0
//
// cfmimo: downlink link-level simulator for cell-free massive MIMO with multi-antenna users
// Copyright (C) 2026 The cfmimo Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#include <gtest/gtest.h>

#include "cfmimo/linalg.hpp"
#include "cfmimo/rng.hpp"
#include "oracles.hpp"

using namespace cfmimo;

TEST(Linalg, VecUnvecRoundTripIsColumnMajor) {
    Rng rng(1);
    const CMatrix x = rng.cn_matrix(3, 2);
    const CVector v = linalg::vec(x);
    EXPECT_EQ(v(4), x(1, 1));
    EXPECT_EQ(v(2), x(2, 0));
    EXPECT_TRUE(linalg::unvec(v, 3, 2).isApprox(x));
}

TEST(Linalg, KronMatchesDefinition) {
    Rng rng(2);
    const CMatrix a = rng.cn_matrix(2, 3);
    const CMatrix b = rng.cn_matrix(3, 2);
    const CMatrix k = linalg::kron(a, b);
    ASSERT_EQ(k.rows(), 6);
    ASSERT_EQ(k.cols(), 6);
    for (Index i = 0; i < 2; ++i) {
        for (Index j = 0; j < 3; ++j) {
            for (Index r = 0; r < 3; ++r) {
                for (Index c = 0; c < 2; ++c) {
                    EXPECT_NEAR(std::abs(k(i * 3 + r, j * 2 + c) - a(i, j) * b(r, c)), 0.0, 1e-14);
                }
            }
        }
    }
}

TEST(Linalg, DiagonalBlockSumIsGramOfUnvec) {
    Rng rng(3);
    const CMatrix x = rng.cn_matrix(4, 3);
    const CVector v = linalg::vec(x);
    const CMatrix cov = v * v.adjoint();
    EXPECT_LT(oracle::rel_fro(linalg::sum_diagonal_blocks(cov, 4, 3), x * x.adjoint()), 1e-13);

    const std::vector<int> mask = {1, 0, 1};
    CMatrix g = CMatrix::Zero(3, 3);
    g(0, 0) = 1.0;
    g(2, 2) = 1.0;
    EXPECT_LT(oracle::rel_fro(linalg::masked_diagonal_blocks(cov, 4, mask), x * g * x.adjoint()), 1e-13);
}

TEST(Linalg, PsdSqrtSquaresBack) {
    Rng rng(4);
    const CMatrix a = oracle::random_hpd(5, rng, 0.0);
    const CMatrix s = linalg::psd_sqrt(a);
    EXPECT_LT(oracle::rel_fro(s * s, a), 1e-10);
    EXPECT_TRUE(linalg::is_hermitian_psd(s));
}

TEST(Linalg, PsdSqrtAcceptsRankDeficient) {
    Rng rng(5);
    const CVector v = rng.cn_vector(4);
    const CMatrix a = v * v.adjoint();
    const CMatrix s = linalg::psd_sqrt(a);
    EXPECT_LT(oracle::rel_fro(s * s, a), 1e-8);
}

TEST(Linalg, PsdSqrtRejectsIndefinite) {
    CMatrix a = CMatrix::Identity(3, 3);
    a(2, 2) = -0.5;
    EXPECT_THROW(linalg::psd_sqrt(a), DataError);
}

TEST(Linalg, HpdFactorLogDetMatchesEigenvalues) {
    Rng rng(6);
    const CMatrix a = oracle::random_hpd(6, rng);
    const linalg::HpdFactor f(a);
    EXPECT_NEAR(f.log2_det(), oracle::log2_det_eig(a), 1e-10);
    EXPECT_LT(oracle::rel_fro(f.inverse(), oracle::inverse_lu(a)), 1e-10);
    const CMatrix rhs = rng.cn_matrix(6, 2);
    EXPECT_LT(oracle::rel_fro(a * f.solve(rhs), rhs), 1e-10);
}

TEST(Linalg, HpdFactorRejectsNonPositive) {
    CMatrix a = CMatrix::Identity(2, 2);
    a(1, 1) = -1.0;
    EXPECT_THROW(linalg::HpdFactor{a}, NumericalError);
}

TEST(Linalg, CapacityLogDetMatchesDirectForm) {
    Rng rng(7);
    for (int trial = 0; trial < 20; ++trial) {
        const CMatrix a = 3.0 * rng.cn_matrix(3, 2);
        const CMatrix c = oracle::random_hpd(3, rng);
        const CMatrix direct = CMatrix::Identity(2, 2) + a.adjoint() * oracle::inverse_lu(c) * a;
        EXPECT_NEAR(linalg::log2_det_capacity(a, c), oracle::log2_det_eig(direct), 1e-9);
    }
}

TEST(Linalg, CapacityOfZeroChannelIsZero) {
    EXPECT_NEAR(linalg::log2_det_capacity(CMatrix::Zero(2, 2), CMatrix::Identity(2, 2)), 0.0, 1e-15);
}

TEST(Linalg, SelectColumnsKeepsOrder) {
    Rng rng(8);
    const CMatrix a = rng.cn_matrix(2, 4);
    const CMatrix s = linalg::select_columns(a, {3, 1});
    EXPECT_EQ(s.col(0), a.col(3));
    EXPECT_EQ(s.col(1), a.col(1));
}
