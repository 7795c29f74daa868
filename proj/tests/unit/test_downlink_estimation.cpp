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

#include "cfmimo/downlink_estimation.hpp"
#include "cfmimo/linalg.hpp"
#include "oracles.hpp"

using namespace cfmimo;

TEST(DownlinkEstimation, NoiselessPilotsSuperposeSharedUsers) {
    Rng rng(1);
    const auto book = PilotBook::from_groups(4, 2, {0, 1, 0});
    std::vector<CMatrix> row = {rng.cn_matrix(2, 2), rng.cn_matrix(2, 2), rng.cn_matrix(2, 2)};
    const std::vector<double> q = {1.0, 2.0, 3.0};
    const CMatrix y = receive_downlink_pilots(row, book, q, CMatrix());
    const CVector obs0 = downlink_observation(y, book, 0);
    const CMatrix ref = std::sqrt(4.0) * row[0] + std::sqrt(12.0) * row[2];
    EXPECT_LT((obs0 - linalg::vec(ref)).norm(), 1e-12);
    const CVector obs1 = downlink_observation(y, book, 1);
    EXPECT_LT((obs1 - linalg::vec(std::sqrt(8.0) * row[1])).norm(), 1e-12);
    EXPECT_THROW(receive_downlink_pilots(row, book, q, CMatrix::Zero(3, 4)), ConfigError);
}

TEST(DownlinkEstimation, MomentsMatchSampleOracleAndMergeInOrder) {
    Rng rng(2);
    std::vector<CVector> b, y;
    for (int t = 0; t < 300; ++t) {
        b.push_back(rng.cn_vector(3) + CVector::Constant(3, Complex(1.0, 2.0)));
        y.push_back(rng.cn_vector(2));
    }
    const auto m = estimate_moments(b, y);
    EXPECT_EQ(m.count(), 300);
    EXPECT_LT(oracle::rel_fro(m.cov_b(), oracle::sample_covariance(b)), 1e-12);
    EXPECT_LT(oracle::rel_fro(m.cov_y(), oracle::sample_covariance(y)), 1e-12);

    LinearMoments first(3, 2), second(3, 2);
    for (int t = 0; t < 300; ++t) {
        (t < 100 ? first : second).add(b[static_cast<std::size_t>(t)], y[static_cast<std::size_t>(t)]);
    }
    first.merge(second);
    EXPECT_LT(oracle::rel_fro(first.cov_by(), m.cov_by()), 1e-12);

    LinearMoments tiny(1, 1);
    tiny.add(CVector::Ones(1), CVector::Ones(1));
    EXPECT_THROW(tiny.cov_b(), ConfigError);
}

namespace {

struct LinearGaussian {
    CVector mu;
    CMatrix Cb, A, Cn, Lb, Ln;
    explicit LinearGaussian(Rng& rng) {
        mu = rng.cn_vector(4);
        Cb = oracle::random_hpd(4, rng, 0.3);
        A = rng.cn_matrix(4, 4);
        Cn = 0.5 * CMatrix::Identity(4, 4);
        Lb = linalg::psd_sqrt(Cb);
        Ln = linalg::psd_sqrt(Cn);
    }
    void draw(Rng& rng, CVector& b, CVector& y) const {
        b = mu + Lb * rng.cn_vector(4);
        y = A * b + Ln * rng.cn_vector(4);
    }
};

}  // namespace

TEST(DownlinkEstimation, LmmseGainApproachesGaussianClosedForm) {
    Rng rng(3);
    const LinearGaussian model(rng);
    const MomentSampler sampler = [&](Index, CVector& b, CVector& y) { model.draw(rng, b, y); };
    const auto moments = estimate_moments(sampler, 40000, 4, 4);
    const LmmseEstimator est(moments);
    const CMatrix Cy = model.A * model.Cb * model.A.adjoint() + model.Cn;
    const CMatrix gain = model.Cb * model.A.adjoint() * oracle::inverse_lu(Cy);
    EXPECT_LT(oracle::rel_fro(est.gain(), gain), 0.05);
    const CMatrix err = model.Cb - gain * Cy * gain.adjoint();
    EXPECT_NEAR(est.mse(), err.trace().real(), 0.05 * err.trace().real());
    EXPECT_TRUE(linalg::is_hermitian_psd(est.error_cov(), 1e-9));

    // Orthogonality on fresh draws: E{(b - b^) y^H} ~ 0 relative to E{b y^H}.
    CMatrix cross = CMatrix::Zero(4, 4), ref = CMatrix::Zero(4, 4);
    CVector b, y;
    const int n = 40000;
    for (int t = 0; t < n; ++t) {
        model.draw(rng, b, y);
        cross += (b - est.estimate(y)) * (y - est.mean_y()).adjoint();
        ref += (b - est.mean_b()) * (y - est.mean_y()).adjoint();
    }
    EXPECT_LT(cross.norm() / ref.norm(), 0.03);
}

TEST(DownlinkEstimation, ExplicitMomentsConstructor) {
    CVector mb(1), my(1);
    mb << 0.5;
    my << 0.0;
    CMatrix cb(1, 1), cby(1, 1), cy(1, 1);
    cb << 2.0;
    cby << 2.0;
    cy << 3.0;
    const LmmseEstimator est(mb, my, cb, cby, cy);
    EXPECT_NEAR(est.gain()(0, 0).real(), 2.0 / 3.0, 1e-14);
    EXPECT_NEAR(est.mse(), 2.0 - 4.0 / 3.0, 1e-14);
    CVector y(1);
    y << 1.5;
    EXPECT_NEAR(est.estimate(y)(0).real(), 0.5 + 1.0, 1e-14);
}

TEST(DownlinkEstimation, EffectiveEstimateReshapes) {
    Rng rng(4);
    std::vector<CVector> b, y;
    for (int t = 0; t < 500; ++t) {
        const CVector v = rng.cn_vector(4);
        b.push_back(v);
        y.push_back(v + 0.3 * rng.cn_vector(4));
    }
    const LmmseEstimator est(estimate_moments(b, y));
    const auto e = lmmse_effective_estimate(y[0], est, 2);
    EXPECT_EQ(e.B_hat.rows(), 2);
    EXPECT_LT((linalg::vec(e.B_hat) - e.b_hat).norm(), 1e-15);
    EXPECT_LT(oracle::rel_fro(e.C_B, linalg::sum_diagonal_blocks(e.C_err, 2, 2)), 1e-15);
    EXPECT_NEAR(e.C_B.trace().real(), e.mse, 1e-12);
    CVector bad = y[0];
    bad(1) = Complex(INFINITY, 0.0);
    EXPECT_THROW(lmmse_effective_estimate(bad, est, 2), DataError);
}
