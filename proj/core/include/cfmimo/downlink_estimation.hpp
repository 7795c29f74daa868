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

#pragma once

#include <functional>
#include <vector>

#include "cfmimo/pilot_domain.hpp"
#include "cfmimo/types.hpp"

namespace cfmimo {

/// B_ki = H_k^H W_i.
inline CMatrix effective_channel(const CMatrix& h_k, const CMatrix& w_i) { return h_k.adjoint() * w_i; }

/// Y~_k = sum_i sqrt(q_i tau_p) B_ki Phi_i^H + noise, M x tau_p. b_row holds
/// B_ki for i = 0..K-1; noise may be empty (noiseless).
CMatrix receive_downlink_pilots(const std::vector<CMatrix>& b_row, const PilotBook& book,
                                const std::vector<double>& q, const CMatrix& noise);

/// Observation used to estimate B_ki: vec(Y~_k Phi_i).
inline CVector downlink_observation(const CMatrix& y_pilot, const PilotBook& book, int i) {
    const CMatrix corr = y_pilot * book.pilot(i);
    return Eigen::Map<const CVector>(corr.data(), corr.size());
}

/// First and second sample moments of a pair (b, y), accumulated as sums so
/// partial results can be merged in a fixed order.
class LinearMoments {
public:
    LinearMoments() = default;
    LinearMoments(Index dim_b, Index dim_y);

    void add(const CVector& b, const CVector& y);
    void merge(const LinearMoments& other);

    Index count() const { return n_; }
    Index dim_b() const { return sum_b_.size(); }
    Index dim_y() const { return sum_y_.size(); }
    CVector mean_b() const;
    CVector mean_y() const;
    /// Unbiased (n - 1) covariances; throw ConfigError when n < 2.
    CMatrix cov_b() const;
    CMatrix cov_y() const;
    CMatrix cov_by() const;

private:
    void require_two() const;
    Index n_ = 0;
    CVector sum_b_, sum_y_;
    CMatrix sum_bb_, sum_yy_, sum_by_;
};

/// Draw t of the sampler writes b and y; draws are added in index order.
using MomentSampler = std::function<void(Index t, CVector& b, CVector& y)>;

LinearMoments estimate_moments(const MomentSampler& sampler, Index n_samples, Index dim_b, Index dim_y);
LinearMoments estimate_moments(const std::vector<CVector>& b, const std::vector<CVector>& y);

/// b^ = E{b} + C_by C_y^{-1} (y - E{y}).
class LmmseEstimator {
public:
    LmmseEstimator() = default;
    explicit LmmseEstimator(const LinearMoments& moments);
    LmmseEstimator(CVector mean_b, CVector mean_y, const CMatrix& c_b, const CMatrix& c_by, const CMatrix& c_y);

    CVector estimate(const CVector& y) const { return mean_b_ + gain_ * (y - mean_y_); }
    const CMatrix& gain() const { return gain_; }
    /// C_b~ = C_b - C_by C_y^{-1} C_yb
    const CMatrix& error_cov() const { return c_err_; }
    double mse() const { return c_err_.trace().real(); }
    const CVector& mean_b() const { return mean_b_; }
    const CVector& mean_y() const { return mean_y_; }

private:
    CVector mean_b_, mean_y_;
    CMatrix gain_, c_err_;
};

struct EffectiveEstimate {
    CVector b_hat;
    CMatrix B_hat;  ///< M x M
    CMatrix C_err;  ///< M^2 x M^2
    CMatrix C_B;    ///< E{B~ B~^H}, M x M
    double mse = 0.0;
};

EffectiveEstimate lmmse_effective_estimate(const CVector& y, const LmmseEstimator& est, Index M);

}  // namespace cfmimo
