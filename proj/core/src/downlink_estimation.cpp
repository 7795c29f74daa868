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

#include "cfmimo/downlink_estimation.hpp"

#include <cmath>

#include "cfmimo/linalg.hpp"

namespace cfmimo {

CMatrix receive_downlink_pilots(const std::vector<CMatrix>& b_row, const PilotBook& book,
                                const std::vector<double>& q, const CMatrix& noise) {
    if (static_cast<int>(b_row.size()) != book.users() || q.size() != b_row.size()) {
        throw ConfigError("receive_downlink_pilots: expected one effective channel and power per user");
    }
    const Index M = b_row.front().rows();
    CMatrix y = noise.size() == 0 ? CMatrix::Zero(M, book.tau_p) : noise;
    if (y.rows() != M || y.cols() != book.tau_p) {
        throw ConfigError("receive_downlink_pilots: noise has the wrong shape");
    }
    for (std::size_t i = 0; i < b_row.size(); ++i) {
        y.noalias() += std::sqrt(q[i] * book.tau_p) * b_row[i] * book.pilot(static_cast<int>(i)).adjoint();
    }
    return y;
}

LinearMoments::LinearMoments(Index dim_b, Index dim_y)
    : sum_b_(CVector::Zero(dim_b)),
      sum_y_(CVector::Zero(dim_y)),
      sum_bb_(CMatrix::Zero(dim_b, dim_b)),
      sum_yy_(CMatrix::Zero(dim_y, dim_y)),
      sum_by_(CMatrix::Zero(dim_b, dim_y)) {}

void LinearMoments::add(const CVector& b, const CVector& y) {
    if (b.size() != sum_b_.size() || y.size() != sum_y_.size()) {
        throw ConfigError("LinearMoments::add: dimension mismatch");
    }
    ++n_;
    sum_b_ += b;
    sum_y_ += y;
    sum_bb_.noalias() += b * b.adjoint();
    sum_yy_.noalias() += y * y.adjoint();
    sum_by_.noalias() += b * y.adjoint();
}

void LinearMoments::merge(const LinearMoments& other) {
    if (other.sum_b_.size() != sum_b_.size() || other.sum_y_.size() != sum_y_.size()) {
        throw ConfigError("LinearMoments::merge: dimension mismatch");
    }
    n_ += other.n_;
    sum_b_ += other.sum_b_;
    sum_y_ += other.sum_y_;
    sum_bb_ += other.sum_bb_;
    sum_yy_ += other.sum_yy_;
    sum_by_ += other.sum_by_;
}

void LinearMoments::require_two() const {
    if (n_ < 2) {
        throw ConfigError("moment estimation needs at least 2 samples");
    }
}

CVector LinearMoments::mean_b() const {
    if (n_ < 1) {
        throw ConfigError("moment estimation needs at least 1 sample");
    }
    return sum_b_ / static_cast<double>(n_);
}

CVector LinearMoments::mean_y() const {
    if (n_ < 1) {
        throw ConfigError("moment estimation needs at least 1 sample");
    }
    return sum_y_ / static_cast<double>(n_);
}

CMatrix LinearMoments::cov_b() const {
    require_two();
    const double n = static_cast<double>(n_);
    return linalg::hermitian_part((sum_bb_ - sum_b_ * sum_b_.adjoint() / n) / (n - 1.0));
}

CMatrix LinearMoments::cov_y() const {
    require_two();
    const double n = static_cast<double>(n_);
    return linalg::hermitian_part((sum_yy_ - sum_y_ * sum_y_.adjoint() / n) / (n - 1.0));
}

CMatrix LinearMoments::cov_by() const {
    require_two();
    const double n = static_cast<double>(n_);
    return (sum_by_ - sum_b_ * sum_y_.adjoint() / n) / (n - 1.0);
}

LinearMoments estimate_moments(const MomentSampler& sampler, Index n_samples, Index dim_b, Index dim_y) {
    if (n_samples < 2) {
        throw ConfigError("estimate_moments: n_samples must be at least 2");
    }
    LinearMoments acc(dim_b, dim_y);
    CVector b(dim_b), y(dim_y);
    for (Index t = 0; t < n_samples; ++t) {
        sampler(t, b, y);
        acc.add(b, y);
    }
    return acc;
}

LinearMoments estimate_moments(const std::vector<CVector>& b, const std::vector<CVector>& y) {
    if (b.size() != y.size() || b.size() < 2) {
        throw ConfigError("estimate_moments: need at least 2 paired samples");
    }
    LinearMoments acc(b.front().size(), y.front().size());
    for (std::size_t t = 0; t < b.size(); ++t) {
        acc.add(b[t], y[t]);
    }
    return acc;
}

LmmseEstimator::LmmseEstimator(const LinearMoments& m)
    : LmmseEstimator(m.mean_b(), m.mean_y(), m.cov_b(), m.cov_by(), m.cov_y()) {}

LmmseEstimator::LmmseEstimator(CVector mean_b, CVector mean_y, const CMatrix& c_b, const CMatrix& c_by,
                               const CMatrix& c_y)
    : mean_b_(std::move(mean_b)), mean_y_(std::move(mean_y)) {
    const linalg::HpdFactor f(c_y, "downlink observation covariance");
    // C_by C_y^{-1} = (C_y^{-1} C_yb)^H
    gain_ = f.solve(CMatrix(c_by.adjoint())).adjoint();
    c_err_ = linalg::hermitian_part(c_b - gain_ * c_by.adjoint());
}

EffectiveEstimate lmmse_effective_estimate(const CVector& y, const LmmseEstimator& est, Index M) {
    if (!y.allFinite()) {
        throw DataError("lmmse_effective_estimate: non-finite observation");
    }
    EffectiveEstimate out;
    out.b_hat = est.estimate(y);
    out.B_hat = linalg::unvec(out.b_hat, M, M);
    out.C_err = est.error_cov();
    out.C_B = linalg::sum_diagonal_blocks(out.C_err, M, M);
    out.mse = est.mse();
    return out;
}

}  // namespace cfmimo
