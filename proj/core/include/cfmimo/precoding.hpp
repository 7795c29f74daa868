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

#include <vector>

#include "cfmimo/network_model.hpp"
#include "cfmimo/stream_allocation.hpp"
#include "cfmimo/types.hpp"

// Precoders are computed unnormalized (W-bar) per coherence block. Normalization
// happens afterwards through per-column scale factors obtained from sample
// averages of the column powers, so that an effective channel can be formed as
// H^H W-bar diag(c) without recomputing the precoder.

namespace cfmimo {

/// Same-stream centralized MMSE precoder of every user (LN x M each):
/// q_k [sum_i q_i (H^_i H^_i^H + C_i) + I_LN]^{-1} H^_k with C_i block diagonal,
/// its l-th block being error_gram[l * K + i] (N x N).
std::vector<CMatrix> mmse_precoder_centralized(const ChannelSet& h_hat, const std::vector<CMatrix>& error_gram,
                                               const std::vector<double>& q);

/// sum_j sum_i q_i E{H~_ji Gamma_ji H~_ji^H}, the statistical part of the
/// CSI-sharing bracket (N x N). error_cov holds the NM x NM C_err per link.
CMatrix csi_sharing_static_term(const std::vector<CMatrix>& error_cov, const SelectionSet& sel,
                                const std::vector<double>& q, int N);

/// Separate-stream CSI-sharing precoders W-bar'_lk (N x M, index l * K + k).
/// With served_only, links with Gamma_lk = 0 are left as zero matrices.
std::vector<CMatrix> mmse_precoder_csi_sharing(const ChannelSet& h_hat, const CMatrix& static_term,
                                               const SelectionSet& sel, const std::vector<double>& q,
                                               bool served_only = false);
std::vector<CMatrix> mmse_precoder_csi_sharing(const ChannelSet& h_hat, const std::vector<CMatrix>& error_cov,
                                               const SelectionSet& sel, const std::vector<double>& q);

/// Per-AP statistical part of the local bracket:
/// sum_i q_i E{H~_li G_li H~_li^H} + sum_{j != l} sum_i q_i E{H_ji G_ji H_ji^H}.
std::vector<CMatrix> local_static_terms(const std::vector<CMatrix>& error_cov, const std::vector<CMatrix>& R,
                                        const SelectionSet& sel, const std::vector<double>& q, int N);

/// Separate-stream precoders without CSI sharing (N x M, index l * K + k).
std::vector<CMatrix> mmse_precoder_local(const ChannelSet& h_hat, const std::vector<CMatrix>& static_terms,
                                         const SelectionSet& sel, const std::vector<double>& q,
                                         bool served_only = false);

inline CMatrix mr_precoder(const CMatrix& h) { return h; }

/// Sample averages of squared column norms, E{||W-bar_lk[:, m]||^2}.
class ColumnPowerTable {
public:
    ColumnPowerTable() = default;
    ColumnPowerTable(int L, int K, int M) : L_(L), K_(K), M_(M), v_(static_cast<std::size_t>(L * K * M), 0.0) {}

    double& at(int l, int k, int m) { return v_[idx(l, k, m)]; }
    double at(int l, int k, int m) const { return v_[idx(l, k, m)]; }
    int L() const { return L_; }
    int K() const { return K_; }
    int M() const { return M_; }

    void add(const ColumnPowerTable& other);
    void scale(double s);

private:
    std::size_t idx(int l, int k, int m) const { return static_cast<std::size_t>((l * K_ + k) * M_ + m); }
    int L_ = 0, K_ = 0, M_ = 0;
    std::vector<double> v_;
};

/// Column powers of one block of same-stream precoders (per user LN x M).
ColumnPowerTable column_powers_same(const std::vector<CMatrix>& w_bar, int L, int N);
/// Column powers of one block of separate-stream precoders, counted only on
/// the columns selected by Gamma_lk.
ColumnPowerTable column_powers_separate(const std::vector<CMatrix>& w_bar, const SelectionSet& sel);

/// rho_k = rho_d sqrt(sum_l beta_lk) / sum_i sqrt(sum_l beta_li).
std::vector<double> same_stream_user_power(const RMatrix& beta, double rho_d);
/// rho_lk = rho_d rank(G_lk) sqrt(beta_lk) / sum_i rank(G_li) sqrt(beta_li) (0 at idle APs).
RMatrix separate_stream_power(const SelectionSet& sel, const RMatrix& beta, double rho_d);

/// Per-column scale factors c (K x M) for same-stream transmission. Inactive
/// streams get 0. Each user's active columns are scaled to total power rho_k;
/// then all users are scaled by one common factor so the most loaded AP
/// transmits exactly rho_d. Throws DegenerateInputError on a zero-power user.
RMatrix normalize_same_stream(const ColumnPowerTable& avg, const StreamPlan& plan, const RMatrix& beta,
                              double rho_d);

/// Per-column scale factors for separate-stream transmission: column m of user
/// k, sent by AP l, gets sqrt(rho_lk / E{||W-bar'_lk Gamma_lk||^2}).
RMatrix normalize_separate_stream(const ColumnPowerTable& avg, const SelectionSet& sel, const RMatrix& beta,
                                  double rho_d);

/// sum_k sum_m c_km^2 E{||W-bar_lk[:, m]||^2} for every AP.
RVector per_ap_power(const ColumnPowerTable& avg, const RMatrix& scales);

}  // namespace cfmimo
