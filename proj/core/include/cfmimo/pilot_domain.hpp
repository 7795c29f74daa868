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
#include "cfmimo/rng.hpp"
#include "cfmimo/system_config.hpp"
#include "cfmimo/types.hpp"

namespace cfmimo {

/// Unitary n x n DFT matrix, F(r, c) = exp(-j 2 pi r c / n) / sqrt(n).
CMatrix dft_matrix(int n);

enum class PilotAssignment {
    greedy,       ///< first tau_p/M users get distinct groups, the rest join the least-loaded group at their master AP
    round_robin,  ///< user k gets group k mod (tau_p/M)
};

/// Orthonormal pilot matrices and the reuse structure. Users in the same
/// group share the same tau_p x M pilot matrix.
struct PilotBook {
    int tau_p = 0;
    int M = 0;
    std::vector<int> group_of_user;
    std::vector<CMatrix> phi;  ///< per user, tau_p x M

    int users() const { return static_cast<int>(group_of_user.size()); }
    int groups() const { return M > 0 ? tau_p / M : 0; }
    const CMatrix& pilot(int k) const { return phi[static_cast<std::size_t>(k)]; }
    /// P_k: users sharing user k's pilot, k included, ascending.
    std::vector<int> reuse_set(int k) const;
    bool shares_pilot(int k, int i) const {
        return group_of_user[static_cast<std::size_t>(k)] == group_of_user[static_cast<std::size_t>(i)];
    }

    /// Group g uses columns [g M, (g + 1) M) of the tau_p-point DFT.
    static PilotBook from_groups(int tau_p, int M, const std::vector<int>& group_of_user);
};

std::vector<int> assign_pilot_groups(const RMatrix& beta, int groups, PilotAssignment rule);

/// Builds the book for a drop. Throws ConfigError if tau_p is not a multiple of M.
PilotBook build_pilot_book(const SystemConfig& config, const RMatrix& beta,
                           PilotAssignment rule = PilotAssignment::greedy);

/// Received uplink pilot signals Y_l (N x tau_p) at every AP.
struct UplinkObservation {
    std::vector<CMatrix> Y;

    /// Y_lk = Y_l Phi_k (N x M); its vectorization is y_lk.
    CMatrix correlated(int l, const PilotBook& book, int k) const {
        return Y[static_cast<std::size_t>(l)] * book.pilot(k);
    }
};

/// Y_l = sum_i sqrt(q_i tau_p) H_li Phi_i^H + N_l with N_l ~ CN(0, I).
UplinkObservation receive_uplink_pilots(const ChannelSet& channels, const PilotBook& book,
                                        const std::vector<double>& q, Rng& noise);
UplinkObservation receive_uplink_pilots_noiseless(const ChannelSet& channels, const PilotBook& book,
                                                  const std::vector<double>& q);

struct UplinkEstimate {
    CVector h_hat;
    CMatrix C_err;
};

/// Stand-alone MMSE estimate from y_lk: h_hat = sqrt(q tau_p) R Psi^{-1} y and
/// C_err = R - q tau_p R Psi^{-1} R.
UplinkEstimate mmse_estimate_uplink(const CVector& y, const CMatrix& R, const CMatrix& Psi, double q,
                                    int tau_p);

/// Psi_lk = tau_p sum_{i in P_k} q_i R_li + I.
CMatrix uplink_psi(const std::vector<CMatrix>& R, int K, int l, int k, const PilotBook& book,
                   const std::vector<double>& q);

/// Per-link estimator matrices computed once per drop.
class UplinkStatistics {
public:
    UplinkStatistics() = default;
    UplinkStatistics(const std::vector<CMatrix>& R, int L, int K, int N, int M, const PilotBook& book,
                     const std::vector<double>& q);
    UplinkStatistics(const NetworkRealization& net, const PilotBook& book, const std::vector<double>& q)
        : UplinkStatistics(net.R, net.L, net.K, net.N, net.M, book, q) {}

    const CMatrix& psi(int l, int k) const { return psi_[idx(l, k)]; }
    /// sqrt(q_k tau_p) R_lk Psi_lk^{-1}
    const CMatrix& gain(int l, int k) const { return gain_[idx(l, k)]; }
    const CMatrix& error_cov(int l, int k) const { return c_err_[idx(l, k)]; }
    /// R_hat = R - C_err
    const CMatrix& estimate_cov(int l, int k) const { return r_hat_[idx(l, k)]; }
    /// E{H~ H~^H} = partial trace of C_err over the user-antenna index (N x N).
    const CMatrix& error_gram(int l, int k) const { return err_gram_[idx(l, k)]; }

    ChannelSet estimate(const UplinkObservation& obs, const PilotBook& book) const;

    int L() const { return L_; }
    int K() const { return K_; }
    int N() const { return N_; }
    int M() const { return M_; }

private:
    std::size_t idx(int l, int k) const { return static_cast<std::size_t>(l * K_ + k); }
    int L_ = 0, K_ = 0, N_ = 0, M_ = 0;
    std::vector<CMatrix> psi_, gain_, c_err_, r_hat_, err_gram_;
};

}  // namespace cfmimo
