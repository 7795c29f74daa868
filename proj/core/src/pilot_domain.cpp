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

#include "cfmimo/pilot_domain.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "cfmimo/linalg.hpp"

namespace cfmimo {

CMatrix dft_matrix(int n) {
    if (n < 1) {
        throw ConfigError("dft_matrix: size must be positive");
    }
    CMatrix F(n, n);
    const double scale = 1.0 / std::sqrt(static_cast<double>(n));
    for (int r = 0; r < n; ++r) {
        for (int c = 0; c < n; ++c) {
            // Reduce the exponent modulo n first so the phases are exact for large r * c.
            const long long e = (static_cast<long long>(r) * c) % n;
            F(r, c) = std::polar(scale, -2.0 * std::numbers::pi * static_cast<double>(e) / n);
        }
    }
    F(0, 0) = scale;
    return F;
}

std::vector<int> PilotBook::reuse_set(int k) const {
    std::vector<int> out;
    for (int i = 0; i < users(); ++i) {
        if (shares_pilot(k, i)) {
            out.push_back(i);
        }
    }
    return out;
}

PilotBook PilotBook::from_groups(int tau_p, int M, const std::vector<int>& group_of_user) {
    if (M < 1 || tau_p < M || tau_p % M != 0) {
        throw ConfigError("pilot length tau_p = " + std::to_string(tau_p) + " is not a positive multiple of M = " +
                          std::to_string(M));
    }
    const int groups = tau_p / M;
    const CMatrix F = dft_matrix(tau_p);
    PilotBook book;
    book.tau_p = tau_p;
    book.M = M;
    book.group_of_user = group_of_user;
    book.phi.reserve(group_of_user.size());
    for (int g : group_of_user) {
        if (g < 0 || g >= groups) {
            throw ConfigError("pilot group index out of range");
        }
        book.phi.push_back(F.middleCols(static_cast<Index>(g) * M, M));
    }
    return book;
}

std::vector<int> assign_pilot_groups(const RMatrix& beta, int groups, PilotAssignment rule) {
    const auto K = static_cast<int>(beta.cols());
    const auto L = static_cast<int>(beta.rows());
    if (groups < 1) {
        throw ConfigError("assign_pilot_groups: need at least one pilot group");
    }
    std::vector<int> group(static_cast<std::size_t>(K), 0);
    if (rule == PilotAssignment::round_robin) {
        for (int k = 0; k < K; ++k) {
            group[static_cast<std::size_t>(k)] = k % groups;
        }
        return group;
    }
    for (int k = 0; k < K; ++k) {
        if (k < groups) {
            group[static_cast<std::size_t>(k)] = k;
            continue;
        }
        int master = 0;
        for (int l = 1; l < L; ++l) {
            if (beta(l, k) > beta(master, k)) {
                master = l;
            }
        }
        // Least pilot contamination at the master AP: pick the group whose
        // current members are weakest there.
        int best = 0;
        double best_load = 0.0;
        for (int g = 0; g < groups; ++g) {
            double load = 0.0;
            for (int i = 0; i < k; ++i) {
                if (group[static_cast<std::size_t>(i)] == g) {
                    load += beta(master, i);
                }
            }
            if (g == 0 || load < best_load) {
                best = g;
                best_load = load;
            }
        }
        group[static_cast<std::size_t>(k)] = best;
    }
    return group;
}

PilotBook build_pilot_book(const SystemConfig& config, const RMatrix& beta, PilotAssignment rule) {
    const int tau_p = config.pilot_length();
    if (tau_p % config.M != 0) {
        throw ConfigError("pilot length tau_p = " + std::to_string(tau_p) + " is not a multiple of M = " +
                          std::to_string(config.M));
    }
    if (beta.cols() != config.K) {
        throw ConfigError("build_pilot_book: beta has the wrong number of users");
    }
    return PilotBook::from_groups(tau_p, config.M, assign_pilot_groups(beta, tau_p / config.M, rule));
}

namespace {

UplinkObservation receive_impl(const ChannelSet& ch, const PilotBook& book, const std::vector<double>& q,
                               Rng* noise) {
    if (book.users() != ch.K || static_cast<int>(q.size()) != ch.K || book.M != ch.M) {
        throw ConfigError("receive_uplink_pilots: pilot book, powers and channels disagree");
    }
    UplinkObservation obs;
    obs.Y.reserve(static_cast<std::size_t>(ch.L));
    for (int l = 0; l < ch.L; ++l) {
        CMatrix Y = CMatrix::Zero(ch.N, book.tau_p);
        for (int i = 0; i < ch.K; ++i) {
            Y.noalias() += std::sqrt(q[static_cast<std::size_t>(i)] * book.tau_p) * ch.at(l, i) *
                           book.pilot(i).adjoint();
        }
        if (noise != nullptr) {
            Y += noise->cn_matrix(ch.N, book.tau_p);
        }
        obs.Y.push_back(std::move(Y));
    }
    return obs;
}

}  // namespace

UplinkObservation receive_uplink_pilots(const ChannelSet& channels, const PilotBook& book,
                                        const std::vector<double>& q, Rng& noise) {
    return receive_impl(channels, book, q, &noise);
}

UplinkObservation receive_uplink_pilots_noiseless(const ChannelSet& channels, const PilotBook& book,
                                                  const std::vector<double>& q) {
    return receive_impl(channels, book, q, nullptr);
}

UplinkEstimate mmse_estimate_uplink(const CVector& y, const CMatrix& R, const CMatrix& Psi, double q,
                                    int tau_p) {
    if (!y.allFinite() || !R.allFinite() || !Psi.allFinite()) {
        throw DataError("mmse_estimate_uplink: non-finite input");
    }
    if (y.size() != R.rows() || Psi.rows() != R.rows()) {
        throw ConfigError("mmse_estimate_uplink: dimension mismatch");
    }
    const linalg::HpdFactor psi(Psi, "uplink Psi");
    const double s = std::sqrt(q * tau_p);
    UplinkEstimate out;
    out.h_hat = s * (R * psi.solve(y));
    out.C_err = linalg::hermitian_part(R - q * tau_p * R * psi.solve(R));
    return out;
}

CMatrix uplink_psi(const std::vector<CMatrix>& R, int K, int l, int k, const PilotBook& book,
                   const std::vector<double>& q) {
    const Index nm = R[static_cast<std::size_t>(l * K + k)].rows();
    CMatrix psi = CMatrix::Identity(nm, nm);
    for (int i : book.reuse_set(k)) {
        psi += book.tau_p * q[static_cast<std::size_t>(i)] * R[static_cast<std::size_t>(l * K + i)];
    }
    return psi;
}

UplinkStatistics::UplinkStatistics(const std::vector<CMatrix>& R, int L, int K, int N, int M,
                                   const PilotBook& book, const std::vector<double>& q)
    : L_(L), K_(K), N_(N), M_(M) {
    if (R.size() != static_cast<std::size_t>(L * K) || book.users() != K || static_cast<int>(q.size()) != K) {
        throw ConfigError("UplinkStatistics: inconsistent dimensions");
    }
    const std::size_t n = R.size();
    psi_.resize(n);
    gain_.resize(n);
    c_err_.resize(n);
    r_hat_.resize(n);
    err_gram_.resize(n);
    for (int l = 0; l < L; ++l) {
        for (int k = 0; k < K; ++k) {
            const std::size_t j = idx(l, k);
            const CMatrix& Rlk = R[j];
            const double qk = q[static_cast<std::size_t>(k)];
            psi_[j] = uplink_psi(R, K, l, k, book, q);
            const linalg::HpdFactor f(psi_[j], "uplink Psi");
            // Psi and R are Hermitian, so R Psi^{-1} = (Psi^{-1} R)^H.
            const CMatrix psi_inv_r = f.solve(Rlk);
            gain_[j] = std::sqrt(qk * book.tau_p) * psi_inv_r.adjoint();
            r_hat_[j] = linalg::hermitian_part(qk * book.tau_p * Rlk * psi_inv_r);
            c_err_[j] = linalg::hermitian_part(Rlk - r_hat_[j]);
            err_gram_[j] = linalg::sum_diagonal_blocks(c_err_[j], N, M);
        }
    }
}

ChannelSet UplinkStatistics::estimate(const UplinkObservation& obs, const PilotBook& book) const {
    ChannelSet out(L_, K_, N_, M_);
    for (int l = 0; l < L_; ++l) {
        for (int k = 0; k < K_; ++k) {
            const CVector y = linalg::vec(obs.correlated(l, book, k));
            out.at(l, k) = linalg::unvec(gain(l, k) * y, N_, M_);
        }
    }
    return out;
}

}  // namespace cfmimo
