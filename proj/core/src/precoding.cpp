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

#include "cfmimo/precoding.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "cfmimo/linalg.hpp"

namespace cfmimo {

namespace {

void require_finite(const ChannelSet& h, const char* what) {
    for (const auto& m : h.H) {
        if (!m.allFinite()) {
            throw DataError(std::string(what) + ": non-finite channel estimate");
        }
    }
}

void check_sizes(const ChannelSet& h, const std::vector<double>& q, const char* what) {
    if (static_cast<int>(q.size()) != h.K) {
        throw ConfigError(std::string(what) + ": expected one power per user");
    }
}

}  // namespace

std::vector<CMatrix> mmse_precoder_centralized(const ChannelSet& h_hat, const std::vector<CMatrix>& error_gram,
                                               const std::vector<double>& q) {
    check_sizes(h_hat, q, "mmse_precoder_centralized");
    require_finite(h_hat, "mmse_precoder_centralized");
    if (error_gram.size() != h_hat.H.size()) {
        throw ConfigError("mmse_precoder_centralized: expected one error Gram matrix per link");
    }
    const int L = h_hat.L, K = h_hat.K, N = h_hat.N, M = h_hat.M;
    const Index ln = static_cast<Index>(L) * N;

    CMatrix stacked(ln, static_cast<Index>(K) * M);
    for (int k = 0; k < K; ++k) {
        stacked.middleCols(static_cast<Index>(k) * M, M) = h_hat.stacked(k);
    }
    CMatrix weighted = stacked;
    for (int k = 0; k < K; ++k) {
        weighted.middleCols(static_cast<Index>(k) * M, M) *= std::sqrt(q[static_cast<std::size_t>(k)]);
    }
    CMatrix bracket = CMatrix::Identity(ln, ln);
    bracket.noalias() += weighted * weighted.adjoint();
    for (int l = 0; l < L; ++l) {
        auto block = bracket.block(static_cast<Index>(l) * N, static_cast<Index>(l) * N, N, N);
        for (int i = 0; i < K; ++i) {
            block += q[static_cast<std::size_t>(i)] * error_gram[static_cast<std::size_t>(l * K + i)];
        }
    }
    const linalg::HpdFactor f(bracket, "centralized precoder bracket");
    const CMatrix solved = f.solve(stacked);
    std::vector<CMatrix> w(static_cast<std::size_t>(K));
    for (int k = 0; k < K; ++k) {
        w[static_cast<std::size_t>(k)] = q[static_cast<std::size_t>(k)] * solved.middleCols(static_cast<Index>(k) * M, M);
    }
    return w;
}

CMatrix csi_sharing_static_term(const std::vector<CMatrix>& error_cov, const SelectionSet& sel,
                                const std::vector<double>& q, int N) {
    const int L = sel.L(), K = sel.K();
    CMatrix s = CMatrix::Zero(N, N);
    for (int j = 0; j < L; ++j) {
        for (int i = 0; i < K; ++i) {
            if (sel.rank(j, i) > 0) {
                s += q[static_cast<std::size_t>(i)] *
                     linalg::masked_diagonal_blocks(error_cov[static_cast<std::size_t>(j * K + i)], N, sel.mask(j, i));
            }
        }
    }
    return s;
}

std::vector<CMatrix> mmse_precoder_csi_sharing(const ChannelSet& h_hat, const CMatrix& static_term,
                                               const SelectionSet& sel, const std::vector<double>& q,
                                               bool served_only) {
    check_sizes(h_hat, q, "mmse_precoder_csi_sharing");
    require_finite(h_hat, "mmse_precoder_csi_sharing");
    const int L = h_hat.L, K = h_hat.K, N = h_hat.N, M = h_hat.M;
    CMatrix bracket = CMatrix::Identity(N, N) + static_term;
    for (int j = 0; j < L; ++j) {
        for (int i = 0; i < K; ++i) {
            for (int m = 0; m < M; ++m) {
                if (sel.selected(j, i, m)) {
                    const auto col = h_hat.at(j, i).col(m);
                    bracket.noalias() += q[static_cast<std::size_t>(i)] * col * col.adjoint();
                }
            }
        }
    }
    const linalg::HpdFactor f(bracket, "CSI-sharing precoder bracket");
    std::vector<CMatrix> w(static_cast<std::size_t>(L * K), CMatrix::Zero(N, M));
    for (int l = 0; l < L; ++l) {
        for (int k = 0; k < K; ++k) {
            if (served_only && sel.rank(l, k) == 0) {
                continue;
            }
            w[static_cast<std::size_t>(l * K + k)] = q[static_cast<std::size_t>(k)] * f.solve(h_hat.at(l, k));
        }
    }
    return w;
}

std::vector<CMatrix> mmse_precoder_csi_sharing(const ChannelSet& h_hat, const std::vector<CMatrix>& error_cov,
                                               const SelectionSet& sel, const std::vector<double>& q) {
    return mmse_precoder_csi_sharing(h_hat, csi_sharing_static_term(error_cov, sel, q, h_hat.N), sel, q, false);
}

std::vector<CMatrix> local_static_terms(const std::vector<CMatrix>& error_cov, const std::vector<CMatrix>& R,
                                        const SelectionSet& sel, const std::vector<double>& q, int N) {
    const int L = sel.L(), K = sel.K();
    // E{H G H^H} over all APs once, then swap AP l's own term for its error term.
    std::vector<CMatrix> channel_term(static_cast<std::size_t>(L), CMatrix::Zero(N, N));
    std::vector<CMatrix> error_term(static_cast<std::size_t>(L), CMatrix::Zero(N, N));
    CMatrix total = CMatrix::Zero(N, N);
    for (int j = 0; j < L; ++j) {
        for (int i = 0; i < K; ++i) {
            if (sel.rank(j, i) == 0) {
                continue;
            }
            const auto mask = sel.mask(j, i);
            const double qi = q[static_cast<std::size_t>(i)];
            const std::size_t ji = static_cast<std::size_t>(j * K + i);
            channel_term[static_cast<std::size_t>(j)] += qi * linalg::masked_diagonal_blocks(R[ji], N, mask);
            error_term[static_cast<std::size_t>(j)] += qi * linalg::masked_diagonal_blocks(error_cov[ji], N, mask);
        }
        total += channel_term[static_cast<std::size_t>(j)];
    }
    std::vector<CMatrix> out(static_cast<std::size_t>(L));
    for (int l = 0; l < L; ++l) {
        out[static_cast<std::size_t>(l)] =
            error_term[static_cast<std::size_t>(l)] + (total - channel_term[static_cast<std::size_t>(l)]);
    }
    return out;
}

std::vector<CMatrix> mmse_precoder_local(const ChannelSet& h_hat, const std::vector<CMatrix>& static_terms,
                                         const SelectionSet& sel, const std::vector<double>& q, bool served_only) {
    check_sizes(h_hat, q, "mmse_precoder_local");
    require_finite(h_hat, "mmse_precoder_local");
    const int L = h_hat.L, K = h_hat.K, N = h_hat.N, M = h_hat.M;
    if (static_cast<int>(static_terms.size()) != L) {
        throw ConfigError("mmse_precoder_local: expected one statistical term per AP");
    }
    std::vector<CMatrix> w(static_cast<std::size_t>(L * K), CMatrix::Zero(N, M));
    for (int l = 0; l < L; ++l) {
        bool needed = !served_only;
        for (int k = 0; k < K && !needed; ++k) {
            needed = sel.rank(l, k) > 0;
        }
        if (!needed) {
            continue;
        }
        CMatrix bracket = CMatrix::Identity(N, N) + static_terms[static_cast<std::size_t>(l)];
        for (int i = 0; i < K; ++i) {
            for (int m = 0; m < M; ++m) {
                if (sel.selected(l, i, m)) {
                    const auto col = h_hat.at(l, i).col(m);
                    bracket.noalias() += q[static_cast<std::size_t>(i)] * col * col.adjoint();
                }
            }
        }
        const linalg::HpdFactor f(bracket, "local precoder bracket");
        for (int k = 0; k < K; ++k) {
            if (served_only && sel.rank(l, k) == 0) {
                continue;
            }
            w[static_cast<std::size_t>(l * K + k)] = q[static_cast<std::size_t>(k)] * f.solve(h_hat.at(l, k));
        }
    }
    return w;
}

void ColumnPowerTable::add(const ColumnPowerTable& other) {
    if (other.v_.size() != v_.size()) {
        throw ConfigError("ColumnPowerTable::add: shape mismatch");
    }
    for (std::size_t i = 0; i < v_.size(); ++i) {
        v_[i] += other.v_[i];
    }
}

void ColumnPowerTable::scale(double s) {
    for (auto& x : v_) {
        x *= s;
    }
}

ColumnPowerTable column_powers_same(const std::vector<CMatrix>& w_bar, int L, int N) {
    const auto K = static_cast<int>(w_bar.size());
    const auto M = K > 0 ? static_cast<int>(w_bar.front().cols()) : 0;
    ColumnPowerTable t(L, K, M);
    for (int k = 0; k < K; ++k) {
        const CMatrix& w = w_bar[static_cast<std::size_t>(k)];
        for (int l = 0; l < L; ++l) {
            const auto block = w.middleRows(static_cast<Index>(l) * N, N);
            for (int m = 0; m < M; ++m) {
                t.at(l, k, m) = block.col(m).squaredNorm();
            }
        }
    }
    return t;
}

ColumnPowerTable column_powers_separate(const std::vector<CMatrix>& w_bar, const SelectionSet& sel) {
    ColumnPowerTable t(sel.L(), sel.K(), sel.M());
    for (int k = 0; k < sel.K(); ++k) {
        for (int m = 0; m < sel.M(); ++m) {
            const int l = sel.serving_ap(k, m);
            t.at(l, k, m) = w_bar[static_cast<std::size_t>(l * sel.K() + k)].col(m).squaredNorm();
        }
    }
    return t;
}

std::vector<double> same_stream_user_power(const RMatrix& beta, double rho_d) {
    const auto K = static_cast<int>(beta.cols());
    std::vector<double> root(static_cast<std::size_t>(K));
    double total = 0.0;
    for (int k = 0; k < K; ++k) {
        root[static_cast<std::size_t>(k)] = std::sqrt(beta.col(k).sum());
        total += root[static_cast<std::size_t>(k)];
    }
    std::vector<double> rho(static_cast<std::size_t>(K));
    for (int k = 0; k < K; ++k) {
        rho[static_cast<std::size_t>(k)] = rho_d * root[static_cast<std::size_t>(k)] / total;
    }
    return rho;
}

RMatrix separate_stream_power(const SelectionSet& sel, const RMatrix& beta, double rho_d) {
    const int L = sel.L(), K = sel.K();
    RMatrix rho = RMatrix::Zero(L, K);
    for (int l = 0; l < L; ++l) {
        double denom = 0.0;
        for (int i = 0; i < K; ++i) {
            denom += sel.rank(l, i) * std::sqrt(beta(l, i));
        }
        if (denom <= 0.0) {
            continue;
        }
        for (int k = 0; k < K; ++k) {
            rho(l, k) = rho_d * sel.rank(l, k) * std::sqrt(beta(l, k)) / denom;
        }
    }
    return rho;
}

RMatrix normalize_same_stream(const ColumnPowerTable& avg, const StreamPlan& plan, const RMatrix& beta,
                              double rho_d) {
    const int L = avg.L(), K = avg.K(), M = avg.M();
    const auto rho = same_stream_user_power(beta, rho_d);
    RMatrix c = RMatrix::Zero(K, M);
    for (int k = 0; k < K; ++k) {
        double power = 0.0;
        for (int m = 0; m < M; ++m) {
            if (plan.active[static_cast<std::size_t>(k)][static_cast<std::size_t>(m)] == 0) {
                continue;
            }
            for (int l = 0; l < L; ++l) {
                power += avg.at(l, k, m);
            }
        }
        if (!(power > 0.0)) {
            throw DegenerateInputError("normalize_same_stream: user " + std::to_string(k) +
                                       " has a zero-power precoder");
        }
        const double s = std::sqrt(rho[static_cast<std::size_t>(k)] / power);
        for (int m = 0; m < M; ++m) {
            if (plan.active[static_cast<std::size_t>(k)][static_cast<std::size_t>(m)] != 0) {
                c(k, m) = s;
            }
        }
    }
    const double peak = per_ap_power(avg, c).maxCoeff();
    if (!(peak > 0.0)) {
        throw DegenerateInputError("normalize_same_stream: all APs idle");
    }
    c *= std::sqrt(rho_d / peak);
    return c;
}

RMatrix normalize_separate_stream(const ColumnPowerTable& avg, const SelectionSet& sel, const RMatrix& beta,
                                  double rho_d) {
    const int K = sel.K(), M = sel.M();
    const RMatrix rho = separate_stream_power(sel, beta, rho_d);
    RMatrix c = RMatrix::Zero(K, M);
    for (int k = 0; k < K; ++k) {
        for (int m = 0; m < M; ++m) {
            const int l = sel.serving_ap(k, m);
            double power = 0.0;
            for (int m2 = 0; m2 < M; ++m2) {
                if (sel.selected(l, k, m2)) {
                    power += avg.at(l, k, m2);
                }
            }
            if (!(power > 0.0)) {
                throw DegenerateInputError("normalize_separate_stream: zero-power precoder from AP " +
                                           std::to_string(l) + " to user " + std::to_string(k));
            }
            c(k, m) = std::sqrt(rho(l, k) / power);
        }
    }
    return c;
}

RVector per_ap_power(const ColumnPowerTable& avg, const RMatrix& scales) {
    RVector p = RVector::Zero(avg.L());
    for (int l = 0; l < avg.L(); ++l) {
        for (int k = 0; k < avg.K(); ++k) {
            for (int m = 0; m < avg.M(); ++m) {
                p(l) += scales(k, m) * scales(k, m) * avg.at(l, k, m);
            }
        }
    }
    return p;
}

}  // namespace cfmimo
