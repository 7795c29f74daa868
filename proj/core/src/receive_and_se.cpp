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

#include "cfmimo/receive_and_se.hpp"

#include <cmath>

#include <Eigen/SVD>

#include "cfmimo/linalg.hpp"

namespace cfmimo {

std::string to_string(Bound b) {
    switch (b) {
        case Bound::noCSI: return "noCSI";
        case Bound::fullCSI: return "fullCSI";
        case Bound::pilots: return "pilots";
        case Bound::pilotsZF: return "pilotsZF";
    }
    return "unknown";
}

Bound parse_bound(const std::string& s) {
    for (auto b : kAllBounds) {
        if (to_string(b) == s) {
            return b;
        }
    }
    throw ConfigError("unknown bound '" + s + "' (expected noCSI, fullCSI, pilots or pilotsZF)");
}

bool uses_downlink_pilots(Bound b) {
    return b == Bound::pilots || b == Bound::pilotsZF;
}

CMatrix mmse_combiner(const std::vector<CMatrix>& b_hat_row, const std::vector<CMatrix>& c_err_row, int k) {
    if (b_hat_row.size() != c_err_row.size() || k < 0 || k >= static_cast<int>(b_hat_row.size())) {
        throw ConfigError("mmse_combiner: inconsistent inputs");
    }
    const Index M = b_hat_row.front().rows();
    CMatrix a = CMatrix::Identity(M, M);
    for (std::size_t i = 0; i < b_hat_row.size(); ++i) {
        a.noalias() += b_hat_row[i] * b_hat_row[i].adjoint();
        a += c_err_row[i];
    }
    return linalg::HpdFactor(a, "MMSE combiner matrix").solve(b_hat_row[static_cast<std::size_t>(k)]);
}

CMatrix zf_combiner(const CMatrix& b_hat) {
    if (b_hat.cols() == 0) {
        return CMatrix(b_hat.rows(), 0);
    }
    if (!b_hat.allFinite()) {
        throw DataError("zf_combiner: non-finite estimate");
    }
    Eigen::JacobiSVD<CMatrix> svd(b_hat);
    const auto& s = svd.singularValues();
    if (b_hat.cols() > b_hat.rows() || !(s(s.size() - 1) > 1e-12 * s(0))) {
        throw DegenerateInputError("zf_combiner: effective channel estimate is rank deficient");
    }
    const CMatrix gram = b_hat.adjoint() * b_hat;
    // U = B^ (B^^H B^)^{-1}
    return linalg::HpdFactor(gram, "ZF Gram matrix").solve(CMatrix(b_hat.adjoint())).adjoint();
}

double se_hardening(const CMatrix& b_bar, const CMatrix& xi, double prelog) {
    return prelog * linalg::log2_det_capacity(b_bar, xi);
}

double perfect_csi_rate(const CMatrix& b_kk, const CMatrix& xi_tilde) {
    return linalg::log2_det_capacity(b_kk, xi_tilde);
}

double se_pilot_general(const CMatrix& e_bar, const CMatrix& c_n, double prelog2) {
    return prelog2 * linalg::log2_det_capacity(e_bar, c_n);
}

double se_pilot_zf(const CMatrix& c_n, double prelog2) {
    return prelog2 * linalg::log2_det_capacity(CMatrix::Identity(c_n.rows(), c_n.rows()), c_n);
}

namespace {

void check_samples(const EffectiveSamples& b, int k) {
    if (b.size() < 2) {
        throw ConfigError("SE evaluation needs at least 2 blocks");
    }
    if (k < 0 || k >= static_cast<int>(b.front().size())) {
        throw ConfigError("SE evaluation: user index out of range");
    }
}

}  // namespace

HardeningMoments hardening_moments(const EffectiveSamples& b, int k, const std::vector<Index>& streams) {
    check_samples(b, k);
    const auto kk = static_cast<std::size_t>(k);
    const Index M = b.front()[kk].rows();
    const auto n = static_cast<double>(b.size());

    CMatrix mean = CMatrix::Zero(M, static_cast<Index>(streams.size()));
    for (const auto& row : b) {
        mean += linalg::select_columns(row[kk], streams);
    }
    mean /= n;

    CMatrix self = CMatrix::Zero(M, M);
    CMatrix interference = CMatrix::Zero(M, M);
    for (const auto& row : b) {
        const CMatrix dev = linalg::select_columns(row[kk], streams) - mean;
        self.noalias() += dev * dev.adjoint();
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i != kk) {
                interference.noalias() += row[i] * row[i].adjoint();
            }
        }
    }
    HardeningMoments out;
    out.b_bar = mean;
    out.xi = linalg::hermitian_part(self / (n - 1.0) + interference / n) + CMatrix::Identity(M, M);
    return out;
}

double se_nocsi(const EffectiveSamples& b, int k, const std::vector<Index>& streams, double prelog) {
    const auto m = hardening_moments(b, k, streams);
    return se_hardening(m.b_bar, m.xi, prelog);
}

double se_perfect_csi(const EffectiveSamples& b, int k, const std::vector<Index>& streams, double prelog) {
    check_samples(b, k);
    const auto kk = static_cast<std::size_t>(k);
    const Index M = b.front()[kk].rows();
    double acc = 0.0;
    for (const auto& row : b) {
        CMatrix xi = CMatrix::Identity(M, M);
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i != kk) {
                xi.noalias() += row[i] * row[i].adjoint();
            }
        }
        acc += perfect_csi_rate(linalg::select_columns(row[kk], streams), xi);
    }
    return prelog * acc / static_cast<double>(b.size());
}

PilotMoments pilot_bound_moments(const EffectiveSamples& b, const EffectiveSamples& b_hat,
                                 const std::vector<CMatrix>& c_err, int k, const std::vector<Index>& streams,
                                 Combiner combiner) {
    check_samples(b, k);
    if (b_hat.size() != b.size()) {
        throw ConfigError("pilot_bound_moments: estimates and channels cover different blocks");
    }
    const auto kk = static_cast<std::size_t>(k);
    const auto S = static_cast<Index>(streams.size());
    const std::size_t n = b.size();

    // Combiners depend only on the estimates; keep them for the second pass.
    std::vector<CMatrix> u(n);
    CMatrix e_bar = CMatrix::Zero(S, S);
    for (std::size_t t = 0; t < n; ++t) {
        const CMatrix bhat_s = linalg::select_columns(b_hat[t][kk], streams);
        if (combiner == Combiner::mmse) {
            u[t] = linalg::select_columns(mmse_combiner(b_hat[t], c_err, k), streams);
        } else {
            u[t] = zf_combiner(bhat_s);
        }
        e_bar.noalias() += u[t].adjoint() * bhat_s;
    }
    e_bar /= static_cast<double>(n);

    CMatrix c_n = CMatrix::Zero(S, S);
    for (std::size_t t = 0; t < n; ++t) {
        const CMatrix& ut = u[t];
        const CMatrix dev = ut.adjoint() * linalg::select_columns(b[t][kk], streams) - e_bar;
        c_n.noalias() += dev * dev.adjoint();
        for (std::size_t i = 0; i < b[t].size(); ++i) {
            if (i != kk) {
                const CMatrix g = ut.adjoint() * b[t][i];
                c_n.noalias() += g * g.adjoint();
            }
        }
        c_n.noalias() += ut.adjoint() * ut;
    }
    PilotMoments out;
    out.e_bar = e_bar;
    out.c_n = linalg::hermitian_part(c_n / static_cast<double>(n));
    return out;
}

double se_pilots(const EffectiveSamples& b, const EffectiveSamples& b_hat, const std::vector<CMatrix>& c_err,
                 int k, const std::vector<Index>& streams, Combiner combiner, double prelog2) {
    const auto m = pilot_bound_moments(b, b_hat, c_err, k, streams, combiner);
    if (combiner == Combiner::zf) {
        return se_pilot_zf(m.c_n, prelog2);
    }
    return se_pilot_general(m.e_bar, m.c_n, prelog2);
}

}  // namespace cfmimo
