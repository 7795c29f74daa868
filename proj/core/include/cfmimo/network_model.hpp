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

#include "cfmimo/rng.hpp"
#include "cfmimo/system_config.hpp"
#include "cfmimo/types.hpp"

namespace cfmimo {

/// Large-scale gain in dB (before noise normalization) at 3-D distance d meters.
double pathloss_db(double distance_m);

/// N x N Gaussian local-scattering correlation of a half-wavelength-style ULA:
/// R(a, b) = E{exp(j 2 pi spacing (b - a) sin(angle + delta))}, delta ~ N(0, asd^2).
/// Unit diagonal, Hermitian Toeplitz. asd in radians.
CMatrix ula_local_scattering(int n, double angle, double asd, double spacing);

/// R_ue (x) R_ap for vec(H) with H of size N x M (column-major vectorization).
/// Unit diagonal; scale by beta to obtain tr(R) = N M beta.
CMatrix local_scattering_correlation(double ap_angle, double ue_angle, double asd, int N, int M,
                                     double spacing);

struct NetworkRealization {
    int L = 0;
    int N = 0;
    int K = 0;
    int M = 0;
    RMatrix ap_positions;  ///< L x 2, meters
    RMatrix ue_positions;  ///< K x 2, meters
    RMatrix beta;          ///< L x K, linear, noise-normalized
    std::vector<CMatrix> R;  ///< NM x NM per link, index l * K + k

    const CMatrix& corr(int l, int k) const { return R[static_cast<std::size_t>(l * K + k)]; }
    /// Index of the AP with the largest beta for user k (ties: lowest index).
    int master_ap(int k) const;
};

NetworkRealization drop_network(const SystemConfig& config, RngSeed seed);

/// Channel matrices H_lk (N x M) of one coherence block.
struct ChannelSet {
    int L = 0;
    int K = 0;
    int N = 0;
    int M = 0;
    std::vector<CMatrix> H;  ///< index l * K + k

    ChannelSet() = default;
    ChannelSet(int L_, int K_, int N_, int M_);

    CMatrix& at(int l, int k) { return H[static_cast<std::size_t>(l * K + k)]; }
    const CMatrix& at(int l, int k) const { return H[static_cast<std::size_t>(l * K + k)]; }
    CVector h(int l, int k) const;
    /// Stacked LN x M matrix of user k.
    CMatrix stacked(int k) const;
};

/// Holds R_lk^{1/2} so repeated draws cost one matrix-vector product per link.
class ChannelSampler {
public:
    ChannelSampler() = default;
    /// Throws DataError if some R_lk is indefinite.
    ChannelSampler(const std::vector<CMatrix>& R, int L, int K, int N, int M);
    explicit ChannelSampler(const NetworkRealization& net);

    ChannelSet sample(Rng& rng) const;
    const CMatrix& sqrt_corr(int l, int k) const { return sqrt_[static_cast<std::size_t>(l * K_ + k)]; }

private:
    int L_ = 0, K_ = 0, N_ = 0, M_ = 0;
    std::vector<CMatrix> sqrt_;
};

ChannelSet sample_channels(const NetworkRealization& net, RngSeed seed);

}  // namespace cfmimo
