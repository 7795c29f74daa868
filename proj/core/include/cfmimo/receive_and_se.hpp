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

#include <array>
#include <string>
#include <vector>

#include "cfmimo/types.hpp"

namespace cfmimo {

enum class Bound { noCSI = 0, fullCSI = 1, pilots = 2, pilotsZF = 3 };

inline constexpr std::array<Bound, 4> kAllBounds = {Bound::noCSI, Bound::fullCSI, Bound::pilots, Bound::pilotsZF};

std::string to_string(Bound b);
Bound parse_bound(const std::string& s);
/// Pilots-based bounds pay for uplink and downlink pilots.
bool uses_downlink_pilots(Bound b);

enum class Combiner { mmse, zf };

/// (sum_i (B^_ki B^_ki^H + C_B~ki) + I_M)^{-1} B^_kk
CMatrix mmse_combiner(const std::vector<CMatrix>& b_hat_row, const std::vector<CMatrix>& c_err_row, int k);

/// U with U^H = (B^^H B^)^{-1} B^^H. Throws DegenerateInputError if B^ does
/// not have full column rank.
CMatrix zf_combiner(const CMatrix& b_hat);

/// prelog * log2|I + B-bar^H Xi^{-1} B-bar|
double se_hardening(const CMatrix& b_bar, const CMatrix& xi, double prelog);
/// log2|I + B^H Xi~^{-1} B| of a single realization, no prelog.
double perfect_csi_rate(const CMatrix& b_kk, const CMatrix& xi_tilde);
/// prelog2 * log2|I + E-bar^H C^{-1} E-bar|
double se_pilot_general(const CMatrix& e_bar, const CMatrix& c_n, double prelog2);
/// prelog2 * log2|I + C^{-1}|
double se_pilot_zf(const CMatrix& c_n, double prelog2);

/// Effective channels seen by one user k over a set of blocks:
/// samples[t][i] = B_ki (M x M) in block t.
using EffectiveSamples = std::vector<std::vector<CMatrix>>;

struct HardeningMoments {
    CMatrix b_bar;  ///< E{B_kk} on the active streams, M x |S|
    CMatrix xi;     ///< covariance of the hardening-bound noise, M x M
};

/// streams lists user k's active stream indices S.
HardeningMoments hardening_moments(const EffectiveSamples& b, int k, const std::vector<Index>& streams);
double se_nocsi(const EffectiveSamples& b, int k, const std::vector<Index>& streams, double prelog);
/// prelog times the sample mean of the per-block perfect-CSI rate.
double se_perfect_csi(const EffectiveSamples& b, int k, const std::vector<Index>& streams, double prelog);

struct PilotMoments {
    CMatrix e_bar;  ///< E{U^H B^_kk}, |S| x |S|
    CMatrix c_n;    ///< covariance of the residual after combining, |S| x |S|
};

/// b_hat holds the LMMSE estimates in the same layout as b; c_err[i] is
/// E{B~_ki B~_ki^H} (M x M).
PilotMoments pilot_bound_moments(const EffectiveSamples& b, const EffectiveSamples& b_hat,
                                 const std::vector<CMatrix>& c_err, int k, const std::vector<Index>& streams,
                                 Combiner combiner);
double se_pilots(const EffectiveSamples& b, const EffectiveSamples& b_hat, const std::vector<CMatrix>& c_err,
                 int k, const std::vector<Index>& streams, Combiner combiner, double prelog2);

/// SE of one user under the four bounds; NaN marks bounds not evaluated.
struct SEReport {
    std::array<double, 4> se{};
    double prelog_single = 0.0;
    double prelog_double = 0.0;
    Index n_samples = 0;

    double& operator[](Bound b) { return se[static_cast<std::size_t>(b)]; }
    double operator[](Bound b) const { return se[static_cast<std::size_t>(b)]; }
};

}  // namespace cfmimo
