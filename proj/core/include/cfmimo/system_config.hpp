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

#include <string>

namespace cfmimo {

enum class Fading {
    correlated,  ///< Kronecker local-scattering model
    iid,         ///< R_lk = beta_lk * I
};

std::string to_string(Fading f);
Fading parse_fading(const std::string& s);

/// Scenario parameters. Powers are linear and normalized by the receiver noise
/// power (the pathloss model folds the noise floor into beta).
struct SystemConfig {
    int L = 20;
    int N = 4;
    int K = 5;
    int M = 2;
    int tau_c = 200;
    /// 0 selects the default ceil(K/2) * M.
    int tau_p = 0;
    double area_side = 1000.0;
    double asd_deg = 15.0;
    double ul_power = 100.0;
    double dl_power = 1000.0;
    double antenna_spacing = 0.5;
    double shadowing_db = 4.0;
    double noise_dbm = -94.0;
    double height_offset = 10.0;
    Fading fading = Fading::correlated;

    int pilot_length() const;
    /// Number of orthogonal pilot groups, tau_p / M.
    int pilot_groups() const;
    /// 1 - tau_p / tau_c
    double prelog_single() const;
    /// 1 - 2 tau_p / tau_c
    double prelog_double() const;

    /// Throws ConfigError describing the first violated constraint.
    void validate() const;
};

}  // namespace cfmimo
