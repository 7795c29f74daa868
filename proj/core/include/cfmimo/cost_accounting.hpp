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

#include <cstdint>

#include "cfmimo/system_config.hpp"

namespace cfmimo {

/// Complex multiplications and fronthaul scalars per coherence block.
/// Multiplication counts are network totals; fronthaul loads are per AP and
/// identical for same-stream and separate-stream transmission.
struct CostReport {
    std::uint64_t ul_estimation_mults = 0;
    std::uint64_t precoder_mults = 0;
    std::uint64_t fronthaul_pilot_scalars = 0;
    std::uint64_t fronthaul_data_scalars = 0;
};

/// UL estimation K((NM)^2 + N tau_p); precoding ((NL)^2 + NL)/2 MK + (NL)^2 M + ((NL)^3 - NL)/3.
/// Uses the effective pilot length of the config. Throws std::range_error on overflow.
CostReport complexity(const SystemConfig& config);

/// Per-AP fronthaul: pilot tau_p N M, data (tau_c - tau_p) N.
CostReport fronthaul(const SystemConfig& config);

/// Both of the above in one report.
CostReport cost_report(const SystemConfig& config);

}  // namespace cfmimo
