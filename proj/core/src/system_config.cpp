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

#include "cfmimo/system_config.hpp"

#include <cmath>

#include "cfmimo/types.hpp"

namespace cfmimo {

std::string to_string(Fading f) {
    return f == Fading::iid ? "iid" : "correlated";
}

Fading parse_fading(const std::string& s) {
    if (s == "iid") {
        return Fading::iid;
    }
    if (s == "correlated") {
        return Fading::correlated;
    }
    throw ConfigError("unknown fading model '" + s + "' (expected correlated or iid)");
}

int SystemConfig::pilot_length() const {
    if (tau_p > 0) {
        return tau_p;
    }
    return ((K + 1) / 2) * M;
}

int SystemConfig::pilot_groups() const {
    return pilot_length() / M;
}

double SystemConfig::prelog_single() const {
    return 1.0 - static_cast<double>(pilot_length()) / tau_c;
}

double SystemConfig::prelog_double() const {
    return 1.0 - 2.0 * static_cast<double>(pilot_length()) / tau_c;
}

void SystemConfig::validate() const {
    auto require = [](bool ok, const std::string& msg) {
        if (!ok) {
            throw ConfigError(msg);
        }
    };
    require(L >= 1, "L must be a positive integer");
    require(N >= 1, "N must be a positive integer");
    require(K >= 1, "K must be a positive integer");
    require(M >= 1, "M must be a positive integer");
    require(tau_c >= 1, "tau_c must be a positive integer");
    require(tau_p >= 0, "tau_p must be positive (or 0 for the default)");
    const int tp = pilot_length();
    require(tp % M == 0, "tau_p = " + std::to_string(tp) + " is not a multiple of M = " + std::to_string(M));
    require(2 * tp <= tau_c, "tau_p = " + std::to_string(tp) + " exceeds tau_c / 2");
    require(std::isfinite(ul_power) && ul_power > 0.0, "ul_power must be positive");
    require(std::isfinite(dl_power) && dl_power > 0.0, "dl_power must be positive");
    require(std::isfinite(area_side) && area_side >= 0.0, "area_side must be non-negative");
    require(std::isfinite(asd_deg) && asd_deg > 0.0, "asd_deg must be positive");
    require(std::isfinite(antenna_spacing) && antenna_spacing > 0.0, "antenna_spacing must be positive");
    require(std::isfinite(shadowing_db) && shadowing_db >= 0.0, "shadowing_db must be non-negative");
    require(std::isfinite(noise_dbm), "noise_dbm must be finite");
    require(std::isfinite(height_offset) && height_offset > 0.0, "height_offset must be positive");
}

}  // namespace cfmimo
