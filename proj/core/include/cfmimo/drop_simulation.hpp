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
#include <memory>
#include <string>
#include <vector>

#include "cfmimo/network_model.hpp"
#include "cfmimo/pilot_domain.hpp"
#include "cfmimo/precoding.hpp"
#include "cfmimo/receive_and_se.hpp"
#include "cfmimo/rng.hpp"
#include "cfmimo/stream_allocation.hpp"
#include "cfmimo/system_config.hpp"

namespace cfmimo {

enum class Method {
    same,                  ///< centralized MMSE, every AP sends every stream
    separate_local,        ///< one AP per stream, local CSI only
    separate_csi,          ///< one AP per stream, CSI shared between APs
    per_antenna_baseline,  ///< separate_csi with each user antenna treated as its own single-antenna user
};

inline constexpr std::array<Method, 4> kAllMethods = {Method::same, Method::separate_local, Method::separate_csi,
                                                      Method::per_antenna_baseline};

std::string to_string(Method m);
Method parse_method(const std::string& s);

struct DropOptions {
    int n_blocks = 1000;
    /// Greedy stream dropping for Method::same.
    bool schedule_streams = true;
    PilotAssignment assignment = PilotAssignment::greedy;
    /// Threads used inside the drop (blocks and estimator pairs).
    unsigned workers = 1;
};

struct MethodResult {
    Method method = Method::same;
    /// One report per (real) user.
    std::vector<SEReport> users;
    /// Average transmit power of each AP over the drop's blocks.
    RVector ap_power;
    /// Per-column scale factors applied to the unnormalized precoders
    /// (per virtual user for the per-antenna baseline).
    RMatrix scales;
    StreamPlan plan;
    ScheduleResult schedule;
};

/// One network drop: geometry, pilots, and n_blocks coherence blocks whose
/// small-scale fading, uplink noise and downlink noise are derived from the
/// drop seed. All methods of a run see the same blocks.
class DropSimulation {
public:
    DropSimulation(const SystemConfig& config, RngSeed drop_seed, DropOptions options = {});
    ~DropSimulation();
    DropSimulation(DropSimulation&&) noexcept;
    DropSimulation& operator=(DropSimulation&&) noexcept;

    const SystemConfig& config() const;
    const NetworkRealization& network() const;
    const PilotBook& pilot_book() const;
    const SelectionSet& selection() const;

    std::vector<MethodResult> run(const std::vector<Method>& methods, const std::vector<Bound>& bounds) const;
    MethodResult run(Method method, const std::vector<Bound>& bounds) const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace cfmimo
