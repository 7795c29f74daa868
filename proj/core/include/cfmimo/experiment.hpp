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

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "cfmimo/drop_simulation.hpp"
#include "cfmimo/result_table.hpp"

namespace cfmimo {

struct GridPoint {
    std::string param_name;
    double param_value = 0.0;
    SystemConfig config;
};

/// A labelled grid point of an explicit grid: the listed fields are applied
/// on top of the experiment's base config.
struct GridOverride {
    std::string param_name;
    double param_value = 0.0;
    std::vector<std::pair<std::string, double>> fields;
};

struct ExperimentSpec {
    std::string preset = "custom";
    SystemConfig base;
    /// Single-parameter sweep; ignored when `grid` is non-empty.
    std::string sweep_param;
    std::vector<double> sweep_values;
    /// Explicit grid (used by presets that vary several fields at once).
    std::vector<GridOverride> grid;
    std::vector<Method> methods = {Method::same};
    std::vector<Bound> bounds = {Bound::pilots};
    int n_drops = 50;
    int n_blocks = 1000;
    RngSeed seed = 1;
    bool schedule_streams = true;
    PilotAssignment assignment = PilotAssignment::greedy;

    /// Grid points in output order. Without a sweep this is the base config
    /// alone, labelled "none" = 0.
    std::vector<GridPoint> expand() const;
    void validate() const;
};

/// Sets a numeric SystemConfig field by name (L, N, K, M, tau_c, tau_p,
/// area_side, asd_deg, ul_power, dl_power, antenna_spacing, shadowing_db).
void apply_parameter(SystemConfig& config, const std::string& name, double value);
bool is_sweepable(const std::string& name);

std::vector<std::string> preset_names();
std::string preset_description(const std::string& name);
/// Presets with the default Monte Carlo sizes (50 drops x 1000 blocks).
ExperimentSpec make_preset(const std::string& name);

struct RunOptions {
    unsigned workers = 1;
    /// Grid-point failures are reported here (std::cerr when null).
    std::ostream* log = nullptr;
};

/// Runs every (grid point, drop) pair, in parallel over drops. Drop d uses
/// derive_seed(seed, {drop, d}) at every grid point. A failure in any drop
/// drops the whole grid point from the table and is logged; the sweep goes on.
/// Rows are ordered grid point, drop, method, bound, user.
ResultTable run_experiment(const ExperimentSpec& spec, const RunOptions& options = {});

RngSeed drop_seed(RngSeed master, int drop);

}  // namespace cfmimo
