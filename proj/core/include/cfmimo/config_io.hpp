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

#include "cfmimo/experiment.hpp"

// JSON configuration documents. Layout:
//
//   {
//     "preset": "fig8",                       optional starting point
//     "system": { "L": 20, "N": 4, ... },     any SystemConfig field
//     "sweep": { "param": "N", "values": [1, 2, 4] },
//     "methods": ["same", "separate_csi"],
//     "bounds": ["noCSI", "pilots"],
//     "drops": 20, "blocks": 500, "seed": 42,
//     "schedule_streams": true,
//     "pilot_assignment": "greedy"
//   }
//
// Every key is optional; unknown keys at any level are rejected.

namespace cfmimo {

/// Throws ConfigError on malformed JSON, unknown keys or bad values.
ExperimentSpec parse_experiment_json(const std::string& text);
ExperimentSpec load_experiment_file(const std::string& path);

/// Applies a JSON object of SystemConfig fields on top of `base`.
SystemConfig parse_system_json(const std::string& text, SystemConfig base = {});

std::string to_json(const SystemConfig& config);

}  // namespace cfmimo
