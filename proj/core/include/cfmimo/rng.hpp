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
#include <initializer_list>
#include <random>

#include "cfmimo/types.hpp"

// Counter-based seed derivation. Every random stream in a run is addressed by
// a path (master seed, drop, block, tag) and never by draw order, so results do
// not depend on how work is split across threads.

namespace cfmimo {

using RngSeed = std::uint64_t;

std::uint64_t splitmix64(std::uint64_t x);

RngSeed derive_seed(RngSeed parent, std::uint64_t tag);
RngSeed derive_seed(RngSeed parent, std::initializer_list<std::uint64_t> path);

/// Stream tags. Values are part of the reproducibility contract; do not renumber.
enum class StreamTag : std::uint64_t {
    drop = 1,
    geometry = 2,
    block = 3,
    channel = 4,
    uplink_noise = 5,
    downlink_noise = 6,
    test = 99,
};

inline std::uint64_t tag(StreamTag t) { return static_cast<std::uint64_t>(t); }

class Rng {
public:
    explicit Rng(RngSeed seed) : engine_(seed) {}

    double uniform() { return uniform_(engine_); }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    double normal() { return normal_(engine_); }
    /// Circularly-symmetric CN(0, 1).
    Complex cn();
    CMatrix cn_matrix(Index rows, Index cols);
    CVector cn_vector(Index n);

    std::mt19937_64& engine() { return engine_; }

private:
    std::mt19937_64 engine_;
    std::uniform_real_distribution<double> uniform_{0.0, 1.0};
    std::normal_distribution<double> normal_{0.0, 1.0};
};

}  // namespace cfmimo
