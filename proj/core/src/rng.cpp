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

#include "cfmimo/rng.hpp"

#include <cmath>
#include <numbers>

namespace cfmimo {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

RngSeed derive_seed(RngSeed parent, std::uint64_t tag) {
    return splitmix64(splitmix64(parent) ^ splitmix64(tag + 0x632be59bd9b4e019ULL));
}

RngSeed derive_seed(RngSeed parent, std::initializer_list<std::uint64_t> path) {
    RngSeed s = parent;
    for (auto t : path) {
        s = derive_seed(s, t);
    }
    return s;
}

Complex Rng::cn() {
    constexpr double s = std::numbers::sqrt2 / 2.0;
    const double re = normal();
    const double im = normal();
    return {re * s, im * s};
}

CMatrix Rng::cn_matrix(Index rows, Index cols) {
    CMatrix out(rows, cols);
    for (Index c = 0; c < cols; ++c) {
        for (Index r = 0; r < rows; ++r) {
            out(r, c) = cn();
        }
    }
    return out;
}

CVector Rng::cn_vector(Index n) {
    CVector out(n);
    for (Index i = 0; i < n; ++i) {
        out(i) = cn();
    }
    return out;
}

}  // namespace cfmimo
