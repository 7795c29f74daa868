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

#include "cfmimo/cost_accounting.hpp"

#include <limits>
#include <stdexcept>

#include "cfmimo/types.hpp"

namespace cfmimo {

namespace {

using u64 = std::uint64_t;

u64 mul(u64 a, u64 b) {
    if (a != 0 && b > std::numeric_limits<u64>::max() / a) {
        throw std::range_error("cost accounting: integer overflow");
    }
    return a * b;
}

u64 add(u64 a, u64 b) {
    if (b > std::numeric_limits<u64>::max() - a) {
        throw std::range_error("cost accounting: integer overflow");
    }
    return a + b;
}

u64 positive(int v, const char* name) {
    if (v < 1) {
        throw ConfigError(std::string("cost accounting: ") + name + " must be positive");
    }
    return static_cast<u64>(v);
}

}  // namespace

CostReport complexity(const SystemConfig& config) {
    const u64 L = positive(config.L, "L");
    const u64 N = positive(config.N, "N");
    const u64 K = positive(config.K, "K");
    const u64 M = positive(config.M, "M");
    const u64 tp = positive(config.pilot_length(), "tau_p");

    CostReport r;
    const u64 nm = mul(N, M);
    r.ul_estimation_mults = mul(K, add(mul(nm, nm), mul(N, tp)));

    const u64 nl = mul(N, L);
    const u64 nl2 = mul(nl, nl);
    // (NL)^2 + NL and (NL)^3 - NL are both even / divisible by 3, so the
    // divisions are exact.
    const u64 gram = mul(add(nl2, nl) / 2, mul(M, K));
    const u64 rhs = mul(nl2, M);
    const u64 inversion = (mul(nl2, nl) - nl) / 3;
    r.precoder_mults = add(add(gram, rhs), inversion);
    return r;
}

CostReport fronthaul(const SystemConfig& config) {
    const u64 N = positive(config.N, "N");
    const u64 M = positive(config.M, "M");
    const int tp = config.pilot_length();
    if (tp < 0 || tp > config.tau_c) {
        throw ConfigError("cost accounting: tau_p must lie in [0, tau_c]");
    }
    CostReport r;
    r.fronthaul_pilot_scalars = mul(mul(static_cast<u64>(tp), N), M);
    r.fronthaul_data_scalars = mul(static_cast<u64>(config.tau_c - tp), N);
    return r;
}

CostReport cost_report(const SystemConfig& config) {
    CostReport r = complexity(config);
    const CostReport f = fronthaul(config);
    r.fronthaul_pilot_scalars = f.fronthaul_pilot_scalars;
    r.fronthaul_data_scalars = f.fronthaul_data_scalars;
    return r;
}

}  // namespace cfmimo
