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
#include <functional>
#include <vector>

#include "cfmimo/types.hpp"

namespace cfmimo {

/// Separate-stream serving map: stream m of user k is transmitted by AP
/// serving_ap(k, m) alone. Gamma_lk is the binary diagonal M x M matrix with a
/// one at position m iff serving_ap(k, m) == l.
class SelectionSet {
public:
    SelectionSet() = default;
    SelectionSet(int L, int K, int M, std::vector<std::vector<int>> serving_ap);

    int L() const { return L_; }
    int K() const { return K_; }
    int M() const { return M_; }

    int serving_ap(int k, int m) const { return serving_[static_cast<std::size_t>(k)][static_cast<std::size_t>(m)]; }
    bool selected(int l, int k, int m) const { return serving_ap(k, m) == l; }
    /// Diagonal of Gamma_lk as 0/1 flags.
    std::vector<std::uint8_t> mask(int l, int k) const;
    int rank(int l, int k) const;
    CMatrix gamma(int l, int k) const;
    /// Gamma_k = [Gamma_1k; ...; Gamma_Lk], LM x M.
    CMatrix stacked(int k) const;

private:
    int L_ = 0, K_ = 0, M_ = 0;
    std::vector<std::vector<int>> serving_;
};

/// The M strongest APs of each user (beta descending, ties to the lower index)
/// each send one stream: stream m goes to the m-th strongest. Throws
/// ConfigError when L < M.
SelectionSet select_serving_aps(const RMatrix& beta, int M);

/// Streams kept per user for same-stream transmission.
struct StreamPlan {
    std::vector<std::vector<std::uint8_t>> active;  ///< K x M flags

    static StreamPlan full(int K, int M);
    int users() const { return static_cast<int>(active.size()); }
    int streams() const { return active.empty() ? 0 : static_cast<int>(active.front().size()); }
    int active_count(int k) const;
    std::vector<Index> active_indices(int k) const;
    bool operator==(const StreamPlan& other) const { return active == other.active; }
};

struct ScheduleResult {
    StreamPlan plan;
    double initial_sum_se = 0.0;
    double final_sum_se = 0.0;
    int dropped = 0;
    int evaluations = 0;
};

using SumSeEvaluator = std::function<double(const StreamPlan&)>;

/// Greedy stream dropping. Each pass visits users in order and tentatively
/// removes the user's highest-indexed active stream; the removal is kept iff
/// the evaluated sum SE strictly increases. A user's last stream is never
/// removed. Passes repeat until one drops nothing.
ScheduleResult schedule_streams_same(const SumSeEvaluator& evaluate, StreamPlan initial);

}  // namespace cfmimo
