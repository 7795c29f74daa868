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

#include "cfmimo/stream_allocation.hpp"

#include <algorithm>
#include <numeric>
#include <string>

namespace cfmimo {

SelectionSet::SelectionSet(int L, int K, int M, std::vector<std::vector<int>> serving_ap)
    : L_(L), K_(K), M_(M), serving_(std::move(serving_ap)) {
    if (static_cast<int>(serving_.size()) != K) {
        throw ConfigError("SelectionSet: expected one serving list per user");
    }
    for (const auto& row : serving_) {
        if (static_cast<int>(row.size()) != M) {
            throw ConfigError("SelectionSet: expected one serving AP per stream");
        }
        for (int l : row) {
            if (l < 0 || l >= L) {
                throw ConfigError("SelectionSet: AP index out of range");
            }
        }
    }
}

std::vector<std::uint8_t> SelectionSet::mask(int l, int k) const {
    std::vector<std::uint8_t> out(static_cast<std::size_t>(M_), 0);
    for (int m = 0; m < M_; ++m) {
        out[static_cast<std::size_t>(m)] = selected(l, k, m) ? 1 : 0;
    }
    return out;
}

int SelectionSet::rank(int l, int k) const {
    int r = 0;
    for (int m = 0; m < M_; ++m) {
        r += selected(l, k, m) ? 1 : 0;
    }
    return r;
}

CMatrix SelectionSet::gamma(int l, int k) const {
    CMatrix g = CMatrix::Zero(M_, M_);
    for (int m = 0; m < M_; ++m) {
        if (selected(l, k, m)) {
            g(m, m) = 1.0;
        }
    }
    return g;
}

CMatrix SelectionSet::stacked(int k) const {
    CMatrix out = CMatrix::Zero(static_cast<Index>(L_) * M_, M_);
    for (int l = 0; l < L_; ++l) {
        out.middleRows(static_cast<Index>(l) * M_, M_) = gamma(l, k);
    }
    return out;
}

SelectionSet select_serving_aps(const RMatrix& beta, int M) {
    const auto L = static_cast<int>(beta.rows());
    const auto K = static_cast<int>(beta.cols());
    if (L < M) {
        throw ConfigError("select_serving_aps: L = " + std::to_string(L) + " APs cannot serve M = " +
                          std::to_string(M) + " separate streams");
    }
    std::vector<std::vector<int>> serving(static_cast<std::size_t>(K));
    std::vector<int> order(static_cast<std::size_t>(L));
    for (int k = 0; k < K; ++k) {
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return beta(a, k) > beta(b, k); });
        serving[static_cast<std::size_t>(k)].assign(order.begin(), order.begin() + M);
    }
    return SelectionSet(L, K, M, std::move(serving));
}

StreamPlan StreamPlan::full(int K, int M) {
    StreamPlan p;
    p.active.assign(static_cast<std::size_t>(K), std::vector<std::uint8_t>(static_cast<std::size_t>(M), 1));
    return p;
}

int StreamPlan::active_count(int k) const {
    const auto& row = active[static_cast<std::size_t>(k)];
    return static_cast<int>(std::count(row.begin(), row.end(), std::uint8_t{1}));
}

std::vector<Index> StreamPlan::active_indices(int k) const {
    std::vector<Index> out;
    const auto& row = active[static_cast<std::size_t>(k)];
    for (std::size_t m = 0; m < row.size(); ++m) {
        if (row[m] != 0) {
            out.push_back(static_cast<Index>(m));
        }
    }
    return out;
}

ScheduleResult schedule_streams_same(const SumSeEvaluator& evaluate, StreamPlan initial) {
    ScheduleResult res;
    res.plan = std::move(initial);
    double current = evaluate(res.plan);
    res.evaluations = 1;
    res.initial_sum_se = current;

    bool changed = true;
    while (changed) {
        changed = false;
        for (int k = 0; k < res.plan.users(); ++k) {
            if (res.plan.active_count(k) <= 1) {
                continue;
            }
            StreamPlan candidate = res.plan;
            auto& row = candidate.active[static_cast<std::size_t>(k)];
            for (auto m = row.size(); m-- > 0;) {
                if (row[m] != 0) {
                    row[m] = 0;
                    break;
                }
            }
            const double value = evaluate(candidate);
            ++res.evaluations;
            if (value > current) {
                res.plan = std::move(candidate);
                current = value;
                ++res.dropped;
                changed = true;
            }
        }
    }
    res.final_sum_se = current;
    return res;
}

}  // namespace cfmimo
