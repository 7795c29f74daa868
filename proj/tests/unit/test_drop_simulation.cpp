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

#include <gtest/gtest.h>

#include <cmath>

#include "cfmimo/drop_simulation.hpp"

using namespace cfmimo;

namespace {

SystemConfig small_config() {
    SystemConfig c;
    c.L = 6;
    c.N = 2;
    c.K = 3;
    c.M = 2;
    return c;
}

DropOptions small_options(unsigned workers = 1) {
    DropOptions o;
    o.n_blocks = 60;
    o.workers = workers;
    return o;
}

}  // namespace

TEST(DropSimulation, MethodNamesRoundTrip) {
    for (auto m : kAllMethods) {
        EXPECT_EQ(parse_method(to_string(m)), m);
    }
    EXPECT_THROW(parse_method("method1"), ConfigError);
}

TEST(DropSimulation, ResultsIndependentOfWorkerCount) {
    const std::vector<Bound> bounds(kAllBounds.begin(), kAllBounds.end());
    const std::vector<Method> methods(kAllMethods.begin(), kAllMethods.end());
    const auto a = DropSimulation(small_config(), 99, small_options(1)).run(methods, bounds);
    const auto b = DropSimulation(small_config(), 99, small_options(3)).run(methods, bounds);
    ASSERT_EQ(a.size(), b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        ASSERT_EQ(a[i].users.size(), b[i].users.size());
        for (std::size_t k = 0; k < a[i].users.size(); ++k) {
            for (auto bound : kAllBounds) {
                EXPECT_EQ(a[i].users[k][bound], b[i].users[k][bound]);
            }
        }
        EXPECT_EQ(a[i].scales, b[i].scales);
    }
}

TEST(DropSimulation, BoundsAreFiniteAndOrdered) {
    const DropSimulation sim(small_config(), 5, small_options());
    const auto res = sim.run(Method::same, {Bound::noCSI, Bound::fullCSI, Bound::pilots});
    ASSERT_EQ(res.users.size(), 3u);
    for (const auto& u : res.users) {
        EXPECT_TRUE(std::isfinite(u[Bound::noCSI]));
        EXPECT_GE(u[Bound::noCSI], 0.0);
        EXPECT_LE(u[Bound::noCSI], u[Bound::fullCSI] * 1.03);
        EXPECT_LE(u[Bound::pilots], u[Bound::fullCSI] * 1.03);
        EXPECT_TRUE(std::isnan(u[Bound::pilotsZF]));
        EXPECT_EQ(u.n_samples, 60);
    }
}

TEST(DropSimulation, PerApPowerRespectsBudget) {
    const auto cfg = small_config();
    const DropSimulation sim(cfg, 6, small_options());
    const auto same = sim.run(Method::same, {Bound::noCSI});
    EXPECT_NEAR(same.ap_power.maxCoeff(), cfg.dl_power, 1e-6 * cfg.dl_power);
    for (auto m : {Method::separate_local, Method::separate_csi}) {
        const auto res = sim.run(m, {Bound::noCSI});
        const auto& sel = sim.selection();
        for (int l = 0; l < cfg.L; ++l) {
            bool serving = false;
            for (int k = 0; k < cfg.K; ++k) {
                serving = serving || sel.rank(l, k) > 0;
            }
            if (serving) {
                EXPECT_NEAR(res.ap_power(l), cfg.dl_power, 1e-6 * cfg.dl_power);
            } else {
                EXPECT_EQ(res.ap_power(l), 0.0);
            }
        }
    }
}

TEST(DropSimulation, PerAntennaBaselineReportsRealUsers) {
    const DropSimulation sim(small_config(), 7, small_options());
    const auto res = sim.run(Method::per_antenna_baseline, {Bound::pilots, Bound::noCSI});
    ASSERT_EQ(res.users.size(), 3u);
    EXPECT_EQ(res.scales.rows(), 6);
    for (const auto& u : res.users) {
        EXPECT_GT(u[Bound::pilots], 0.0);
    }
}

TEST(DropSimulation, SchedulerOnlyAffectsSameStream) {
    auto cfg = small_config();
    const DropSimulation sim(cfg, 8, small_options());
    const auto res = sim.run(Method::same, {Bound::pilots});
    EXPECT_GE(res.schedule.final_sum_se, res.schedule.initial_sum_se);
    for (int k = 0; k < cfg.K; ++k) {
        EXPECT_GE(res.plan.active_count(k), 1);
    }
    const auto sep = sim.run(Method::separate_csi, {Bound::pilots});
    EXPECT_EQ(sep.plan, StreamPlan::full(cfg.K, cfg.M));
}

TEST(DropSimulation, InvalidConfigurationsThrow) {
    auto cfg = small_config();
    cfg.tau_p = 5;
    EXPECT_THROW(DropSimulation(cfg, 1, small_options()), ConfigError);
    cfg = small_config();
    cfg.L = 1;
    const DropSimulation sim(cfg, 1, small_options());
    EXPECT_THROW(sim.run(Method::separate_csi, {Bound::pilots}), ConfigError);
    DropOptions one = small_options();
    one.n_blocks = 1;
    EXPECT_THROW(DropSimulation(small_config(), 1, one).run(Method::same, {Bound::noCSI}), ConfigError);
}
