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

#include <benchmark/benchmark.h>

#include <vector>

#include "cfmimo/downlink_estimation.hpp"
#include "cfmimo/drop_simulation.hpp"
#include "cfmimo/network_model.hpp"
#include "cfmimo/pilot_domain.hpp"
#include "cfmimo/precoding.hpp"
#include "cfmimo/stream_allocation.hpp"

using namespace cfmimo;

namespace {

SystemConfig bench_config(int N) {
    SystemConfig c;
    c.N = N;
    return c;
}

struct Fixture {
    explicit Fixture(int N)
        : config(bench_config(N)),
          net(drop_network(config, 7)),
          book(build_pilot_book(config, net.beta)),
          q(static_cast<std::size_t>(config.K), config.ul_power),
          stats(net, book, q),
          sampler(net),
          sel(select_serving_aps(net.beta, config.M)) {
        Rng rng(8);
        h = sampler.sample(rng);
        h_hat = stats.estimate(receive_uplink_pilots(h, book, q, rng), book);
        for (int l = 0; l < net.L; ++l) {
            for (int k = 0; k < net.K; ++k) {
                gram.push_back(stats.error_gram(l, k));
                err.push_back(stats.error_cov(l, k));
            }
        }
    }

    SystemConfig config;
    NetworkRealization net;
    PilotBook book;
    std::vector<double> q;
    UplinkStatistics stats;
    ChannelSampler sampler;
    SelectionSet sel;
    ChannelSet h, h_hat;
    std::vector<CMatrix> gram, err;
};

}  // namespace

static void BM_ChannelSample(benchmark::State& state) {
    const Fixture f(static_cast<int>(state.range(0)));
    Rng rng(1);
    for (auto _ : state) {
        benchmark::DoNotOptimize(f.sampler.sample(rng));
    }
}
BENCHMARK(BM_ChannelSample)->Arg(1)->Arg(4)->Arg(8);

static void BM_UplinkEstimate(benchmark::State& state) {
    const Fixture f(static_cast<int>(state.range(0)));
    Rng rng(2);
    const auto obs = receive_uplink_pilots(f.h, f.book, f.q, rng);
    for (auto _ : state) {
        benchmark::DoNotOptimize(f.stats.estimate(obs, f.book));
    }
}
BENCHMARK(BM_UplinkEstimate)->Arg(1)->Arg(4)->Arg(8);

static void BM_CentralizedPrecoder(benchmark::State& state) {
    const Fixture f(static_cast<int>(state.range(0)));
    for (auto _ : state) {
        benchmark::DoNotOptimize(mmse_precoder_centralized(f.h_hat, f.gram, f.q));
    }
}
BENCHMARK(BM_CentralizedPrecoder)->Arg(1)->Arg(4)->Arg(8);

static void BM_CsiSharingPrecoder(benchmark::State& state) {
    const Fixture f(static_cast<int>(state.range(0)));
    const CMatrix s = csi_sharing_static_term(f.err, f.sel, f.q, f.config.N);
    for (auto _ : state) {
        benchmark::DoNotOptimize(mmse_precoder_csi_sharing(f.h_hat, s, f.sel, f.q, true));
    }
}
BENCHMARK(BM_CsiSharingPrecoder)->Arg(1)->Arg(4)->Arg(8);

static void BM_LocalPrecoder(benchmark::State& state) {
    const Fixture f(static_cast<int>(state.range(0)));
    const auto s = local_static_terms(f.err, f.net.R, f.sel, f.q, f.config.N);
    for (auto _ : state) {
        benchmark::DoNotOptimize(mmse_precoder_local(f.h_hat, s, f.sel, f.q, true));
    }
}
BENCHMARK(BM_LocalPrecoder)->Arg(1)->Arg(4)->Arg(8);

static void BM_LinearMoments(benchmark::State& state) {
    const auto n = state.range(0);
    Rng rng(3);
    std::vector<CVector> b, y;
    for (Index t = 0; t < n; ++t) {
        b.push_back(rng.cn_vector(4));
        y.push_back(rng.cn_vector(4));
    }
    for (auto _ : state) {
        benchmark::DoNotOptimize(LmmseEstimator(estimate_moments(b, y)));
    }
}
BENCHMARK(BM_LinearMoments)->Arg(500)->Arg(5000);

static void BM_SmallDrop(benchmark::State& state) {
    SystemConfig c;
    c.L = 8;
    c.N = 2;
    for (auto _ : state) {
        const DropSimulation sim(c, 5, DropOptions{50, true, PilotAssignment::greedy, 1});
        benchmark::DoNotOptimize(sim.run(Method::same, {Bound::noCSI, Bound::pilots}));
    }
}
BENCHMARK(BM_SmallDrop)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
