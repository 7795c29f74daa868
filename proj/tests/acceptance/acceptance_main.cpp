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

// Acceptance run: one PASS/FAIL line per primary criterion, nonzero exit on any FAIL.
// Runs at desk scale (L = 20, K = 5, 20 drops x 500 blocks).

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <numbers>
#include <sstream>
#include <string>
#include <thread>
#include <tuple>
#include <vector>

#include "cfmimo/cost_accounting.hpp"
#include "cfmimo/downlink_estimation.hpp"
#include "cfmimo/drop_simulation.hpp"
#include "cfmimo/experiment.hpp"
#include "cfmimo/linalg.hpp"
#include "cfmimo/network_model.hpp"
#include "cfmimo/pilot_domain.hpp"
#include "cfmimo/precoding.hpp"
#include "cfmimo/receive_and_se.hpp"
#include "cfmimo/result_table.hpp"
#include "cfmimo/rng.hpp"

using namespace cfmimo;

namespace {

constexpr int kDrops = 20;
constexpr int kBlocks = 500;
constexpr double kDeg = std::numbers::pi / 180.0;

unsigned workers() { return std::max(1u, std::thread::hardware_concurrency()); }

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* f, double a) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, a);
    return buf;
}

// Sample mean over (drop, user) rows of one (method, bound, param) group,
// plus the list of values in (drop, user) order.
using Key = std::tuple<std::string, std::string, double>;

std::map<Key, std::vector<double>> group(const ResultTable& t) {
    std::map<Key, std::vector<double>> g;
    for (const auto& r : t.rows) {
        g[{r.method, r.bound, r.param_value}].push_back(r.se_bits_per_hz);
    }
    return g;
}

double mean(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) {
        s += x;
    }
    return s / static_cast<double>(v.size());
}

// Standard error of the mean of the paired difference a - b.
double paired_std_error(const std::vector<double>& a, const std::vector<double>& b) {
    const auto n = a.size();
    std::vector<double> d(n);
    for (std::size_t i = 0; i < n; ++i) {
        d[i] = a[i] - b[i];
    }
    const double m = mean(d);
    double var = 0.0;
    for (double x : d) {
        var += (x - m) * (x - m);
    }
    return std::sqrt(var / static_cast<double>(n - 1) / static_cast<double>(n));
}

ExperimentSpec desk_spec(const std::string& preset) {
    auto s = make_preset(preset);
    s.n_drops = kDrops;
    s.n_blocks = kBlocks;
    s.seed = 2026;
    return s;
}

// 1. Uplink MMSE MSE vs tr(C_err) and downlink LMMSE orthogonality.
Outcome estimator_calibration() {
    const int L = 1, K = 2, N = 4, M = 2, trials = 100000;
    std::vector<CMatrix> R = {2.0 * local_scattering_correlation(0.4, -0.7, 15.0 * kDeg, N, M, 0.5),
                              0.5 * local_scattering_correlation(-0.2, 1.1, 25.0 * kDeg, N, M, 0.5)};
    const auto book = PilotBook::from_groups(M, M, {0, 0});
    const std::vector<double> q = {100.0, 100.0};
    const UplinkStatistics stats(R, L, K, N, M, book, q);
    const ChannelSampler sampler(R, L, K, N, M);

    Rng rng(derive_seed(11, tag(StreamTag::test)));
    double mse = 0.0;
    for (int t = 0; t < trials; ++t) {
        const auto h = sampler.sample(rng);
        const auto obs = receive_uplink_pilots(h, book, q, rng);
        const auto h_hat = stats.estimate(obs, book);
        mse += (h.h(0, 0) - h_hat.h(0, 0)).squaredNorm();
    }
    mse /= trials;
    const double tr = stats.error_cov(0, 0).trace().real();
    const double ul_err = std::abs(mse - tr) / tr;

    // Downlink: B_kk = H_k^H H_k (MR) seen through the user's pilot observation.
    const auto dl_book = PilotBook::from_groups(2 * M, M, {0, 1});
    auto draw = [&](Rng& r, CVector& b, CVector& y) {
        const auto h = sampler.sample(r);
        std::vector<CMatrix> row = {effective_channel(h.at(0, 0), h.at(0, 0)), effective_channel(h.at(0, 0), h.at(0, 1))};
        const CMatrix noise = r.cn_matrix(M, 2 * M);
        const CMatrix y_pilot = receive_downlink_pilots(row, dl_book, {1.0, 1.0}, noise);
        b = linalg::vec(row[0]);
        y = downlink_observation(y_pilot, dl_book, 0);
    };
    LinearMoments mom(M * M, M * M);
    CVector b, y;
    for (int t = 0; t < trials; ++t) {
        draw(rng, b, y);
        mom.add(b, y);
    }
    const LmmseEstimator est(mom);
    CMatrix cross = CMatrix::Zero(M * M, M * M), ref = CMatrix::Zero(M * M, M * M);
    for (int t = 0; t < trials; ++t) {
        draw(rng, b, y);
        cross += (b - est.estimate(y)) * (y - est.mean_y()).adjoint();
        ref += (b - est.mean_b()) * (y - est.mean_y()).adjoint();
    }
    const double residual = cross.norm() / ref.norm();
    return {ul_err < 0.02 && residual < 0.02,
            "uplink |MSE - tr(C)|/tr(C) = " + fmt("%.4f", ul_err) + " (< 0.02), orthogonality residual = " +
                fmt("%.4f", residual) + " (< 0.02)"};
}

// 2. Sample covariance of vec(H) vs R.
Outcome channel_statistics() {
    const int N = 4, M = 2, draws = 10000;
    const CMatrix R = 3.0 * local_scattering_correlation(0.6, -0.3, 20.0 * kDeg, N, M, 0.5);
    const ChannelSampler sampler({R}, 1, 1, N, M);
    Rng rng(derive_seed(12, tag(StreamTag::test)));
    CMatrix s = CMatrix::Zero(N * M, N * M);
    for (int t = 0; t < draws; ++t) {
        const CVector h = sampler.sample(rng).h(0, 0);
        s += h * h.adjoint();
    }
    s /= draws;
    const double err = (s - R).norm() / R.norm();
    return {err < 0.05, "relative Frobenius error = " + fmt("%.4f", err) + " (< 0.05)"};
}

// 3. MR with R = I at a single AP: B = H^H H does not harden.
Outcome hardening_failure() {
    const int N = 16, M = 2, draws = 100000;
    const std::vector<CMatrix> R = {CMatrix::Identity(N * M, N * M)};
    const ChannelSampler sampler(R, 1, 1, N, M);
    Rng rng(derive_seed(13, tag(StreamTag::test)));
    EffectiveSamples samples(static_cast<std::size_t>(draws));
    for (int t = 0; t < draws; ++t) {
        const CMatrix h = sampler.sample(rng).at(0, 0);
        samples[static_cast<std::size_t>(t)] = {effective_channel(h, mr_precoder(h))};
    }
    const auto hm = hardening_moments(samples, 0, {0, 1});
    double worst_var = 0.0, worst_diag = 0.0, worst_ratio = 0.0;
    for (int r = 0; r < M; ++r) {
        for (int c = 0; c < M; ++c) {
            double var = 0.0;
            for (const auto& s : samples) {
                var += std::norm(s[0](r, c) - hm.b_bar(r, c));
            }
            var /= draws - 1;
            worst_var = std::max(worst_var, std::abs(var - N) / N);
            if (r == c) {
                worst_diag = std::max(worst_diag, std::abs(hm.b_bar(r, c).real() - N) / N);
            } else {
                worst_ratio = std::max(worst_ratio, std::abs(hm.b_bar(r, c)) / std::sqrt(var));
            }
        }
    }
    return {worst_var < 0.05 && worst_diag < 0.03 && worst_ratio < 0.1,
            "max |var/N - 1| = " + fmt("%.4f", worst_var) + " (< 0.05), max |mean diag/N - 1| = " +
                fmt("%.4f", worst_diag) + " (< 0.03), max off-diag |mean|/std = " + fmt("%.4f", worst_ratio) +
                " (< 0.1)"};
}

// 4. Bound gap at M = 2 over the N sweep (method same).
Outcome bound_gap(const std::map<Key, std::vector<double>>& g) {
    bool pass = true;
    std::string detail;
    for (int n = 1; n <= 8; ++n) {
        const double p = mean(g.at({"same", "pilots", n}));
        const double no = mean(g.at({"same", "noCSI", n}));
        const double full = mean(g.at({"same", "fullCSI", n}));
        const bool ok = (n < 2 || p / no >= 1.5) && p <= full * 1.03;
        pass = pass && ok;
        detail += " N=" + std::to_string(n) + ":" + fmt("%.3f", p / no) + "/" + fmt("%.3f", p / full);
    }
    return {pass, "pilots/noCSI (>= 1.5 for N >= 2) / pilots/fullCSI (<= 1.03):" + detail};
}

// 5. Bound closeness at M = 1, i.i.d. fading.
Outcome bound_closeness(const std::map<Key, std::vector<double>>& g) {
    bool pass = true;
    std::string detail;
    for (int n = 1; n <= 8; ++n) {
        const double no = mean(g.at({"same", "noCSI", n}));
        const double full = mean(g.at({"same", "fullCSI", n}));
        const double gap = (full - no) / full;
        pass = pass && gap < 0.15;
        detail += " N=" + std::to_string(n) + ":" + fmt("%.3f", gap);
    }
    return {pass, "(fullCSI - noCSI)/fullCSI (< 0.15):" + detail};
}

// 6. same >= separate_csi >= separate_local within one standard error.
Outcome method_ordering(const std::map<Key, std::vector<double>>& g) {
    bool pass = true;
    std::string detail;
    for (int n = 1; n <= 8; ++n) {
        const auto& m1 = g.at({"same", "pilots", n});
        const auto& m2 = g.at({"separate_local", "pilots", n});
        const auto& m3 = g.at({"separate_csi", "pilots", n});
        const bool ok = mean(m1) - mean(m3) >= -paired_std_error(m1, m3) &&
                        mean(m3) - mean(m2) >= -paired_std_error(m3, m2);
        pass = pass && ok;
        detail += " N=" + std::to_string(n) + ":" + fmt("%.3f", mean(m1)) + "/" + fmt("%.3f", mean(m3)) + "/" +
                  fmt("%.3f", mean(m2));
    }
    return {pass, "mean SE same/separate_csi/separate_local:" + detail};
}

// 7. MMSE combiner >= ZF combiner per user at every M.
Outcome combiner_ordering(const ResultTable& t) {
    std::map<std::tuple<double, int, int>, std::pair<double, double>> pairs;
    for (const auto& r : t.rows) {
        auto& p = pairs[{r.param_value, r.drop, r.user}];
        (r.bound == "pilots" ? p.first : p.second) = r.se_bits_per_hz;
    }
    bool pass = !pairs.empty();
    int violations = 0;
    std::map<double, double> worst;
    for (const auto& [key, p] : pairs) {
        const double d = p.first - p.second;
        violations += d < 0.0 ? 1 : 0;
        auto it = worst.find(std::get<0>(key));
        if (it == worst.end() || d < it->second) {
            worst[std::get<0>(key)] = d;
        }
    }
    pass = pass && violations == 0;
    std::string detail = std::to_string(violations) + " of " + std::to_string(pairs.size()) +
                         " (M, drop, user) cases below zero; min per-user SE(MMSE) - SE(ZF) (>= 0):";
    for (const auto& [m, d] : worst) {
        detail += " M=" + fmt("%.0f", m) + ":" + fmt("%.4g", d);
    }
    return {pass, detail};
}

// 8. Block-diagonal right singular vectors (L = M): AP l carries stream l only,
// in an N-dim subspace disjoint from the other APs'.
Outcome block_equivalence() {
    const int L = 2, M = 2, K = 3, N = 4, d = N / L, blocks = 400;
    const std::vector<double> q(K, 100.0);
    std::vector<std::vector<int>> serving(K, std::vector<int>(M));
    for (auto& s : serving) {
        for (int m = 0; m < M; ++m) {
            s[static_cast<std::size_t>(m)] = m;
        }
    }
    const SelectionSet sel(L, K, M, serving);
    RMatrix beta(L, K);
    Rng rng(derive_seed(18, tag(StreamTag::test)));
    for (int l = 0; l < L; ++l) {
        for (int k = 0; k < K; ++k) {
            beta(l, k) = 0.5 + rng.uniform();
        }
    }
    const std::vector<CMatrix> no_error_gram(static_cast<std::size_t>(L * K), CMatrix::Zero(N, N));
    const CMatrix no_static = CMatrix::Zero(N, N);

    std::vector<std::vector<CMatrix>> wc_all, ws_all;
    std::vector<ChannelSet> channels;
    double off = 0.0, total = 0.0;
    ColumnPowerTable pow_s(L, K, M);
    for (int t = 0; t < blocks; ++t) {
        ChannelSet h(L, K, N, M);
        for (int l = 0; l < L; ++l) {
            for (int k = 0; k < K; ++k) {
                CMatrix x = CMatrix::Zero(N, M);
                x.block(l * d, l, d, 1) = std::sqrt(beta(l, k)) * rng.cn_vector(d);
                h.at(l, k) = x;
            }
        }
        auto wc = mmse_precoder_centralized(h, no_error_gram, q);
        auto ws = mmse_precoder_csi_sharing(h, no_static, sel, q, true);
        for (int k = 0; k < K; ++k) {
            const CMatrix& w = wc[static_cast<std::size_t>(k)];
            total += w.squaredNorm();
            for (int l = 0; l < L; ++l) {
                for (int m = 0; m < M; ++m) {
                    if (m != l) {
                        off += w.block(l * N, m, N, 1).squaredNorm();
                    }
                }
            }
        }
        pow_s.add(column_powers_separate(ws, sel));
        channels.push_back(std::move(h));
        wc_all.push_back(std::move(wc));
        ws_all.push_back(std::move(ws));
    }
    pow_s.scale(1.0 / blocks);
    // Both transmitters use the per-AP power allocation of separate streams.
    const RMatrix c_s = normalize_separate_stream(pow_s, sel, beta, 1000.0);

    double worst_rel = 0.0;
    for (int k = 0; k < K; ++k) {
        EffectiveSamples ck(static_cast<std::size_t>(blocks)), sk(static_cast<std::size_t>(blocks));
        for (int t = 0; t < blocks; ++t) {
            const auto& h = channels[static_cast<std::size_t>(t)];
            for (int i = 0; i < K; ++i) {
                const CMatrix scale = c_s.row(i).transpose().asDiagonal().toDenseMatrix().cast<Complex>();
                ck[static_cast<std::size_t>(t)].push_back(
                    h.stacked(k).adjoint() * wc_all[static_cast<std::size_t>(t)][static_cast<std::size_t>(i)] * scale);
                CMatrix b = CMatrix::Zero(M, M);
                for (int l = 0; l < L; ++l) {
                    b += h.at(l, k).adjoint() * ws_all[static_cast<std::size_t>(t)][static_cast<std::size_t>(l * K + i)] *
                         sel.gamma(l, i);
                }
                sk[static_cast<std::size_t>(t)].push_back(b * scale);
            }
        }
        const std::vector<Index> streams = {0, 1};
        for (auto fn : {se_nocsi, se_perfect_csi}) {
            const double a = fn(ck, k, streams, 1.0);
            const double b = fn(sk, k, streams, 1.0);
            worst_rel = std::max(worst_rel, std::abs(a - b) / std::max(std::abs(b), 1e-300));
        }
    }
    const double off_frac = off / total;
    return {off_frac < 1e-8 && worst_rel < 1e-6,
            "off-block mass fraction = " + fmt("%.3g", off_frac) + " (< 1e-8), max relative SE difference = " +
                fmt("%.3g", worst_rel) + " (< 1e-6)"};
}

// 9. Per-AP power budget over drops of the default scenario.
Outcome power_constraints() {
    SystemConfig base;
    double worst_excess = 0.0, worst_equality = 0.0;
    const int drops = 5;
    for (int n : {1, 4, 8}) {
        SystemConfig c = base;
        c.N = n;
        for (int d = 0; d < drops; ++d) {
            const DropSimulation sim(c, drop_seed(29, d), DropOptions{200, true, PilotAssignment::greedy, workers()});
            for (const auto& r : sim.run(std::vector<Method>(kAllMethods.begin(), kAllMethods.end()), {Bound::noCSI})) {
                worst_excess = std::max(worst_excess, r.ap_power.maxCoeff() / c.dl_power - 1.0);
                if (r.method == Method::separate_local || r.method == Method::separate_csi) {
                    const auto& sel = sim.selection();
                    for (int l = 0; l < c.L; ++l) {
                        bool serving = false;
                        for (int k = 0; k < c.K; ++k) {
                            serving = serving || sel.rank(l, k) > 0;
                        }
                        if (serving) {
                            worst_equality = std::max(worst_equality, std::abs(r.ap_power(l) / c.dl_power - 1.0));
                        }
                    }
                }
            }
        }
    }
    return {worst_excess <= 0.01 && worst_equality < 1e-9,
            "max per-AP power / rho_d - 1 = " + fmt("%.3g", worst_excess) +
                " (<= 0.01), max |p_l / rho_d - 1| at serving APs (separate streams) = " + fmt("%.3g", worst_equality)};
}

// 10. Cost formulas.
Outcome cost_formulas() {
    SystemConfig c;
    c.L = 20;
    c.N = 4;
    c.M = 2;
    c.K = 5;
    c.tau_p = 5;
    c.tau_c = 200;
    const auto r = cost_report(c);
    const bool ok = r.ul_estimation_mults == 420 && r.precoder_mults == 215840 && r.fronthaul_pilot_scalars == 40 &&
                    r.fronthaul_data_scalars == 780;
    return {ok, "UL estimation " + std::to_string(r.ul_estimation_mults) + " (420), precoding " +
                    std::to_string(r.precoder_mults) + " (215840), fronthaul pilot " +
                    std::to_string(r.fronthaul_pilot_scalars) + " (40), data " +
                    std::to_string(r.fronthaul_data_scalars) + " (780)"};
}

// 11. Single AP with N = 80.
Outcome single_ap(const ResultTable& t) {
    const auto g = group(t);
    const double p = mean(g.at({"same", "pilots", 80.0}));
    const double no = mean(g.at({"same", "noCSI", 80.0}));
    const double full = mean(g.at({"same", "fullCSI", 80.0}));
    return {p / no >= 1.5, "pilots/noCSI = " + fmt("%.3f", p / no) + " (>= 1.5); noCSI " + fmt("%.3f", no) +
                               ", pilots " + fmt("%.3f", p) + ", fullCSI " + fmt("%.3f", full)};
}

// 12. Same seed, different worker counts, byte-identical CSV.
Outcome determinism(const std::string& reference_csv, const ExperimentSpec& spec) {
    std::ostringstream log;
    const auto a = run_experiment(spec, {1, &log}).to_csv();
    const auto b = run_experiment(spec, {4, &log}).to_csv();
    const bool ok = a == b && a == reference_csv;
    return {ok, std::string("fig5 desk run at 1 and 4 workers vs the reference run: ") + (ok ? "identical" : "differ") +
                    " (" + std::to_string(a.size()) + " bytes)"};
}

}  // namespace

int main() {
    int failures = 0;
    auto report = [&](int id, const char* name, const std::function<Outcome()>& fn) {
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = fn();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        failures += o.pass ? 0 : 1;
        std::printf("%s criterion %d %s: %s [%.1fs]\n", o.pass ? "PASS" : "FAIL", id, name, o.detail.c_str(), secs);
        std::fflush(stdout);
    };

    std::printf("acceptance at desk scale: %d drops x %d blocks, %u workers\n", kDrops, kBlocks, workers());
    std::fflush(stdout);

    report(1, "estimator calibration", estimator_calibration);
    report(2, "channel statistics", channel_statistics);
    report(3, "hardening failure certificate", hardening_failure);

    // One N sweep with all three methods and the three bounds serves 4 and 6.
    std::map<Key, std::vector<double>> sweep;
    std::string sweep_error;
    try {
        auto spec = desk_spec("fig2");
        spec.bounds = {Bound::noCSI, Bound::fullCSI, Bound::pilots};
        sweep = group(run_experiment(spec, {workers(), nullptr}));
    } catch (const std::exception& e) {
        sweep_error = e.what();
    }
    auto from_sweep = [&](const std::function<Outcome(const std::map<Key, std::vector<double>>&)>& fn) {
        return [&, fn] {
            if (!sweep_error.empty()) {
                throw std::runtime_error(sweep_error);
            }
            return fn(sweep);
        };
    };
    report(4, "bound gap at M = 2", from_sweep(bound_gap));
    report(5, "bound closeness at M = 1", [] { return bound_closeness(group(run_experiment(desk_spec("fig7"), {workers(), nullptr}))); });
    report(6, "method ordering", from_sweep(method_ordering));

    std::string fig5_csv;
    report(7, "combiner ordering", [&] {
        const auto t = run_experiment(desk_spec("fig5"), {workers(), nullptr});
        fig5_csv = t.to_csv();
        return combiner_ordering(t);
    });
    report(8, "block-diagonal equivalence", block_equivalence);
    report(9, "power constraints", power_constraints);
    report(10, "cost formulas", cost_formulas);
    report(11, "single AP with N = 80", [] {
        auto spec = desk_spec("fig9");
        spec.sweep_values = {80};
        return single_ap(run_experiment(spec, {workers(), nullptr}));
    });
    report(12, "determinism", [&] { return determinism(fig5_csv, desk_spec("fig5")); });

    std::printf("%d of 12 criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
