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

#include "cfmimo/drop_simulation.hpp"

#include <cmath>
#include <limits>

#include "cfmimo/downlink_estimation.hpp"
#include "cfmimo/linalg.hpp"
#include "cfmimo/parallel.hpp"

namespace cfmimo {

std::string to_string(Method m) {
    switch (m) {
        case Method::same: return "same";
        case Method::separate_local: return "separate_local";
        case Method::separate_csi: return "separate_csi";
        case Method::per_antenna_baseline: return "per_antenna_baseline";
    }
    return "unknown";
}

Method parse_method(const std::string& s) {
    for (auto m : kAllMethods) {
        if (to_string(m) == s) {
            return m;
        }
    }
    throw ConfigError("unknown method '" + s +
                      "' (expected same, separate_local, separate_csi or per_antenna_baseline)");
}

namespace {

// A set of users as seen by the APs. The per-antenna baseline uses a virtual
// model with K * M single-antenna users built from the real one.
struct UserModel {
    int L = 0, N = 0, K = 0, M = 0;
    RMatrix beta;
    std::vector<CMatrix> R;
    PilotBook book;
    std::vector<double> q;
    UplinkStatistics stats;
    std::vector<CMatrix> error_cov;
    std::vector<CMatrix> error_gram;
};

void finish_model(UserModel& m) {
    m.stats = UplinkStatistics(m.R, m.L, m.K, m.N, m.M, m.book, m.q);
    m.error_cov.resize(m.R.size());
    m.error_gram.resize(m.R.size());
    for (int l = 0; l < m.L; ++l) {
        for (int k = 0; k < m.K; ++k) {
            const auto j = static_cast<std::size_t>(l * m.K + k);
            m.error_cov[j] = m.stats.error_cov(l, k);
            m.error_gram[j] = m.stats.error_gram(l, k);
        }
    }
}

UserModel virtual_model(const UserModel& real) {
    UserModel v;
    v.L = real.L;
    v.N = real.N;
    v.K = real.K * real.M;
    v.M = 1;
    v.beta.resize(real.L, v.K);
    v.R.resize(static_cast<std::size_t>(v.L * v.K));
    std::vector<int> groups(static_cast<std::size_t>(v.K));
    v.q.resize(static_cast<std::size_t>(v.K));
    for (int k = 0; k < real.K; ++k) {
        for (int m = 0; m < real.M; ++m) {
            const int u = k * real.M + m;
            groups[static_cast<std::size_t>(u)] = real.book.group_of_user[static_cast<std::size_t>(k)] * real.M + m;
            v.q[static_cast<std::size_t>(u)] = real.q[static_cast<std::size_t>(k)];
            for (int l = 0; l < real.L; ++l) {
                v.beta(l, u) = real.beta(l, k);
                v.R[static_cast<std::size_t>(l * v.K + u)] =
                    real.R[static_cast<std::size_t>(l * real.K + k)].block(static_cast<Index>(m) * real.N,
                                                                          static_cast<Index>(m) * real.N, real.N,
                                                                          real.N);
            }
        }
    }
    v.book = PilotBook::from_groups(real.book.tau_p, 1, groups);
    finish_model(v);
    return v;
}

SelectionSet virtual_selection(const SelectionSet& real) {
    std::vector<std::vector<int>> serving;
    for (int k = 0; k < real.K(); ++k) {
        for (int m = 0; m < real.M(); ++m) {
            serving.push_back({real.serving_ap(k, m)});
        }
    }
    return SelectionSet(real.L(), real.K() * real.M(), 1, std::move(serving));
}

// Everything random about one coherence block, in the real user model.
struct RealBlock {
    ChannelSet H;
    UplinkObservation obs;
    std::vector<CMatrix> dl_noise;  // per user, M x tau_p
};

ChannelSet virtual_channels(const ChannelSet& h, int M) {
    ChannelSet v(h.L, h.K * M, h.N, 1);
    for (int l = 0; l < h.L; ++l) {
        for (int k = 0; k < h.K; ++k) {
            for (int m = 0; m < M; ++m) {
                v.at(l, k * M + m) = h.at(l, k).col(m);
            }
        }
    }
    return v;
}

// Unnormalized effective channels raw[t][k][i] = H_k^H W-bar_i and the
// matching column power table averaged over blocks.
struct Stage1 {
    std::vector<std::vector<std::vector<CMatrix>>> raw;
    ColumnPowerTable colpow;
};

std::vector<std::vector<CMatrix>> raw_same(const ChannelSet& h, const std::vector<CMatrix>& w) {
    std::vector<CMatrix> stacked(static_cast<std::size_t>(h.K));
    for (int k = 0; k < h.K; ++k) {
        stacked[static_cast<std::size_t>(k)] = h.stacked(k);
    }
    std::vector<std::vector<CMatrix>> out(static_cast<std::size_t>(h.K), std::vector<CMatrix>(static_cast<std::size_t>(h.K)));
    for (int k = 0; k < h.K; ++k) {
        for (int i = 0; i < h.K; ++i) {
            out[static_cast<std::size_t>(k)][static_cast<std::size_t>(i)] =
                effective_channel(stacked[static_cast<std::size_t>(k)], w[static_cast<std::size_t>(i)]);
        }
    }
    return out;
}

std::vector<std::vector<CMatrix>> raw_separate(const ChannelSet& h, const std::vector<CMatrix>& w,
                                               const SelectionSet& sel) {
    const int K = h.K, M = h.M;
    std::vector<std::vector<CMatrix>> out(static_cast<std::size_t>(K),
                                          std::vector<CMatrix>(static_cast<std::size_t>(K), CMatrix::Zero(M, M)));
    for (int i = 0; i < K; ++i) {
        for (int m = 0; m < M; ++m) {
            const int l = sel.serving_ap(i, m);
            const auto col = w[static_cast<std::size_t>(l * K + i)].col(m);
            for (int k = 0; k < K; ++k) {
                out[static_cast<std::size_t>(k)][static_cast<std::size_t>(i)].col(m) = h.at(l, k).adjoint() * col;
            }
        }
    }
    return out;
}

}  // namespace

struct DropSimulation::Impl {
    SystemConfig config;
    RngSeed seed = 0;
    DropOptions options;
    NetworkRealization net;
    ChannelSampler sampler;
    UserModel real;
    SelectionSet selection;

    RealBlock make_block(int t) const {
        RealBlock b;
        const RngSeed bs = derive_seed(seed, {tag(StreamTag::block), static_cast<std::uint64_t>(t)});
        Rng ch(derive_seed(bs, tag(StreamTag::channel)));
        Rng ul(derive_seed(bs, tag(StreamTag::uplink_noise)));
        Rng dl(derive_seed(bs, tag(StreamTag::downlink_noise)));
        b.H = sampler.sample(ch);
        b.obs = receive_uplink_pilots(b.H, real.book, real.q, ul);
        b.dl_noise.reserve(static_cast<std::size_t>(config.K));
        for (int k = 0; k < config.K; ++k) {
            b.dl_noise.push_back(dl.cn_matrix(config.M, real.book.tau_p));
        }
        return b;
    }

    std::vector<MethodResult> run(const std::vector<Method>& methods, const std::vector<Bound>& bounds) const;
};

namespace {

struct Evaluation {
    std::vector<SEReport> users;
};

// Applies the column scales, runs the downlink pilot phase and evaluates the
// requested bounds for every user of the model.
Evaluation evaluate_bounds(const UserModel& model, const Stage1& s1, const RMatrix& scales,
                           const std::vector<std::vector<Index>>& streams,
                           const std::vector<std::vector<CMatrix>>& dl_noise, const std::vector<Bound>& bounds,
                           const SystemConfig& config, unsigned workers) {
    const int K = model.K;
    const Index M = model.M;
    const std::size_t n = s1.raw.size();
    const auto Ku = static_cast<std::size_t>(K);

    // b[k][t][i] = B_ki in block t
    std::vector<EffectiveSamples> b(Ku, EffectiveSamples(n, std::vector<CMatrix>(Ku)));
    for (std::size_t t = 0; t < n; ++t) {
        for (std::size_t k = 0; k < Ku; ++k) {
            for (std::size_t i = 0; i < Ku; ++i) {
                b[k][t][i] = s1.raw[t][k][i] * scales.row(static_cast<Index>(i)).transpose().cast<Complex>().asDiagonal();
            }
        }
    }

    bool need_pilots = false;
    for (auto bd : bounds) {
        need_pilots = need_pilots || uses_downlink_pilots(bd);
    }

    std::vector<EffectiveSamples> b_hat;
    std::vector<std::vector<CMatrix>> c_err(Ku, std::vector<CMatrix>(Ku));
    if (need_pilots) {
        b_hat.assign(Ku, EffectiveSamples(n, std::vector<CMatrix>(Ku)));
        // Downlink pilot signal of every user in every block.
        std::vector<std::vector<CMatrix>> y_pilot(Ku, std::vector<CMatrix>(n));
        parallel_for(Ku * n, workers, [&](std::size_t j) {
            const std::size_t k = j / n, t = j % n;
            y_pilot[k][t] = receive_downlink_pilots(b[k][t], model.book, model.q, dl_noise[t][k]);
        });
        parallel_for(Ku * Ku, workers, [&](std::size_t j) {
            const std::size_t k = j / Ku, i = j % Ku;
            std::vector<CVector> obs(n);
            LinearMoments mom(M * M, M * M);
            for (std::size_t t = 0; t < n; ++t) {
                obs[t] = downlink_observation(y_pilot[k][t], model.book, static_cast<int>(i));
                mom.add(linalg::vec(b[k][t][i]), obs[t]);
            }
            const LmmseEstimator est(mom);
            c_err[k][i] = linalg::sum_diagonal_blocks(est.error_cov(), M, M);
            for (std::size_t t = 0; t < n; ++t) {
                b_hat[k][t][i] = linalg::unvec(est.estimate(obs[t]), M, M);
            }
        });
    }

    Evaluation ev;
    ev.users.resize(Ku);
    parallel_for(Ku, workers, [&](std::size_t k) {
        SEReport rep;
        rep.se.fill(std::numeric_limits<double>::quiet_NaN());
        rep.prelog_single = config.prelog_single();
        rep.prelog_double = config.prelog_double();
        rep.n_samples = static_cast<Index>(n);
        const auto& s = streams[k];
        const int kk = static_cast<int>(k);
        for (auto bd : bounds) {
            switch (bd) {
                case Bound::noCSI: rep[bd] = se_nocsi(b[k], kk, s, rep.prelog_single); break;
                case Bound::fullCSI: rep[bd] = se_perfect_csi(b[k], kk, s, rep.prelog_single); break;
                case Bound::pilots:
                    rep[bd] = se_pilots(b[k], b_hat[k], c_err[k], kk, s, Combiner::mmse, rep.prelog_double);
                    break;
                case Bound::pilotsZF:
                    rep[bd] = se_pilots(b[k], b_hat[k], c_err[k], kk, s, Combiner::zf, rep.prelog_double);
                    break;
            }
        }
        ev.users[k] = rep;
    });
    return ev;
}

std::vector<std::vector<Index>> plan_streams(const StreamPlan& plan) {
    std::vector<std::vector<Index>> out;
    for (int k = 0; k < plan.users(); ++k) {
        out.push_back(plan.active_indices(k));
    }
    return out;
}

}  // namespace

DropSimulation::DropSimulation(const SystemConfig& config, RngSeed drop_seed, DropOptions options)
    : impl_(std::make_unique<Impl>()) {
    config.validate();
    if (options.n_blocks < 2) {
        throw ConfigError("n_blocks must be at least 2");
    }
    auto& d = *impl_;
    d.config = config;
    d.seed = drop_seed;
    d.options = options;
    d.net = drop_network(config, drop_seed);
    d.sampler = ChannelSampler(d.net);
    d.real.L = config.L;
    d.real.N = config.N;
    d.real.K = config.K;
    d.real.M = config.M;
    d.real.beta = d.net.beta;
    d.real.R = d.net.R;
    d.real.book = build_pilot_book(config, d.net.beta, options.assignment);
    d.real.q.assign(static_cast<std::size_t>(config.K), config.ul_power);
    finish_model(d.real);
}

DropSimulation::~DropSimulation() = default;
DropSimulation::DropSimulation(DropSimulation&&) noexcept = default;
DropSimulation& DropSimulation::operator=(DropSimulation&&) noexcept = default;

const SystemConfig& DropSimulation::config() const { return impl_->config; }
const NetworkRealization& DropSimulation::network() const { return impl_->net; }
const PilotBook& DropSimulation::pilot_book() const { return impl_->real.book; }

const SelectionSet& DropSimulation::selection() const {
    if (impl_->selection.K() == 0) {
        impl_->selection = select_serving_aps(impl_->net.beta, impl_->config.M);
    }
    return impl_->selection;
}

MethodResult DropSimulation::run(Method method, const std::vector<Bound>& bounds) const {
    return run(std::vector<Method>{method}, bounds).front();
}

std::vector<MethodResult> DropSimulation::run(const std::vector<Method>& methods,
                                              const std::vector<Bound>& bounds) const {
    bool separate = false;
    for (auto m : methods) {
        separate = separate || m != Method::same;
    }
    if (separate) {
        selection();
    }
    return impl_->run(methods, bounds);
}

std::vector<MethodResult> DropSimulation::Impl::run(const std::vector<Method>& methods,
                                                    const std::vector<Bound>& bounds) const {
    const int n = options.n_blocks;
    const auto nu = static_cast<std::size_t>(n);
    const unsigned workers = options.workers;

    bool want_virtual = false;
    bool want_sharing = false;
    bool want_local = false;
    for (auto m : methods) {
        want_virtual = want_virtual || m == Method::per_antenna_baseline;
        want_sharing = want_sharing || m == Method::separate_csi;
        want_local = want_local || m == Method::separate_local;
    }

    UserModel virt;
    SelectionSet virt_sel;
    CMatrix virt_static;
    if (want_virtual) {
        virt = virtual_model(real);
        virt_sel = virtual_selection(selection);
        virt_static = csi_sharing_static_term(virt.error_cov, virt_sel, virt.q, virt.N);
    }
    CMatrix sharing_term;
    std::vector<CMatrix> local_terms;
    if (want_sharing) {
        sharing_term = csi_sharing_static_term(real.error_cov, selection, real.q, real.N);
    }
    if (want_local) {
        local_terms = local_static_terms(real.error_cov, real.R, selection, real.q, real.N);
    }

    const std::size_t nm = methods.size();
    // Per block, per method: raw effective channels and column powers.
    std::vector<std::vector<std::vector<std::vector<CMatrix>>>> raw(nm, std::vector<std::vector<std::vector<CMatrix>>>(nu));
    std::vector<std::vector<ColumnPowerTable>> colpow(nm, std::vector<ColumnPowerTable>(nu));
    std::vector<std::vector<CMatrix>> real_noise(nu);
    std::vector<std::vector<CMatrix>> virt_noise(want_virtual ? nu : 0);

    parallel_for(nu, workers, [&](std::size_t t) {
        RealBlock blk = make_block(static_cast<int>(t));
        const ChannelSet h_hat = real.stats.estimate(blk.obs, real.book);
        for (std::size_t j = 0; j < nm; ++j) {
            switch (methods[j]) {
                case Method::same: {
                    const auto w = mmse_precoder_centralized(h_hat, real.error_gram, real.q);
                    raw[j][t] = raw_same(blk.H, w);
                    colpow[j][t] = column_powers_same(w, real.L, real.N);
                    break;
                }
                case Method::separate_csi: {
                    const auto w = mmse_precoder_csi_sharing(h_hat, sharing_term, selection, real.q, true);
                    raw[j][t] = raw_separate(blk.H, w, selection);
                    colpow[j][t] = column_powers_separate(w, selection);
                    break;
                }
                case Method::separate_local: {
                    const auto w = mmse_precoder_local(h_hat, local_terms, selection, real.q, true);
                    raw[j][t] = raw_separate(blk.H, w, selection);
                    colpow[j][t] = column_powers_separate(w, selection);
                    break;
                }
                case Method::per_antenna_baseline: {
                    const ChannelSet hv = virtual_channels(blk.H, real.M);
                    const ChannelSet hv_hat = virt.stats.estimate(blk.obs, virt.book);
                    const auto w = mmse_precoder_csi_sharing(hv_hat, virt_static, virt_sel, virt.q, true);
                    raw[j][t] = raw_separate(hv, w, virt_sel);
                    colpow[j][t] = column_powers_separate(w, virt_sel);
                    break;
                }
            }
        }
        if (want_virtual) {
            auto& vn = virt_noise[t];
            for (const auto& z : blk.dl_noise) {
                for (Index m = 0; m < z.rows(); ++m) {
                    vn.push_back(z.row(m));
                }
            }
        }
        real_noise[t] = std::move(blk.dl_noise);
    });

    std::vector<MethodResult> results;
    results.reserve(nm);
    for (std::size_t j = 0; j < nm; ++j) {
        const Method method = methods[j];
        const bool is_virtual = method == Method::per_antenna_baseline;
        const UserModel& model = is_virtual ? virt : real;
        const SelectionSet& sel = is_virtual ? virt_sel : selection;

        Stage1 s1;
        s1.raw = std::move(raw[j]);
        s1.colpow = ColumnPowerTable(model.L, model.K, model.M);
        for (const auto& c : colpow[j]) {
            s1.colpow.add(c);
        }
        s1.colpow.scale(1.0 / n);

        MethodResult res;
        res.method = method;
        const auto& noise = is_virtual ? virt_noise : real_noise;

        if (method == Method::same) {
            res.plan = StreamPlan::full(model.K, model.M);
            if (options.schedule_streams && model.M > 1) {
                auto evaluator = [&](const StreamPlan& plan) {
                    const RMatrix c = normalize_same_stream(s1.colpow, plan, model.beta, config.dl_power);
                    const auto ev = evaluate_bounds(model, s1, c, plan_streams(plan), noise, {Bound::pilots},
                                                    config, workers);
                    double sum = 0.0;
                    for (const auto& u : ev.users) {
                        sum += u[Bound::pilots];
                    }
                    return sum;
                };
                res.schedule = schedule_streams_same(evaluator, res.plan);
                res.plan = res.schedule.plan;
            }
            res.scales = normalize_same_stream(s1.colpow, res.plan, model.beta, config.dl_power);
        } else {
            res.plan = StreamPlan::full(model.K, model.M);
            res.scales = normalize_separate_stream(s1.colpow, sel, model.beta, config.dl_power);
        }
        res.ap_power = per_ap_power(s1.colpow, res.scales);

        const auto ev = evaluate_bounds(model, s1, res.scales, plan_streams(res.plan), noise, bounds, config, workers);
        if (is_virtual) {
            res.users.resize(static_cast<std::size_t>(config.K));
            for (int k = 0; k < config.K; ++k) {
                SEReport rep = ev.users[static_cast<std::size_t>(k * config.M)];
                for (int m = 1; m < config.M; ++m) {
                    const auto& other = ev.users[static_cast<std::size_t>(k * config.M + m)];
                    for (std::size_t b = 0; b < rep.se.size(); ++b) {
                        rep.se[b] += other.se[b];
                    }
                }
                res.users[static_cast<std::size_t>(k)] = rep;
            }
        } else {
            res.users = ev.users;
        }
        results.push_back(std::move(res));
    }
    return results;
}

}  // namespace cfmimo
