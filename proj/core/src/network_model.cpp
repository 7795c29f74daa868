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

#include "cfmimo/network_model.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "cfmimo/linalg.hpp"

namespace cfmimo {

namespace {

constexpr double kPi = std::numbers::pi;

CMatrix steering_outer(int n, double angle, double spacing) {
    CVector a(n);
    for (int i = 0; i < n; ++i) {
        a(i) = std::polar(1.0, -2.0 * kPi * spacing * i * std::sin(angle));
    }
    return a * a.adjoint();
}

double gaussian_pdf(double x, double sigma) {
    return std::exp(-0.5 * (x / sigma) * (x / sigma)) / (sigma * std::sqrt(2.0 * kPi));
}

// Normal density wrapped onto [-pi, pi).
double wrapped_gaussian_pdf(double x, double sigma) {
    if (sigma < 2.0) {
        double acc = 0.0;
        const int images = 2 + static_cast<int>(std::ceil(6.0 * sigma / (2.0 * kPi)));
        for (int k = -images; k <= images; ++k) {
            acc += gaussian_pdf(x + 2.0 * kPi * k, sigma);
        }
        return acc;
    }
    double acc = 1.0;
    for (int n = 1; n < 64; ++n) {
        const double c = std::exp(-0.5 * n * n * sigma * sigma);
        if (c < 1e-18) {
            break;
        }
        acc += 2.0 * c * std::cos(n * x);
    }
    return acc / (2.0 * kPi);
}

}  // namespace

double pathloss_db(double distance_m) {
    return -30.5 - 36.7 * std::log10(distance_m);
}

CMatrix ula_local_scattering(int n, double angle, double asd, double spacing) {
    if (n < 1) {
        throw ConfigError("ula_local_scattering: n must be positive");
    }
    if (!(asd >= 0.0) || !(spacing > 0.0)) {
        throw ConfigError("ula_local_scattering: asd must be >= 0 and spacing > 0");
    }
    if (asd < 1e-9) {
        return steering_outer(n, angle, spacing);
    }

    // Trapezoid rule over the angular deviation. When the density lives well
    // inside (-pi, pi) a truncated window is enough; otherwise integrate one
    // full period against the wrapped density, which is exact-periodic.
    const double max_phase_rate = 2.0 * kPi * spacing * (n - 1);
    const bool windowed = 20.0 * asd <= kPi;
    const double half = windowed ? 20.0 * asd : kPi;
    const double span = 2.0 * half;
    const auto q = static_cast<int>(std::clamp(
        std::ceil(span * (2.0 * max_phase_rate + 20.0 / asd)) + 512.0, 512.0, 4.0e6));
    const double h = span / q;

    std::vector<double> delta(static_cast<std::size_t>(q));
    std::vector<double> weight(static_cast<std::size_t>(q));
    double total = 0.0;
    for (int i = 0; i < q; ++i) {
        const double d = -half + h * (windowed ? i + 0.5 : i);
        delta[static_cast<std::size_t>(i)] = d;
        const double w = windowed ? gaussian_pdf(d, asd) : wrapped_gaussian_pdf(d, asd);
        weight[static_cast<std::size_t>(i)] = w;
        total += w;
    }

    CVector first_row(n);
    first_row(0) = 1.0;
    for (int dist = 1; dist < n; ++dist) {
        const double c = 2.0 * kPi * spacing * dist;
        Complex acc = 0.0;
        for (int i = 0; i < q; ++i) {
            acc += weight[static_cast<std::size_t>(i)] *
                   std::polar(1.0, c * std::sin(angle + delta[static_cast<std::size_t>(i)]));
        }
        first_row(dist) = acc / total;
    }

    CMatrix R(n, n);
    for (int a = 0; a < n; ++a) {
        for (int b = 0; b < n; ++b) {
            R(a, b) = b >= a ? first_row(b - a) : std::conj(first_row(a - b));
        }
    }
    return R;
}

CMatrix local_scattering_correlation(double ap_angle, double ue_angle, double asd, int N, int M,
                                     double spacing) {
    const CMatrix r_ap = ula_local_scattering(N, ap_angle, asd, spacing);
    const CMatrix r_ue = ula_local_scattering(M, ue_angle, asd, spacing);
    CMatrix R = linalg::hermitian_part(linalg::kron(r_ue, r_ap));
    const double tol = 1e-10 * std::max(1.0, R.real().trace() / R.rows());
    if (linalg::min_eigenvalue_hermitian(R) < -tol) {
        throw NumericalError("local_scattering_correlation: result is not positive semidefinite");
    }
    return R;
}

int NetworkRealization::master_ap(int k) const {
    int best = 0;
    for (int l = 1; l < L; ++l) {
        if (beta(l, k) > beta(best, k)) {
            best = l;
        }
    }
    return best;
}

NetworkRealization drop_network(const SystemConfig& config, RngSeed seed) {
    config.validate();
    NetworkRealization net;
    net.L = config.L;
    net.N = config.N;
    net.K = config.K;
    net.M = config.M;
    Rng rng(derive_seed(seed, tag(StreamTag::geometry)));

    net.ap_positions.resize(config.L, 2);
    for (int l = 0; l < config.L; ++l) {
        net.ap_positions(l, 0) = rng.uniform(0.0, config.area_side);
        net.ap_positions(l, 1) = rng.uniform(0.0, config.area_side);
    }
    net.ue_positions.resize(config.K, 2);
    for (int k = 0; k < config.K; ++k) {
        net.ue_positions(k, 0) = rng.uniform(0.0, config.area_side);
        net.ue_positions(k, 1) = rng.uniform(0.0, config.area_side);
    }

    const double asd = config.asd_deg * kPi / 180.0;
    const int nm = config.N * config.M;
    net.beta.resize(config.L, config.K);
    net.R.resize(static_cast<std::size_t>(config.L * config.K));
    for (int l = 0; l < config.L; ++l) {
        for (int k = 0; k < config.K; ++k) {
            const double dx = net.ue_positions(k, 0) - net.ap_positions(l, 0);
            const double dy = net.ue_positions(k, 1) - net.ap_positions(l, 1);
            const double dist = std::sqrt(dx * dx + dy * dy + config.height_offset * config.height_offset);
            const double gain_db =
                pathloss_db(dist) + config.shadowing_db * rng.normal() - config.noise_dbm;
            const double beta = std::pow(10.0, gain_db / 10.0);
            net.beta(l, k) = beta;
            if (config.fading == Fading::iid) {
                net.R[static_cast<std::size_t>(l * config.K + k)] = beta * CMatrix::Identity(nm, nm);
            } else {
                const double ap_angle = std::atan2(dy, dx);
                const double ue_angle = std::atan2(-dy, -dx);
                net.R[static_cast<std::size_t>(l * config.K + k)] =
                    beta * local_scattering_correlation(ap_angle, ue_angle, asd, config.N, config.M,
                                                        config.antenna_spacing);
            }
        }
    }
    return net;
}

ChannelSet::ChannelSet(int L_, int K_, int N_, int M_)
    : L(L_), K(K_), N(N_), M(M_), H(static_cast<std::size_t>(L_ * K_), CMatrix::Zero(N_, M_)) {}

CVector ChannelSet::h(int l, int k) const {
    return linalg::vec(at(l, k));
}

CMatrix ChannelSet::stacked(int k) const {
    CMatrix out(static_cast<Index>(L) * N, M);
    for (int l = 0; l < L; ++l) {
        out.middleRows(static_cast<Index>(l) * N, N) = at(l, k);
    }
    return out;
}

ChannelSampler::ChannelSampler(const std::vector<CMatrix>& R, int L, int K, int N, int M)
    : L_(L), K_(K), N_(N), M_(M) {
    if (R.size() != static_cast<std::size_t>(L * K)) {
        throw ConfigError("ChannelSampler: expected L*K correlation matrices");
    }
    sqrt_.reserve(R.size());
    for (const auto& r : R) {
        if (r.rows() != N * M || r.cols() != N * M) {
            throw ConfigError("ChannelSampler: correlation matrix has wrong dimension");
        }
        sqrt_.push_back(linalg::psd_sqrt(r));
    }
}

ChannelSampler::ChannelSampler(const NetworkRealization& net)
    : ChannelSampler(net.R, net.L, net.K, net.N, net.M) {}

ChannelSet ChannelSampler::sample(Rng& rng) const {
    ChannelSet out(L_, K_, N_, M_);
    for (int l = 0; l < L_; ++l) {
        for (int k = 0; k < K_; ++k) {
            const CVector z = rng.cn_vector(static_cast<Index>(N_) * M_);
            out.at(l, k) = linalg::unvec(sqrt_corr(l, k) * z, N_, M_);
        }
    }
    return out;
}

ChannelSet sample_channels(const NetworkRealization& net, RngSeed seed) {
    Rng rng(derive_seed(seed, tag(StreamTag::channel)));
    return ChannelSampler(net).sample(rng);
}

}  // namespace cfmimo
