// SPDX-License-Identifier: Apache-2.0
//
// dmisac: bounds and estimators for distributed multi-static ISAC sensing
// Copyright (C) 2026 The dmisac authors
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

// Scenario builders and brute-force oracles shared by the test binaries. Oracles here only use the
// waveform samples and geometry, never the analytic information-matrix code.

#include <cmath>
#include <functional>
#include <span>
#include <vector>

#include "dmisac/fim.hpp"
#include "dmisac/scenario.hpp"
#include "dmisac/signal.hpp"

namespace dmisac::testing
{
    inline Vec2 polar(double radius, double azimuth_deg)
    {
        const double a = azimuth_deg * kPi / 180.0;
        return {radius * std::cos(a), radius * std::sin(a)};
    }

    inline Eigen::MatrixXcd uniform_rcs(std::size_t n, std::size_t k, double scale = 1.0)
    {
        return Eigen::MatrixXcd::Constant(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(k),
                                          scale * cplx(std::sqrt(0.5), std::sqrt(0.5)));
    }

    // 7 x 7 ring of radius 5 km: transmitters on the upper half, receivers mirrored below.
    inline Scenario ring(WaveformKind kind = WaveformKind::GaussianOcdm, double T = 1e-3, int M = 128,
                         double fs = 1e5, double senr_db = 0.0)
    {
        Scenario s;
        s.name = "ring";
        for (double az : {30.0, 50.0, 70.0, 90.0, 110.0, 130.0, 150.0})
        {
            s.nodes.tx.push_back(polar(5000.0, az));
            s.nodes.rx.push_back(polar(5000.0, -az));
        }
        Target t;
        t.velocity = Vec2(-15.0, 0.0);
        t.rcs = uniform_rcs(7, 7);
        s.targets = {t};
        s.radio = make_radio(7, 3e9, senr_db, fs, T);
        s.waveform.kind = kind;
        s.waveform.pulse_param = T;
        s.waveform.num_chirps = M;
        return s;
    }

    // Small asymmetric layout with `n` transmitters and `k` receivers.
    inline Scenario small(std::size_t n = 2, std::size_t k = 2, int M = 16, double T = 1e-2, double fs = 1e3,
                          double senr_db = 0.0)
    {
        const Vec2 tx[] = {{-4000, 3000}, {-1000, 4500}, {2000, 4000}, {4500, 1500}};
        const Vec2 rx[] = {{-3500, -3000}, {500, -4500}, {4000, -2500}};
        Scenario s;
        s.nodes.tx.assign(tx, tx + n);
        s.nodes.rx.assign(rx, rx + k);
        Target t;
        t.location = Vec2(120.0, -80.0);
        t.velocity = Vec2(20.0, 30.0);
        t.rcs = uniform_rcs(n, k);
        for (Eigen::Index i = 0; i < t.rcs.size(); ++i)
            t.rcs(i) *= std::polar(1.0 + 0.1 * static_cast<double>(i), 0.7 * static_cast<double>(i));
        s.targets = {t};
        s.radio = make_radio(n, 3e9, senr_db, fs, T);
        s.waveform.kind = WaveformKind::GaussianOcdm;
        s.waveform.pulse_param = T;
        s.waveform.num_chirps = M;
        return s;
    }

    // Noiseless per-link echo sampled on integer multiples of 1/fs, parametrised directly by the
    // per-link delay, Doppler and complex RCS.
    struct LinkEcho
    {
        const Waveform *w = nullptr;
        double amplitude = 1.0; // sqrt(P rho) |b| with the beam phase folded into `beam`
        cplx beam{1.0, 0.0};
        cplx symbol{1.0, 0.0};
        double fs = 1.0;
        long first = 0, last = 0;

        cplx at(long i, double tau, double f, cplx alpha) const
        {
            const double t = static_cast<double>(i) / fs;
            return alpha * symbol * amplitude * beam * (*w)(t - tau) * std::exp(cplx(0.0, kTwoPi * f * t));
        }
    };

    // Discrete log-likelihood of one link as a function of (tau, f, Re alpha, Im alpha) given data r:
    //   (2/sigma^2) Re sum r^* mu - (1/sigma^2) sum |mu|^2
    inline double link_llf(const LinkEcho &e, const std::vector<cplx> &r, double sigma2, const Eigen::Vector4d &phi)
    {
        double v = 0.0;
        const cplx alpha(phi[2], phi[3]);
        for (long i = e.first; i <= e.last; ++i)
        {
            const cplx mu = e.at(i, phi[0], phi[1], alpha);
            v += 2.0 * (std::conj(r[static_cast<std::size_t>(i - e.first)]) * mu).real() - std::norm(mu);
        }
        return v / sigma2;
    }

    // Central-difference Hessian of f at x with per-coordinate steps h.
    inline Eigen::MatrixXd fd_hessian(const std::function<double(const Eigen::VectorXd &)> &f,
                                      const Eigen::VectorXd &x, const Eigen::VectorXd &h)
    {
        const Eigen::Index n = x.size();
        Eigen::MatrixXd H(n, n);
        for (Eigen::Index i = 0; i < n; ++i)
            for (Eigen::Index j = i; j < n; ++j)
            {
                auto at = [&](double si, double sj) {
                    Eigen::VectorXd y = x;
                    y[i] += si * h[i];
                    y[j] += sj * h[j];
                    return f(y);
                };
                H(i, j) = H(j, i) = (at(1, 1) - at(1, -1) - at(-1, 1) + at(-1, -1)) / (4.0 * h[i] * h[j]);
            }
        return H;
    }

    // Fisher information over (x, y, vx, vy, Re alpha, Im alpha) of a single target from finite
    // differences of the sampled noiseless echo: (2/sigma^2) Re sum dmu^H dmu.
    inline Eigen::MatrixXd brute_force_theta_fim(const Scenario &s, std::span<const Waveform> w, std::size_t q)
    {
        const std::size_t L = s.n_links();
        const Eigen::Index P = static_cast<Eigen::Index>(4 + 2 * L);
        const double lambda = s.radio.wavelength(), fs = s.radio.sample_rate_hz;
        const Target &t = s.targets[q];
        Eigen::MatrixXd J = Eigen::MatrixXd::Zero(P, P);
        for (std::size_t n = 0; n < s.n_tx(); ++n)
            for (std::size_t k = 0; k < s.n_rx(); ++k)
            {
                const std::size_t li = s.link_index(n, k);
                const cplx alpha = t.rcs(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(k));
                const double amp = std::sqrt(s.radio.total_energy_j * s.radio.energy_alloc[static_cast<Eigen::Index>(n)]);
                auto mu = [&](const Vec2 &l, const Vec2 &v, cplx a, double time) {
                    const double tau = compute_delay(s.nodes.tx[n], s.nodes.rx[k], l).total;
                    const double f = compute_doppler(s.nodes.tx[n], s.nodes.rx[k], l, v, lambda);
                    return a * s.radio.symbol * amp * s.radio.beam_weights[static_cast<Eigen::Index>(n)] *
                           w[n](time - tau) * std::exp(cplx(0.0, kTwoPi * f * time));
                };
                const double tau0 = compute_delay(s.nodes.tx[n], s.nodes.rx[k], t.location).total;
                const double half = 7.0 * w[n].pulse_param();
                const long lo = static_cast<long>(std::floor((tau0 - half) * fs));
                const long hi = static_cast<long>(std::ceil((tau0 + half) * fs));
                const double hl = 1e-3, hv = 1e-4;
                for (long i = lo; i <= hi; ++i)
                {
                    const double time = static_cast<double>(i) / fs;
                    Eigen::VectorXcd d = Eigen::VectorXcd::Zero(P);
                    for (int c = 0; c < 2; ++c)
                    {
                        Vec2 e = Vec2::Zero();
                        e[c] = 1.0;
                        d[c] = (mu(t.location + hl * e, t.velocity, alpha, time) -
                                mu(t.location - hl * e, t.velocity, alpha, time)) / (2 * hl);
                        d[2 + c] = (mu(t.location, t.velocity + hv * e, alpha, time) -
                                    mu(t.location, t.velocity - hv * e, alpha, time)) / (2 * hv);
                    }
                    const cplx base = mu(t.location, t.velocity, 1.0, time);
                    d[static_cast<Eigen::Index>(4 + li)] = base;
                    d[static_cast<Eigen::Index>(4 + L + li)] = cplx(0.0, 1.0) * base;
                    J += (2.0 / s.radio.noise_var_w) * (d.conjugate() * d.transpose()).real();
                }
            }
        return J;
    }
}

namespace dmisac::testing
{
    // Waveform written out from its definition, independent of the library's parametrisation:
    //   OFDM: (2/T^2)^(1/4) exp(-pi t^2/T^2) exp(j 2 pi (n-1) t / T)
    //   OCDM: (2/T^2)^(1/4) exp(-pi t^2/T^2) exp(j pi M (t - (n-1) T/M)^2 / T^2)
    inline cplx reference_waveform(WaveformKind kind, int n, double T, int M, double t)
    {
        const double env = std::pow(2.0 / (T * T), 0.25) * std::exp(-kPi * t * t / (T * T));
        if (kind == WaveformKind::GaussianOfdm)
            return env * std::exp(cplx(0.0, kTwoPi * (n - 1) * t / T));
        const double u = t - (n - 1) * T / M;
        return env * std::exp(cplx(0.0, kPi * M * u * u / (T * T)));
    }
}
