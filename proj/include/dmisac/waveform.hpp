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

#include <array>
#include <span>
#include <string>
#include <vector>

#include "dmisac/common.hpp"

namespace dmisac
{
    enum class WaveformKind
    {
        GaussianOfdm,
        GaussianOcdm
    };

    const char *to_string(WaveformKind kind);
    WaveformKind waveform_kind_from_string(const std::string &name);

    // Unit-energy Gaussian-pulse subcarrier. Both families are Gaussian chirps:
    //
    //   s(t) = amp * exp(-(a - j b) t^2 + j c t + j d)
    //
    // OFDM subcarrier n:  b = 0,          c = 2 pi (n-1) / T
    // OCDM subcarrier n:  b = pi M / T^2, c = -2 pi (n-1) / T, d = pi M t0^2 / T^2, t0 = (n-1) T / M
    // with a = pi / T^2 and amp = (2 / T^2)^(1/4).
    class Waveform
    {
    public:
        static Waveform make(WaveformKind kind, int subcarrier, double pulse_param, int num_chirps = 1);

        cplx operator()(double t) const { return derivative(t, 0); }

        // d^order s / dt^order at t, order in [0, 2].
        cplx derivative(double t, int order) const;

        WaveformKind kind() const { return kind_; }
        int subcarrier() const { return subcarrier_; }
        double pulse_param() const { return pulse_; }
        int num_chirps() const { return chirps_; }

        double amplitude() const { return amp_; }
        double envelope_rate() const { return a_; }
        double chirp_rate() const { return b_; }
        double frequency_offset() const { return c_; }
        double phase_offset() const { return d_; }

        // Half-width of the window holding all but ~1e-49 of the energy.
        double support_halfwidth() const { return 6.0 * pulse_; }

    private:
        WaveformKind kind_ = WaveformKind::GaussianOfdm;
        int subcarrier_ = 1;
        double pulse_ = 0.0;
        int chirps_ = 1;
        double amp_ = 0.0, a_ = 0.0, b_ = 0.0, c_ = 0.0, d_ = 0.0;
    };

    struct WaveformMoments
    {
        double sebw = 0.0;      // Hz^2, int f^2 |S(f)|^2 df
        double setw = 0.0;      // s^2,  int t^2 |s(t)|^2 dt
        cplx cross_term{};      // int t s^*(t) d s(t - tau)/d tau dt at tau = 0
        double mean_freq = 0.0; // Hz
        double mean_time = 0.0; // s

        // Cross term of a pulse delayed by tau.
        cplx cross_term_at(double tau) const { return cross_term - cplx(0.0, kTwoPi * mean_freq * tau); }

        // int t^2 |s(t - tau)|^2 dt
        double second_time_moment_at(double tau) const { return setw + 2.0 * tau * mean_time + tau * tau; }
    };

    WaveformMoments moments(const Waveform &w);

    // Same quantities by adaptive quadrature of the defining integrals.
    WaveformMoments moments_by_quadrature(const Waveform &w);

    // Energy int |s|^2 dt by quadrature.
    double energy_by_quadrature(const Waveform &w);

    // Table of I[m][m'][p] = int t^p s^(m)(t - tau_q) conj(s^(m')(t - tau_l)) exp(j 2 pi df t) dt
    // for derivative orders m, m' and powers p in [0, 2].
    struct PairIntegrals
    {
        std::array<cplx, 27> v{};
        cplx &operator()(int m, int mp, int p) { return v[static_cast<std::size_t>(9 * m + 3 * mp + p)]; }
        cplx operator()(int m, int mp, int p) const { return v[static_cast<std::size_t>(9 * m + 3 * mp + p)]; }
    };

    PairIntegrals pair_integrals(const Waveform &w, double tau_q, double tau_l, double delta_f);
    PairIntegrals pair_integrals_by_quadrature(const Waveform &w, double tau_q, double tau_l, double delta_f);

    // Y(tau_q, tau_l, df) = int s(t - tau_q) s^*(t - tau_l) exp(j 2 pi df t) dt and its partials.
    // Second partials with respect to both q and l parameters follow the multi-target FIM layout:
    //   d2_tautau = d^2 Y / d tau_q d tau_l, d2_ff = d^2 Y / d f_q d f_l, d2_tauf = d^2 Y / d tau_q d f_l,
    //   d2_tauq2 = d^2 Y / d tau_q^2, d2_fq2 = d^2 Y / d f_q^2, d2_taufq = d^2 Y / d tau_q d f_q,
    // where df = f_q - f_l.
    struct CrossCorr
    {
        cplx value{};
        cplx d_tau{}, d_f{};
        cplx d2_tautau{}, d2_ff{}, d2_tauf{};
        cplx d2_tauq2{}, d2_fq2{}, d2_taufq{};
    };

    enum class IntegrationMethod
    {
        Analytic,
        Quadrature
    };

    CrossCorr cross_corr(const Waveform &w, double tau_q, double tau_l, double delta_f,
                         IntegrationMethod method = IntegrationMethod::Analytic);

    // |AF|^2 normalised to 1 at the origin; rows follow tau_grid, columns f_grid.
    Eigen::MatrixXd ambiguity_map(const Waveform &w, std::span<const double> tau_grid, std::span<const double> f_grid);

    // Smallest positive delay (Doppler) offset at which |Y| drops below `threshold`.
    double delay_resolution(const Waveform &w, double threshold = 0.1);
    double doppler_resolution(const Waveform &w, double threshold = 0.1);

    // Waveform assignment for a set of transmitters: one subcarrier per transmitter.
    struct WaveformPlan
    {
        WaveformKind kind = WaveformKind::GaussianOcdm;
        double pulse_param = 1e-3;
        int num_chirps = 128;
        std::vector<int> subcarriers; // empty: transmitter n uses subcarrier n
    };

    std::vector<Waveform> make_waveforms(const WaveformPlan &plan, std::size_t n_tx);
}
