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

#include "dmisac/waveform.hpp"

#include <algorithm>
#include <cmath>

#include "dmisac/error.hpp"
#include "dmisac/quadrature.hpp"

namespace dmisac
{
    namespace
    {
        constexpr cplx kJ{0.0, 1.0};

        // Polynomial in t' with complex coefficients, degree <= 6.
        using Poly = std::array<cplx, 7>;

        Poly mul(const Poly &x, const Poly &y)
        {
            Poly r{};
            for (std::size_t i = 0; i < r.size(); ++i)
                for (std::size_t k = 0; i + k < r.size(); ++k)
                    r[i + k] += x[i] * y[k];
            return r;
        }

        // P_m(u) with u = t' + shift, where s^(m)(u) = P_m(u) s(u).
        Poly derivative_poly(const Waveform &w, int order, double shift)
        {
            const cplx gamma(w.envelope_rate(), -w.chirp_rate());
            Poly p{};
            if (order == 0)
            {
                p[0] = 1.0;
                return p;
            }
            Poly p1{};
            p1[0] = -2.0 * gamma * shift + kJ * w.frequency_offset();
            p1[1] = -2.0 * gamma;
            if (order == 1)
                return p1;
            p = mul(p1, p1);
            p[0] -= 2.0 * gamma;
            return p;
        }

        Poly conj_poly(Poly p)
        {
            for (auto &c : p)
                c = std::conj(c);
            return p;
        }

        double window_lo(const Waveform &w, double tau_q, double tau_l)
        {
            return std::min(tau_q, tau_l) - w.support_halfwidth();
        }

        double window_hi(const Waveform &w, double tau_q, double tau_l)
        {
            return std::max(tau_q, tau_l) + w.support_halfwidth();
        }
    }

    const char *to_string(WaveformKind kind)
    {
        return kind == WaveformKind::GaussianOfdm ? "ofdm" : "ocdm";
    }

    WaveformKind waveform_kind_from_string(const std::string &name)
    {
        std::string s = name;
        std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
        if (s == "ofdm" || s == "gaussian_ofdm")
            return WaveformKind::GaussianOfdm;
        if (s == "ocdm" || s == "gaussian_ocdm")
            return WaveformKind::GaussianOcdm;
        throw Error(ErrorCode::Validation, "unknown waveform kind '" + name + "' (expected ofdm or ocdm)",
                    "waveform.kind");
    }

    Waveform Waveform::make(WaveformKind kind, int subcarrier, double pulse_param, int num_chirps)
    {
        if (!(pulse_param > 0.0) || !std::isfinite(pulse_param))
            throw Error(ErrorCode::Validation, "pulse parameter must be positive", "waveform.pulse_param_s");
        if (subcarrier < 1)
            throw Error(ErrorCode::Validation, "subcarrier index must be >= 1", "waveform.subcarriers");
        if (kind == WaveformKind::GaussianOcdm)
        {
            if (num_chirps < 1)
                throw Error(ErrorCode::Validation, "number of chirps must be >= 1", "waveform.num_chirps");
            if (subcarrier > num_chirps)
                throw Error(ErrorCode::Validation,
                            "OCDM subcarrier " + std::to_string(subcarrier) + " exceeds M = " + std::to_string(num_chirps),
                            "waveform.subcarriers");
        }

        Waveform w;
        w.kind_ = kind;
        w.subcarrier_ = subcarrier;
        w.pulse_ = pulse_param;
        w.chirps_ = kind == WaveformKind::GaussianOcdm ? num_chirps : 1;
        const double T = pulse_param, T2 = T * T;
        w.a_ = kPi / T2;
        w.amp_ = std::pow(2.0 / T2, 0.25);
        const double n1 = subcarrier - 1;
        if (kind == WaveformKind::GaussianOfdm)
        {
            w.c_ = kTwoPi * n1 / T;
        }
        else
        {
            const double M = num_chirps;
            const double t0 = n1 * T / M;
            w.b_ = kPi * M / T2;
            w.c_ = -kTwoPi * n1 / T;
            w.d_ = kPi * M * t0 * t0 / T2;
        }
        return w;
    }

    cplx Waveform::derivative(double t, int order) const
    {
        const cplx gamma(a_, -b_);
        const cplx s = amp_ * std::exp(-gamma * t * t + kJ * (c_ * t + d_));
        if (order == 0)
            return s;
        const cplx p1 = -2.0 * gamma * t + kJ * c_;
        if (order == 1)
            return p1 * s;
        return (p1 * p1 - 2.0 * gamma) * s;
    }

    WaveformMoments moments(const Waveform &w)
    {
        const double a = w.envelope_rate(), b = w.chirp_rate(), c = w.frequency_offset();
        WaveformMoments m;
        m.setw = 1.0 / (4.0 * a);
        m.mean_time = 0.0;
        m.sebw = (a + b * b / a + c * c) / (4.0 * kPi * kPi);
        m.mean_freq = c / kTwoPi;
        m.cross_term = cplx(0.5, -b / (2.0 * a));
        return m;
    }

    WaveformMoments moments_by_quadrature(const Waveform &w)
    {
        const double lo = -w.support_halfwidth(), hi = w.support_halfwidth();
        WaveformMoments m;
        m.setw = integrate_real([&](double t) { return t * t * std::norm(w(t)); }, lo, hi);
        m.mean_time = integrate_real([&](double t) { return t * std::norm(w(t)); }, lo, hi);
        m.sebw = integrate_real([&](double t) { return std::norm(w.derivative(t, 1)); }, lo, hi) / (4.0 * kPi * kPi);
        // int s^* s' dt = j 2 pi fbar
        const cplx ss = integrate([&](double t) { return std::conj(w(t)) * w.derivative(t, 1); }, lo, hi).value;
        m.mean_freq = ss.imag() / kTwoPi;
        // d s(t - tau)/d tau = -s'(t - tau)
        m.cross_term = -integrate([&](double t) { return t * std::conj(w(t)) * w.derivative(t, 1); }, lo, hi).value;
        return m;
    }

    double energy_by_quadrature(const Waveform &w)
    {
        return integrate_real([&](double t) { return std::norm(w(t)); }, -w.support_halfwidth(), w.support_halfwidth());
    }

    PairIntegrals pair_integrals(const Waveform &w, double tau_q, double tau_l, double delta_f)
    {
        // t = tau_c + t'; u_q = t' - D/2, u_l = t' + D/2 with D = tau_q - tau_l. The product of the two
        // Gaussian chirps and the Doppler phase is exp(-p t'^2 + q t' + r).
        const double a = w.envelope_rate(), b = w.chirp_rate(), c = w.frequency_offset();
        const double tau_c = 0.5 * (tau_q + tau_l), D = tau_q - tau_l;
        const double p = 2.0 * a;
        const cplx q = kJ * (kTwoPi * delta_f - 2.0 * b * D);
        const cplx r(-a * D * D / 2.0, -c * D + kTwoPi * delta_f * tau_c);
        const cplx pref = std::sqrt(kPi / p) * std::exp(q * q / (4.0 * p) + r) * (w.amplitude() * w.amplitude());

        // Gaussian moments E[t'^k] with mean q/(2p) and variance 1/(2p).
        const cplx mu = q / (2.0 * p);
        const double var = 1.0 / (2.0 * p);
        std::array<cplx, 7> mom{};
        mom[0] = 1.0;
        mom[1] = mu;
        for (std::size_t k = 2; k < mom.size(); ++k)
            mom[k] = mu * mom[k - 1] + static_cast<double>(k - 1) * var * mom[k - 2];

        std::array<Poly, 3> pq, pl, tp;
        for (int m = 0; m < 3; ++m)
        {
            pq[static_cast<std::size_t>(m)] = derivative_poly(w, m, -D / 2.0);
            pl[static_cast<std::size_t>(m)] = conj_poly(derivative_poly(w, m, D / 2.0));
        }
        tp[0] = Poly{};
        tp[0][0] = 1.0;
        tp[1] = Poly{};
        tp[1][0] = tau_c;
        tp[1][1] = 1.0;
        tp[2] = mul(tp[1], tp[1]);

        PairIntegrals out;
        for (int m = 0; m < 3; ++m)
            for (int mp = 0; mp < 3; ++mp)
            {
                const Poly base = mul(pq[static_cast<std::size_t>(m)], pl[static_cast<std::size_t>(mp)]);
                for (int pw = 0; pw < 3; ++pw)
                {
                    const Poly full = mul(base, tp[static_cast<std::size_t>(pw)]);
                    cplx acc = 0.0;
                    for (std::size_t k = 0; k < full.size(); ++k)
                        acc += full[k] * mom[k];
                    out(m, mp, pw) = pref * acc;
                }
            }
        return out;
    }

    PairIntegrals pair_integrals_by_quadrature(const Waveform &w, double tau_q, double tau_l, double delta_f)
    {
        const double lo = window_lo(w, tau_q, tau_l), hi = window_hi(w, tau_q, tau_l);
        PairIntegrals out;
        for (int m = 0; m < 3; ++m)
            for (int mp = 0; mp < 3; ++mp)
                for (int pw = 0; pw < 3; ++pw)
                {
                    auto f = [&](double t) {
                        return std::pow(t, pw) * w.derivative(t - tau_q, m) * std::conj(w.derivative(t - tau_l, mp)) *
                               std::exp(kJ * (kTwoPi * delta_f * t));
                    };
                    out(m, mp, pw) = integrate(f, lo, hi, 1e-10).value;
                }
        return out;
    }

    CrossCorr cross_corr(const Waveform &w, double tau_q, double tau_l, double delta_f, IntegrationMethod method)
    {
        const PairIntegrals I = method == IntegrationMethod::Analytic ? pair_integrals(w, tau_q, tau_l, delta_f)
                                                                      : pair_integrals_by_quadrature(w, tau_q, tau_l, delta_f);
        const cplx j2pi(0.0, kTwoPi);
        CrossCorr y;
        y.value = I(0, 0, 0);
        y.d_tau = -I(1, 0, 0);
        y.d_f = j2pi * I(0, 0, 1);
        y.d2_tautau = I(1, 1, 0);
        y.d2_ff = 4.0 * kPi * kPi * I(0, 0, 2);
        y.d2_tauf = j2pi * I(1, 0, 1);
        y.d2_tauq2 = I(2, 0, 0);
        y.d2_fq2 = -4.0 * kPi * kPi * I(0, 0, 2);
        y.d2_taufq = -j2pi * I(1, 0, 1);
        return y;
    }

    Eigen::MatrixXd ambiguity_map(const Waveform &w, std::span<const double> tau_grid, std::span<const double> f_grid)
    {
        Eigen::MatrixXd out(static_cast<Eigen::Index>(tau_grid.size()), static_cast<Eigen::Index>(f_grid.size()));
        const double peak = std::norm(pair_integrals(w, 0.0, 0.0, 0.0)(0, 0, 0));
        for (std::size_t i = 0; i < tau_grid.size(); ++i)
            for (std::size_t k = 0; k < f_grid.size(); ++k)
                out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) =
                    std::norm(pair_integrals(w, tau_grid[i], 0.0, f_grid[k])(0, 0, 0)) / peak;
        return out;
    }

    namespace
    {
        // First crossing of |Y| below thr along a ray from the origin; |Y| is monotone along both axes
        // for the Gaussian family.
        template <class F> double first_crossing(F mag, double start, double thr)
        {
            double lo = 0.0, hi = start;
            while (mag(hi) >= thr)
            {
                lo = hi;
                hi *= 2.0;
                if (!std::isfinite(hi))
                    throw Error(ErrorCode::NumericFailure, "resolution search diverged");
            }
            for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it)
            {
                const double mid = 0.5 * (lo + hi);
                (mag(mid) >= thr ? lo : hi) = mid;
            }
            return 0.5 * (lo + hi);
        }

        void check_threshold(double thr)
        {
            if (!(thr > 0.0 && thr < 1.0))
                throw Error(ErrorCode::Validation, "resolution threshold must lie in (0, 1)", "threshold");
        }
    }

    double delay_resolution(const Waveform &w, double threshold)
    {
        check_threshold(threshold);
        return first_crossing([&](double d) { return std::abs(pair_integrals(w, d, 0.0, 0.0)(0, 0, 0)); },
                              w.pulse_param() * 1e-3, threshold);
    }

    double doppler_resolution(const Waveform &w, double threshold)
    {
        check_threshold(threshold);
        return first_crossing([&](double f) { return std::abs(pair_integrals(w, 0.0, 0.0, f)(0, 0, 0)); },
                              1e-3 / w.pulse_param(), threshold);
    }

    std::vector<Waveform> make_waveforms(const WaveformPlan &plan, std::size_t n_tx)
    {
        if (!plan.subcarriers.empty() && plan.subcarriers.size() != n_tx)
            throw Error(ErrorCode::Validation, "subcarrier list length differs from the number of transmitters",
                        "waveform.subcarriers");
        std::vector<Waveform> out;
        out.reserve(n_tx);
        for (std::size_t n = 0; n < n_tx; ++n)
        {
            const int sc = plan.subcarriers.empty() ? static_cast<int>(n) + 1 : plan.subcarriers[n];
            out.push_back(Waveform::make(plan.kind, sc, plan.pulse_param, plan.num_chirps));
        }
        return out;
    }
}
