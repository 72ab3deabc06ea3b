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

#include "dmisac/fim.hpp"

#include <cmath>

#include "dmisac/error.hpp"
#include "dmisac/linalg.hpp"

namespace dmisac
{
    namespace
    {
        constexpr cplx kJ{0.0, 1.0};

        void check_waveforms(const Scenario &s, std::span<const Waveform> waveforms)
        {
            if (waveforms.size() != s.n_tx())
                throw Error(ErrorCode::Validation,
                            "expected one waveform per transmitter (" + std::to_string(s.n_tx()) + "), got " +
                                std::to_string(waveforms.size()),
                            "waveform");
        }

        // 2 f_s P rho_n / sigma^2
        double link_gain(const Scenario &s, std::size_t n)
        {
            return 2.0 * s.radio.sample_rate_hz * s.radio.total_energy_j * s.radio.energy_alloc[static_cast<Eigen::Index>(n)] /
                   s.radio.noise_var_w;
        }

        double doppler_moment(const WaveformMoments &m, double tau, const FimOptions &o, double t_eff)
        {
            switch (o.doppler_moment)
            {
            case DopplerMoment::Exact: return m.second_time_moment_at(tau);
            case DopplerMoment::Approximate: return m.setw;
            case DopplerMoment::Gated: return tau < o.gate_fraction * t_eff ? m.setw : m.second_time_moment_at(tau);
            }
            return m.second_time_moment_at(tau);
        }

        Eigen::MatrixXd lambda_matrix(const GeometricSpread &g)
        {
            const auto nk = static_cast<Eigen::Index>(g.links());
            Eigen::MatrixXd l = Eigen::MatrixXd::Zero(4 + 2 * nk, 4 * nk);
            l.topLeftCorner(4, 2 * nk) = g.matrix;
            l.bottomRightCorner(2 * nk, 2 * nk).setIdentity();
            return l;
        }

        double trace2(const Eigen::Matrix4d &c, int off) { return c(off, off) + c(off + 1, off + 1); }
    }

    Eigen::MatrixXd FimBundle::phi() const
    {
        const auto nk = a.size();
        Eigen::MatrixXd p = Eigen::MatrixXd::Zero(2 * nk, 2 * nk);
        p.topLeftCorner(nk, nk) = a.asDiagonal();
        p.topRightCorner(nk, nk) = b.asDiagonal();
        p.bottomLeftCorner(nk, nk) = b.asDiagonal();
        p.bottomRightCorner(nk, nk) = d.asDiagonal();
        return p;
    }

    Eigen::MatrixXd FimBundle::psi() const
    {
        const auto nk = a.size();
        Eigen::MatrixXd p(2 * nk, 2 * nk);
        p.topRows(nk) = g;
        p.bottomRows(nk) = e;
        return p;
    }

    Eigen::MatrixXd FimBundle::full() const
    {
        const auto nk = a.size();
        Eigen::MatrixXd j = Eigen::MatrixXd::Zero(4 * nk, 4 * nk);
        const Eigen::MatrixXd ps = psi();
        j.topLeftCorner(2 * nk, 2 * nk) = phi();
        j.topRightCorner(2 * nk, 2 * nk) = ps;
        j.bottomLeftCorner(2 * nk, 2 * nk) = ps.transpose();
        j.bottomRightCorner(2 * nk, 2 * nk) = f.asDiagonal();
        return j;
    }

    Eigen::MatrixXd FimBundle::theta_fim() const
    {
        const Eigen::MatrixXd l = lambda_matrix(aleph);
        return l * full() * l.transpose();
    }

    FimBundle single_target_fim(const Scenario &s, std::span<const Waveform> waveforms, std::size_t target,
                                const FimOptions &options)
    {
        check_waveforms(s, waveforms);
        const auto links = path_params(s, target);
        const std::size_t n_tx = s.n_tx(), n_rx = s.n_rx();
        const auto nk = static_cast<Eigen::Index>(links.size());
        const Target &t = s.targets[target];

        FimBundle fb;
        fb.a = Eigen::VectorXd::Zero(nk);
        fb.b = Eigen::VectorXd::Zero(nk);
        fb.d = Eigen::VectorXd::Zero(nk);
        fb.g = Eigen::MatrixXd::Zero(nk, 2 * nk);
        fb.e = Eigen::MatrixXd::Zero(nk, 2 * nk);
        fb.f = Eigen::VectorXd::Zero(2 * nk);
        fb.aleph = geometric_spread(links);

        for (std::size_t n = 0; n < n_tx; ++n)
        {
            const WaveformMoments m = moments(waveforms[n]);
            const double kappa = link_gain(s, n);
            const cplx mu1 = -kJ * (kTwoPi * m.mean_freq);
            for (std::size_t k = 0; k < n_rx; ++k)
            {
                const auto i = static_cast<Eigen::Index>(s.link_index(n, k));
                const double tau = links[static_cast<std::size_t>(i)].tau;
                const cplx alpha = t.rcs(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(k));
                const double a2 = std::norm(alpha);
                const cplx ac = std::conj(alpha);
                const cplx mu2 = kJ * (kTwoPi * (m.mean_time + tau));

                fb.a[i] = kappa * 4.0 * kPi * kPi * a2 * m.sebw;
                fb.b[i] = kappa * kTwoPi * a2 * m.cross_term_at(tau).imag();
                fb.d[i] = kappa * 4.0 * kPi * kPi * a2 * doppler_moment(m, tau, options, s.radio.effective_time_width_s);
                fb.g(i, i) = -kappa * (ac * mu1).real();
                fb.g(i, nk + i) = kappa * (ac * mu1).imag();
                fb.e(i, i) = -kappa * (ac * mu2).real();
                fb.e(i, nk + i) = kappa * (ac * mu2).imag();
                fb.f[i] = kappa;
                fb.f[nk + i] = kappa;
            }
        }
        return fb;
    }

    namespace
    {
        // Psi F^-1 Psi^T, skipping links that carry no energy.
        Eigen::MatrixXd rcs_correction(const FimBundle &fb)
        {
            const Eigen::MatrixXd ps = fb.psi();
            Eigen::VectorXd finv(fb.f.size());
            for (Eigen::Index i = 0; i < fb.f.size(); ++i)
                finv[i] = fb.f[i] > 0.0 ? 1.0 / fb.f[i] : 0.0;
            return ps * finv.asDiagonal() * ps.transpose();
        }
    }

    CrlbReport crlb_single(const FimBundle &fb, const FimOptions &options)
    {
        const Eigen::MatrixXd &al = fb.aleph.matrix;
        const Eigen::MatrixXd phi = fb.phi();
        const Eigen::MatrixXd info = al * (phi - rcs_correction(fb)) * al.transpose();
        const Eigen::MatrixXd info_approx = al * phi * al.transpose();

        const SymmetricInverse acc = symmetric_inverse(info, options.singular_condition, false,
                                                       "location-velocity information matrix");
        const SymmetricInverse app = symmetric_inverse(info_approx, options.singular_condition, false,
                                                       "approximate location-velocity information matrix");
        CrlbReport r;
        r.accurate = acc.inverse;
        r.approx = app.inverse;
        r.condition_number = acc.condition;
        r.loc_crlb = trace2(r.accurate, 0);
        r.vel_crlb = trace2(r.accurate, 2);
        r.loc_crlb_approx = trace2(r.approx, 0);
        r.vel_crlb_approx = trace2(r.approx, 2);
        return r;
    }

    StaticCrlb crlb_static(const Scenario &s, std::span<const Waveform> waveforms, std::size_t target,
                           const FimOptions &options)
    {
        if (target >= s.targets.size())
            throw Error(ErrorCode::Validation, "target index out of range", "target");
        if (s.targets[target].velocity.norm() != 0.0)
            throw Error(ErrorCode::Precondition, "static localisation bound requires a zero target velocity",
                        "targets[" + std::to_string(target) + "].velocity_mps");
        const FimBundle fb = single_target_fim(s, waveforms, target, options);
        const Eigen::MatrixXd a11 = fb.aleph.a11();
        const Eigen::MatrixXd info = a11 * fb.a.asDiagonal() * a11.transpose();
        const SymmetricInverse inv =
            symmetric_inverse(info, options.singular_condition, false, "localisation information matrix");
        StaticCrlb r;
        r.covariance = inv.inverse;
        r.x = r.covariance(0, 0);
        r.y = r.covariance(1, 1);
        r.condition_number = inv.condition;
        return r;
    }

    Eigen::MatrixXd MultiFim::block(std::size_t q, std::size_t l) const
    {
        const auto b = static_cast<Eigen::Index>(block_size());
        return phi_fim.block(static_cast<Eigen::Index>(q) * b, static_cast<Eigen::Index>(l) * b, b, b);
    }

    Eigen::MatrixXd MultiFim::theta_fim() const
    {
        const auto nk = static_cast<Eigen::Index>(links);
        const Eigen::Index rows = 4 + 2 * nk, cols = 4 * nk;
        Eigen::MatrixXd l = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(targets) * rows,
                                                  static_cast<Eigen::Index>(targets) * cols);
        for (std::size_t q = 0; q < targets; ++q)
            l.block(static_cast<Eigen::Index>(q) * rows, static_cast<Eigen::Index>(q) * cols, rows, cols) =
                lambda_matrix(single[q].aleph);
        return l * phi_fim * l.transpose();
    }

    MultiFim multi_target_fim(const Scenario &s, std::span<const Waveform> waveforms, const MultiFimOptions &options)
    {
        check_waveforms(s, waveforms);
        const std::size_t Q = s.targets.size(), n_tx = s.n_tx(), n_rx = s.n_rx();
        const std::size_t NK = s.n_links();
        const auto nk = static_cast<Eigen::Index>(NK);
        const auto bs = 4 * nk;

        MultiFim mf;
        mf.targets = Q;
        mf.links = NK;
        mf.phi_fim = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(Q) * bs, static_cast<Eigen::Index>(Q) * bs);
        std::vector<std::vector<PathParams>> paths(Q);
        for (std::size_t q = 0; q < Q; ++q)
        {
            paths[q] = path_params(s, q);
            mf.single.push_back(single_target_fim(s, waveforms, q, options.base));
            mf.coupling.push_back(Eigen::MatrixXd::Zero(bs, bs));
        }

        // Row index of parameter `p` (0 tau, 1 f, 2 Re alpha, 3 Im alpha) of link i in a target block.
        auto idx = [nk](int p, Eigen::Index i) { return static_cast<Eigen::Index>(p) * nk + i; };

        for (std::size_t q = 0; q < Q; ++q)
            for (std::size_t l = 0; l < Q; ++l)
            {
                if (l == q)
                    continue;
                Eigen::MatrixXd jql = Eigen::MatrixXd::Zero(bs, bs);
                Eigen::MatrixXd &cq = mf.coupling[q];
                for (std::size_t n = 0; n < n_tx; ++n)
                {
                    const double kappa = link_gain(s, n);
                    for (std::size_t k = 0; k < n_rx; ++k)
                    {
                        const auto i = static_cast<Eigen::Index>(s.link_index(n, k));
                        const PathParams &pq = paths[q][static_cast<std::size_t>(i)];
                        const PathParams &pl = paths[l][static_cast<std::size_t>(i)];
                        const cplx aq = s.targets[q].rcs(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(k));
                        const cplx al = s.targets[l].rcs(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(k));
                        const PairIntegrals I = pair_integrals(waveforms[n], pq.tau, pl.tau, pq.doppler - pl.doppler);

                        // d mu / d param = coef * t^pw * s^(m)(t - tau) exp(j 2 pi f t) * sqrt(P rho) b varsigma
                        const cplx coef_q[4] = {-aq, kJ * kTwoPi * aq, 1.0, kJ};
                        const cplx coef_l[4] = {-al, kJ * kTwoPi * al, 1.0, kJ};
                        const int m[4] = {1, 0, 0, 0};
                        const int pw[4] = {0, 1, 0, 0};
                        for (int x = 0; x < 4; ++x)
                            for (int y = 0; y < 4; ++y)
                                jql(idx(x, i), idx(y, i)) =
                                    kappa * (coef_q[x] * std::conj(coef_l[y]) * I(m[x], m[y], pw[x] + pw[y])).real();

                        if (!options.additive_coupling)
                            continue;
                        // -kappa Re{ d^2 mu_q conj(mu_l) } for the residual left by target l.
                        const cplx alc = std::conj(al);
                        const cplx tt = aq * I(2, 0, 0);
                        const cplx ff = -4.0 * kPi * kPi * aq * I(0, 0, 2);
                        const cplx tf = -kJ * kTwoPi * aq * I(1, 0, 1);
                        const cplx tr = -I(1, 0, 0);
                        const cplx ti = -kJ * I(1, 0, 0);
                        const cplx fr = kJ * kTwoPi * I(0, 0, 1);
                        const cplx fi = -kTwoPi * I(0, 0, 1);
                        auto add = [&](int x, int y, cplx v) {
                            const double val = -kappa * (v * alc).real();
                            cq(idx(x, i), idx(y, i)) += val;
                            if (x != y)
                                cq(idx(y, i), idx(x, i)) += val;
                        };
                        add(0, 0, tt);
                        add(1, 1, ff);
                        add(0, 1, tf);
                        add(0, 2, tr);
                        add(0, 3, ti);
                        add(1, 2, fr);
                        add(1, 3, fi);
                    }
                }
                mf.phi_fim.block(static_cast<Eigen::Index>(q) * bs, static_cast<Eigen::Index>(l) * bs, bs, bs) = jql;
            }

        for (std::size_t q = 0; q < Q; ++q)
            mf.phi_fim.block(static_cast<Eigen::Index>(q) * bs, static_cast<Eigen::Index>(q) * bs, bs, bs) =
                mf.single[q].full() + mf.coupling[q];
        return mf;
    }

    MultiCrlbReport crlb_multi(const MultiFim &mf, const FimOptions &options)
    {
        MultiCrlbReport rep;
        const Eigen::MatrixXd theta = mf.theta_fim();
        const SymmetricInverse full =
            symmetric_inverse(theta, options.singular_condition, true, "multi-target information matrix");
        rep.condition_number = full.condition;
        rep.min_eigenvalue = full.min_eigenvalue;
        rep.pseudo_inverse = full.pseudo;

        const auto rows = static_cast<Eigen::Index>(4 + 2 * mf.links);
        const auto bs = static_cast<Eigen::Index>(mf.block_size());
        for (std::size_t q = 0; q < mf.targets; ++q)
        {
            TargetCrlb t;
            const auto qi = static_cast<Eigen::Index>(q);
            t.accurate = full.inverse.block<4, 4>(qi * rows, qi * rows);

            const Eigen::MatrixXd lam = lambda_matrix(mf.single[q].aleph);
            const Eigen::MatrixXd jqq = mf.phi_fim.block(qi * bs, qi * bs, bs, bs);
            const SymmetricInverse dec = symmetric_inverse(lam * jqq * lam.transpose(), options.singular_condition,
                                                           true, "decoupled information matrix");
            t.decoupled = dec.inverse.topLeftCorner<4, 4>();
            t.decoupled_pseudo = dec.pseudo;

            const SymmetricInverse sgl = symmetric_inverse(mf.single[q].theta_fim(), options.singular_condition,
                                                           false, "single-target information matrix");
            t.single = sgl.inverse.topLeftCorner<4, 4>();

            t.loc_accurate = trace2(t.accurate, 0);
            t.vel_accurate = trace2(t.accurate, 2);
            t.loc_decoupled = trace2(t.decoupled, 0);
            t.vel_decoupled = trace2(t.decoupled, 2);
            t.loc_single = trace2(t.single, 0);
            t.vel_single = trace2(t.single, 2);
            rep.targets.push_back(t);
        }
        return rep;
    }

    TightnessReport tightness_check(const Scenario &s, std::span<const Waveform> waveforms, std::size_t target,
                                    double threshold)
    {
        const FimBundle fb = single_target_fim(s, waveforms, target);
        const auto links = path_params(s, target);
        const auto nk = static_cast<Eigen::Index>(links.size());
        const Eigen::MatrixXd corr = rcs_correction(fb);

        TightnessReport r;
        r.threshold = threshold;
        const double tr_a = fb.a.sum(), tr_d = fb.d.sum();
        r.g_ratio = tr_a > 0.0 ? corr.topLeftCorner(nk, nk).trace() / tr_a : 0.0;
        r.e_ratio = tr_d > 0.0 ? corr.bottomRightCorner(nk, nk).trace() / tr_d : 0.0;
        bool tight = r.g_ratio < threshold && r.e_ratio < threshold;
        for (std::size_t n = 0; n < s.n_tx(); ++n)
        {
            const WaveformMoments m = moments(waveforms[n]);
            for (std::size_t k = 0; k < s.n_rx(); ++k)
            {
                const std::size_t i = s.link_index(n, k);
                const double fr = m.mean_freq * m.mean_freq / m.sebw;
                const double tm = m.mean_time + links[i].tau;
                const double trt = tm * tm / m.setw;
                r.freq_ratio.push_back(fr);
                r.time_ratio.push_back(trt);
                // Links without echo energy do not affect the bound.
                if (s.targets[target].rcs(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(k)) != cplx(0.0))
                    tight = tight && fr < threshold && trt < threshold;
            }
        }
        r.tight = tight;
        return r;
    }

    LocationIdentityResiduals location_identity_residuals(const FimBundle &fb)
    {
        const Eigen::MatrixXd a11 = fb.aleph.a11(), a12 = fb.aleph.a12(), a22 = fb.aleph.a22();
        const Eigen::MatrixXd A = fb.a.asDiagonal(), B = fb.b.asDiagonal(), D = fb.d.asDiagonal();
        const Eigen::Matrix2d y = a22 * D * a22.transpose();
        const Eigen::Matrix2d yinv = y.inverse();
        const Eigen::MatrixXd babs = fb.b.cwiseAbs().asDiagonal();
        const double cross_scale = std::sqrt((a11 * babs * a11.transpose()).norm() * (a12 * babs * a12.transpose()).norm());
        const Eigen::Matrix2d bv = a11 * B * a22.transpose();
        const Eigen::Matrix2d lhs_delay = a11 * A * a11.transpose();
        LocationIdentityResiduals out;
        const Eigen::Matrix2d dc = a11 * B * a12.transpose() - bv * yinv * (a12 * D * a22.transpose()).transpose();
        out.cross = cross_scale > 0.0 ? dc.norm() / cross_scale : 0.0;
        out.delay = lhs_delay.norm() > 0.0 ? (lhs_delay - bv * yinv * bv.transpose()).norm() / lhs_delay.norm() : 0.0;
        return out;
    }

    SafetyMetrics safety_metrics(const Waveform &w, double wavelength, double threshold)
    {
        SafetyMetrics m;
        m.tau_r = delay_resolution(w, threshold);
        m.f_r = doppler_resolution(w, threshold);
        m.distance = m.tau_r * kSpeedOfLight / 2.0;
        m.velocity = wavelength * m.f_r / 2.0;
        return m;
    }
}
