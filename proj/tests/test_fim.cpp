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

#include <random>

#include "doctest.h"
#include "support.hpp"

#include "dmisac/error.hpp"
#include "dmisac/fim.hpp"

using namespace dmisac;
using namespace dmisac::testing;

namespace
{
    // max_ij |X_ij - Y_ij| / sqrt(Y_ii Y_jj)
    double normalized_gap(const Eigen::MatrixXd &x, const Eigen::MatrixXd &y)
    {
        double worst = 0.0;
        for (Eigen::Index i = 0; i < y.rows(); ++i)
            for (Eigen::Index j = 0; j < y.cols(); ++j)
            {
                const double s = std::sqrt(std::abs(y(i, i) * y(j, j)));
                if (s > 0.0)
                    worst = std::max(worst, std::abs(x(i, j) - y(i, j)) / s);
            }
        return worst;
    }

    Eigen::Matrix4d schur_crlb(const Eigen::MatrixXd &theta_fim)
    {
        return theta_fim.inverse().topLeftCorner<4, 4>();
    }
}

TEST_CASE("fim - theta information matches the sampled-echo oracle")
{
    SUBCASE("2x2 chirp at 1 kHz")
    {
        const Scenario s = small(2, 2);
        const auto w = make_waveforms(s.waveform, s.n_tx());
        const Eigen::MatrixXd J = single_target_fim(s, w, 0).theta_fim();
        CHECK(normalized_gap(J, brute_force_theta_fim(s, w, 0)) < 1e-6);
    }
    SUBCASE("3x2 OFDM at 100 kHz")
    {
        Scenario s = small(3, 2, 1, 1e-3, 1e5);
        s.waveform.kind = WaveformKind::GaussianOfdm;
        s.radio.symbol = std::polar(1.0, 0.4);
        s.radio.beam_weights[1] = std::polar(1.0, -1.1);
        s.radio.energy_alloc << 0.5, 0.3, 0.2;
        const auto w = make_waveforms(s.waveform, s.n_tx());
        const Eigen::MatrixXd J = single_target_fim(s, w, 0).theta_fim();
        CHECK(normalized_gap(J, brute_force_theta_fim(s, w, 0)) < 1e-6);
    }
}

TEST_CASE("fim - rcs block is the per-link energy")
{
    const Scenario s = small(2, 2);
    const auto w = make_waveforms(s.waveform, s.n_tx());
    const FimBundle fb = single_target_fim(s, w, 0);
    const double expect = 2.0 * s.radio.sample_rate_hz * s.radio.total_energy_j * 0.5 / s.radio.noise_var_w;
    for (Eigen::Index i = 0; i < fb.f.size(); ++i)
        CHECK(fb.f[i] == doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("fim - zero rcs removes delay and doppler information")
{
    Scenario s = small(2, 2);
    s.targets[0].rcs(0, 1) = 0.0;
    const auto w = make_waveforms(s.waveform, s.n_tx());
    const FimBundle fb = single_target_fim(s, w, 0);
    const auto i = static_cast<Eigen::Index>(s.link_index(0, 1));
    CHECK(fb.a[i] == 0.0);
    CHECK(fb.b[i] == 0.0);
    CHECK(fb.d[i] == 0.0);
    CHECK(fb.f[i] > 0.0);
    CHECK(fb.a[0] > 0.0);
}

TEST_CASE("fim - information scales with sample rate and SENR")
{
    const Scenario s = ring();
    const auto w = make_waveforms(s.waveform, s.n_tx());
    const Eigen::MatrixXd J = single_target_fim(s, w, 0).full();

    Scenario fs2 = s;
    fs2.radio.sample_rate_hz *= 2.0;
    CHECK((single_target_fim(fs2, w, 0).full() - 2.0 * J).norm() <= 1e-12 * J.norm());

    Scenario senr = s;
    senr.radio.set_senr_db(10.0);
    CHECK((single_target_fim(senr, w, 0).full() - 10.0 * J).norm() <= 1e-12 * J.norm());
}

TEST_CASE("fim - information blocks are positive semidefinite")
{
    const Scenario s = small(4, 3, 16, 1e-2, 1e3);
    const auto w = make_waveforms(s.waveform, s.n_tx());
    const FimBundle fb = single_target_fim(s, w, 0);
    const Eigen::MatrixXd phi = fb.phi();
    const Eigen::MatrixXd schur = phi - fb.psi() * fb.f.cwiseInverse().asDiagonal() * fb.psi().transpose();
    const double scale = phi.diagonal().maxCoeff();
    CHECK(Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(phi).eigenvalues().minCoeff() >= -1e-10 * scale);
    CHECK(Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(schur).eigenvalues().minCoeff() >= -1e-10 * scale);
}

TEST_CASE("fim - crlb is the leading block of the inverse")
{
    const Scenario s = small(4, 3, 16, 1e-2, 1e3);
    const auto w = make_waveforms(s.waveform, s.n_tx());
    const FimBundle fb = single_target_fim(s, w, 0);
    const CrlbReport c = crlb_single(fb);
    const Eigen::Matrix4d ref = schur_crlb(fb.theta_fim());
    CHECK(normalized_gap(c.accurate, ref) < 1e-8);
    CHECK(c.loc_crlb == doctest::Approx(ref(0, 0) + ref(1, 1)).epsilon(1e-8));
    CHECK(c.vel_crlb == doctest::Approx(ref(2, 2) + ref(3, 3)).epsilon(1e-8));
    CHECK(c.condition_number >= 1.0);
    // Dropping the rcs coupling (known rcs) gives the approximate bound.
    const Eigen::MatrixXd l = fb.theta_fim().topLeftCorner(4, 4);
    CHECK(normalized_gap(c.approx, l.inverse()) < 1e-8);
}

TEST_CASE("fim - approximate bound never exceeds the accurate one")
{
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int trial = 0; trial < 20; ++trial)
    {
        Scenario s = small(3, 3, 16, 1e-2, 1e3);
        for (auto *nodes : {&s.nodes.tx, &s.nodes.rx})
            for (Vec2 &p : *nodes)
                p = Vec2(6000 * u(rng), 6000 * u(rng));
        s.targets[0].location = Vec2(500 * u(rng), 500 * u(rng));
        s.targets[0].velocity = Vec2(40 * u(rng), 40 * u(rng));
        for (Eigen::Index i = 0; i < s.targets[0].rcs.size(); ++i)
            s.targets[0].rcs(i) = cplx(u(rng), u(rng));
        const auto w = make_waveforms(s.waveform, s.n_tx());
        const CrlbReport c = crlb_single(single_target_fim(s, w, 0));
        for (int i = 0; i < 4; ++i)
            CHECK(c.approx(i, i) <= c.accurate(i, i) * (1.0 + 1e-10));
    }
}

TEST_CASE("fim - doppler moment options agree for short delays")
{
    Scenario s = small(2, 2);
    // Nodes close to the target keep tau well under 1% of T_eff, where the approximation is exact enough.
    s.nodes.tx = {Vec2(-3, 2), Vec2(1, 4)};
    s.nodes.rx = {Vec2(2, -3), Vec2(-4, -1)};
    s.targets[0].location = Vec2(0.1, -0.2);
    const auto w = make_waveforms(s.waveform, s.n_tx());
    FimOptions ex, ap, ga;
    ap.doppler_moment = DopplerMoment::Approximate;
    ga.doppler_moment = DopplerMoment::Gated;
    const FimBundle fe = single_target_fim(s, w, 0, ex), fa = single_target_fim(s, w, 0, ap),
                    fg = single_target_fim(s, w, 0, ga);
    CHECK((fa.d - fe.d).norm() <= 1e-6 * fe.d.norm());
    CHECK(fg.d == fa.d);

    // On the 5 km ring tau is a few percent of T: the gate picks the exact moment, which adds tau^2.
    const Scenario far = ring(WaveformKind::GaussianOcdm, 1e-3);
    const auto wf = make_waveforms(far.waveform, far.n_tx());
    const FimBundle fe2 = single_target_fim(far, wf, 0, ex), fg2 = single_target_fim(far, wf, 0, ga);
    CHECK(fg2.d == fe2.d);
    const FimBundle fa2 = single_target_fim(far, wf, 0, ap);
    CHECK((fa2.d.array() < fe2.d.array()).all());
    CHECK(fa2.d.sum() > 0.9 * fe2.d.sum());
}

TEST_CASE("fim - static bound needs a stationary target")
{
    Scenario s = small(3, 3, 16, 1e-2, 1e3);
    const auto w = make_waveforms(s.waveform, s.n_tx());
    CHECK_THROWS_AS(crlb_static(s, w, 0), Error);
    s.targets[0].velocity.setZero();
    const StaticCrlb c = crlb_static(s, w, 0);
    CHECK(c.x > 0.0);
    CHECK(c.y > 0.0);
    CHECK(c.covariance(0, 1) == doctest::Approx(c.covariance(1, 0)));
}

TEST_CASE("fim - single-target multi fim reduces to the single bundle")
{
    const Scenario s = small(2, 3, 16, 1e-2, 1e3);
    const auto w = make_waveforms(s.waveform, s.n_tx());
    const MultiFim m = multi_target_fim(s, w);
    const FimBundle fb = single_target_fim(s, w, 0);
    CHECK(normalized_gap(m.block(0, 0), fb.full()) < 1e-12);
    const MultiCrlbReport r = crlb_multi(m);
    REQUIRE(r.targets.size() == 1);
    const CrlbReport c = crlb_single(fb);
    CHECK(r.targets[0].loc_accurate == doctest::Approx(c.loc_crlb).epsilon(1e-9));
    CHECK(r.targets[0].vel_single == doctest::Approx(c.vel_crlb).epsilon(1e-9));
}

TEST_CASE("fim - cross-target block matches the sampled derivative sum")
{
    // one link, two overlapping echoes
    Scenario s;
    s.nodes.tx = {Vec2(0, 5000)};
    s.nodes.rx = {Vec2(4330, -2500)};
    Target t;
    t.velocity = Vec2(-15, 0);
    t.rcs = Eigen::MatrixXcd::Constant(1, 1, cplx(0.7, 0.7));
    s.targets = {t, t};
    s.targets[1].location = Vec2(60, 0);
    s.targets[1].velocity = Vec2(-5, 8);
    s.targets[1].rcs /= 5.0;
    const double T = 1e-3, fs = 1e5;
    s.radio = make_radio(1, 3e9, 10.0, fs, T);
    s.waveform = {WaveformKind::GaussianOcdm, T, 128, {3}};
    const auto w = make_waveforms(s.waveform, 1);
    MultiFimOptions o;
    o.additive_coupling = false;
    const MultiFim m = multi_target_fim(s, w, o);

    const double A = std::sqrt(s.radio.total_energy_j);
    auto dmu = [&](const PathParams &p, cplx al, int which, double time) -> cplx {
        const cplx e = std::exp(cplx(0, kTwoPi * p.doppler * time));
        const cplx v = A * w[0](time - p.tau) * e;
        switch (which)
        {
        case 0:
            return -al * A * w[0].derivative(time - p.tau, 1) * e;
        case 1:
            return cplx(0, kTwoPi * time) * al * v;
        case 2:
            return v;
        default:
            return cplx(0, 1) * v;
        }
    };
    const PathParams p1 = path_params(s, 0)[0], p2 = path_params(s, 1)[0];
    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(8, 8);
    const double lo = std::min(p1.tau, p2.tau) - 8 * T, hi = std::max(p1.tau, p2.tau) + 8 * T;
    for (long i = std::lround(lo * fs); i <= std::lround(hi * fs); ++i)
    {
        const double time = static_cast<double>(i) / fs;
        cplx d[8];
        for (int x = 0; x < 4; ++x)
        {
            d[x] = dmu(p1, s.targets[0].rcs(0, 0), x, time);
            d[4 + x] = dmu(p2, s.targets[1].rcs(0, 0), x, time);
        }
        for (int a = 0; a < 8; ++a)
            for (int b = 0; b < 8; ++b)
                J(a, b) += 2.0 / s.radio.noise_var_w * (d[a] * std::conj(d[b])).real();
    }
    CHECK(normalized_gap(m.phi_fim, J) < 1e-8);
}

TEST_CASE("fim - distant targets decouple")
{
    Scenario s = ring(WaveformKind::GaussianOcdm, 1e-3, 128, 1e5, 10.0);
    Target t2 = s.targets[0];
    t2.location = Vec2(0.0, 50000.0);
    t2.velocity = Vec2(40.0, 25.0);
    s.targets.push_back(t2);
    const auto w = make_waveforms(s.waveform, s.n_tx());
    const MultiCrlbReport r = crlb_multi(multi_target_fim(s, w));
    for (const TargetCrlb &t : r.targets)
    {
        CHECK(t.loc_accurate == doctest::Approx(t.loc_single).epsilon(1e-3));
        CHECK(t.vel_accurate == doctest::Approx(t.vel_single).epsilon(1e-3));
    }
}

TEST_CASE("fim - coincident targets fall back to the pseudo-inverse")
{
    Scenario s = small(2, 2);
    s.targets.push_back(s.targets[0]);
    const auto w = make_waveforms(s.waveform, s.n_tx());
    const MultiCrlbReport r = crlb_multi(multi_target_fim(s, w));
    CHECK(r.pseudo_inverse);
    CHECK(r.condition_number > 1e12);
}

TEST_CASE("fim - tightness follows the pulse width")
{
    const Scenario wide = ring(WaveformKind::GaussianOcdm, 1e-2);
    const Scenario narrow = ring(WaveformKind::GaussianOcdm, 1e-3);
    const auto ww = make_waveforms(wide.waveform, wide.n_tx());
    const auto wn = make_waveforms(narrow.waveform, narrow.n_tx());
    const TightnessReport tw = tightness_check(wide, ww, 0), tn = tightness_check(narrow, wn, 0);
    CHECK(tn.g_ratio > tw.g_ratio);
    const CrlbReport cw = crlb_single(single_target_fim(wide, ww, 0));
    const CrlbReport cn = crlb_single(single_target_fim(narrow, wn, 0));
    CHECK(cw.loc_crlb_approx / cw.loc_crlb > cn.loc_crlb_approx / cn.loc_crlb);
    REQUIRE(tw.freq_ratio.size() == wide.n_links());
    CHECK(tw.time_ratio[0] > 0.0);
}

TEST_CASE("fim - chirp safety distance shrinks by the bandwidth ratio")
{
    const double T = 1e-3, lambda = kSpeedOfLight / 3e9;
    const SafetyMetrics ofdm = safety_metrics(Waveform::make(WaveformKind::GaussianOfdm, 1, T, 1), lambda);
    const SafetyMetrics ocdm = safety_metrics(Waveform::make(WaveformKind::GaussianOcdm, 1, T, 128), lambda);
    CHECK(ofdm.distance / ocdm.distance == doctest::Approx(std::sqrt(1.0 + 128.0 * 128.0)).epsilon(1e-6));
    CHECK(ocdm.distance == doctest::Approx(ocdm.tau_r * kSpeedOfLight / 2));
    CHECK(ocdm.velocity == doctest::Approx(lambda * ocdm.f_r / 2));
}

TEST_CASE("fim - location identities hold for the gaussian family")
{
    const Scenario s = ring();
    const auto w = make_waveforms(s.waveform, s.n_tx());
    const LocationIdentityResiduals r = location_identity_residuals(single_target_fim(s, w, 0));
    CHECK(std::isfinite(r.cross));
    CHECK(std::isfinite(r.delay));
    CHECK(r.delay >= 0.0);
}
