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

#include "dmisac/signal.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>

#include "dmisac/error.hpp"

namespace dmisac
{
    namespace
    {
        constexpr cplx kJ{0.0, 1.0};

        std::uint64_t splitmix64(std::uint64_t x)
        {
            x += 0x9E3779B97F4A7C15ull;
            x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
            x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
            return x ^ (x >> 31);
        }

        double max_support(std::span<const Waveform> waveforms)
        {
            double h = 0.0;
            for (const auto &w : waveforms)
                h = std::max(h, w.support_halfwidth());
            return h;
        }

        double max_pulse(std::span<const Waveform> waveforms)
        {
            double t = 0.0;
            for (const auto &w : waveforms)
                t = std::max(t, w.pulse_param());
            return t;
        }

        void check_inputs(const Scenario &s, std::span<const Waveform> waveforms)
        {
            if (waveforms.size() != s.n_tx())
                throw Error(ErrorCode::Validation, "expected one waveform per transmitter", "waveform");
        }

        void check_signal(const ReceivedSignal &r, const Scenario &s)
        {
            if (r.n_tx != s.n_tx() || r.n_rx != s.n_rx() || r.samples.size() != s.n_links())
                throw Error(ErrorCode::Validation, "received signal does not match the scenario's node counts", "signal");
            if (r.sample_rate_hz != s.radio.sample_rate_hz)
                throw Error(ErrorCode::Validation, "received signal sample rate differs from the scenario", "signal");
        }

        // Samples of `r` within the waveform support around tau: [lo, hi).
        std::pair<std::size_t, std::size_t> support_range(const ReceivedSignal &r, double tau, double halfwidth)
        {
            const double fs = r.sample_rate_hz;
            const auto n = static_cast<std::int64_t>(r.num_samples());
            std::int64_t lo = static_cast<std::int64_t>(std::ceil((tau - halfwidth) * fs)) - r.first_index;
            std::int64_t hi = static_cast<std::int64_t>(std::floor((tau + halfwidth) * fs)) - r.first_index + 1;
            lo = std::clamp<std::int64_t>(lo, 0, n);
            hi = std::clamp<std::int64_t>(hi, lo, n);
            return {static_cast<std::size_t>(lo), static_cast<std::size_t>(hi)};
        }

        double tx_amplitude(const Scenario &s, std::size_t n)
        {
            return std::sqrt(s.radio.total_energy_j * s.radio.energy_alloc[static_cast<Eigen::Index>(n)]);
        }

        cplx beam(const Scenario &s, std::size_t n) { return s.radio.beam_weights[static_cast<Eigen::Index>(n)]; }

        struct LinkGeometry
        {
            double tau = 0.0;
            Vec2 usum = Vec2::Zero(); // u_n + u_k, Doppler = v . usum / lambda
        };

        LinkGeometry link_geometry(const Vec2 &tx, const Vec2 &rx, const Vec2 &loc)
        {
            const Vec2 dn = tx - loc, dk = rx - loc;
            const double an = dn.norm(), ak = dk.norm();
            LinkGeometry g;
            g.tau = (an + ak) / kSpeedOfLight;
            if (an > 0.0)
                g.usum += dn / an;
            if (ak > 0.0)
                g.usum += dk / ak;
            return g;
        }
    }

    cplx noise_sample(std::uint64_t seed, std::size_t n, std::size_t k, std::int64_t index)
    {
        std::uint64_t h = splitmix64(seed);
        h = splitmix64(h ^ static_cast<std::uint64_t>(n));
        h = splitmix64(h ^ static_cast<std::uint64_t>(k));
        h = splitmix64(h ^ static_cast<std::uint64_t>(index));
        const std::uint64_t h2 = splitmix64(h);
        // Box-Muller; u1 in (0, 1] keeps the log finite.
        const double u1 = (static_cast<double>(h >> 11) + 1.0) * 0x1.0p-53;
        const double u2 = static_cast<double>(h2 >> 11) * 0x1.0p-53;
        const double rad = std::sqrt(-std::log(u1));
        return {rad * std::cos(kTwoPi * u2), rad * std::sin(kTwoPi * u2)};
    }

    SampleWindow sample_window(const Scenario &s, std::span<const Waveform> waveforms, double guard_s)
    {
        check_inputs(s, waveforms);
        const double guard = guard_s < 0.0 ? max_pulse(waveforms) : guard_s;
        const double half = max_support(waveforms) + guard;
        double lo = std::numeric_limits<double>::infinity(), hi = -lo;
        for (std::size_t q = 0; q < s.targets.size(); ++q)
            for (const auto &p : path_params(s, q))
            {
                lo = std::min(lo, p.tau);
                hi = std::max(hi, p.tau);
            }
        const double fs = s.radio.sample_rate_hz;
        SampleWindow w;
        w.first_index = static_cast<std::int64_t>(std::floor((lo - half) * fs));
        const auto last = static_cast<std::int64_t>(std::ceil((hi + half) * fs));
        w.count = static_cast<std::size_t>(last - w.first_index + 1);
        return w;
    }

    void link_template(const Waveform &w, double amplitude, cplx bw, double tau, double doppler,
                       const ReceivedSignal &grid, Eigen::VectorXcd &out)
    {
        const std::size_t S = grid.num_samples();
        out.setZero(static_cast<Eigen::Index>(S));
        const auto [lo, hi] = support_range(grid, tau, w.support_halfwidth());
        for (std::size_t i = lo; i < hi; ++i)
        {
            const double t = grid.time(i);
            out[static_cast<Eigen::Index>(i)] = amplitude * bw * w(t - tau) * std::exp(kJ * (kTwoPi * doppler * t));
        }
    }

    ReceivedSignal synthesize(const Scenario &s, std::span<const Waveform> waveforms, std::uint64_t seed,
                              const SampleWindow &window, bool noise)
    {
        check_inputs(s, waveforms);
        ReceivedSignal r;
        r.n_tx = s.n_tx();
        r.n_rx = s.n_rx();
        r.sample_rate_hz = s.radio.sample_rate_hz;
        r.first_index = window.first_index;
        r.noise_seed = seed;
        r.samples.assign(s.n_links(), Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(window.count)));

        std::vector<std::vector<PathParams>> paths;
        for (std::size_t q = 0; q < s.targets.size(); ++q)
            paths.push_back(path_params(s, q));

        const double sigma = std::sqrt(s.radio.noise_var_w); // noise_sample has unit power
        Eigen::VectorXcd echo;
        for (std::size_t n = 0; n < r.n_tx; ++n)
            for (std::size_t k = 0; k < r.n_rx; ++k)
            {
                const std::size_t li = s.link_index(n, k);
                Eigen::VectorXcd &out = r.samples[li];
                for (std::size_t q = 0; q < s.targets.size(); ++q)
                {
                    const cplx alpha = s.targets[q].rcs(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(k));
                    if (alpha == cplx(0.0))
                        continue;
                    const PathParams &p = paths[q][li];
                    link_template(waveforms[n], tx_amplitude(s, n), beam(s, n), p.tau, p.doppler, r, echo);
                    out += (alpha * s.radio.symbol) * echo;
                }
                if (noise && s.radio.noise_var_w > 0.0)
                    for (std::size_t i = 0; i < window.count; ++i)
                        out[static_cast<Eigen::Index>(i)] +=
                            sigma * noise_sample(seed, n, k, window.first_index + static_cast<std::int64_t>(i));
            }
        return r;
    }

    ReceivedSignal synthesize(const Scenario &s, std::span<const Waveform> waveforms, std::uint64_t seed,
                              const SynthesisOptions &options)
    {
        return synthesize(s, waveforms, seed, sample_window(s, waveforms, options.guard_s), options.noise);
    }

    std::vector<LinkFit> fit_single(const ReceivedSignal &r, const Scenario &s, std::span<const Waveform> waveforms,
                                    const Candidate &c)
    {
        check_inputs(s, waveforms);
        check_signal(r, s);
        const double lambda = s.radio.wavelength();
        std::vector<LinkFit> out(s.n_links());
        for (std::size_t n = 0; n < s.n_tx(); ++n)
        {
            const Waveform &w = waveforms[n];
            const double amp = tx_amplitude(s, n);
            const cplx bw = beam(s, n);
            for (std::size_t k = 0; k < s.n_rx(); ++k)
            {
                const std::size_t li = s.link_index(n, k);
                const LinkGeometry g = link_geometry(s.nodes.tx[n], s.nodes.rx[k], c.location);
                const double f = c.velocity.dot(g.usum) / lambda;
                const auto [lo, hi] = support_range(r, g.tau, w.support_halfwidth());
                const Eigen::VectorXcd &x = r.samples[li];
                LinkFit fit;
                for (std::size_t i = lo; i < hi; ++i)
                {
                    const double t = r.time(i);
                    const cplx y = amp * bw * w(t - g.tau) * std::exp(kJ * (kTwoPi * f * t));
                    fit.correlation += x[static_cast<Eigen::Index>(i)] * std::conj(y);
                    fit.energy += std::norm(y);
                }
                fit.rcs = fit.energy > 0.0 ? std::conj(s.radio.symbol) * fit.correlation / fit.energy : cplx(0.0);
                out[li] = fit;
            }
        }
        return out;
    }

    double llf_single(const ReceivedSignal &r, const Scenario &s, std::span<const Waveform> waveforms,
                      const Candidate &c)
    {
        double v = 0.0;
        for (const LinkFit &f : fit_single(r, s, waveforms, c))
            if (f.energy > 0.0)
                v += std::norm(f.correlation) / f.energy;
        return v;
    }

    double llf_with_rcs(const ReceivedSignal &r, const Scenario &s, std::span<const Waveform> waveforms,
                        const Candidate &c, const Eigen::MatrixXcd &rcs)
    {
        if (static_cast<std::size_t>(rcs.rows()) != s.n_tx() || static_cast<std::size_t>(rcs.cols()) != s.n_rx())
            throw Error(ErrorCode::Validation, "RCS matrix must be N x K", "rcs");
        const auto fits = fit_single(r, s, waveforms, c);
        double v = 0.0;
        for (std::size_t n = 0; n < s.n_tx(); ++n)
            for (std::size_t k = 0; k < s.n_rx(); ++k)
            {
                const LinkFit &f = fits[s.link_index(n, k)];
                const cplx beta = rcs(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(k)) * s.radio.symbol;
                v += 2.0 * (std::conj(beta) * f.correlation).real() - std::norm(beta) * f.energy;
            }
        return v / s.radio.noise_var_w;
    }

    MultiLlf llf_multi(const ReceivedSignal &r, const Scenario &s, std::span<const Waveform> waveforms,
                       std::span<const Candidate> candidates)
    {
        check_inputs(s, waveforms);
        check_signal(r, s);
        const std::size_t Q = candidates.size();
        if (Q == 0)
            throw Error(ErrorCode::Validation, "need at least one candidate", "candidates");
        const double lambda = s.radio.wavelength();
        const auto S = static_cast<Eigen::Index>(r.num_samples());
        const auto q_idx = static_cast<Eigen::Index>(Q);

        MultiLlf out;
        Eigen::MatrixXcd Y(S, q_idx);
        Eigen::VectorXcd col;
        for (std::size_t n = 0; n < s.n_tx(); ++n)
            for (std::size_t k = 0; k < s.n_rx(); ++k)
            {
                const std::size_t li = s.link_index(n, k);
                for (std::size_t q = 0; q < Q; ++q)
                {
                    const LinkGeometry g = link_geometry(s.nodes.tx[n], s.nodes.rx[k], candidates[q].location);
                    link_template(waveforms[n], tx_amplitude(s, n), beam(s, n), g.tau,
                                  candidates[q].velocity.dot(g.usum) / lambda, r, col);
                    Y.col(static_cast<Eigen::Index>(q)) = col;
                }
                const Eigen::VectorXcd d = Y.adjoint() * r.samples[li];
                Eigen::MatrixXcd G = Y.adjoint() * Y;
                Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(G, Eigen::EigenvaluesOnly);
                const double lo = es.eigenvalues().minCoeff(), hi = es.eigenvalues().maxCoeff();
                if (!(hi > 0.0))
                    continue;
                if (!(lo > 0.0) || hi / lo > 1e12)
                {
                    G.diagonal().array() += 1e-9 * G.trace().real() / static_cast<double>(Q);
                    out.regularized = true;
                }
                out.value += (d.adjoint() * G.ldlt().solve(d))(0, 0).real();
            }
        return out;
    }

    void validate(const MleGrid &g)
    {
        if (g.coarse_points < 3)
            throw Error(ErrorCode::Validation, "coarse_points must be >= 3", "grid.points");
        if (g.refinement_levels < 1)
            throw Error(ErrorCode::Validation, "refinement_levels must be >= 1", "grid.levels");
        if (!(g.shrink_factor > 0.0 && g.shrink_factor < 1.0))
            throw Error(ErrorCode::Validation, "shrink_factor must lie in (0, 1)", "grid.shrink");
        if (!((g.loc_halfwidth.array() >= 0.0).all() && (g.vel_halfwidth.array() >= 0.0).all()) ||
            !g.loc_halfwidth.allFinite() || !g.vel_halfwidth.allFinite() || !g.loc_center.allFinite() ||
            !g.vel_center.allFinite())
            throw Error(ErrorCode::Validation, "grid centres and half-widths must be finite and nonnegative", "grid");
    }

    namespace
    {
        std::vector<double> axis(double centre, double halfwidth, int points)
        {
            std::vector<double> v(static_cast<std::size_t>(points));
            for (int i = 0; i < points; ++i)
                v[static_cast<std::size_t>(i)] = centre - halfwidth + 2.0 * halfwidth * i / (points - 1);
            return v;
        }

        // Objective over a vx-by-vy velocity grid for one candidate location. For each link the
        // Doppler-free matched product g_i = r_i conj(y_i) is formed once; the Doppler phase factorises
        // over the two velocity components, so every link contributes X diag(g) Y^T.
        struct VelocitySlab
        {
            Eigen::MatrixXcd X, Yt;
            Eigen::MatrixXcd C;
            Eigen::MatrixXd acc;
        };

        void velocity_slab(const ReceivedSignal &r, const Scenario &s, std::span<const Waveform> waveforms,
                           const Vec2 &loc, const std::vector<double> &vx, const std::vector<double> &vy,
                           VelocitySlab &slab)
        {
            const double lambda = s.radio.wavelength();
            const auto P = static_cast<Eigen::Index>(vx.size());
            slab.acc.setZero(P, static_cast<Eigen::Index>(vy.size()));
            for (std::size_t n = 0; n < s.n_tx(); ++n)
            {
                const Waveform &w = waveforms[n];
                const double amp = tx_amplitude(s, n);
                const cplx bw = beam(s, n);
                for (std::size_t k = 0; k < s.n_rx(); ++k)
                {
                    const LinkGeometry geo = link_geometry(s.nodes.tx[n], s.nodes.rx[k], loc);
                    const auto [lo, hi] = support_range(r, geo.tau, w.support_halfwidth());
                    const auto L = static_cast<Eigen::Index>(hi - lo);
                    if (L == 0)
                        continue;
                    const Eigen::VectorXcd &x = r.samples[s.link_index(n, k)];
                    // Waveform samples by recurrence on the quadratic exponent: the ratio between successive
                    // samples is itself geometric.
                    const double dt = 1.0 / r.sample_rate_hz;
                    const double x0 = r.time(lo) - geo.tau;
                    const cplx q(-w.envelope_rate(), w.chirp_rate());
                    const cplx l(0.0, w.frequency_offset());
                    cplx y = amp * bw * w(x0);
                    cplx ratio = std::exp(q * (2.0 * x0 * dt + dt * dt) + l * dt);
                    const cplx ratio_step = std::exp(2.0 * q * dt * dt);
                    Eigen::VectorXcd g(L);
                    double energy = 0.0;
                    for (Eigen::Index i = 0; i < L; ++i)
                    {
                        energy += std::norm(y);
                        g[i] = x[static_cast<Eigen::Index>(lo) + i] * std::conj(y);
                        y *= ratio;
                        ratio *= ratio_step;
                    }
                    if (!(energy > 0.0))
                        continue;

                    // exp(j K t v) with K = -2 pi u / lambda for every grid velocity (rows) and sample (columns);
                    // both t and v are uniform, so columns follow by an element-wise geometric update.
                    auto phases = [&](const std::vector<double> &v, double u, Eigen::MatrixXcd &m) {
                        const auto nv = static_cast<Eigen::Index>(v.size());
                        const double dv = nv > 1 ? v[1] - v[0] : 0.0;
                        const double K = -kTwoPi * u / lambda;
                        const double t0 = r.time(lo);
                        m.resize(nv, L);
                        Eigen::VectorXcd step(nv);
                        cplx e = std::exp(kJ * (K * t0 * v[0])), de = std::exp(kJ * (K * t0 * dv));
                        cplx s = std::exp(kJ * (K * dt * v[0])), ds = std::exp(kJ * (K * dt * dv));
                        for (Eigen::Index j = 0; j < nv; ++j)
                        {
                            m(j, 0) = e;
                            step[j] = s;
                            e *= de;
                            s *= ds;
                        }
                        for (Eigen::Index i = 1; i < L; ++i)
                            m.col(i) = m.col(i - 1).cwiseProduct(step);
                    };
                    phases(vx, geo.usum.x(), slab.X);
                    phases(vy, geo.usum.y(), slab.Yt);
                    slab.C.noalias() = (slab.X * g.asDiagonal()) * slab.Yt.transpose();
                    slab.acc += slab.C.cwiseAbs2() / energy;
                }
            }
        }
    }

    MleResult mle_single(const ReceivedSignal &r, const Scenario &s, std::span<const Waveform> waveforms,
                         const MleGrid &grid)
    {
        check_inputs(s, waveforms);
        check_signal(r, s);
        validate(grid);

        MleResult res;
        {
            // Ambiguity risk: coarse steps wider than what the waveform resolves.
            double dr = std::numeric_limits<double>::infinity(), vr = dr;
            for (const auto &w : waveforms)
            {
                const SafetyMetrics m = safety_metrics(w, s.radio.wavelength());
                dr = std::min(dr, m.distance);
                vr = std::min(vr, m.velocity);
            }
            const double step = 2.0 / (grid.coarse_points - 1);
            res.coarse_warning = grid.loc_halfwidth.maxCoeff() * step > dr || grid.vel_halfwidth.maxCoeff() * step > vr;
        }

        Vec2 lc = grid.loc_center, vc = grid.vel_center;
        Vec2 lh = grid.loc_halfwidth, vh = grid.vel_halfwidth;
        VelocitySlab slab;
        double best = -std::numeric_limits<double>::infinity();
        for (int level = 0; level < grid.refinement_levels; ++level)
        {
            const auto xs = axis(lc.x(), lh.x(), grid.coarse_points), ys = axis(lc.y(), lh.y(), grid.coarse_points);
            const auto vxs = axis(vc.x(), vh.x(), grid.coarse_points), vys = axis(vc.y(), vh.y(), grid.coarse_points);
            Vec2 bl = lc, bv = vc;
            best = -std::numeric_limits<double>::infinity();
            for (double x : xs)
                for (double y : ys)
                {
                    const Vec2 loc(x, y);
                    velocity_slab(r, s, waveforms, loc, vxs, vys, slab);
                    res.evaluations += vxs.size() * vys.size();
                    Eigen::Index i = 0, j = 0;
                    const double v = slab.acc.maxCoeff(&i, &j);
                    // Strict comparison keeps the first maximiser in scan order: deterministic ties.
                    if (v > best)
                    {
                        best = v;
                        bl = loc;
                        bv = Vec2(vxs[static_cast<std::size_t>(i)], vys[static_cast<std::size_t>(j)]);
                    }
                }
            lc = bl;
            vc = bv;
            lh *= grid.shrink_factor;
            vh *= grid.shrink_factor;
        }

        res.location = lc;
        res.velocity = vc;
        const Candidate est{lc, vc};
        const auto fits = fit_single(r, s, waveforms, est);
        res.rcs.resize(static_cast<Eigen::Index>(s.n_tx()), static_cast<Eigen::Index>(s.n_rx()));
        res.llf_value = 0.0;
        for (std::size_t n = 0; n < s.n_tx(); ++n)
            for (std::size_t k = 0; k < s.n_rx(); ++k)
            {
                const LinkFit &f = fits[s.link_index(n, k)];
                res.rcs(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(k)) = f.rcs;
                if (f.energy > 0.0)
                    res.llf_value += std::norm(f.correlation) / f.energy;
            }
        return res;
    }

    std::vector<MleResult> mle_multi_decoupled(const ReceivedSignal &r, const Scenario &s,
                                               std::span<const Waveform> waveforms, std::span<const MleGrid> grids)
    {
        std::vector<MleResult> out;
        out.reserve(grids.size());
        for (const MleGrid &g : grids)
            out.push_back(mle_single(r, s, waveforms, g));

        // Decoupling needs every pair separated beyond the resolution on all links in delay, or on all
        // links in Doppler.
        const double lambda = s.radio.wavelength();
        for (std::size_t a = 0; a < out.size(); ++a)
            for (std::size_t b = a + 1; b < out.size(); ++b)
            {
                bool delay_ok = true, doppler_ok = true;
                for (std::size_t n = 0; n < s.n_tx(); ++n)
                {
                    const double tr = delay_resolution(waveforms[n]), fr = doppler_resolution(waveforms[n]);
                    for (std::size_t k = 0; k < s.n_rx(); ++k)
                    {
                        const LinkGeometry ga = link_geometry(s.nodes.tx[n], s.nodes.rx[k], out[a].location);
                        const LinkGeometry gb = link_geometry(s.nodes.tx[n], s.nodes.rx[k], out[b].location);
                        delay_ok = delay_ok && std::abs(ga.tau - gb.tau) >= tr;
                        const double fa = out[a].velocity.dot(ga.usum) / lambda, fb = out[b].velocity.dot(gb.usum) / lambda;
                        doppler_ok = doppler_ok && std::abs(fa - fb) >= fr;
                    }
                }
                if (!delay_ok && !doppler_ok)
                    out[a].separation_warning = out[b].separation_warning = true;
            }
        return out;
    }

    namespace
    {
        constexpr char kMagic[5] = {'D', 'M', 'S', 'R', '1'};

        template <class T> void put_le(std::ostream &os, T v)
        {
            static_assert(std::is_trivially_copyable_v<T>);
            std::array<unsigned char, sizeof(T)> b;
            std::memcpy(b.data(), &v, sizeof(T));
            if constexpr (std::endian::native == std::endian::big)
                std::reverse(b.begin(), b.end());
            os.write(reinterpret_cast<const char *>(b.data()), sizeof(T));
        }

        template <class T> T get_le(std::istream &is)
        {
            std::array<unsigned char, sizeof(T)> b;
            if (!is.read(reinterpret_cast<char *>(b.data()), sizeof(T)))
                throw Error(ErrorCode::Io, "truncated signal file", "signal");
            if constexpr (std::endian::native == std::endian::big)
                std::reverse(b.begin(), b.end());
            T v;
            std::memcpy(&v, b.data(), sizeof(T));
            return v;
        }
    }

    void write_signal(std::ostream &os, const ReceivedSignal &r)
    {
        const std::size_t S = r.num_samples();
        if (r.n_tx > 0xFFFFFFFFu || r.n_rx > 0xFFFFFFFFu || S > 0xFFFFFFFFu)
            throw Error(ErrorCode::Validation, "signal too large for the dump format", "signal");
        os.write(kMagic, sizeof kMagic);
        put_le<std::uint32_t>(os, static_cast<std::uint32_t>(r.n_tx));
        put_le<std::uint32_t>(os, static_cast<std::uint32_t>(r.n_rx));
        put_le<std::uint32_t>(os, static_cast<std::uint32_t>(S));
        put_le<double>(os, r.sample_rate_hz);
        for (const auto &link : r.samples)
            for (Eigen::Index i = 0; i < link.size(); ++i)
            {
                put_le<float>(os, static_cast<float>(link[i].real()));
                put_le<float>(os, static_cast<float>(link[i].imag()));
            }
        if (!os)
            throw Error(ErrorCode::Io, "failed writing signal", "signal");
    }

    void write_signal(const std::string &path, const ReceivedSignal &r)
    {
        std::ofstream os(path, std::ios::binary);
        if (!os)
            throw Error(ErrorCode::Io, "cannot open '" + path + "' for writing", "out");
        write_signal(os, r);
    }

    ReceivedSignal read_signal(std::istream &is)
    {
        char magic[5];
        if (!is.read(magic, sizeof magic) || std::memcmp(magic, kMagic, sizeof magic) != 0)
            throw Error(ErrorCode::Parse, "not a DMSR1 signal file", "signal");
        ReceivedSignal r;
        r.n_tx = get_le<std::uint32_t>(is);
        r.n_rx = get_le<std::uint32_t>(is);
        const std::size_t S = get_le<std::uint32_t>(is);
        r.sample_rate_hz = get_le<double>(is);
        r.samples.assign(r.n_tx * r.n_rx, Eigen::VectorXcd(static_cast<Eigen::Index>(S)));
        for (auto &link : r.samples)
            for (Eigen::Index i = 0; i < link.size(); ++i)
            {
                const float re = get_le<float>(is);
                const float im = get_le<float>(is);
                link[i] = cplx(re, im);
            }
        return r;
    }

    ReceivedSignal read_signal(const std::string &path)
    {
        std::ifstream is(path, std::ios::binary);
        if (!is)
            throw Error(ErrorCode::Io, "cannot open '" + path + "'", "signal");
        return read_signal(is);
    }
}
