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

#include "dmisac/scenario.hpp"

#include <cmath>
#include <string>

#include "dmisac/error.hpp"

namespace dmisac
{
    namespace
    {
        // Closer than this a node is treated as sitting on the target.
        constexpr double kCoincident = 1e-6; // m

        std::string node_name(const char *kind, std::size_t index)
        {
            return std::string(kind) + "[" + std::to_string(index) + "]";
        }

        Vec2 unit_towards(const Vec2 &node, const Vec2 &target, double &dist, const std::string &name)
        {
            Vec2 d = node - target;
            dist = d.norm();
            if (!(dist > kCoincident))
                throw Error(ErrorCode::DegenerateGeometry, name + " coincides with the target location", name);
            return d / dist;
        }

        bool finite(const Vec2 &v) { return std::isfinite(v.x()) && std::isfinite(v.y()); }

        [[noreturn]] void invalid(const std::string &field, const std::string &what)
        {
            throw Error(ErrorCode::Validation, field + ": " + what, field);
        }
    }

    long RadioConfig::nominal_samples() const
    {
        return std::lround(sample_rate_hz * effective_time_width_s);
    }

    RadioConfig make_radio(std::size_t n_tx, double carrier_freq_hz, double senr_db, double sample_rate_hz,
                           double effective_time_width_s)
    {
        RadioConfig r;
        r.carrier_freq_hz = carrier_freq_hz;
        r.total_energy_j = 1.0;
        r.energy_alloc = Eigen::VectorXd::Constant(static_cast<Eigen::Index>(n_tx), 1.0 / static_cast<double>(n_tx));
        r.beam_weights = Eigen::VectorXcd::Ones(static_cast<Eigen::Index>(n_tx));
        r.symbol = cplx(1.0, 0.0);
        r.sample_rate_hz = sample_rate_hz;
        r.effective_time_width_s = effective_time_width_s;
        r.set_senr_db(senr_db);
        return r;
    }

    void validate(const Scenario &s)
    {
        const std::size_t n = s.n_tx(), k = s.n_rx();
        if (n < 1)
            invalid("nodes.tx_positions_m", "need at least one transmitter");
        if (k < 1)
            invalid("nodes.rx_positions_m", "need at least one receiver");
        for (std::size_t i = 0; i < n; ++i)
            if (!finite(s.nodes.tx[i]))
                invalid("nodes.tx_positions_m[" + std::to_string(i) + "]", "non-finite coordinate");
        for (std::size_t i = 0; i < k; ++i)
            if (!finite(s.nodes.rx[i]))
                invalid("nodes.rx_positions_m[" + std::to_string(i) + "]", "non-finite coordinate");

        if (s.targets.empty())
            invalid("targets", "need at least one target");
        for (std::size_t q = 0; q < s.targets.size(); ++q)
        {
            const Target &t = s.targets[q];
            const std::string base = "targets[" + std::to_string(q) + "]";
            if (!finite(t.location))
                invalid(base + ".location_m", "non-finite coordinate");
            if (!finite(t.velocity))
                invalid(base + ".velocity_mps", "non-finite component");
            if (static_cast<std::size_t>(t.rcs.rows()) != n || static_cast<std::size_t>(t.rcs.cols()) != k)
                invalid(base + ".rcs", "expected " + std::to_string(n) + "x" + std::to_string(k) + " entries, got " +
                                           std::to_string(t.rcs.rows()) + "x" + std::to_string(t.rcs.cols()));
            if (!t.rcs.allFinite())
                invalid(base + ".rcs", "non-finite entry");
            if (t.rcs.cwiseAbs().maxCoeff() == 0.0)
                invalid(base + ".rcs", "all entries are zero");
            for (std::size_t i = 0; i < n; ++i)
                if ((s.nodes.tx[i] - t.location).norm() <= kCoincident)
                    throw Error(ErrorCode::DegenerateGeometry,
                                node_name("tx", i) + " coincides with " + base + ".location_m", node_name("tx", i));
            for (std::size_t i = 0; i < k; ++i)
                if ((s.nodes.rx[i] - t.location).norm() <= kCoincident)
                    throw Error(ErrorCode::DegenerateGeometry,
                                node_name("rx", i) + " coincides with " + base + ".location_m", node_name("rx", i));
        }

        const RadioConfig &r = s.radio;
        if (!(r.carrier_freq_hz > 0.0) || !std::isfinite(r.carrier_freq_hz))
            invalid("radio.carrier_freq_hz", "must be positive, got " + std::to_string(r.carrier_freq_hz));
        if (!(r.total_energy_j > 0.0) || !std::isfinite(r.total_energy_j))
            invalid("radio.total_energy_j", "must be positive, got " + std::to_string(r.total_energy_j));
        if (!(r.noise_var_w > 0.0) || !std::isfinite(r.noise_var_w))
            invalid("radio.noise_var_w", "must be positive, got " + std::to_string(r.noise_var_w));
        if (!(r.sample_rate_hz > 0.0) || !std::isfinite(r.sample_rate_hz))
            invalid("radio.sample_rate_hz", "must be positive, got " + std::to_string(r.sample_rate_hz));
        if (!(r.effective_time_width_s > 0.0) || !std::isfinite(r.effective_time_width_s))
            invalid("radio.effective_time_width_s", "must be positive");
        if (r.nominal_samples() < 2)
            invalid("radio.effective_time_width_s",
                    "round(f_s * T_eff) = " + std::to_string(r.nominal_samples()) + " < 2");

        if (static_cast<std::size_t>(r.energy_alloc.size()) != n)
            invalid("radio.energy_alloc", "expected " + std::to_string(n) + " entries");
        if ((r.energy_alloc.array() < 0.0).any() || !r.energy_alloc.allFinite())
            invalid("radio.energy_alloc", "entries must be finite and nonnegative");
        if (std::abs(r.energy_alloc.sum() - 1.0) > 1e-12)
            invalid("radio.energy_alloc", "must sum to 1, sums to " + std::to_string(r.energy_alloc.sum()));
        if (static_cast<std::size_t>(r.beam_weights.size()) != n)
            invalid("radio.beam_weights", "expected " + std::to_string(n) + " entries");
        for (Eigen::Index i = 0; i < r.beam_weights.size(); ++i)
            if (!(std::abs(std::abs(r.beam_weights[i]) - 1.0) <= 1e-12))
                invalid("radio.beam_weights", "entry " + std::to_string(i) + " is not unit-modulus");
        if (!(std::abs(std::abs(r.symbol) - 1.0) <= 1e-12))
            invalid("radio.symbol", "must be unit-modulus");

        const WaveformPlan &w = s.waveform;
        if (!(w.pulse_param > 0.0) || !std::isfinite(w.pulse_param))
            invalid("waveform.pulse_param_s", "must be positive");
        if (w.kind == WaveformKind::GaussianOcdm && w.num_chirps < 1)
            invalid("waveform.num_chirps", "must be at least 1");
        if (!w.subcarriers.empty() && w.subcarriers.size() != n)
            invalid("waveform.subcarriers", "expected " + std::to_string(n) + " entries");
        for (std::size_t i = 0; i < n; ++i)
        {
            const int sc = w.subcarriers.empty() ? static_cast<int>(i) + 1 : w.subcarriers[i];
            if (sc < 1 || (w.kind == WaveformKind::GaussianOcdm && sc > w.num_chirps))
                invalid(w.subcarriers.empty() ? "waveform.num_chirps" : "waveform.subcarriers",
                        "subcarrier " + std::to_string(sc) + " out of range for transmitter " + std::to_string(i));
        }
    }

    LinkDelay compute_delay(const Vec2 &tx, const Vec2 &rx, const Vec2 &target_loc)
    {
        double dn = 0.0, dk = 0.0;
        unit_towards(tx, target_loc, dn, "tx");
        unit_towards(rx, target_loc, dk, "rx");
        LinkDelay d;
        d.tx = dn / kSpeedOfLight;
        d.rx = dk / kSpeedOfLight;
        d.total = d.tx + d.rx;
        return d;
    }

    double compute_doppler(const Vec2 &tx, const Vec2 &rx, const Vec2 &target_loc, const Vec2 &target_vel,
                           double wavelength)
    {
        double dn = 0.0, dk = 0.0;
        const Vec2 un = unit_towards(tx, target_loc, dn, "tx");
        const Vec2 uk = unit_towards(rx, target_loc, dk, "rx");
        return target_vel.dot(un + uk) / wavelength;
    }

    double compute_doppler(const Vec2 &tx, const Vec2 &rx, const Target &target, double wavelength)
    {
        return compute_doppler(tx, rx, target.location, target.velocity, wavelength);
    }

    std::vector<PathParams> path_params(const Scenario &s, std::size_t target)
    {
        if (target >= s.targets.size())
            throw Error(ErrorCode::Validation, "target index " + std::to_string(target) + " out of range", "target");
        const Target &t = s.targets[target];
        const double lambda = s.radio.wavelength();
        const std::size_t n_tx = s.n_tx(), n_rx = s.n_rx();

        // Per-node unit vectors and distances are shared by every link through that node.
        std::vector<Vec2> u_tx(n_tx), u_rx(n_rx);
        std::vector<double> d_tx(n_tx), d_rx(n_rx);
        for (std::size_t n = 0; n < n_tx; ++n)
            u_tx[n] = unit_towards(s.nodes.tx[n], t.location, d_tx[n], node_name("tx", n));
        for (std::size_t k = 0; k < n_rx; ++k)
            u_rx[k] = unit_towards(s.nodes.rx[k], t.location, d_rx[k], node_name("rx", k));

        // d u_m / d l = -(I - u u^T) / d_m, so d(v.u_m)/dl = -(v - u (u.v)) / d_m.
        auto dproj = [&](const Vec2 &u, double d) -> Vec2 { return -(t.velocity - u * u.dot(t.velocity)) / d; };

        std::vector<PathParams> out;
        out.reserve(n_tx * n_rx);
        for (std::size_t n = 0; n < n_tx; ++n)
            for (std::size_t k = 0; k < n_rx; ++k)
            {
                PathParams p;
                const Vec2 usum = u_tx[n] + u_rx[k];
                p.tau = (d_tx[n] + d_rx[k]) / kSpeedOfLight;
                p.doppler = t.velocity.dot(usum) / lambda;
                p.d_tau_dl = -usum / kSpeedOfLight;
                p.d_f_dv = usum / lambda;
                p.d_f_dl = (dproj(u_tx[n], d_tx[n]) + dproj(u_rx[k], d_rx[k])) / lambda;
                out.push_back(p);
            }
        return out;
    }

    GeometricSpread geometric_spread(std::span<const PathParams> links)
    {
        const auto nk = static_cast<Eigen::Index>(links.size());
        GeometricSpread g;
        g.matrix = Eigen::MatrixXd::Zero(4, 2 * nk);
        for (Eigen::Index i = 0; i < nk; ++i)
        {
            const PathParams &p = links[static_cast<std::size_t>(i)];
            g.matrix.block<2, 1>(0, i) = p.d_tau_dl;
            g.matrix.block<2, 1>(0, nk + i) = p.d_f_dl;
            g.matrix.block<2, 1>(2, nk + i) = p.d_f_dv;
        }
        return g;
    }

    GeometricSpread geometric_spread(const Scenario &scenario, std::size_t target)
    {
        const auto links = path_params(scenario, target);
        return geometric_spread(links);
    }
}
