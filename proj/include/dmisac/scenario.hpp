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

#include <string>
#include <vector>

#include "dmisac/common.hpp"
#include "dmisac/waveform.hpp"

namespace dmisac
{
    struct NodeSet
    {
        std::vector<Vec2> tx; // m
        std::vector<Vec2> rx; // m
    };

    struct Target
    {
        Vec2 location = Vec2::Zero(); // m
        Vec2 velocity = Vec2::Zero(); // m/s
        Eigen::MatrixXcd rcs;         // N x K, channel fading folded in
    };

    struct RadioConfig
    {
        double carrier_freq_hz = 3e9;
        double total_energy_j = 1.0;
        Eigen::VectorXd energy_alloc;   // rho, sums to 1
        Eigen::VectorXcd beam_weights;  // |b_n| = 1
        cplx symbol{1.0, 0.0};          // |symbol| = 1
        double noise_var_w = 1.0;
        double sample_rate_hz = 1e3;
        double effective_time_width_s = 1e-2;

        double wavelength() const { return kSpeedOfLight / carrier_freq_hz; }
        double senr() const { return total_energy_j / noise_var_w; }
        double scnr() const { return senr() / effective_time_width_s; }
        // Keeps the energy fixed and adjusts the noise variance.
        void set_senr_db(double senr_db) { noise_var_w = total_energy_j / db_to_linear(senr_db); }
        long nominal_samples() const;
    };

    struct Scenario
    {
        std::string name;
        NodeSet nodes;
        std::vector<Target> targets;
        RadioConfig radio;
        WaveformPlan waveform;

        std::size_t n_tx() const { return nodes.tx.size(); }
        std::size_t n_rx() const { return nodes.rx.size(); }
        std::size_t n_links() const { return n_tx() * n_rx(); }
        std::size_t link_index(std::size_t n, std::size_t k) const { return n * n_rx() + k; }
    };

    // Uniform energy allocation, unit beam weights.
    RadioConfig make_radio(std::size_t n_tx, double carrier_freq_hz, double senr_db, double sample_rate_hz,
                           double effective_time_width_s);

    // Throws Error(Validation, ..., field) naming the first violated invariant.
    void validate(const Scenario &scenario);

    struct LinkDelay
    {
        double tx = 0.0;    // transmitter -> target
        double rx = 0.0;    // target -> receiver
        double total = 0.0; // tx + rx
    };

    LinkDelay compute_delay(const Vec2 &tx, const Vec2 &rx, const Vec2 &target_loc);
    double compute_doppler(const Vec2 &tx, const Vec2 &rx, const Vec2 &target_loc, const Vec2 &target_vel,
                           double wavelength);
    double compute_doppler(const Vec2 &tx, const Vec2 &rx, const Target &target, double wavelength);

    struct PathParams
    {
        double tau = 0.0;                  // s
        double doppler = 0.0;              // Hz
        Vec2 d_tau_dl = Vec2::Zero();      // (beta, zeta), s/m
        Vec2 d_f_dl = Vec2::Zero();        // (eta, kappa), Hz/m
        Vec2 d_f_dv = Vec2::Zero();        // (xi, varrho), Hz/(m/s)
    };

    // One entry per link, row-major over (n, k).
    std::vector<PathParams> path_params(const Scenario &scenario, std::size_t target);

    // 4 x 2NK Jacobian of (tau_11..tau_NK, f_11..f_NK) with respect to (x, y, vx, vy), stored
    // transposed the usual way: rows are target-state coordinates.
    struct GeometricSpread
    {
        Eigen::MatrixXd matrix;

        std::size_t links() const { return static_cast<std::size_t>(matrix.cols() / 2); }
        Eigen::MatrixXd a11() const { return matrix.topLeftCorner(2, matrix.cols() / 2); }
        Eigen::MatrixXd a12() const { return matrix.topRightCorner(2, matrix.cols() / 2); }
        Eigen::MatrixXd a22() const { return matrix.bottomRightCorner(2, matrix.cols() / 2); }
    };

    GeometricSpread geometric_spread(const Scenario &scenario, std::size_t target);
    GeometricSpread geometric_spread(std::span<const PathParams> links);
}
