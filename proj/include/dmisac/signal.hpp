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

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "dmisac/fim.hpp"
#include "dmisac/scenario.hpp"
#include "dmisac/waveform.hpp"

namespace dmisac
{
    // Sampled received signal. Sample i of every link sits at absolute time (first_index + i) / f_s.
    struct ReceivedSignal
    {
        std::size_t n_tx = 0, n_rx = 0;
        double sample_rate_hz = 0.0;
        std::int64_t first_index = 0;
        std::uint64_t noise_seed = 0;
        std::vector<Eigen::VectorXcd> samples; // row-major over (n, k)

        std::size_t num_samples() const { return samples.empty() ? 0 : static_cast<std::size_t>(samples[0].size()); }
        double time(std::size_t i) const { return static_cast<double>(first_index + static_cast<std::int64_t>(i)) / sample_rate_hz; }
        const Eigen::VectorXcd &link(std::size_t n, std::size_t k) const { return samples[n * n_rx + k]; }
    };

    struct SynthesisOptions
    {
        bool noise = true;
        double guard_s = -1.0; // extra window on each side; negative means one pulse parameter
    };

    // Sample window [first, first + count) covering every echo of every target with its full support.
    struct SampleWindow
    {
        std::int64_t first_index = 0;
        std::size_t count = 0;
    };

    SampleWindow sample_window(const Scenario &scenario, std::span<const Waveform> waveforms, double guard_s = -1.0);

    ReceivedSignal synthesize(const Scenario &scenario, std::span<const Waveform> waveforms, std::uint64_t seed,
                              const SynthesisOptions &options = {});

    // Same grid, caller-specified window (used when several signals must share sample times).
    ReceivedSignal synthesize(const Scenario &scenario, std::span<const Waveform> waveforms, std::uint64_t seed,
                              const SampleWindow &window, bool noise = true);

    // Noiseless echo sqrt(P rho) b s(t - tau) exp(j 2 pi f t) without the RCS and symbol factors.
    void link_template(const Waveform &w, double amplitude, cplx beam, double tau, double doppler,
                       const ReceivedSignal &grid, Eigen::VectorXcd &out);

    struct Candidate
    {
        Vec2 location = Vec2::Zero();
        Vec2 velocity = Vec2::Zero();
    };

    struct LinkFit
    {
        cplx correlation{}; // sum_i r(i) conj(y(i))
        double energy = 0.0; // sum_i |y(i)|^2
        cplx rcs{};          // concentrated RCS estimate
    };

    std::vector<LinkFit> fit_single(const ReceivedSignal &r, const Scenario &scenario,
                                    std::span<const Waveform> waveforms, const Candidate &candidate);

    // Concentrated single-target objective sum_{n,k} |c_nk|^2 / E_nk; equals sigma^2 times the
    // log-likelihood (without the data-only term) evaluated at the concentrated RCS.
    double llf_single(const ReceivedSignal &r, const Scenario &scenario, std::span<const Waveform> waveforms,
                      const Candidate &candidate);

    // Log-likelihood with explicit RCS, dropping the data-only term:
    //   sum_{n,k} (2 Re(conj(alpha varsigma) c_nk) - |alpha|^2 E_nk) / sigma^2.
    double llf_with_rcs(const ReceivedSignal &r, const Scenario &scenario, std::span<const Waveform> waveforms,
                        const Candidate &candidate, const Eigen::MatrixXcd &rcs);

    struct MultiLlf
    {
        double value = 0.0;
        bool regularized = false;
    };

    // sum_{n,k} d^H G^-1 d with d_q = sum_i r conj(y_q) and Gram G_ql = sum_i conj(y_q) y_l.
    MultiLlf llf_multi(const ReceivedSignal &r, const Scenario &scenario, std::span<const Waveform> waveforms,
                       std::span<const Candidate> candidates);

    struct MleGrid
    {
        Vec2 loc_center = Vec2::Zero();
        Vec2 loc_halfwidth = Vec2::Constant(10.0);
        Vec2 vel_center = Vec2::Zero();
        Vec2 vel_halfwidth = Vec2::Constant(1.0);
        int coarse_points = 11;
        int refinement_levels = 4;
        double shrink_factor = 0.2;
    };

    void validate(const MleGrid &grid);

    struct MleResult
    {
        Vec2 location = Vec2::Zero();
        Vec2 velocity = Vec2::Zero();
        Eigen::MatrixXcd rcs;
        double llf_value = 0.0;
        std::size_t evaluations = 0;
        bool coarse_warning = false;     // coarse spacing exceeds the safety distance / velocity
        bool separation_warning = false; // decoupled search: estimates closer than the safety limits
    };

    MleResult mle_single(const ReceivedSignal &r, const Scenario &scenario, std::span<const Waveform> waveforms,
                         const MleGrid &grid);

    // Independent per-target searches of the single-target objective.
    std::vector<MleResult> mle_multi_decoupled(const ReceivedSignal &r, const Scenario &scenario,
                                               std::span<const Waveform> waveforms, std::span<const MleGrid> grids);

    // Grid centred on target `q` with half-widths `sigmas` times the CRLB standard deviations at
    // the scenario's current SENR.
    MleGrid grid_from_crlb(const Scenario &scenario, std::span<const Waveform> waveforms, std::size_t q,
                           double sigmas);

    struct MonteCarloConfig
    {
        std::vector<double> senr_db;
        std::size_t trials = 200;
        std::uint64_t seed = 1;
        std::size_t target = 0;
        MleGrid grid;         // used as-is when `auto_grid_sigmas` <= 0
        double auto_grid_sigmas = 6.0; // grid from the CRLB at the lowest SENR
        unsigned threads = 0;  // 0: hardware concurrency
        bool keep_errors = false;
    };

    struct MonteCarloRow
    {
        double senr_db = 0.0;
        double mse_location = 0.0; // m^2
        double mse_velocity = 0.0; // m^2/s^2
        double crlb_location = 0.0;
        double crlb_velocity = 0.0;
        std::size_t trials = 0;
        std::uint64_t seed = 0;
        std::vector<Eigen::Vector4d> errors; // per trial (dx, dy, dvx, dvy) when requested
    };

    struct MonteCarloReport
    {
        std::vector<MonteCarloRow> rows;
        MleGrid grid;
    };

    MonteCarloReport monte_carlo(const Scenario &scenario, std::span<const Waveform> waveforms,
                                 const MonteCarloConfig &config);

    // Seed of trial `trial`. It does not depend on the SENR level, so every level (and every scenario
    // variant run with the same base seed) sees the same noise realisations up to scale.
    std::uint64_t trial_seed(std::uint64_t seed, std::size_t trial);

    // Unit-variance circular complex Gaussian sample keyed by (seed, n, k, absolute sample index).
    cplx noise_sample(std::uint64_t seed, std::size_t n, std::size_t k, std::int64_t index);

    // Binary dump: "DMSR1", N, K, S (u32 LE), f_s (f64 LE), then complex64 (re, im float32 LE)
    // samples, one S-long block per link in row-major (n, k) order.
    void write_signal(std::ostream &os, const ReceivedSignal &r);
    void write_signal(const std::string &path, const ReceivedSignal &r);
    ReceivedSignal read_signal(std::istream &is);
    ReceivedSignal read_signal(const std::string &path);
}
