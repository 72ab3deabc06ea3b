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

#include <span>
#include <vector>

#include "dmisac/scenario.hpp"
#include "dmisac/waveform.hpp"

namespace dmisac
{
    // How the Doppler second moment int t^2 |s(t - tau)|^2 dt enters d_{n,k}.
    enum class DopplerMoment
    {
        Exact,       // setw + 2 tau tbar + tau^2
        Approximate, // setw only
        Gated        // Approximate when tau < gate_fraction * T_eff, Exact otherwise
    };

    struct FimOptions
    {
        DopplerMoment doppler_moment = DopplerMoment::Exact;
        double gate_fraction = 0.01;
        double singular_condition = 1e12;
    };

    // Single-target FIM in the (delay, Doppler, Re alpha, Im alpha) parametrisation.
    // A, B, D, F are diagonal and stored as vectors; G = [G_re | G_im] and E likewise are NK x 2NK.
    struct FimBundle
    {
        Eigen::VectorXd a, b, d;
        Eigen::MatrixXd g, e;
        Eigen::VectorXd f;
        GeometricSpread aleph;

        std::size_t links() const { return static_cast<std::size_t>(a.size()); }
        Eigen::MatrixXd phi() const; // [[A, B], [B, D]]
        Eigen::MatrixXd psi() const; // [G; E]
        Eigen::MatrixXd full() const; // 4NK x 4NK FIM over (tau, f, Re alpha, Im alpha)
        Eigen::MatrixXd theta_fim() const; // (4 + 2NK) FIM over (x, y, vx, vy, Re alpha, Im alpha)
    };

    FimBundle single_target_fim(const Scenario &scenario, std::span<const Waveform> waveforms, std::size_t target,
                                const FimOptions &options = {});

    struct CrlbReport
    {
        Eigen::Matrix4d accurate = Eigen::Matrix4d::Zero();
        Eigen::Matrix4d approx = Eigen::Matrix4d::Zero();
        double loc_crlb = 0.0;        // m^2, trace of the location block
        double vel_crlb = 0.0;        // m^2/s^2
        double loc_crlb_approx = 0.0;
        double vel_crlb_approx = 0.0;
        double condition_number = 0.0; // of the equilibrated 4x4 information matrix
    };

    // Throws SingularInformation when the equilibrated information matrix has condition number
    // above options.singular_condition.
    CrlbReport crlb_single(const FimBundle &bundle, const FimOptions &options = {});

    struct StaticCrlb
    {
        Eigen::Matrix2d covariance = Eigen::Matrix2d::Zero();
        double x = 0.0; // m^2
        double y = 0.0; // m^2
        double condition_number = 0.0;
    };

    // Localisation-only bound (aleph11 A aleph11^T)^-1 for a static target.
    StaticCrlb crlb_static(const Scenario &scenario, std::span<const Waveform> waveforms, std::size_t target,
                           const FimOptions &options = {});

    struct MultiFimOptions
    {
        FimOptions base;
        // Add the expected cross-target residual term to each diagonal block J_qq.
        bool additive_coupling = true;
    };

    struct MultiFim
    {
        std::size_t targets = 0;
        std::size_t links = 0;
        Eigen::MatrixXd phi_fim;            // Q*4NK square, target-major blocks
        std::vector<FimBundle> single;      // per-target single-target FIMs (no coupling)
        std::vector<Eigen::MatrixXd> coupling; // per-target additive coupling added to J_qq

        std::size_t block_size() const { return 4 * links; }
        Eigen::MatrixXd block(std::size_t q, std::size_t l) const;
        Eigen::MatrixXd theta_fim() const; // chained through diag(Lambda_q)
    };

    MultiFim multi_target_fim(const Scenario &scenario, std::span<const Waveform> waveforms,
                              const MultiFimOptions &options = {});

    struct TargetCrlb
    {
        Eigen::Matrix4d accurate = Eigen::Matrix4d::Zero();  // from the full multi-target inverse
        Eigen::Matrix4d decoupled = Eigen::Matrix4d::Zero(); // (Lambda_q J_qq Lambda_q^T)^-1
        Eigen::Matrix4d single = Eigen::Matrix4d::Zero();    // (Lambda_q J_q Lambda_q^T)^-1
        bool decoupled_pseudo = false; // J_qq with coupling was too ill-conditioned to invert
        double loc_accurate = 0.0, vel_accurate = 0.0;
        double loc_decoupled = 0.0, vel_decoupled = 0.0;
        double loc_single = 0.0, vel_single = 0.0;
    };

    struct MultiCrlbReport
    {
        std::vector<TargetCrlb> targets;
        double condition_number = 0.0; // equilibrated full theta-FIM
        double min_eigenvalue = 0.0;   // of the equilibrated full theta-FIM
        bool pseudo_inverse = false;   // set when the full FIM was too ill-conditioned to invert
    };

    MultiCrlbReport crlb_multi(const MultiFim &mfim, const FimOptions &options = {});

    struct TightnessReport
    {
        double g_ratio = 0.0; // Tr(G F^-1 G^T) / Tr(A)
        double e_ratio = 0.0; // Tr(E F^-1 E^T) / Tr(D)
        std::vector<double> freq_ratio; // per link fbar^2 / sebw
        std::vector<double> time_ratio; // per link (tbar + tau)^2 / setw
        double threshold = 0.01;
        bool tight = false;
    };

    TightnessReport tightness_check(const Scenario &scenario, std::span<const Waveform> waveforms,
                                    std::size_t target, double threshold = 0.01);

    // Residuals of the two identities that reduce the location information to its Doppler-only form
    // for Gaussian pulses (Y = aleph22 D aleph22^T):
    //   aleph11 B aleph12^T = aleph11 B aleph22^T Y^-1 (aleph12 D aleph22^T)^T
    //   aleph11 A aleph11^T = aleph11 B aleph22^T Y^-1 (aleph11 B aleph22^T)^T
    // The delay residual is ||lhs - rhs||_F / ||lhs||_F. The cross term can vanish by symmetry, so its
    // residual is scaled by (||aleph11 |B| aleph11^T||_F ||aleph12 |B| aleph12^T||_F)^(1/2) instead.
    struct LocationIdentityResiduals
    {
        double cross = 0.0;
        double delay = 0.0;
    };

    LocationIdentityResiduals location_identity_residuals(const FimBundle &bundle);

    struct SafetyMetrics
    {
        double tau_r = 0.0;    // s
        double f_r = 0.0;      // Hz
        double distance = 0.0; // m, tau_r c / 2
        double velocity = 0.0; // m/s, lambda f_r / 2
    };

    SafetyMetrics safety_metrics(const Waveform &w, double wavelength, double threshold = 0.1);
}
