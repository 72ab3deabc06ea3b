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

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

#include "dmisac/error.hpp"
#include "dmisac/signal.hpp"

namespace dmisac
{
    std::uint64_t trial_seed(std::uint64_t seed, std::size_t trial)
    {
        // Golden-ratio stride; noise_sample hashes the result again, so adjacent trials decorrelate.
        return seed * 0xD1B54A32D192ED03ull + (static_cast<std::uint64_t>(trial) + 1) * 0x9E3779B97F4A7C15ull;
    }

    MleGrid grid_from_crlb(const Scenario &s, std::span<const Waveform> waveforms, std::size_t q, double sigmas)
    {
        if (!(sigmas > 0.0))
            throw Error(ErrorCode::Validation, "grid width in standard deviations must be positive", "sigmas");
        const CrlbReport c = crlb_single(single_target_fim(s, waveforms, q));
        const Eigen::Vector4d sd = c.accurate.diagonal().cwiseMax(0.0).cwiseSqrt();
        MleGrid g;
        g.loc_center = s.targets.at(q).location;
        g.vel_center = s.targets.at(q).velocity;
        g.loc_halfwidth = sigmas * sd.head<2>();
        g.vel_halfwidth = sigmas * sd.tail<2>();
        return g;
    }

    MonteCarloReport monte_carlo(const Scenario &scenario, std::span<const Waveform> waveforms,
                                 const MonteCarloConfig &config)
    {
        if (config.senr_db.empty())
            throw Error(ErrorCode::Validation, "need at least one SENR level", "senr_db");
        if (config.trials == 0)
            throw Error(ErrorCode::Validation, "trials must be positive", "trials");
        if (config.target >= scenario.targets.size())
            throw Error(ErrorCode::Validation, "target index out of range", "target");
        validate(scenario);

        MonteCarloReport report;
        if (config.auto_grid_sigmas > 0.0)
        {
            Scenario worst = scenario;
            worst.radio.set_senr_db(*std::min_element(config.senr_db.begin(), config.senr_db.end()));
            report.grid = grid_from_crlb(worst, waveforms, config.target, config.auto_grid_sigmas);
        }
        else
            report.grid = config.grid;
        validate(report.grid);

        const Target &truth = scenario.targets[config.target];
        const SampleWindow window = sample_window(scenario, waveforms, -1.0);
        unsigned threads = config.threads ? config.threads : std::max(1u, std::thread::hardware_concurrency());
        threads = static_cast<unsigned>(std::min<std::size_t>(threads, config.trials));

        for (double senr : config.senr_db)
        {
            Scenario s = scenario;
            s.radio.set_senr_db(senr);
            const CrlbReport crlb = crlb_single(single_target_fim(s, waveforms, config.target));

            std::vector<Eigen::Vector4d> err(config.trials);
            std::atomic<std::size_t> next{0};
            std::exception_ptr failure;
            std::mutex failure_mutex;
            auto worker = [&] {
                try
                {
                    for (std::size_t t = next++; t < config.trials; t = next++)
                    {
                        const ReceivedSignal r = synthesize(s, waveforms, trial_seed(config.seed, t), window, true);
                        const MleResult m = mle_single(r, s, waveforms, report.grid);
                        err[t] << m.location - truth.location, m.velocity - truth.velocity;
                    }
                }
                catch (...)
                {
                    std::lock_guard lock(failure_mutex);
                    if (!failure)
                        failure = std::current_exception();
                    next = config.trials;
                }
            };
            std::vector<std::thread> pool;
            for (unsigned i = 1; i < threads; ++i)
                pool.emplace_back(worker);
            worker();
            for (auto &th : pool)
                th.join();
            if (failure)
                std::rethrow_exception(failure);

            // Sum in trial order so the result does not depend on the thread count.
            MonteCarloRow row;
            row.senr_db = senr;
            row.trials = config.trials;
            row.seed = config.seed;
            row.crlb_location = crlb.loc_crlb;
            row.crlb_velocity = crlb.vel_crlb;
            for (const auto &e : err)
            {
                row.mse_location += e.head<2>().squaredNorm();
                row.mse_velocity += e.tail<2>().squaredNorm();
            }
            row.mse_location /= static_cast<double>(config.trials);
            row.mse_velocity /= static_cast<double>(config.trials);
            if (config.keep_errors)
                row.errors = std::move(err);
            report.rows.push_back(std::move(row));
        }
        return report;
    }
}
