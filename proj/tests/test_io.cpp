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

#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "support.hpp"

#include "dmisac/error.hpp"
#include "dmisac/io.hpp"

using namespace dmisac;

namespace
{
    const char *kMinimal = R"({
  "nodes": {"tx_positions_m": [[0, 5000], [3000, 4000]], "rx_positions_m": [[0, -5000]]},
  "targets": [{"location_m": [10, 20], "velocity_mps": [-15, 0], "rcs": [[0.5], [[0.1, -0.2]]]}],
  "radio": {"carrier_freq_hz": 3e9, "total_energy_j": 1.0, "sample_rate_hz": 1000,
            "effective_time_width_s": 0.01, "senr_db": 0},
  "waveform": {"kind": "ocdm", "pulse_param_s": 0.01, "num_chirps": 16}
})";

    Error error_of(const std::string &text)
    {
        try
        {
            scenario_from_json(text, "doc.json");
        }
        catch (const Error &e)
        {
            return e;
        }
        FAIL("document accepted");
        return Error(ErrorCode::Io, "");
    }

    std::string replace(std::string s, const std::string &from, const std::string &to)
    {
        const auto p = s.find(from);
        REQUIRE(p != std::string::npos);
        return s.replace(p, from.size(), to);
    }
}

TEST_CASE("io - minimal document fills defaults")
{
    const Scenario s = scenario_from_json(kMinimal);
    CHECK(s.n_tx() == 2);
    CHECK(s.n_rx() == 1);
    CHECK(s.targets[0].rcs(1, 0) == cplx(0.1, -0.2));
    CHECK(s.radio.energy_alloc.isApprox(Eigen::Vector2d(0.5, 0.5)));
    CHECK(s.radio.beam_weights == Eigen::VectorXcd::Ones(2));
    CHECK(s.radio.noise_var_w == doctest::Approx(1.0));
    CHECK(s.waveform.kind == WaveformKind::GaussianOcdm);
    CHECK(s.waveform.num_chirps == 16);
}

TEST_CASE("io - rcs defaults to ones")
{
    std::string doc = replace(kMinimal, R"(, "rcs": [[0.5], [[0.1, -0.2]]])", "");
    const Scenario s = scenario_from_json(doc);
    CHECK(s.targets[0].rcs == Eigen::MatrixXcd::Ones(2, 1));
}

TEST_CASE("io - round trip is exact")
{
    dmisac::Scenario s = dmisac::testing::small(4, 3);
    s.radio.symbol = std::polar(1.0, 0.123456789);
    s.radio.beam_weights[2] = std::polar(1.0, -2.0 / 3.0);
    s.radio.energy_alloc << 0.1, 0.2, 0.3, 0.4;
    s.radio.noise_var_w = 0.1 + 1e-17;
    s.waveform.subcarriers = {4, 3, 2, 1};
    const Scenario back = scenario_from_json(scenario_to_json(s));
    CHECK(back.nodes.tx == s.nodes.tx);
    CHECK(back.nodes.rx == s.nodes.rx);
    CHECK(back.targets[0].rcs == s.targets[0].rcs);
    CHECK(back.targets[0].location == s.targets[0].location);
    CHECK(back.targets[0].velocity == s.targets[0].velocity);
    CHECK(back.radio.symbol == s.radio.symbol);
    CHECK(back.radio.beam_weights == s.radio.beam_weights);
    CHECK(back.radio.energy_alloc == s.radio.energy_alloc);
    CHECK(back.radio.noise_var_w == s.radio.noise_var_w);
    CHECK(back.radio.sample_rate_hz == s.radio.sample_rate_hz);
    CHECK(back.waveform.subcarriers == s.waveform.subcarriers);
    CHECK(scenario_to_json(back) == scenario_to_json(s));
}

TEST_CASE("io - syntax errors report the line")
{
    std::string doc = replace(kMinimal, "\"senr_db\": 0", "\"senr_db\": 0,,");
    const Error e = error_of(doc);
    CHECK(e.code() == ErrorCode::Parse);
    CHECK(std::string(e.what()).find("doc.json:5") != std::string::npos);
}

TEST_CASE("io - field errors name the path")
{
    CHECK(error_of(replace(kMinimal, "\"senr_db\": 0", "\"senr_db\": 0, \"energy_alloc\": [0.9, 0.3]")).field() ==
          "radio.energy_alloc");
    CHECK(error_of(replace(kMinimal, "[0.1, -0.2]", "[0.1]")).field() == "targets[0].rcs[1][0]");
    CHECK(error_of(replace(kMinimal, "\"senr_db\": 0", "\"senr_db\": 0, \"noise_var_w\": 1")).field() == "radio");
    CHECK(error_of(replace(kMinimal, "\"kind\": \"ocdm\"", "\"kind\": \"fmcw\"")).field() == "waveform.kind");
    CHECK(error_of(replace(kMinimal, "\"sample_rate_hz\": 1000,", "")).field() == "radio.sample_rate_hz");
    CHECK(error_of(replace(kMinimal, "\"location_m\": [10, 20]", "\"location_m\": [0, -5000]")).code() ==
          ErrorCode::DegenerateGeometry);
}

TEST_CASE("io - every bundled template loads")
{
    std::size_t count = 0;
    for (const auto &entry : std::filesystem::directory_iterator(DMISAC_TEMPLATE_DIR))
    {
        CAPTURE(entry.path().string());
        CHECK_NOTHROW(load_scenario(entry.path().string()));
        ++count;
    }
    CHECK(count == 6);
}

TEST_CASE("io - files round trip and missing files fail")
{
    const auto path = std::filesystem::temp_directory_path() / "dmisac_io_test.json";
    const Scenario s = scenario_from_json(kMinimal);
    save_scenario(path.string(), s);
    CHECK(scenario_to_json(load_scenario(path.string())) == scenario_to_json(s));
    std::filesystem::remove(path);
    try
    {
        load_scenario(path.string());
        FAIL("missing file loaded");
    }
    catch (const Error &e)
    {
        CHECK(e.code() == ErrorCode::Io);
    }
}
