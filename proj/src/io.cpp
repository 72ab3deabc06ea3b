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

#include "dmisac/io.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "dmisac/error.hpp"

namespace dmisac
{
    namespace
    {
        using json = nlohmann::json;

        [[noreturn]] void bad(const std::string &field, const std::string &msg)
        {
            throw Error(ErrorCode::Validation, field + ": " + msg, field);
        }

        const json &need(const json &obj, const char *key, const std::string &path)
        {
            if (!obj.is_object())
                bad(path, "expected an object");
            const auto it = obj.find(key);
            if (it == obj.end())
                bad(path.empty() ? key : path + "." + key, "missing required field");
            return *it;
        }

        std::string join(const std::string &path, const char *key) { return path.empty() ? key : path + "." + key; }
        std::string index(const std::string &path, std::size_t i) { return path + "[" + std::to_string(i) + "]"; }

        double number(const json &j, const std::string &path)
        {
            if (!j.is_number())
                bad(path, "expected a number");
            return j.get<double>();
        }

        int integer(const json &j, const std::string &path)
        {
            if (!j.is_number_integer())
                bad(path, "expected an integer");
            return j.get<int>();
        }

        cplx complex(const json &j, const std::string &path)
        {
            if (j.is_number())
                return {j.get<double>(), 0.0};
            if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
                bad(path, "expected a number or a [re, im] pair");
            return {j[0].get<double>(), j[1].get<double>()};
        }

        Vec2 point(const json &j, const std::string &path)
        {
            if (!j.is_array() || j.size() != 2)
                bad(path, "expected an [x, y] pair");
            return {number(j[0], index(path, 0)), number(j[1], index(path, 1))};
        }

        const json &array(const json &j, const std::string &path)
        {
            if (!j.is_array())
                bad(path, "expected an array");
            return j;
        }

        std::vector<Vec2> points(const json &j, const std::string &path)
        {
            std::vector<Vec2> out;
            for (std::size_t i = 0; i < array(j, path).size(); ++i)
                out.push_back(point(j[i], index(path, i)));
            return out;
        }

        json to_json(const Vec2 &v) { return json::array({v.x(), v.y()}); }
        json to_json(cplx c) { return json::array({c.real(), c.imag()}); }

        Target parse_target(const json &j, const std::string &path, std::size_t n, std::size_t k)
        {
            Target t;
            t.location = point(need(j, "location_m", path), join(path, "location_m"));
            t.velocity = point(need(j, "velocity_mps", path), join(path, "velocity_mps"));
            const auto it = j.find("rcs");
            if (it == j.end())
            {
                t.rcs = Eigen::MatrixXcd::Ones(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(k));
                return t;
            }
            const std::string rp = join(path, "rcs");
            const json &rows = array(*it, rp);
            if (rows.size() != n)
                bad(rp, "expected " + std::to_string(n) + " rows (one per transmitter)");
            t.rcs.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(k));
            for (std::size_t a = 0; a < n; ++a)
            {
                const json &row = array(rows[a], index(rp, a));
                if (row.size() != k)
                    bad(index(rp, a), "expected " + std::to_string(k) + " entries (one per receiver)");
                for (std::size_t b = 0; b < k; ++b)
                    t.rcs(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) =
                        complex(row[b], index(index(rp, a), b));
            }
            return t;
        }

        std::size_t line_of(const std::string &text, std::size_t byte)
        {
            byte = std::min(byte, text.size());
            return 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(byte), '\n'));
        }
    }

    Scenario scenario_from_json(const std::string &text, const std::string &source)
    {
        json doc;
        try
        {
            doc = json::parse(text);
        }
        catch (const json::parse_error &e)
        {
            const std::size_t line = line_of(text, e.byte > 0 ? e.byte - 1 : 0);
            std::string what = e.what();
            if (const auto p = what.find("syntax error"); p != std::string::npos)
                what = what.substr(p);
            throw Error(ErrorCode::Parse, source + ":" + std::to_string(line) + ": " + what, "");
        }
        if (!doc.is_object())
            bad("", "scenario document must be a JSON object");

        Scenario s;
        s.name = doc.value("name", std::string{});

        const json &nodes = need(doc, "nodes", "");
        s.nodes.tx = points(need(nodes, "tx_positions_m", "nodes"), "nodes.tx_positions_m");
        s.nodes.rx = points(need(nodes, "rx_positions_m", "nodes"), "nodes.rx_positions_m");
        const std::size_t n = s.n_tx(), k = s.n_rx();

        const json &targets = array(need(doc, "targets", ""), "targets");
        for (std::size_t q = 0; q < targets.size(); ++q)
            s.targets.push_back(parse_target(targets[q], index("targets", q), n, k));

        const json &radio = need(doc, "radio", "");
        RadioConfig &r = s.radio;
        r.carrier_freq_hz = number(need(radio, "carrier_freq_hz", "radio"), "radio.carrier_freq_hz");
        r.total_energy_j = number(need(radio, "total_energy_j", "radio"), "radio.total_energy_j");
        r.sample_rate_hz = number(need(radio, "sample_rate_hz", "radio"), "radio.sample_rate_hz");
        r.effective_time_width_s =
            number(need(radio, "effective_time_width_s", "radio"), "radio.effective_time_width_s");
        const bool has_noise = radio.contains("noise_var_w"), has_senr = radio.contains("senr_db");
        if (has_noise == has_senr)
            bad("radio", "give exactly one of noise_var_w or senr_db");
        if (has_noise)
            r.noise_var_w = number(radio["noise_var_w"], "radio.noise_var_w");
        else
            r.set_senr_db(number(radio["senr_db"], "radio.senr_db"));

        if (radio.contains("energy_alloc"))
        {
            const json &e = array(radio["energy_alloc"], "radio.energy_alloc");
            r.energy_alloc.resize(static_cast<Eigen::Index>(e.size()));
            for (std::size_t i = 0; i < e.size(); ++i)
                r.energy_alloc[static_cast<Eigen::Index>(i)] = number(e[i], index("radio.energy_alloc", i));
        }
        else
            r.energy_alloc = Eigen::VectorXd::Constant(static_cast<Eigen::Index>(n), n ? 1.0 / static_cast<double>(n) : 0.0);
        if (radio.contains("beam_weights"))
        {
            const json &b = array(radio["beam_weights"], "radio.beam_weights");
            r.beam_weights.resize(static_cast<Eigen::Index>(b.size()));
            for (std::size_t i = 0; i < b.size(); ++i)
                r.beam_weights[static_cast<Eigen::Index>(i)] = complex(b[i], index("radio.beam_weights", i));
        }
        else
            r.beam_weights = Eigen::VectorXcd::Ones(static_cast<Eigen::Index>(n));
        if (radio.contains("symbol"))
            r.symbol = complex(radio["symbol"], "radio.symbol");

        const json &wf = need(doc, "waveform", "");
        const json &kind = need(wf, "kind", "waveform");
        if (!kind.is_string())
            bad("waveform.kind", "expected \"ofdm\" or \"ocdm\"");
        s.waveform.kind = waveform_kind_from_string(kind.get<std::string>());
        s.waveform.pulse_param = number(need(wf, "pulse_param_s", "waveform"), "waveform.pulse_param_s");
        s.waveform.num_chirps = integer(need(wf, "num_chirps", "waveform"), "waveform.num_chirps");
        if (wf.contains("subcarriers"))
        {
            const json &sc = array(wf["subcarriers"], "waveform.subcarriers");
            for (std::size_t i = 0; i < sc.size(); ++i)
                s.waveform.subcarriers.push_back(integer(sc[i], index("waveform.subcarriers", i)));
        }

        validate(s);
        return s;
    }

    std::string scenario_to_json(const Scenario &s)
    {
        json doc;
        doc["name"] = s.name;
        json tx = json::array(), rx = json::array();
        for (const auto &p : s.nodes.tx)
            tx.push_back(to_json(p));
        for (const auto &p : s.nodes.rx)
            rx.push_back(to_json(p));
        doc["nodes"] = {{"tx_positions_m", tx}, {"rx_positions_m", rx}};

        json targets = json::array();
        for (const auto &t : s.targets)
        {
            json rows = json::array();
            for (Eigen::Index a = 0; a < t.rcs.rows(); ++a)
            {
                json row = json::array();
                for (Eigen::Index b = 0; b < t.rcs.cols(); ++b)
                    row.push_back(to_json(t.rcs(a, b)));
                rows.push_back(row);
            }
            targets.push_back({{"location_m", to_json(t.location)}, {"velocity_mps", to_json(t.velocity)}, {"rcs", rows}});
        }
        doc["targets"] = targets;

        const RadioConfig &r = s.radio;
        json alloc = json::array(), beams = json::array();
        for (Eigen::Index i = 0; i < r.energy_alloc.size(); ++i)
            alloc.push_back(r.energy_alloc[i]);
        for (Eigen::Index i = 0; i < r.beam_weights.size(); ++i)
            beams.push_back(to_json(r.beam_weights[i]));
        doc["radio"] = {{"carrier_freq_hz", r.carrier_freq_hz},
                        {"total_energy_j", r.total_energy_j},
                        {"noise_var_w", r.noise_var_w},
                        {"sample_rate_hz", r.sample_rate_hz},
                        {"effective_time_width_s", r.effective_time_width_s},
                        {"energy_alloc", alloc},
                        {"beam_weights", beams},
                        {"symbol", to_json(r.symbol)}};

        doc["waveform"] = {{"kind", to_string(s.waveform.kind)},
                           {"pulse_param_s", s.waveform.pulse_param},
                           {"num_chirps", s.waveform.num_chirps}};
        if (!s.waveform.subcarriers.empty())
            doc["waveform"]["subcarriers"] = s.waveform.subcarriers;
        return doc.dump(2) + "\n";
    }

    Scenario load_scenario(const std::string &path)
    {
        std::ifstream is(path);
        if (!is)
            throw Error(ErrorCode::Io, "cannot open scenario '" + path + "'", "scenario");
        std::ostringstream ss;
        ss << is.rdbuf();
        return scenario_from_json(ss.str(), path);
    }

    void save_scenario(const std::string &path, const Scenario &s)
    {
        std::ofstream os(path);
        if (!os)
            throw Error(ErrorCode::Io, "cannot open '" + path + "' for writing", "out");
        os << scenario_to_json(s);
        if (!os)
            throw Error(ErrorCode::Io, "failed writing '" + path + "'", "out");
    }
}
