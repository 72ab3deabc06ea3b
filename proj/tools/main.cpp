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

// Batch front-end: one job per invocation, CSV on --out (or stdout), optional SVG next to it.
// Talks to the library only through the C interface.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <limits>
#include <map>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "dmisac/dmisac.h"
#include "svg.hpp"

namespace
{
    constexpr int kExitOk = 0;
    constexpr int kExitValidation = 2;
    constexpr int kExitNumeric = 3;

    // Carries a library status (or a CLI-level validation failure) up to main.
    struct Failure
    {
        dmisac_status status;
        std::string message;
        std::string field;
    };

    [[noreturn]] void invalid(const std::string &field, const std::string &message)
    {
        throw Failure{DMISAC_ERR_VALIDATION, message, field};
    }

    void check(dmisac_status st)
    {
        if (st != DMISAC_OK)
            throw Failure{st, dmisac_last_error_message(), dmisac_last_error_field()};
    }

    int exit_code(dmisac_status st)
    {
        switch (st)
        {
        case DMISAC_OK: return kExitOk;
        case DMISAC_ERR_SINGULAR:
        case DMISAC_ERR_NUMERIC:
        case DMISAC_ERR_INTERNAL: return kExitNumeric;
        default: return kExitValidation;
        }
    }

    std::string json_escape(const std::string &s)
    {
        std::string o;
        for (char c : s)
        {
            if (c == '"' || c == '\\')
                o += '\\', o += c;
            else if (static_cast<unsigned char>(c) < 0x20)
            {
                char b[8];
                std::snprintf(b, sizeof b, "\\u%04x", c);
                o += b;
            }
            else
                o += c;
        }
        return o;
    }

    struct ScenarioPtr
    {
        dmisac_scenario *p = nullptr;
        ScenarioPtr() = default;
        explicit ScenarioPtr(dmisac_scenario *q) : p(q) {}
        ScenarioPtr(ScenarioPtr &&o) noexcept : p(o.p) { o.p = nullptr; }
        ScenarioPtr &operator=(ScenarioPtr &&o) noexcept
        {
            std::swap(p, o.p);
            return *this;
        }
        ~ScenarioPtr() { dmisac_scenario_free(p); }
        dmisac_scenario *get() const { return p; }
    };

    ScenarioPtr clone(const ScenarioPtr &s)
    {
        dmisac_scenario *c = nullptr;
        check(dmisac_scenario_clone(s.get(), &c));
        return ScenarioPtr(c);
    }

    dmisac_scenario_info info(const ScenarioPtr &s)
    {
        dmisac_scenario_info i{};
        check(dmisac_scenario_get_info(s.get(), &i));
        return i;
    }

    // ---- CSV ----------------------------------------------------------------------------------------

    std::string fmt(double v)
    {
        char b[40];
        std::snprintf(b, sizeof b, "%.12g", v);
        return b;
    }

    struct Table
    {
        std::vector<std::string> header;
        std::vector<std::vector<std::string>> rows;

        void add(std::vector<std::string> r) { rows.push_back(std::move(r)); }

        std::vector<double> column(const std::string &name) const
        {
            const auto it = std::find(header.begin(), header.end(), name);
            std::vector<double> out;
            if (it == header.end())
                return out;
            const auto c = static_cast<std::size_t>(it - header.begin());
            for (const auto &r : rows)
                out.push_back(std::stod(r[c]));
            return out;
        }

        std::string csv() const
        {
            std::string o;
            auto line = [&](const std::vector<std::string> &cells) {
                for (std::size_t i = 0; i < cells.size(); ++i)
                    o += (i ? "," : "") + cells[i];
                o += '\n';
            };
            line(header);
            for (const auto &r : rows)
                line(r);
            return o;
        }
    };

    void write_file(const std::string &path, const std::string &text)
    {
        std::ofstream os(path, std::ios::binary);
        if (!os || !(os << text))
            throw Failure{DMISAC_ERR_IO, "cannot write '" + path + "'", "out"};
    }

    std::string svg_path(const std::string &out)
    {
        const auto slash = out.find_last_of('/');
        const auto dot = out.find_last_of('.');
        if (dot != std::string::npos && (slash == std::string::npos || dot > slash))
            return out.substr(0, dot) + ".svg";
        return out + ".svg";
    }

    // ---- job description ------------------------------------------------------------------------------

    struct Job
    {
        std::string command;
        std::string scenario_path;
        std::string out = "-";
        std::uint64_t seed = 1;
        bool plot = false;
        std::string sweep;
        std::string values;
        std::size_t trials = 200;
        std::string grid;
        std::size_t target = 0;
        std::size_t tx = 0;
        unsigned threads = 0;
        bool no_coupling = false;
        std::string doppler_moment = "exact";
        std::string dump;
    };

    std::vector<double> parse_values(const std::string &text)
    {
        std::vector<double> v;
        std::stringstream ss(text);
        std::string item;
        while (std::getline(ss, item, ','))
        {
            std::size_t used = 0;
            double x = 0;
            try
            {
                x = std::stod(item, &used);
            }
            catch (const std::exception &)
            {
                used = 0;
            }
            while (used < item.size() && std::isspace(static_cast<unsigned char>(item[used])))
                ++used;
            if (used == 0 || used != item.size() || !std::isfinite(x))
                invalid("values", "'" + item + "' is not a number");
            v.push_back(x);
        }
        return v;
    }

    std::vector<double> sweep_values(const Job &job, std::vector<double> fallback)
    {
        if (job.values.empty())
        {
            if (fallback.empty())
                invalid("values", "--values is required with --sweep");
            return fallback;
        }
        std::vector<double> v = parse_values(job.values);
        if (v.empty())
            invalid("values", "value list is empty");
        if (!std::is_sorted(v.begin(), v.end()))
            invalid("values", "values must be sorted in ascending order");
        return v;
    }

    struct AxisDef
    {
        std::string column;
        std::string plot_label;
        bool needs_two_targets = false;
    };

    const std::map<std::string, AxisDef> &axes()
    {
        static const std::map<std::string, AxisDef> a = {
            {"senr", {"senr_db", "SENR (dB)", false}},
            {"fs", {"fs_hz", "sampling rate (kHz·dB)", false}},
            {"separation_x", {"separation_x_m", "target separation along x (m)", true}},
            {"rel_velocity", {"rel_velocity_mps", "relative velocity along x (m/s)", true}},
            {"M", {"M", "chirp subcarriers M", false}},
            {"T", {"T_s", "pulse parameter T (s)", false}},
        };
        return a;
    }

    const AxisDef &axis(const std::string &name)
    {
        const auto it = axes().find(name);
        if (it == axes().end())
            invalid("sweep", "unknown sweep axis '" + name + "' (senr, fs, separation_x, rel_velocity, M, T)");
        return it->second;
    }

    // Plot abscissa: the sampling rate is drawn in kHz·dB, everything else raw.
    double plot_x(const std::string &axis_name, double v)
    {
        return axis_name == "fs" ? 10.0 * std::log10(v / 1e3) : v;
    }

    // Applies one sweep value to a copy of the base scenario. The relative-velocity axis co-locates the
    // second target with the first and offsets its velocity along x; separation_x offsets its location.
    ScenarioPtr apply(const ScenarioPtr &base, const std::string &axis_name, double v)
    {
        ScenarioPtr s = clone(base);
        const dmisac_scenario_info i = info(s);
        if (axis_name == "senr")
            check(dmisac_scenario_set_senr_db(s.get(), v));
        else if (axis_name == "fs")
            check(dmisac_scenario_set_sample_rate(s.get(), v));
        else if (axis_name == "M")
        {
            if (v != std::floor(v) || v < 1 || v > 1e9)
                invalid("values", "M must be a positive integer");
            check(dmisac_scenario_set_waveform(s.get(), i.waveform_kind, i.pulse_param_s, static_cast<int>(v)));
        }
        else if (axis_name == "T")
            check(dmisac_scenario_set_waveform(s.get(), i.waveform_kind, v, i.num_chirps));
        else
        {
            if (i.n_targets < 2)
                invalid("sweep", "axis '" + axis_name + "' needs a scenario with at least two targets");
            double l0[2], v0[2];
            check(dmisac_scenario_get_target(s.get(), 0, l0, v0));
            if (axis_name == "separation_x")
            {
                const double loc[2] = {l0[0] + v, l0[1]};
                check(dmisac_scenario_set_target(s.get(), 1, loc, nullptr));
            }
            else
            {
                const double vel[2] = {v0[0] + v, v0[1]};
                check(dmisac_scenario_set_target(s.get(), 1, l0, vel));
            }
        }
        return s;
    }

    dmisac_fim_options fim_options(const Job &job)
    {
        dmisac_fim_options o = dmisac_fim_options_default();
        if (job.doppler_moment == "exact")
            o.doppler_moment = DMISAC_DOPPLER_EXACT;
        else if (job.doppler_moment == "approx")
            o.doppler_moment = DMISAC_DOPPLER_APPROXIMATE;
        else if (job.doppler_moment == "gated")
            o.doppler_moment = DMISAC_DOPPLER_GATED;
        else
            invalid("doppler-moment", "expected exact, approx or gated");
        o.additive_coupling = job.no_coupling ? 0 : 1;
        return o;
    }

    // --grid "sigmas=6,points=11,levels=4,shrink=0.2" or explicit
    // "loc=x:y,loc_hw=hx:hy,vel=vx:vy,vel_hw=hvx:hvy,...". Omitted centres default to the true state.
    struct GridSpec
    {
        double sigmas = 6.0;
        bool has_loc = false, has_vel = false, has_loc_hw = false, has_vel_hw = false;
        double loc[2]{}, vel[2]{}, loc_hw[2]{}, vel_hw[2]{};
        int points = 0, levels = 0;
        double shrink = 0.0;
    };

    GridSpec parse_grid(const std::string &text)
    {
        GridSpec g;
        std::stringstream ss(text);
        std::string item;
        auto pair = [](const std::string &key, const std::string &v, double out[2]) {
            const auto c = v.find(':');
            if (c == std::string::npos)
                invalid("grid", key + " expects two values separated by ':'");
            const auto a = parse_values(v.substr(0, c)), b = parse_values(v.substr(c + 1));
            if (a.size() != 1 || b.size() != 1)
                invalid("grid", key + " expects two values separated by ':'");
            out[0] = a[0];
            out[1] = b[0];
        };
        auto scalar = [](const std::string &key, const std::string &v) {
            const auto a = parse_values(v);
            if (a.size() != 1)
                invalid("grid", key + " expects one number");
            return a[0];
        };
        while (std::getline(ss, item, ','))
        {
            const auto eq = item.find('=');
            if (eq == std::string::npos)
                invalid("grid", "expected key=value, got '" + item + "'");
            const std::string k = item.substr(0, eq), v = item.substr(eq + 1);
            if (k == "sigmas")
                g.sigmas = scalar(k, v);
            else if (k == "points")
                g.points = static_cast<int>(scalar(k, v));
            else if (k == "levels")
                g.levels = static_cast<int>(scalar(k, v));
            else if (k == "shrink")
                g.shrink = scalar(k, v);
            else if (k == "loc")
                pair(k, v, g.loc), g.has_loc = true;
            else if (k == "vel")
                pair(k, v, g.vel), g.has_vel = true;
            else if (k == "loc_hw")
                pair(k, v, g.loc_hw), g.has_loc_hw = true;
            else if (k == "vel_hw")
                pair(k, v, g.vel_hw), g.has_vel_hw = true;
            else
                invalid("grid", "unknown grid key '" + k + "'");
        }
        if (g.has_loc_hw != g.has_vel_hw)
            invalid("grid", "give both loc_hw and vel_hw, or neither");
        return g;
    }

    dmisac_grid make_grid(const ScenarioPtr &s, std::size_t target, const GridSpec &spec)
    {
        dmisac_grid g{};
        if (spec.has_loc_hw)
        {
            g = dmisac_grid_default();
            double l[2], v[2];
            check(dmisac_scenario_get_target(s.get(), target, l, v));
            std::copy(l, l + 2, g.loc_center);
            std::copy(v, v + 2, g.vel_center);
            std::copy(spec.loc_hw, spec.loc_hw + 2, g.loc_halfwidth);
            std::copy(spec.vel_hw, spec.vel_hw + 2, g.vel_halfwidth);
        }
        else
            check(dmisac_grid_from_crlb(s.get(), target, spec.sigmas, &g));
        if (spec.has_loc)
            std::copy(spec.loc, spec.loc + 2, g.loc_center);
        if (spec.has_vel)
            std::copy(spec.vel, spec.vel + 2, g.vel_center);
        if (spec.points)
            g.coarse_points = spec.points;
        if (spec.levels)
            g.refinement_levels = spec.levels;
        if (spec.shrink > 0)
            g.shrink_factor = spec.shrink;
        return g;
    }

    void emit(const Job &job, const Table &t)
    {
        if (job.out == "-")
            std::cout << t.csv();
        else
            write_file(job.out, t.csv());
    }

    void emit_plot(const Job &job, const std::string &svg_text)
    {
        if (!job.plot)
            return;
        if (job.out == "-")
            invalid("plot", "--plot needs --out PATH (the SVG is written next to it)");
        write_file(svg_path(job.out), svg_text);
    }

    std::vector<svg::Series> series_of(const Table &t, const std::string &xcol, const std::string &axis_name,
                                       const std::vector<std::pair<std::string, std::string>> &cols,
                                       const std::string &filter_col = {}, double filter_val = 0)
    {
        std::vector<svg::Series> out;
        const auto x = t.column(xcol);
        const auto f = filter_col.empty() ? std::vector<double>{} : t.column(filter_col);
        for (std::size_t c = 0; c < cols.size(); ++c)
        {
            svg::Series s;
            s.label = cols[c].second;
            s.dashed = c % 2 == 1;
            const auto y = t.column(cols[c].first);
            for (std::size_t i = 0; i < x.size(); ++i)
                if (f.empty() || f[i] == filter_val)
                {
                    s.x.push_back(plot_x(axis_name, x[i]));
                    s.y.push_back(y[i]);
                }
            out.push_back(std::move(s));
        }
        return out;
    }

    // ---- commands -------------------------------------------------------------------------------------

    void run_crlb(const Job &job, const ScenarioPtr &base)
    {
        const std::string ax = job.sweep.empty() ? "senr" : job.sweep;
        const AxisDef &def = axis(ax);
        std::vector<double> fallback;
        if (ax == "senr")
            for (int d = -20; d <= 20; d += 5)
                fallback.push_back(d);
        const auto values = sweep_values(job, fallback);
        const dmisac_fim_options opt = fim_options(job);

        Table t;
        t.header = {def.column, "loc_crlb_m2", "vel_crlb_m2s2", "loc_crlb_approx", "vel_crlb_approx", "cond"};
        for (double v : values)
        {
            ScenarioPtr s = apply(base, ax, v);
            dmisac_crlb c{};
            check(dmisac_crlb_single(s.get(), job.target, &opt, &c));
            t.add({fmt(v), fmt(c.loc_crlb_m2), fmt(c.vel_crlb_m2s2), fmt(c.loc_crlb_approx_m2),
                   fmt(c.vel_crlb_approx_m2s2), fmt(c.condition_number)});
        }
        emit(job, t);
        if (job.plot)
        {
            svg::Panel loc{"Location CRLB", def.plot_label, "CRLB (m^2)", false, true, {}};
            loc.series = series_of(t, def.column, ax, {{"loc_crlb_m2", "accurate"}, {"loc_crlb_approx", "approx."}});
            svg::Panel vel{"Velocity CRLB", def.plot_label, "CRLB (m^2/s^2)", false, true, {}};
            vel.series = series_of(t, def.column, ax, {{"vel_crlb_m2s2", "accurate"}, {"vel_crlb_approx", "approx."}});
            if (ax == "M" || ax == "T")
                loc.log_x = vel.log_x = true;
            emit_plot(job, svg::line_chart({loc, vel}));
        }
    }

    void run_crlb_multi(const Job &job, const ScenarioPtr &base)
    {
        const bool swept = !job.sweep.empty();
        const std::string ax = swept ? job.sweep : "";
        const AxisDef *def = swept ? &axis(ax) : nullptr;
        const auto values = swept ? sweep_values(job, {}) : std::vector<double>{0.0};
        const dmisac_fim_options opt = fim_options(job);

        Table t;
        if (swept)
            t.header.push_back(def->column);
        for (const char *h : {"target", "loc_accurate_m2", "vel_accurate_m2s2", "loc_decoupled_m2",
                              "vel_decoupled_m2s2", "loc_single_m2", "vel_single_m2s2", "cond", "pseudo_inverse"})
            t.header.emplace_back(h);
        for (double v : values)
        {
            ScenarioPtr s = swept ? apply(base, ax, v) : clone(base);
            const std::size_t Q = info(s).n_targets;
            std::vector<dmisac_target_crlb> r(Q);
            dmisac_multi_summary sum{};
            check(dmisac_crlb_multi(s.get(), &opt, r.data(), r.size(), &sum));
            if (sum.pseudo_inverse)
                std::cerr << "{\"warning\":\"" << (sum.min_eigenvalue < 0.0 ? "indefinite-fim" : "singular-fim")
                          << "\",\"value\":" << fmt(v) << ",\"min_eigenvalue\":" << fmt(sum.min_eigenvalue)
                          << ",\"message\":\"joint FIM inverted with a pseudo-inverse\"}\n";
            for (std::size_t q = 0; q < Q; ++q)
            {
                std::vector<std::string> row;
                if (swept)
                    row.push_back(fmt(v));
                for (const std::string &c :
                     {std::to_string(q), fmt(r[q].loc_accurate_m2), fmt(r[q].vel_accurate_m2s2),
                      fmt(r[q].loc_decoupled_m2), fmt(r[q].vel_decoupled_m2s2), fmt(r[q].loc_single_m2),
                      fmt(r[q].vel_single_m2s2), fmt(sum.condition_number), std::to_string(sum.pseudo_inverse)})
                    row.push_back(c);
                t.add(std::move(row));
            }
        }
        emit(job, t);
        if (job.plot)
        {
            if (!swept)
                invalid("plot", "crlb-multi plots need --sweep");
            svg::Panel loc{"Target-1 location CRLB", def->plot_label, "CRLB (m^2)", false, true, {}};
            loc.series = series_of(t, def->column, ax, {{"loc_accurate_m2", "multi-target"}, {"loc_single_m2", "single-target"}},
                                   "target", 0);
            svg::Panel vel{"Target-1 velocity CRLB", def->plot_label, "CRLB (m^2/s^2)", false, true, {}};
            vel.series = series_of(t, def->column, ax, {{"vel_accurate_m2s2", "multi-target"}, {"vel_single_m2s2", "single-target"}},
                                   "target", 0);
            emit_plot(job, svg::line_chart({loc, vel}));
        }
    }

    void run_sweep(const Job &job, const ScenarioPtr &base)
    {
        if (job.sweep.empty())
            invalid("sweep", "the sweep command needs --sweep AXIS");
        if (job.values.empty())
            invalid("values", "the sweep command needs --values");
        if (info(base).n_targets >= 2 || axis(job.sweep).needs_two_targets)
            run_crlb_multi(job, base);
        else
            run_crlb(job, base);
    }

    void run_safety(const Job &job, const ScenarioPtr &base)
    {
        const bool swept = !job.sweep.empty();
        if (swept && job.sweep != "M" && job.sweep != "T")
            invalid("sweep", "safety sweeps support the M and T axes");
        const auto values = swept ? sweep_values(job, {}) : std::vector<double>{0.0};
        Table t;
        t.header = {"waveform", "M", "T_s", "tau_r_s", "f_r_hz", "d_r_m", "v_r_mps"};
        for (double v : values)
        {
            ScenarioPtr s = swept ? apply(base, job.sweep, v) : clone(base);
            const dmisac_scenario_info i = info(s);
            dmisac_safety_result r{};
            check(dmisac_safety(s.get(), std::numeric_limits<size_t>::max(), 0.1, &r));
            t.add({i.waveform_kind == DMISAC_OFDM ? "ofdm" : "ocdm", std::to_string(i.num_chirps), fmt(i.pulse_param_s),
                   fmt(r.tau_r_s), fmt(r.f_r_hz), fmt(r.distance_m), fmt(r.velocity_mps)});
        }
        emit(job, t);
        if (job.plot)
        {
            if (!swept)
                invalid("plot", "safety plots need --sweep M or T");
            const std::string col = job.sweep == "M" ? "M" : "T_s";
            svg::Panel d{"Safety distance", axis(job.sweep).plot_label, "d_r (m)", true, true, {}};
            d.series = series_of(t, col, job.sweep, {{"d_r_m", "d_r"}});
            svg::Panel v{"Safety velocity", axis(job.sweep).plot_label, "v_r (m/s)", true, true, {}};
            v.series = series_of(t, col, job.sweep, {{"v_r_mps", "v_r"}});
            emit_plot(job, svg::line_chart({d, v}));
        }
    }

    // --grid "tau=lo:hi:n,f=lo:hi:n" for the ambiguity map.
    void run_af(const Job &job, const ScenarioPtr &base)
    {
        const dmisac_scenario_info i = info(base);
        const double T = i.pulse_param_s;
        const double spread = i.waveform_kind == DMISAC_OCDM ? static_cast<double>(i.num_chirps) : 1.0;
        double tau_lo = -2 * T, tau_hi = 2 * T, f_lo = -2 * spread / T, f_hi = 2 * spread / T;
        int nt = 101, nf = 101;
        if (!job.grid.empty())
        {
            std::stringstream ss(job.grid);
            std::string item;
            while (std::getline(ss, item, ','))
            {
                const auto eq = item.find('=');
                if (eq == std::string::npos)
                    invalid("grid", "expected tau=lo:hi:n,f=lo:hi:n");
                std::string spec = item.substr(eq + 1);
                std::replace(spec.begin(), spec.end(), ':', ',');
                const auto v = parse_values(spec);
                if (v.size() != 3 || v[2] < 2 || v[2] > 2001 || v[2] != std::floor(v[2]) || !(v[1] > v[0]))
                    invalid("grid", "'" + item + "' must be lo:hi:n with lo < hi and 2 <= n <= 2001");
                const std::string key = item.substr(0, eq);
                if (key == "tau")
                    tau_lo = v[0], tau_hi = v[1], nt = static_cast<int>(v[2]);
                else if (key == "f")
                    f_lo = v[0], f_hi = v[1], nf = static_cast<int>(v[2]);
                else
                    invalid("grid", "unknown ambiguity grid key '" + key + "'");
            }
        }
        std::vector<double> taus(static_cast<std::size_t>(nt)), fs(static_cast<std::size_t>(nf));
        for (int k = 0; k < nt; ++k)
            taus[static_cast<std::size_t>(k)] = tau_lo + (tau_hi - tau_lo) * k / (nt - 1);
        for (int k = 0; k < nf; ++k)
            fs[static_cast<std::size_t>(k)] = f_lo + (f_hi - f_lo) * k / (nf - 1);
        std::vector<double> map(taus.size() * fs.size());
        check(dmisac_ambiguity_map(base.get(), job.tx, taus.data(), taus.size(), fs.data(), fs.size(), map.data()));

        Table t;
        t.header = {"tau_s", "f_hz", "af_norm"};
        for (std::size_t a = 0; a < taus.size(); ++a)
            for (std::size_t b = 0; b < fs.size(); ++b)
                t.add({fmt(taus[a]), fmt(fs[b]), fmt(map[a * fs.size() + b])});
        emit(job, t);
        if (job.plot)
        {
            // Rows of the heat map run along Doppler, columns along delay.
            std::vector<double> grid(map.size());
            for (std::size_t a = 0; a < taus.size(); ++a)
                for (std::size_t b = 0; b < fs.size(); ++b)
                    grid[b * taus.size() + a] = map[a * fs.size() + b];
            const std::string title = std::string(i.waveform_kind == DMISAC_OFDM ? "OFDM" : "OCDM") +
                                      " |AF|^2, M = " + std::to_string(i.num_chirps);
            emit_plot(job, svg::heatmap(title, "delay (s)", "Doppler (Hz)", taus, fs, grid));
        }
    }

    void run_mle(const Job &job, const ScenarioPtr &base)
    {
        const GridSpec spec = parse_grid(job.grid);
        dmisac_signal *raw = nullptr;
        check(dmisac_synthesize(base.get(), job.seed, 1, &raw));
        std::unique_ptr<dmisac_signal, void (*)(dmisac_signal *)> sig(raw, dmisac_signal_free);
        if (!job.dump.empty())
            check(dmisac_signal_write(sig.get(), job.dump.c_str()));

        Table t;
        t.header = {"target", "x_m", "y_m", "vx_mps", "vy_mps", "err_loc_m2", "err_vel_m2s2", "llf",
                    "evaluations", "coarse_warning"};
        const std::size_t Q = info(base).n_targets;
        for (std::size_t q = 0; q < Q; ++q)
        {
            const dmisac_grid g = make_grid(base, q, spec);
            dmisac_mle m{};
            check(dmisac_mle_single(base.get(), sig.get(), &g, &m));
            double l[2], v[2];
            check(dmisac_scenario_get_target(base.get(), q, l, v));
            const double el = std::pow(m.location_m[0] - l[0], 2) + std::pow(m.location_m[1] - l[1], 2);
            const double ev = std::pow(m.velocity_mps[0] - v[0], 2) + std::pow(m.velocity_mps[1] - v[1], 2);
            t.add({std::to_string(q), fmt(m.location_m[0]), fmt(m.location_m[1]), fmt(m.velocity_mps[0]),
                   fmt(m.velocity_mps[1]), fmt(el), fmt(ev), fmt(m.llf_value), std::to_string(m.evaluations),
                   std::to_string(m.coarse_warning)});
            if (m.coarse_warning)
                std::cerr << "{\"warning\":\"coarse-grid\",\"target\":" << q
                          << ",\"message\":\"coarse grid spacing exceeds the waveform resolution\"}\n";
        }
        emit(job, t);
        if (job.plot)
            invalid("plot", "mle produces a single row per target; use mc for plots");
    }

    void run_mc(const Job &job, const ScenarioPtr &base)
    {
        if (!job.sweep.empty() && job.sweep != "senr")
            invalid("sweep", "Monte Carlo jobs sweep SENR only");
        const auto values = sweep_values(job, {-20, -10, 0, 10});
        if (job.trials == 0)
            invalid("trials", "trials must be positive");
        const GridSpec spec = parse_grid(job.grid);

        dmisac_mc_config cfg{};
        cfg.senr_db = values.data();
        cfg.n_senr = values.size();
        cfg.trials = job.trials;
        cfg.seed = job.seed;
        cfg.target = job.target;
        cfg.threads = job.threads;
        cfg.auto_grid_sigmas = spec.sigmas;
        dmisac_grid explicit_grid{};
        if (spec.has_loc_hw || spec.has_loc || spec.has_vel || spec.points || spec.levels || spec.shrink > 0)
        {
            // Explicit settings start from the CRLB grid at the lowest SENR.
            ScenarioPtr worst = clone(base);
            check(dmisac_scenario_set_senr_db(worst.get(), values.front()));
            explicit_grid = make_grid(worst, job.target, spec);
            cfg.grid = &explicit_grid;
        }
        std::vector<dmisac_mc_row> rows(values.size());
        check(dmisac_monte_carlo(base.get(), &cfg, rows.data(), rows.size(), nullptr));

        Table t;
        t.header = {"senr_db", "mse_loc_m2", "mse_vel_m2s2", "crlb_loc_m2", "crlb_vel_m2s2",
                    "ratio_loc", "ratio_vel", "trials", "seed"};
        for (const auto &r : rows)
            t.add({fmt(r.senr_db), fmt(r.mse_location_m2), fmt(r.mse_velocity_m2s2), fmt(r.crlb_location_m2),
                   fmt(r.crlb_velocity_m2s2), fmt(r.mse_location_m2 / r.crlb_location_m2),
                   fmt(r.mse_velocity_m2s2 / r.crlb_velocity_m2s2), std::to_string(r.trials), std::to_string(r.seed)});
        emit(job, t);
        if (job.plot)
        {
            svg::Panel loc{"Location", "SENR (dB)", "MSE / CRLB (m^2)", false, true, {}};
            loc.series = series_of(t, "senr_db", "senr", {{"mse_loc_m2", "MLE MSE"}, {"crlb_loc_m2", "CRLB"}});
            svg::Panel vel{"Velocity", "SENR (dB)", "MSE / CRLB (m^2/s^2)", false, true, {}};
            vel.series = series_of(t, "senr_db", "senr", {{"mse_vel_m2s2", "MLE MSE"}, {"crlb_vel_m2s2", "CRLB"}});
            emit_plot(job, svg::line_chart({loc, vel}));
        }
    }

    int run(const Job &job)
    {
        if (job.scenario_path.empty())
            invalid("scenario", "--scenario PATH is required");
        dmisac_scenario *raw = nullptr;
        check(dmisac_scenario_load(job.scenario_path.c_str(), &raw));
        const ScenarioPtr base(raw);
        if (job.target >= info(base).n_targets)
            invalid("target", "target index out of range");

        static const std::map<std::string, std::function<void(const Job &, const ScenarioPtr &)>> commands = {
            {"crlb", run_crlb}, {"crlb-multi", run_crlb_multi}, {"mle", run_mle}, {"mc", run_mc},
            {"af", run_af},     {"sweep", run_sweep},           {"safety", run_safety}};
        commands.at(job.command)(job, base);
        return kExitOk;
    }
}

int main(int argc, char **argv)
{
    CLI::App app{"Bounds and estimators for distributed multi-static ISAC sensing"};
    app.set_version_flag("--version", std::string(dmisac_version()));
    Job job;
    app.add_option("command", job.command, "crlb | crlb-multi | mle | mc | af | sweep | safety")
        ->required()
        ->check(CLI::IsMember({"crlb", "crlb-multi", "mle", "mc", "af", "sweep", "safety"}));
    app.add_option("--scenario", job.scenario_path, "scenario JSON file");
    app.add_option("--out", job.out, "output CSV path ('-' for stdout)");
    app.add_option("--seed", job.seed, "noise seed");
    app.add_flag("--plot", job.plot, "also write an SVG next to --out");
    app.add_option("--sweep", job.sweep, "sweep axis: senr, fs, separation_x, rel_velocity, M, T");
    app.add_option("--values", job.values, "comma-separated, ascending sweep values");
    app.add_option("--trials", job.trials, "Monte Carlo trials per SENR level");
    app.add_option("--grid", job.grid, "search grid (mle, mc) or ambiguity grid (af)");
    app.add_option("--target", job.target, "target index for single-target jobs");
    app.add_option("--tx", job.tx, "transmitter whose waveform the af command maps");
    app.add_option("--threads", job.threads, "Monte Carlo worker threads (0: all cores)");
    app.add_flag("--no-coupling", job.no_coupling, "omit the cross-target residual term in crlb-multi");
    app.add_option("--doppler-moment", job.doppler_moment, "exact | approx | gated");
    app.add_option("--dump", job.dump, "mle: also write the synthesized signal (binary)");

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::ParseError &e)
    {
        if (e.get_exit_code() == 0)
            return app.exit(e);
        app.exit(e);
        std::cerr << "{\"error\":\"validation\",\"field\":\"arguments\",\"message\":\"" << json_escape(e.what())
                  << "\"}\n";
        return kExitValidation;
    }

    try
    {
        return run(job);
    }
    catch (const Failure &f)
    {
        std::cerr << "{\"error\":\"" << dmisac_status_name(f.status) << "\",\"field\":\"" << json_escape(f.field)
                  << "\",\"message\":\"" << json_escape(f.message) << "\"}\n";
        return exit_code(f.status);
    }
    catch (const std::exception &e)
    {
        std::cerr << "{\"error\":\"internal\",\"field\":\"\",\"message\":\"" << json_escape(e.what()) << "\"}\n";
        return kExitNumeric;
    }
}
