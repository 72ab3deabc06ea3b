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

#include "dmisac/dmisac.h"

#include <algorithm>
#include <cstring>
#include <limits>
#include <memory>
#include <new>
#include <string>

#include "dmisac/error.hpp"
#include "dmisac/fim.hpp"
#include "dmisac/io.hpp"
#include "dmisac/signal.hpp"

using namespace dmisac;

struct dmisac_scenario
{
    Scenario scenario;
    std::vector<Waveform> waveforms;

    void refresh() { waveforms = make_waveforms(scenario.waveform, scenario.n_tx()); }
};

struct dmisac_signal
{
    ReceivedSignal signal;
};

namespace
{
    thread_local std::string g_message;
    thread_local std::string g_field;

    dmisac_status status_of(ErrorCode c)
    {
        switch (c)
        {
        case ErrorCode::Validation: return DMISAC_ERR_VALIDATION;
        case ErrorCode::Parse: return DMISAC_ERR_PARSE;
        case ErrorCode::DegenerateGeometry: return DMISAC_ERR_DEGENERATE_GEOMETRY;
        case ErrorCode::Precondition: return DMISAC_ERR_PRECONDITION;
        case ErrorCode::SingularInformation: return DMISAC_ERR_SINGULAR;
        case ErrorCode::NumericFailure: return DMISAC_ERR_NUMERIC;
        case ErrorCode::Io: return DMISAC_ERR_IO;
        }
        return DMISAC_ERR_INTERNAL;
    }

    dmisac_status fail(dmisac_status st, std::string msg, std::string field = {})
    {
        g_message = std::move(msg);
        g_field = std::move(field);
        return st;
    }

    template <class F> dmisac_status guarded(F &&f) noexcept
    {
        try
        {
            f();
            g_message.clear();
            g_field.clear();
            return DMISAC_OK;
        }
        catch (const Error &e)
        {
            return fail(status_of(e.code()), e.what(), e.field());
        }
        catch (const std::bad_alloc &)
        {
            return fail(DMISAC_ERR_INTERNAL, "out of memory");
        }
        catch (const std::exception &e)
        {
            return fail(DMISAC_ERR_INTERNAL, e.what());
        }
        catch (...)
        {
            return fail(DMISAC_ERR_INTERNAL, "unknown error");
        }
    }

    void require(const void *p, const char *name)
    {
        if (!p)
            throw Error(ErrorCode::Validation, std::string(name) + " must not be null", name);
    }

    void copy4(const Eigen::Matrix4d &m, double *out)
    {
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j)
                out[4 * i + j] = m(i, j);
    }

    FimOptions fim_options(const dmisac_fim_options *o)
    {
        FimOptions f;
        if (!o)
            return f;
        switch (o->doppler_moment)
        {
        case DMISAC_DOPPLER_EXACT: f.doppler_moment = DopplerMoment::Exact; break;
        case DMISAC_DOPPLER_APPROXIMATE: f.doppler_moment = DopplerMoment::Approximate; break;
        case DMISAC_DOPPLER_GATED: f.doppler_moment = DopplerMoment::Gated; break;
        default: throw Error(ErrorCode::Validation, "unknown Doppler moment mode", "doppler_moment");
        }
        f.gate_fraction = o->gate_fraction;
        f.singular_condition = o->singular_condition;
        return f;
    }

    std::size_t check_target(const Scenario &s, std::size_t q)
    {
        if (q >= s.targets.size())
            throw Error(ErrorCode::Validation,
                        "target index " + std::to_string(q) + " out of range (" + std::to_string(s.targets.size()) +
                            " targets)",
                        "target");
        return q;
    }

    std::size_t check_tx(const Scenario &s, std::size_t n)
    {
        if (n >= s.n_tx())
            throw Error(ErrorCode::Validation, "transmitter index out of range", "tx");
        return n;
    }

    // Applies `edit` to a copy and commits only if the result validates.
    template <class F> void edit(dmisac_scenario *h, F &&f)
    {
        require(h, "scenario");
        Scenario copy = h->scenario;
        f(copy);
        validate(copy);
        std::vector<Waveform> w = make_waveforms(copy.waveform, copy.n_tx());
        h->scenario = std::move(copy);
        h->waveforms = std::move(w);
    }

    MleGrid to_grid(const dmisac_grid &g)
    {
        MleGrid m;
        m.loc_center = Vec2(g.loc_center[0], g.loc_center[1]);
        m.loc_halfwidth = Vec2(g.loc_halfwidth[0], g.loc_halfwidth[1]);
        m.vel_center = Vec2(g.vel_center[0], g.vel_center[1]);
        m.vel_halfwidth = Vec2(g.vel_halfwidth[0], g.vel_halfwidth[1]);
        m.coarse_points = g.coarse_points;
        m.refinement_levels = g.refinement_levels;
        m.shrink_factor = g.shrink_factor;
        validate(m);
        return m;
    }

    dmisac_grid from_grid(const MleGrid &m)
    {
        dmisac_grid g{};
        g.loc_center[0] = m.loc_center.x();
        g.loc_center[1] = m.loc_center.y();
        g.loc_halfwidth[0] = m.loc_halfwidth.x();
        g.loc_halfwidth[1] = m.loc_halfwidth.y();
        g.vel_center[0] = m.vel_center.x();
        g.vel_center[1] = m.vel_center.y();
        g.vel_halfwidth[0] = m.vel_halfwidth.x();
        g.vel_halfwidth[1] = m.vel_halfwidth.y();
        g.coarse_points = m.coarse_points;
        g.refinement_levels = m.refinement_levels;
        g.shrink_factor = m.shrink_factor;
        return g;
    }
}

extern "C" {

const char *dmisac_version(void) { return "0.1.0"; }
const char *dmisac_last_error_message(void) { return g_message.c_str(); }
const char *dmisac_last_error_field(void) { return g_field.c_str(); }

const char *dmisac_status_name(dmisac_status status)
{
    switch (status)
    {
    case DMISAC_OK: return "ok";
    case DMISAC_ERR_VALIDATION: return "validation";
    case DMISAC_ERR_PARSE: return "parse";
    case DMISAC_ERR_DEGENERATE_GEOMETRY: return "degenerate-geometry";
    case DMISAC_ERR_PRECONDITION: return "precondition";
    case DMISAC_ERR_SINGULAR: return "singular-information";
    case DMISAC_ERR_NUMERIC: return "numeric-failure";
    case DMISAC_ERR_IO: return "io";
    case DMISAC_ERR_INTERNAL: return "internal";
    }
    return "unknown";
}

dmisac_status dmisac_scenario_load(const char *path, dmisac_scenario **out)
{
    return guarded([&] {
        require(path, "path");
        require(out, "out");
        auto h = std::make_unique<dmisac_scenario>();
        h->scenario = load_scenario(path);
        h->refresh();
        *out = h.release();
    });
}

dmisac_status dmisac_scenario_from_json(const char *text, dmisac_scenario **out)
{
    return guarded([&] {
        require(text, "text");
        require(out, "out");
        auto h = std::make_unique<dmisac_scenario>();
        h->scenario = scenario_from_json(text);
        h->refresh();
        *out = h.release();
    });
}

dmisac_status dmisac_scenario_save(const dmisac_scenario *s, const char *path)
{
    return guarded([&] {
        require(s, "scenario");
        require(path, "path");
        save_scenario(path, s->scenario);
    });
}

dmisac_status dmisac_scenario_to_json(const dmisac_scenario *s, char *buffer, size_t capacity, size_t *length)
{
    return guarded([&] {
        require(s, "scenario");
        const std::string text = scenario_to_json(s->scenario);
        if (length)
            *length = text.size();
        if (buffer && capacity > 0)
        {
            const std::size_t n = std::min(capacity - 1, text.size());
            std::memcpy(buffer, text.data(), n);
            buffer[n] = '\0';
        }
    });
}

dmisac_status dmisac_scenario_clone(const dmisac_scenario *s, dmisac_scenario **out)
{
    return guarded([&] {
        require(s, "scenario");
        require(out, "out");
        *out = new dmisac_scenario(*s);
    });
}

void dmisac_scenario_free(dmisac_scenario *s) { delete s; }

dmisac_status dmisac_scenario_get_info(const dmisac_scenario *s, dmisac_scenario_info *out)
{
    return guarded([&] {
        require(s, "scenario");
        require(out, "out");
        const Scenario &sc = s->scenario;
        *out = dmisac_scenario_info{};
        out->n_tx = sc.n_tx();
        out->n_rx = sc.n_rx();
        out->n_targets = sc.targets.size();
        out->carrier_freq_hz = sc.radio.carrier_freq_hz;
        out->wavelength_m = sc.radio.wavelength();
        out->total_energy_j = sc.radio.total_energy_j;
        out->noise_var_w = sc.radio.noise_var_w;
        out->senr_db = linear_to_db(sc.radio.senr());
        out->sample_rate_hz = sc.radio.sample_rate_hz;
        out->effective_time_width_s = sc.radio.effective_time_width_s;
        out->waveform_kind = sc.waveform.kind == WaveformKind::GaussianOfdm ? DMISAC_OFDM : DMISAC_OCDM;
        out->pulse_param_s = sc.waveform.pulse_param;
        out->num_chirps = sc.waveform.num_chirps;
    });
}

dmisac_status dmisac_scenario_get_target(const dmisac_scenario *s, size_t target, double location_m[2],
                                         double velocity_mps[2])
{
    return guarded([&] {
        require(s, "scenario");
        const Target &t = s->scenario.targets[check_target(s->scenario, target)];
        if (location_m)
        {
            location_m[0] = t.location.x();
            location_m[1] = t.location.y();
        }
        if (velocity_mps)
        {
            velocity_mps[0] = t.velocity.x();
            velocity_mps[1] = t.velocity.y();
        }
    });
}

dmisac_status dmisac_scenario_set_senr_db(dmisac_scenario *s, double senr_db)
{
    return guarded([&] {
        if (!std::isfinite(senr_db))
            throw Error(ErrorCode::Validation, "SENR must be finite", "senr_db");
        edit(s, [&](Scenario &c) { c.radio.set_senr_db(senr_db); });
    });
}

dmisac_status dmisac_scenario_set_sample_rate(dmisac_scenario *s, double sample_rate_hz)
{
    return guarded([&] { edit(s, [&](Scenario &c) { c.radio.sample_rate_hz = sample_rate_hz; }); });
}

dmisac_status dmisac_scenario_set_target(dmisac_scenario *s, size_t target, const double location_m[2],
                                         const double velocity_mps[2])
{
    return guarded([&] {
        edit(s, [&](Scenario &c) {
            Target &t = c.targets[check_target(c, target)];
            if (location_m)
                t.location = Vec2(location_m[0], location_m[1]);
            if (velocity_mps)
                t.velocity = Vec2(velocity_mps[0], velocity_mps[1]);
        });
    });
}

dmisac_status dmisac_scenario_set_waveform(dmisac_scenario *s, dmisac_waveform_kind kind, double pulse_param_s,
                                           int num_chirps)
{
    return guarded([&] {
        if (kind != DMISAC_OFDM && kind != DMISAC_OCDM)
            throw Error(ErrorCode::Validation, "unknown waveform kind", "waveform.kind");
        edit(s, [&](Scenario &c) {
            c.waveform.kind = kind == DMISAC_OFDM ? WaveformKind::GaussianOfdm : WaveformKind::GaussianOcdm;
            c.waveform.pulse_param = pulse_param_s;
            c.waveform.num_chirps = num_chirps;
        });
    });
}

dmisac_status dmisac_scenario_keep_target(dmisac_scenario *s, size_t target)
{
    return guarded([&] {
        edit(s, [&](Scenario &c) {
            Target t = c.targets[check_target(c, target)];
            c.targets.assign(1, t);
        });
    });
}

dmisac_fim_options dmisac_fim_options_default(void)
{
    const FimOptions f;
    dmisac_fim_options o{};
    o.doppler_moment = DMISAC_DOPPLER_EXACT;
    o.gate_fraction = f.gate_fraction;
    o.singular_condition = f.singular_condition;
    o.additive_coupling = MultiFimOptions{}.additive_coupling ? 1 : 0;
    return o;
}

dmisac_status dmisac_crlb_single(const dmisac_scenario *s, size_t target, const dmisac_fim_options *options,
                                 dmisac_crlb *out)
{
    return guarded([&] {
        require(s, "scenario");
        require(out, "out");
        const FimOptions opt = fim_options(options);
        const CrlbReport r =
            crlb_single(single_target_fim(s->scenario, s->waveforms, check_target(s->scenario, target), opt), opt);
        copy4(r.accurate, out->accurate);
        copy4(r.approx, out->approx);
        out->loc_crlb_m2 = r.loc_crlb;
        out->vel_crlb_m2s2 = r.vel_crlb;
        out->loc_crlb_approx_m2 = r.loc_crlb_approx;
        out->vel_crlb_approx_m2s2 = r.vel_crlb_approx;
        out->condition_number = r.condition_number;
    });
}

dmisac_status dmisac_crlb_multi(const dmisac_scenario *s, const dmisac_fim_options *options,
                                dmisac_target_crlb *targets, size_t capacity, dmisac_multi_summary *summary)
{
    return guarded([&] {
        require(s, "scenario");
        require(targets, "targets");
        const std::size_t Q = s->scenario.targets.size();
        if (capacity < Q)
            throw Error(ErrorCode::Validation, "result buffer holds fewer entries than targets", "capacity");
        MultiFimOptions mo;
        mo.base = fim_options(options);
        if (options)
            mo.additive_coupling = options->additive_coupling != 0;
        const MultiCrlbReport r = crlb_multi(multi_target_fim(s->scenario, s->waveforms, mo), mo.base);
        for (std::size_t q = 0; q < Q; ++q)
        {
            const TargetCrlb &t = r.targets[q];
            dmisac_target_crlb &o = targets[q];
            copy4(t.accurate, o.accurate);
            copy4(t.decoupled, o.decoupled);
            copy4(t.single, o.single);
            o.loc_accurate_m2 = t.loc_accurate;
            o.vel_accurate_m2s2 = t.vel_accurate;
            o.loc_decoupled_m2 = t.loc_decoupled;
            o.vel_decoupled_m2s2 = t.vel_decoupled;
            o.loc_single_m2 = t.loc_single;
            o.vel_single_m2s2 = t.vel_single;
            o.decoupled_pseudo = t.decoupled_pseudo ? 1 : 0;
        }
        if (summary)
        {
            summary->condition_number = r.condition_number;
            summary->min_eigenvalue = r.min_eigenvalue;
            summary->pseudo_inverse = r.pseudo_inverse ? 1 : 0;
        }
    });
}

dmisac_status dmisac_tightness(const dmisac_scenario *s, size_t target, double threshold, dmisac_tightness_result *out)
{
    return guarded([&] {
        require(s, "scenario");
        require(out, "out");
        const TightnessReport r =
            tightness_check(s->scenario, s->waveforms, check_target(s->scenario, target), threshold);
        out->g_ratio = r.g_ratio;
        out->e_ratio = r.e_ratio;
        out->max_freq_ratio = r.freq_ratio.empty() ? 0.0 : *std::max_element(r.freq_ratio.begin(), r.freq_ratio.end());
        out->max_time_ratio = r.time_ratio.empty() ? 0.0 : *std::max_element(r.time_ratio.begin(), r.time_ratio.end());
        out->threshold = r.threshold;
        out->tight = r.tight ? 1 : 0;
    });
}

dmisac_status dmisac_waveform_moments(const dmisac_scenario *s, size_t tx, dmisac_moments *out)
{
    return guarded([&] {
        require(s, "scenario");
        require(out, "out");
        const WaveformMoments m = moments(s->waveforms[check_tx(s->scenario, tx)]);
        out->sebw_hz2 = m.sebw;
        out->setw_s2 = m.setw;
        out->mean_freq_hz = m.mean_freq;
        out->mean_time_s = m.mean_time;
        out->cross_term_re = m.cross_term.real();
        out->cross_term_im = m.cross_term.imag();
    });
}

dmisac_status dmisac_safety(const dmisac_scenario *s, size_t tx, double threshold, dmisac_safety_result *out)
{
    return guarded([&] {
        require(s, "scenario");
        require(out, "out");
        const double lambda = s->scenario.radio.wavelength();
        SafetyMetrics best;
        if (tx == std::numeric_limits<size_t>::max())
        {
            best.distance = best.velocity = best.tau_r = best.f_r = std::numeric_limits<double>::infinity();
            for (const Waveform &w : s->waveforms)
            {
                const SafetyMetrics m = safety_metrics(w, lambda, threshold);
                best.tau_r = std::min(best.tau_r, m.tau_r);
                best.f_r = std::min(best.f_r, m.f_r);
                best.distance = std::min(best.distance, m.distance);
                best.velocity = std::min(best.velocity, m.velocity);
            }
        }
        else
            best = safety_metrics(s->waveforms[check_tx(s->scenario, tx)], lambda, threshold);
        out->tau_r_s = best.tau_r;
        out->f_r_hz = best.f_r;
        out->distance_m = best.distance;
        out->velocity_mps = best.velocity;
    });
}

dmisac_status dmisac_ambiguity_map(const dmisac_scenario *s, size_t tx, const double *tau_s, size_t n_tau,
                                   const double *f_hz, size_t n_f, double *out)
{
    return guarded([&] {
        require(s, "scenario");
        require(tau_s, "tau_s");
        require(f_hz, "f_hz");
        require(out, "out");
        const Eigen::MatrixXd m =
            ambiguity_map(s->waveforms[check_tx(s->scenario, tx)], {tau_s, n_tau}, {f_hz, n_f});
        for (std::size_t i = 0; i < n_tau; ++i)
            for (std::size_t j = 0; j < n_f; ++j)
                out[i * n_f + j] = m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    });
}

dmisac_status dmisac_synthesize(const dmisac_scenario *s, uint64_t seed, int noise, dmisac_signal **out)
{
    return guarded([&] {
        require(s, "scenario");
        require(out, "out");
        SynthesisOptions o;
        o.noise = noise != 0;
        auto h = std::make_unique<dmisac_signal>();
        h->signal = synthesize(s->scenario, s->waveforms, seed, o);
        *out = h.release();
    });
}

dmisac_status dmisac_signal_write(const dmisac_signal *sig, const char *path)
{
    return guarded([&] {
        require(sig, "signal");
        require(path, "path");
        write_signal(std::string(path), sig->signal);
    });
}

dmisac_status dmisac_signal_read(const char *path, dmisac_signal **out)
{
    return guarded([&] {
        require(path, "path");
        require(out, "out");
        auto h = std::make_unique<dmisac_signal>();
        h->signal = read_signal(std::string(path));
        *out = h.release();
    });
}

dmisac_status dmisac_signal_dims(const dmisac_signal *sig, size_t *n_tx, size_t *n_rx, size_t *samples,
                                 double *sample_rate_hz)
{
    return guarded([&] {
        require(sig, "signal");
        if (n_tx)
            *n_tx = sig->signal.n_tx;
        if (n_rx)
            *n_rx = sig->signal.n_rx;
        if (samples)
            *samples = sig->signal.num_samples();
        if (sample_rate_hz)
            *sample_rate_hz = sig->signal.sample_rate_hz;
    });
}

void dmisac_signal_free(dmisac_signal *sig) { delete sig; }

dmisac_grid dmisac_grid_default(void) { return from_grid(MleGrid{}); }

dmisac_status dmisac_grid_from_crlb(const dmisac_scenario *s, size_t target, double sigmas, dmisac_grid *out)
{
    return guarded([&] {
        require(s, "scenario");
        require(out, "out");
        *out = from_grid(grid_from_crlb(s->scenario, s->waveforms, check_target(s->scenario, target), sigmas));
    });
}

dmisac_status dmisac_mle_single(const dmisac_scenario *s, const dmisac_signal *sig, const dmisac_grid *grid,
                                dmisac_mle *out)
{
    return guarded([&] {
        require(s, "scenario");
        require(sig, "signal");
        require(grid, "grid");
        require(out, "out");
        const MleResult r = mle_single(sig->signal, s->scenario, s->waveforms, to_grid(*grid));
        out->location_m[0] = r.location.x();
        out->location_m[1] = r.location.y();
        out->velocity_mps[0] = r.velocity.x();
        out->velocity_mps[1] = r.velocity.y();
        out->llf_value = r.llf_value;
        out->evaluations = r.evaluations;
        out->coarse_warning = r.coarse_warning ? 1 : 0;
        out->separation_warning = r.separation_warning ? 1 : 0;
    });
}

dmisac_status dmisac_monte_carlo(const dmisac_scenario *s, const dmisac_mc_config *config, dmisac_mc_row *rows,
                                 size_t capacity, dmisac_grid *grid_used)
{
    return guarded([&] {
        require(s, "scenario");
        require(config, "config");
        require(rows, "rows");
        if (config->n_senr > 0)
            require(config->senr_db, "senr_db");
        if (capacity < config->n_senr)
            throw Error(ErrorCode::Validation, "result buffer holds fewer rows than SENR levels", "capacity");
        MonteCarloConfig c;
        c.senr_db.assign(config->senr_db, config->senr_db + config->n_senr);
        c.trials = config->trials;
        c.seed = config->seed;
        c.target = config->target;
        c.threads = config->threads;
        if (config->grid)
        {
            c.grid = to_grid(*config->grid);
            c.auto_grid_sigmas = 0.0;
        }
        else
            c.auto_grid_sigmas = config->auto_grid_sigmas;
        const MonteCarloReport r = monte_carlo(s->scenario, s->waveforms, c);
        for (std::size_t i = 0; i < r.rows.size(); ++i)
        {
            const MonteCarloRow &m = r.rows[i];
            rows[i] = dmisac_mc_row{m.senr_db,       m.mse_location,  m.mse_velocity, m.crlb_location,
                                    m.crlb_velocity, m.trials,        m.seed};
        }
        if (grid_used)
            *grid_used = from_grid(r.grid);
    });
}

}
