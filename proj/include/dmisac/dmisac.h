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

/* C interface to the dmisac library. All objects are opaque handles owned by the caller and released
 * with the matching *_free function. Every function returns a dmisac_status; on failure the message
 * and offending field (if any) of the most recent error on the calling thread are available through
 * dmisac_last_error_message() / dmisac_last_error_field(). */
#ifndef DMISAC_H
#define DMISAC_H

#include <stddef.h>
#include <stdint.h>

#if defined(DMISAC_BUILDING_LIBRARY)
#define DMISAC_API __attribute__((visibility("default")))
#else
#define DMISAC_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum dmisac_status
{
    DMISAC_OK = 0,
    DMISAC_ERR_VALIDATION = 1,
    DMISAC_ERR_PARSE = 2,
    DMISAC_ERR_DEGENERATE_GEOMETRY = 3,
    DMISAC_ERR_PRECONDITION = 4,
    DMISAC_ERR_SINGULAR = 5,
    DMISAC_ERR_NUMERIC = 6,
    DMISAC_ERR_IO = 7,
    DMISAC_ERR_INTERNAL = 8
} dmisac_status;

typedef enum dmisac_waveform_kind
{
    DMISAC_OFDM = 0,
    DMISAC_OCDM = 1
} dmisac_waveform_kind;

typedef enum dmisac_doppler_moment
{
    DMISAC_DOPPLER_EXACT = 0,
    DMISAC_DOPPLER_APPROXIMATE = 1,
    DMISAC_DOPPLER_GATED = 2
} dmisac_doppler_moment;

typedef struct dmisac_scenario dmisac_scenario;
typedef struct dmisac_signal dmisac_signal;

DMISAC_API const char *dmisac_version(void);
DMISAC_API const char *dmisac_last_error_message(void);
DMISAC_API const char *dmisac_last_error_field(void);
DMISAC_API const char *dmisac_status_name(dmisac_status status);

/* Scenario ---------------------------------------------------------------------------------------- */

DMISAC_API dmisac_status dmisac_scenario_load(const char *path, dmisac_scenario **out);
DMISAC_API dmisac_status dmisac_scenario_from_json(const char *text, dmisac_scenario **out);
DMISAC_API dmisac_status dmisac_scenario_save(const dmisac_scenario *s, const char *path);
/* Writes at most `capacity` bytes including the terminator; `*length` receives the full length. */
DMISAC_API dmisac_status dmisac_scenario_to_json(const dmisac_scenario *s, char *buffer, size_t capacity,
                                                 size_t *length);
DMISAC_API dmisac_status dmisac_scenario_clone(const dmisac_scenario *s, dmisac_scenario **out);
DMISAC_API void dmisac_scenario_free(dmisac_scenario *s);

typedef struct dmisac_scenario_info
{
    size_t n_tx, n_rx, n_targets;
    double carrier_freq_hz;
    double wavelength_m;
    double total_energy_j;
    double noise_var_w;
    double senr_db;
    double sample_rate_hz;
    double effective_time_width_s;
    dmisac_waveform_kind waveform_kind;
    double pulse_param_s;
    int num_chirps;
} dmisac_scenario_info;

DMISAC_API dmisac_status dmisac_scenario_get_info(const dmisac_scenario *s, dmisac_scenario_info *out);
DMISAC_API dmisac_status dmisac_scenario_get_target(const dmisac_scenario *s, size_t target, double location_m[2],
                                                    double velocity_mps[2]);

/* Setters validate the modified scenario and leave it unchanged on failure. */
DMISAC_API dmisac_status dmisac_scenario_set_senr_db(dmisac_scenario *s, double senr_db);
DMISAC_API dmisac_status dmisac_scenario_set_sample_rate(dmisac_scenario *s, double sample_rate_hz);
DMISAC_API dmisac_status dmisac_scenario_set_target(dmisac_scenario *s, size_t target, const double location_m[2],
                                                    const double velocity_mps[2]);
DMISAC_API dmisac_status dmisac_scenario_set_waveform(dmisac_scenario *s, dmisac_waveform_kind kind,
                                                      double pulse_param_s, int num_chirps);
/* Keeps only target `target` (index into the current list). */
DMISAC_API dmisac_status dmisac_scenario_keep_target(dmisac_scenario *s, size_t target);

/* Bounds ------------------------------------------------------------------------------------------ */

typedef struct dmisac_fim_options
{
    dmisac_doppler_moment doppler_moment;
    double gate_fraction;
    double singular_condition;
    int additive_coupling; /* multi-target only */
} dmisac_fim_options;

DMISAC_API dmisac_fim_options dmisac_fim_options_default(void);

/* 4x4 matrices are row-major over (x, y, vx, vy). */
typedef struct dmisac_crlb
{
    double accurate[16];
    double approx[16];
    double loc_crlb_m2, vel_crlb_m2s2;
    double loc_crlb_approx_m2, vel_crlb_approx_m2s2;
    double condition_number;
} dmisac_crlb;

DMISAC_API dmisac_status dmisac_crlb_single(const dmisac_scenario *s, size_t target, const dmisac_fim_options *options,
                                            dmisac_crlb *out);

typedef struct dmisac_target_crlb
{
    double accurate[16];
    double decoupled[16];
    double single[16];
    double loc_accurate_m2, vel_accurate_m2s2;
    double loc_decoupled_m2, vel_decoupled_m2s2;
    double loc_single_m2, vel_single_m2s2;
    int decoupled_pseudo;
} dmisac_target_crlb;

typedef struct dmisac_multi_summary
{
    double condition_number;
    double min_eigenvalue;
    int pseudo_inverse;
} dmisac_multi_summary;

/* `targets` must hold n_targets entries. */
DMISAC_API dmisac_status dmisac_crlb_multi(const dmisac_scenario *s, const dmisac_fim_options *options,
                                           dmisac_target_crlb *targets, size_t capacity, dmisac_multi_summary *summary);

typedef struct dmisac_tightness_result
{
    double g_ratio, e_ratio;
    double max_freq_ratio, max_time_ratio;
    double threshold;
    int tight;
} dmisac_tightness_result;

DMISAC_API dmisac_status dmisac_tightness(const dmisac_scenario *s, size_t target, double threshold,
                                          dmisac_tightness_result *out);

/* Waveform ---------------------------------------------------------------------------------------- */

typedef struct dmisac_moments
{
    double sebw_hz2, setw_s2;
    double mean_freq_hz, mean_time_s;
    double cross_term_re, cross_term_im;
} dmisac_moments;

DMISAC_API dmisac_status dmisac_waveform_moments(const dmisac_scenario *s, size_t tx, dmisac_moments *out);

typedef struct dmisac_safety_result
{
    double tau_r_s, f_r_hz, distance_m, velocity_mps;
} dmisac_safety_result;

/* Minimum over transmitters (tx == SIZE_MAX) or for a single transmitter. */
DMISAC_API dmisac_status dmisac_safety(const dmisac_scenario *s, size_t tx, double threshold, dmisac_safety_result *out);

/* Normalised |AF|^2 on the grid; `out` is row-major (n_tau x n_f). */
DMISAC_API dmisac_status dmisac_ambiguity_map(const dmisac_scenario *s, size_t tx, const double *tau_s, size_t n_tau,
                                              const double *f_hz, size_t n_f, double *out);

/* Signal and estimation --------------------------------------------------------------------------- */

DMISAC_API dmisac_status dmisac_synthesize(const dmisac_scenario *s, uint64_t seed, int noise, dmisac_signal **out);
DMISAC_API dmisac_status dmisac_signal_write(const dmisac_signal *sig, const char *path);
DMISAC_API dmisac_status dmisac_signal_read(const char *path, dmisac_signal **out);
DMISAC_API dmisac_status dmisac_signal_dims(const dmisac_signal *sig, size_t *n_tx, size_t *n_rx, size_t *samples,
                                            double *sample_rate_hz);
DMISAC_API void dmisac_signal_free(dmisac_signal *sig);

typedef struct dmisac_grid
{
    double loc_center[2], loc_halfwidth[2];
    double vel_center[2], vel_halfwidth[2];
    int coarse_points;
    int refinement_levels;
    double shrink_factor;
} dmisac_grid;

DMISAC_API dmisac_grid dmisac_grid_default(void);
/* Grid centred on the true state of `target`, `sigmas` CRLB standard deviations wide. */
DMISAC_API dmisac_status dmisac_grid_from_crlb(const dmisac_scenario *s, size_t target, double sigmas, dmisac_grid *out);

typedef struct dmisac_mle
{
    double location_m[2];
    double velocity_mps[2];
    double llf_value;
    uint64_t evaluations;
    int coarse_warning;
    int separation_warning;
} dmisac_mle;

/* Single-target grid MLE; the signal may contain echoes from any number of targets. */
DMISAC_API dmisac_status dmisac_mle_single(const dmisac_scenario *s, const dmisac_signal *sig, const dmisac_grid *grid,
                                           dmisac_mle *out);

typedef struct dmisac_mc_config
{
    const double *senr_db;
    size_t n_senr;
    size_t trials;
    uint64_t seed;
    size_t target;
    const dmisac_grid *grid; /* NULL: derived from the CRLB with auto_grid_sigmas */
    double auto_grid_sigmas;
    unsigned threads;        /* 0: hardware concurrency */
} dmisac_mc_config;

typedef struct dmisac_mc_row
{
    double senr_db;
    double mse_location_m2, mse_velocity_m2s2;
    double crlb_location_m2, crlb_velocity_m2s2;
    size_t trials;
    uint64_t seed;
} dmisac_mc_row;

/* `rows` must hold n_senr entries; `grid_used` (optional) receives the search grid. */
DMISAC_API dmisac_status dmisac_monte_carlo(const dmisac_scenario *s, const dmisac_mc_config *config,
                                            dmisac_mc_row *rows, size_t capacity, dmisac_grid *grid_used);

#ifdef __cplusplus
}
#endif

#endif
