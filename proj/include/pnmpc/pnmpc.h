// Copyright 2026 The pnmpc Authors
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

/* C interface to the pneumatic mixed-integer MPC benchmark.
 *
 * Every object is an opaque handle created by a *_create / *_load function
 * and released by the matching *_destroy. Functions return a pnmpc_status;
 * on failure pnmpc_last_error() describes the problem (per thread, valid
 * until the next failing call on that thread). Pressures are absolute Pa
 * unless a name says otherwise. */

#ifndef PNMPC_PNMPC_H_
#define PNMPC_PNMPC_H_

#include <stddef.h>

#if defined(PNMPC_BUILDING_LIBRARY)
#define PNMPC_API __attribute__((visibility("default")))
#else
#define PNMPC_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum pnmpc_status {
  PNMPC_OK = 0,
  PNMPC_ERR_INVALID_ARGUMENT = 1,
  PNMPC_ERR_CONFIG = 2,
  PNMPC_ERR_DOMAIN = 3,
  PNMPC_ERR_IO = 4,
  PNMPC_ERR_RUNTIME = 5,
  PNMPC_ERR_INTERNAL = 6
} pnmpc_status;

typedef struct pnmpc_config pnmpc_config;
typedef struct pnmpc_controller pnmpc_controller;
typedef struct pnmpc_trace pnmpc_trace;

typedef struct pnmpc_action {
  int mode; /* 1 inflation, 0 deflation */
  double u_applied;
  double u_I;
  double u_D;
  double omega_rel;
  double solve_ms;
  int degraded;
} pnmpc_action;

typedef struct pnmpc_trace_row {
  double t;
  double p_out_kPa_rel;
  double p_ref_kPa_rel;
  double e_kPa;
  int mode;
  double u_applied;
  double u_I;
  double u_D;
  double omega_rel;
  double solve_ms;
} pnmpc_trace_row;

typedef struct pnmpc_metrics {
  double aae;        /* kPa */
  double max_abs_e;  /* kPa */
  long switches;
  double pwm_energy; /* % s */
  double act_ms;
} pnmpc_metrics;

PNMPC_API const char* pnmpc_version(void);
PNMPC_API const char* pnmpc_last_error(void);
PNMPC_API const char* pnmpc_status_string(pnmpc_status status);

/* Configuration. Keys are "section.name", e.g. "plant.p_sup" (kPa) or
 * "solver.max_iters"; see the README for the full list. */
PNMPC_API pnmpc_status pnmpc_config_create_default(pnmpc_config** out);
PNMPC_API pnmpc_status pnmpc_config_load(const char* path, pnmpc_config** out);
PNMPC_API pnmpc_status pnmpc_config_get(const pnmpc_config* cfg, const char* key, double* value);
PNMPC_API pnmpc_status pnmpc_config_set(pnmpc_config* cfg, const char* key, double value);
/* Writes the JSON form into buf (NUL terminated). *needed receives the
 * required size including the terminator; pass buf = NULL to query it. */
PNMPC_API pnmpc_status pnmpc_config_dump(const pnmpc_config* cfg, char* buf, size_t size,
                                         size_t* needed);
PNMPC_API void pnmpc_config_destroy(pnmpc_config* cfg);

/* Controllers: "minmpc", "nmpc", "pid-gentle", "pid-aggressive". */
PNMPC_API pnmpc_status pnmpc_controller_create(const pnmpc_config* cfg, const char* kind,
                                               pnmpc_controller** out);
/* Number of future reference samples pnmpc_controller_step expects. */
PNMPC_API int pnmpc_controller_horizon(const pnmpc_controller* ctrl);
PNMPC_API pnmpc_status pnmpc_controller_step(pnmpc_controller* ctrl, double t, double p_now,
                                             double p_ref_now, const double* ref_window,
                                             size_t window_len, pnmpc_action* out);
PNMPC_API pnmpc_status pnmpc_controller_reset(pnmpc_controller* ctrl);
PNMPC_API void pnmpc_controller_destroy(pnmpc_controller* ctrl);

/* Holds (mode, u) on the simulated plant for t_hold seconds. */
PNMPC_API pnmpc_status pnmpc_plant_hold(const pnmpc_config* cfg, double p_out, int mode,
                                        double u, double t_hold, double* p_next);

/* Closed-loop run of a controller on "step" or "sine". record_timing = 0
 * writes solve_ms = 0 so that traces are byte-stable. */
PNMPC_API pnmpc_status pnmpc_run(const pnmpc_config* cfg, const char* controller,
                                 const char* scenario, int record_timing, pnmpc_trace** out);
PNMPC_API pnmpc_status pnmpc_trace_load_csv(const char* path, pnmpc_trace** out);
PNMPC_API pnmpc_status pnmpc_trace_save_csv(const pnmpc_trace* trace, const char* path);
PNMPC_API size_t pnmpc_trace_rows(const pnmpc_trace* trace);
PNMPC_API pnmpc_status pnmpc_trace_get_row(const pnmpc_trace* trace, size_t index,
                                           pnmpc_trace_row* out);
PNMPC_API pnmpc_status pnmpc_trace_metrics(const pnmpc_trace* trace, pnmpc_metrics* out);
PNMPC_API void pnmpc_trace_destroy(pnmpc_trace* trace);

#ifdef __cplusplus
}
#endif

#endif /* PNMPC_PNMPC_H_ */
