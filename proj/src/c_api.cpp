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

#include "pnmpc/pnmpc.h"

#include <cmath>
#include <cstring>
#include <exception>
#include <memory>
#include <new>
#include <stdexcept>
#include <string>

#include "pnmpc/bench.hpp"
#include "pnmpc/config.hpp"
#include "pnmpc/plant.hpp"

struct pnmpc_config {
  pnmpc::BenchConfig cfg;
};

struct pnmpc_controller {
  std::unique_ptr<pnmpc::Controller> impl;
};

struct pnmpc_trace {
  pnmpc::RunTrace trace;
};

namespace {

thread_local std::string g_last_error;

pnmpc_status fail(pnmpc_status code, std::string msg) {
  g_last_error = std::move(msg);
  return code;
}

// Runs fn, translating exceptions into status codes.
template <class Fn>
pnmpc_status guarded(Fn&& fn) {
  try {
    fn();
    return PNMPC_OK;
  } catch (const pnmpc::ConfigError& e) {
    return fail(PNMPC_ERR_CONFIG, e.what());
  } catch (const pnmpc::DomainError& e) {
    return fail(PNMPC_ERR_DOMAIN, e.what());
  } catch (const std::invalid_argument& e) {
    return fail(PNMPC_ERR_INVALID_ARGUMENT, e.what());
  } catch (const std::length_error& e) {
    return fail(PNMPC_ERR_INVALID_ARGUMENT, e.what());
  } catch (const std::bad_alloc&) {
    return fail(PNMPC_ERR_INTERNAL, "out of memory");
  } catch (const std::runtime_error& e) {
    return fail(PNMPC_ERR_RUNTIME, e.what());
  } catch (const std::exception& e) {
    return fail(PNMPC_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(PNMPC_ERR_INTERNAL, "unknown error");
  }
}

bool null_arg(const void* p, const char* what, pnmpc_status& st) {
  if (p) return false;
  st = fail(PNMPC_ERR_INVALID_ARGUMENT, std::string(what) + " must not be NULL");
  return true;
}

}  // namespace

extern "C" {

const char* pnmpc_version(void) { return "0.1.0"; }

const char* pnmpc_last_error(void) { return g_last_error.c_str(); }

const char* pnmpc_status_string(pnmpc_status status) {
  switch (status) {
    case PNMPC_OK:
      return "ok";
    case PNMPC_ERR_INVALID_ARGUMENT:
      return "invalid argument";
    case PNMPC_ERR_CONFIG:
      return "configuration error";
    case PNMPC_ERR_DOMAIN:
      return "domain error";
    case PNMPC_ERR_IO:
      return "i/o error";
    case PNMPC_ERR_RUNTIME:
      return "runtime error";
    case PNMPC_ERR_INTERNAL:
      return "internal error";
  }
  return "unknown status";
}

pnmpc_status pnmpc_config_create_default(pnmpc_config** out) {
  pnmpc_status st = PNMPC_OK;
  if (null_arg(out, "out", st)) return st;
  return guarded([&] { *out = new pnmpc_config{pnmpc::default_config()}; });
}

pnmpc_status pnmpc_config_load(const char* path, pnmpc_config** out) {
  pnmpc_status st = PNMPC_OK;
  if (null_arg(path, "path", st) || null_arg(out, "out", st)) return st;
  return guarded([&] { *out = new pnmpc_config{pnmpc::load_config(path)}; });
}

pnmpc_status pnmpc_config_get(const pnmpc_config* cfg, const char* key, double* value) {
  pnmpc_status st = PNMPC_OK;
  if (null_arg(cfg, "cfg", st) || null_arg(key, "key", st) || null_arg(value, "value", st)) {
    return st;
  }
  return guarded([&] { *value = pnmpc::config_get(cfg->cfg, key); });
}

pnmpc_status pnmpc_config_set(pnmpc_config* cfg, const char* key, double value) {
  pnmpc_status st = PNMPC_OK;
  if (null_arg(cfg, "cfg", st) || null_arg(key, "key", st)) return st;
  return guarded([&] { pnmpc::config_set(cfg->cfg, key, value); });
}

pnmpc_status pnmpc_config_dump(const pnmpc_config* cfg, char* buf, size_t size, size_t* needed) {
  pnmpc_status st = PNMPC_OK;
  if (null_arg(cfg, "cfg", st)) return st;
  return guarded([&] {
    const std::string text = pnmpc::dump_config(cfg->cfg);
    if (needed) *needed = text.size() + 1;
    if (!buf) return;
    if (size < text.size() + 1) throw std::length_error("buffer too small for config dump");
    std::memcpy(buf, text.c_str(), text.size() + 1);
  });
}

void pnmpc_config_destroy(pnmpc_config* cfg) { delete cfg; }

pnmpc_status pnmpc_controller_create(const pnmpc_config* cfg, const char* kind,
                                     pnmpc_controller** out) {
  pnmpc_status st = PNMPC_OK;
  if (null_arg(cfg, "cfg", st) || null_arg(kind, "kind", st) || null_arg(out, "out", st)) {
    return st;
  }
  return guarded([&] {
    auto impl = pnmpc::make_controller(kind, cfg->cfg);
    *out = new pnmpc_controller{std::move(impl)};
  });
}

int pnmpc_controller_horizon(const pnmpc_controller* ctrl) {
  return ctrl ? ctrl->impl->horizon() : -1;
}

pnmpc_status pnmpc_controller_step(pnmpc_controller* ctrl, double t, double p_now,
                                   double p_ref_now, const double* ref_window, size_t window_len,
                                   pnmpc_action* out) {
  pnmpc_status st = PNMPC_OK;
  if (null_arg(ctrl, "ctrl", st) || null_arg(out, "out", st)) return st;
  const auto need = static_cast<size_t>(ctrl->impl->horizon());
  if (window_len != need || (need > 0 && !ref_window)) {
    return fail(PNMPC_ERR_INVALID_ARGUMENT,
                "reference window must hold " + std::to_string(need) + " samples");
  }
  if (!std::isfinite(t) || !std::isfinite(p_now) || !std::isfinite(p_ref_now)) {
    return fail(PNMPC_ERR_INVALID_ARGUMENT, "t, p_now and p_ref_now must be finite");
  }
  for (size_t i = 0; i < window_len; ++i) {
    if (!std::isfinite(ref_window[i])) {
      return fail(PNMPC_ERR_INVALID_ARGUMENT, "reference window entries must be finite");
    }
  }
  return guarded([&] {
    const pnmpc::ControlAction a = ctrl->impl->step(
        {t, p_now, p_ref_now, std::span<const double>(ref_window, window_len)});
    *out = {pnmpc::to_int(a.mode), a.u_applied, a.u_I,     a.u_D,
            a.omega_rel,           a.solve_ms,  a.degraded ? 1 : 0};
  });
}

pnmpc_status pnmpc_controller_reset(pnmpc_controller* ctrl) {
  pnmpc_status st = PNMPC_OK;
  if (null_arg(ctrl, "ctrl", st)) return st;
  return guarded([&] { ctrl->impl->reset(); });
}

void pnmpc_controller_destroy(pnmpc_controller* ctrl) { delete ctrl; }

pnmpc_status pnmpc_plant_hold(const pnmpc_config* cfg, double p_out, int mode, double u,
                              double t_hold, double* p_next) {
  pnmpc_status st = PNMPC_OK;
  if (null_arg(cfg, "cfg", st) || null_arg(p_next, "p_next", st)) return st;
  if (mode != 0 && mode != 1) return fail(PNMPC_ERR_INVALID_ARGUMENT, "mode must be 0 or 1");
  return guarded([&] {
    const pnmpc::PlantState s =
        pnmpc::simulate_hold({p_out, 0.0}, pnmpc::mode_from_int(mode), u, t_hold,
                             cfg->cfg.run.dt_sim, cfg->cfg.plant);
    *p_next = s.p_out;
  });
}

pnmpc_status pnmpc_run(const pnmpc_config* cfg, const char* controller, const char* scenario,
                       int record_timing, pnmpc_trace** out) {
  pnmpc_status st = PNMPC_OK;
  if (null_arg(cfg, "cfg", st) || null_arg(controller, "controller", st) ||
      null_arg(scenario, "scenario", st) || null_arg(out, "out", st)) {
    return st;
  }
  return guarded([&] {
    const pnmpc::BenchConfig& c = cfg->cfg;
    const pnmpc::Scenario sc =
        pnmpc::scenario_by_name(scenario, c.sine_duration, c.control_period);
    auto ctrl = pnmpc::make_controller(controller, c);
    pnmpc::RunOptions opts = c.run;
    opts.record_timing = record_timing != 0;
    auto trace = std::make_unique<pnmpc_trace>();
    trace->trace = pnmpc::run_closed_loop(sc, *ctrl, c.plant, opts);
    *out = trace.release();
  });
}

pnmpc_status pnmpc_trace_load_csv(const char* path, pnmpc_trace** out) {
  pnmpc_status st = PNMPC_OK;
  if (null_arg(path, "path", st) || null_arg(out, "out", st)) return st;
  return guarded([&] {
    auto trace = std::make_unique<pnmpc_trace>();
    trace->trace = pnmpc::read_csv(std::string(path));
    *out = trace.release();
  });
}

pnmpc_status pnmpc_trace_save_csv(const pnmpc_trace* trace, const char* path) {
  pnmpc_status st = PNMPC_OK;
  if (null_arg(trace, "trace", st) || null_arg(path, "path", st)) return st;
  st = guarded([&] { pnmpc::write_csv(trace->trace, std::string(path)); });
  return st == PNMPC_ERR_CONFIG ? PNMPC_ERR_IO : st;
}

size_t pnmpc_trace_rows(const pnmpc_trace* trace) { return trace ? trace->trace.rows.size() : 0; }

pnmpc_status pnmpc_trace_get_row(const pnmpc_trace* trace, size_t index, pnmpc_trace_row* out) {
  pnmpc_status st = PNMPC_OK;
  if (null_arg(trace, "trace", st) || null_arg(out, "out", st)) return st;
  if (index >= trace->trace.rows.size()) {
    return fail(PNMPC_ERR_INVALID_ARGUMENT, "row index out of range");
  }
  const pnmpc::TraceRow& r = trace->trace.rows[index];
  *out = {r.t,     r.p_out_kPa_rel, r.p_ref_kPa_rel, r.e_kPa,     r.mode,
          r.u_applied, r.u_I,       r.u_D,           r.omega_rel, r.solve_ms};
  return PNMPC_OK;
}

pnmpc_status pnmpc_trace_metrics(const pnmpc_trace* trace, pnmpc_metrics* out) {
  pnmpc_status st = PNMPC_OK;
  if (null_arg(trace, "trace", st) || null_arg(out, "out", st)) return st;
  return guarded([&] {
    const pnmpc::Metrics m = pnmpc::compute_metrics(trace->trace);
    *out = {m.aae, m.max_abs_e, m.switches, m.pwm_energy, m.act_ms};
  });
}

void pnmpc_trace_destroy(pnmpc_trace* trace) { delete trace; }

}  // extern "C"
