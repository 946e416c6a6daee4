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

#include "pnmpc/controllers.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>

namespace pnmpc {

Mode heuristic_mode(double error) { return error >= 0.0 ? Mode::inflation : Mode::deflation; }

Mode round_omega(double omega_rel) {
  return omega_rel >= 0.5 ? Mode::inflation : Mode::deflation;
}

HorizonSpec MpcSettings::horizon(double p_now, std::span<const double> ref_window) const {
  HorizonSpec spec;
  spec.N = N;
  spec.dt = dt;
  spec.p0 = p_now;
  spec.p_ref.assign(ref_window.begin(), ref_window.end());
  spec.weights = weights;
  spec.bounds = bounds;
  spec.validate();
  return spec;
}

SolveResult solve_horizon(const HorizonSpec& spec, const Box& box, const DecisionVector& z0,
                          const PlantParams& params, const SolveOptions& opts) {
  const ObjectiveFn fn = [&](std::span<const double> z, std::span<double> grad) {
    return objective(spec, z, params, grad);
  };
  const std::vector<double> flat = z0.flatten();
  return solve_box_nlp(fn, flat, box, opts);
}

namespace {

double elapsed_ms(std::chrono::steady_clock::time_point since) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - since)
      .count();
}

ControlAction action_from(Mode mode, double u_I, double u_D) {
  ControlAction a;
  a.mode = mode;
  a.u_I = u_I;
  a.u_D = u_D;
  a.u_applied = mode == Mode::inflation ? u_I : u_D;
  a.omega_rel = to_int(mode);
  return a;
}

// Fail-safe: keep the last mode with both valves at their lower bound.
ControlAction degraded_action(Mode last_mode, const InputBounds& b) {
  ControlAction a = action_from(last_mode, b.u_I_min, b.u_D_min);
  a.degraded = true;
  return a;
}

}  // namespace

MinmpcController::MinmpcController(PlantParams params, MpcSettings settings,
                                   RelaxedStarts starts)
    : params_(std::move(params)), settings_(std::move(settings)), starts_(starts) {
  params_.validate();
  settings_.bounds.validate();
  settings_.solver.validate();
}

void MinmpcController::reset() {
  previous_ = {};
  last_mode_ = Mode::inflation;
}

std::pair<ControlAction, HorizonSolution> MinmpcController::solve(
    double p_now, std::span<const double> ref_window) {
  const auto start = std::chrono::steady_clock::now();
  const HorizonSpec spec = settings_.horizon(p_now, ref_window);
  HorizonSolution sol;

  std::vector<DecisionVector> inits;
  if (starts_ != RelaxedStarts::cold && !previous_.empty()) {
    inits.push_back(warm_start_shift(previous_, spec));
  }
  if (starts_ != RelaxedStarts::warm || previous_.empty()) {
    inits.push_back(warm_start_shift({}, spec));
  }

  const Box relaxed = relaxed_box(spec);
  SolveResult best;
  best.J_opt = std::numeric_limits<double>::infinity();
  for (const DecisionVector& z0 : inits) {
    SolveResult r = solve_horizon(spec, relaxed, z0, params_, settings_.solver);
    if (r.J_opt < best.J_opt || best.z_opt.empty()) best = std::move(r);
  }
  if (!std::isfinite(best.J_opt)) {
    ControlAction a = degraded_action(last_mode_, settings_.bounds);
    a.solve_ms = elapsed_ms(start);
    previous_ = {};
    sol.relaxed_status = SolveStatus::stalled;
    sol.status = SolveStatus::stalled;
    return {a, sol};
  }
  sol.relaxed = DecisionVector::unflatten(best.z_opt);
  sol.J_relaxed = best.J_opt;
  sol.relaxed_status = best.status;
  previous_ = sol.relaxed;

  sol.modes.resize(static_cast<std::size_t>(spec.N));
  for (int k = 0; k < spec.N; ++k) sol.modes[k] = to_int(round_omega(sol.relaxed.omega[k]));

  DecisionVector fixed0 = sol.relaxed;
  for (int k = 0; k < spec.N; ++k) fixed0.omega[k] = sol.modes[k];
  const SolveResult fixed =
      solve_horizon(spec, fixed_mode_box(spec, sol.modes), fixed0, params_, settings_.solver);
  sol.status = fixed.status;
  sol.iters = best.iters + fixed.iters;
  if (!std::isfinite(fixed.J_opt)) {
    ControlAction a = degraded_action(last_mode_, settings_.bounds);
    a.omega_rel = sol.relaxed.omega[0];
    a.solve_ms = elapsed_ms(start);
    return {a, sol};
  }
  sol.z = DecisionVector::unflatten(fixed.z_opt);
  sol.J = fixed.J_opt;
  sol.states = rollout(spec, sol.z, params_).states;

  const Mode mode = mode_from_int(sol.modes[0]);
  ControlAction a = action_from(mode, sol.z.u_I[0], sol.z.u_D[0]);
  a.omega_rel = sol.relaxed.omega[0];
  a.solve_ms = elapsed_ms(start);
  last_mode_ = mode;
  return {a, sol};
}

ControlAction MinmpcController::step(const ControlInput& in) {
  return solve(in.p_now, in.ref_window).first;
}

NmpcController::NmpcController(PlantParams params, MpcSettings settings)
    : params_(std::move(params)), settings_(std::move(settings)) {
  params_.validate();
  settings_.bounds.validate();
  settings_.solver.validate();
}

void NmpcController::reset() {
  previous_ = {};
  last_mode_ = Mode::inflation;
}

std::pair<ControlAction, HorizonSolution> NmpcController::solve(
    double p_now, double p_ref_now, std::span<const double> ref_window) {
  const auto start = std::chrono::steady_clock::now();
  const HorizonSpec spec = settings_.horizon(p_now, ref_window);
  const Mode mode = heuristic_mode(p_ref_now - p_now);

  HorizonSolution sol;
  sol.modes.assign(static_cast<std::size_t>(spec.N), to_int(mode));
  DecisionVector z0 = warm_start_shift(previous_, spec);
  std::fill(z0.omega.begin(), z0.omega.end(), static_cast<double>(to_int(mode)));

  const SolveResult r =
      solve_horizon(spec, fixed_mode_box(spec, sol.modes), z0, params_, settings_.solver);
  sol.status = r.status;
  sol.relaxed_status = r.status;
  sol.iters = r.iters;
  if (!std::isfinite(r.J_opt)) {
    ControlAction a = degraded_action(last_mode_, settings_.bounds);
    a.solve_ms = elapsed_ms(start);
    previous_ = {};
    return {a, sol};
  }
  sol.z = DecisionVector::unflatten(r.z_opt);
  sol.relaxed = sol.z;
  sol.J = r.J_opt;
  sol.J_relaxed = r.J_opt;
  sol.states = rollout(spec, sol.z, params_).states;
  previous_ = sol.z;

  ControlAction a = action_from(mode, sol.z.u_I[0], sol.z.u_D[0]);
  a.solve_ms = elapsed_ms(start);
  last_mode_ = mode;
  return {a, sol};
}

ControlAction NmpcController::step(const ControlInput& in) {
  return solve(in.p_now, in.p_ref_now, in.ref_window).first;
}

DualPidGains DualPidGains::gentle() { return {{0.002, 0.0008, 0.0}, {0.010, 0.001, 0.0}}; }

DualPidGains DualPidGains::aggressive() { return {{0.004, 0.0, 0.001}, {0.020, 0.0, 0.001}}; }

std::pair<ControlAction, PidState> pid_step(double p_now, double p_ref_now, PidState st,
                                            const DualPidGains& gains, double dt,
                                            const InputBounds& bounds) {
  if (!(dt > 0.0)) throw ConfigError("PID sampling time must be positive");
  const auto start = std::chrono::steady_clock::now();
  const double e = p_ref_now - p_now;
  const Mode mode = heuristic_mode(e);
  if (!st.started) {
    st.started = true;
    st.e_prev = e;
    st.mode = mode;
  }
  if (mode != st.mode) {
    st.z = 0.0;
    st.mode = mode;
  }

  const bool inflate = mode == Mode::inflation;
  const double sign = inflate ? 1.0 : -1.0;
  const PidGains& g = inflate ? gains.inflate : gains.deflate;
  const double s = sign * e;
  const double s_prev = sign * st.e_prev;
  const double raw = g.kp * s + g.ki * st.z + g.kd * (s - s_prev) / dt;
  const double command = std::clamp(raw, 0.0, 100.0);

  const double lo = inflate ? bounds.u_I_min : bounds.u_D_min;
  const double hi = inflate ? bounds.u_I_max : bounds.u_D_max;
  const double u = lo + (hi - lo) / 100.0 * command;

  // Conditional integration: freeze z while saturated in the error's direction.
  const bool windup = (raw > 100.0 && s > 0.0) || (raw < 0.0 && s < 0.0);
  if (!windup) st.z += s * dt;
  st.e_prev = e;

  ControlAction a = inflate ? action_from(mode, u, bounds.u_D_min)
                            : action_from(mode, bounds.u_I_min, u);
  a.solve_ms = elapsed_ms(start);
  return {a, st};
}

PidController::PidController(std::string_view name, DualPidGains gains, InputBounds bounds,
                             double dt)
    : name_(name), gains_(gains), bounds_(bounds), dt_(dt) {
  bounds_.validate();
  if (!(dt_ > 0.0)) throw ConfigError("PID sampling time must be positive");
}

ControlAction PidController::step(const ControlInput& in) {
  auto [action, next] = pid_step(in.p_now, in.p_ref_now, state_, gains_, dt_, bounds_);
  state_ = next;
  return action;
}

MiocpOptimum brute_force_miocp(const HorizonSpec& spec, const PlantParams& params,
                               const SolveOptions& opts) {
  spec.validate();
  if (spec.N > 6) throw ConfigError("brute_force_miocp is limited to N <= 6");
  const auto& b = spec.bounds;
  const std::vector<DecisionVector> starts = {
      DecisionVector::constant(spec.N, 0.5 * (b.u_I_min + b.u_I_max),
                               0.5 * (b.u_D_min + b.u_D_max), 0.0),
      DecisionVector::constant(spec.N, b.u_I_min, b.u_D_min, 0.0),
      DecisionVector::constant(spec.N, b.u_I_max, b.u_D_max, 0.0),
  };

  MiocpOptimum best;
  best.J = std::numeric_limits<double>::infinity();
  const int count = 1 << spec.N;
  for (int mask = 0; mask < count; ++mask) {
    std::vector<int> modes(static_cast<std::size_t>(spec.N));
    for (int k = 0; k < spec.N; ++k) modes[k] = (mask >> k) & 1;
    const Box box = fixed_mode_box(spec, modes);
    for (const DecisionVector& z0 : starts) {
      const SolveResult r = solve_horizon(spec, box, z0, params, opts);
      if (r.J_opt < best.J) {
        best.J = r.J_opt;
        best.modes = modes;
        best.z = DecisionVector::unflatten(r.z_opt);
      }
    }
  }
  return best;
}

SolveResult relaxed_nlp_optimum(const HorizonSpec& spec, const PlantParams& params,
                                const SolveOptions& opts) {
  spec.validate();
  const Box box = relaxed_box(spec);
  const std::size_t n = static_cast<std::size_t>(spec.N);

  SolveResult best;
  best.J_opt = std::numeric_limits<double>::infinity();
  auto keep = [&](SolveResult r) {
    if (r.J_opt < best.J_opt || best.z_opt.empty()) {
      best = std::move(r);
      return true;
    }
    return false;
  };
  for (double w : {0.5, 0.0, 1.0}) {
    DecisionVector z0 = warm_start_shift({}, spec);
    std::fill(z0.omega.begin(), z0.omega.end(), w);
    keep(solve_horizon(spec, box, z0, params, opts));
  }

  // The binary penalty walls off the omega = 0 and omega = 1 basins stage by
  // stage. Re-solve from every single-stage flip until nothing improves.
  for (int pass = 0; pass < 4; ++pass) {
    bool improved = false;
    const std::vector<double> center = best.z_opt;
    for (std::size_t k = 0; k < n; ++k) {
      std::vector<double> z = center;
      const bool to_inflation = z[2 * n + k] < 0.5;
      z[2 * n + k] = to_inflation ? 1.0 : 0.0;
      // the newly active duty had no gradient; restart it at its dead-zone edge
      if (to_inflation) z[k] = box.lower[k]; else z[n + k] = box.lower[n + k];
      improved |= keep(solve_horizon(spec, box, DecisionVector::unflatten(z), params, opts));
    }
    if (!improved) break;
  }
  return best;
}

}  // namespace pnmpc
