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

#include "pnmpc/plant.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace pnmpc {

double PlantParams::pressure_gain() const { return gamma * R * flow.T / V; }

void PlantParams::validate() const {
  if (!(p_sink > 0.0 && p_sink < p_atm && p_atm < p_sup)) {
    throw ConfigError("pressures must satisfy 0 < p_sink < p_atm < p_sup");
  }
  if (!(gamma > 1.0)) throw ConfigError("gamma must exceed 1");
  if (!(R > 0.0)) throw ConfigError("R must be positive");
  if (!(V > 0.0)) throw ConfigError("V must be positive");
  if (!(dz_I >= 0.0 && dz_I < 100.0)) throw ConfigError("dz_I must lie in [0,100)");
  if (!(dz_D >= 0.0 && dz_D < 100.0)) throw ConfigError("dz_D must lie in [0,100)");
  flow.validate();
  cond.validate();
}

double spool_map(double u, double dz) {
  if (u <= dz) return 0.0;
  if (u >= 100.0) return 1.0;
  return (u - dz) / (100.0 - dz);
}

double spool_map_slope(double u, double dz) {
  if (u < dz || u > 100.0) return 0.0;
  return 1.0 / (100.0 - dz);
}

AffineTerms affine_terms(double p, const PlantParams& pp, Shape shape) {
  const auto& k = pp.flow;
  const auto& c = pp.cond;
  const double a_so = branch_flow(pp.p_sup, p, c.so, k, shape);
  const double a_os = branch_flow(p, pp.p_sink, c.os, k, shape);
  const double a_oa = branch_flow(p, pp.p_atm, c.oa, k, shape);
  const double a_ao = branch_flow(pp.p_atm, p, c.ao, k, shape);
  const double gain = pp.pressure_gain();
  return {gain * (a_ao - a_oa), gain * (a_so - a_ao + a_oa), gain * (-a_os - a_ao + a_oa)};
}

AffineSlopes affine_slopes(double p, const PlantParams& pp) {
  const auto& k = pp.flow;
  const auto& c = pp.cond;
  const BranchPartials so = branch_flow_partials(pp.p_sup, p, c.so, k);
  const BranchPartials os = branch_flow_partials(p, pp.p_sink, c.os, k);
  const BranchPartials oa = branch_flow_partials(p, pp.p_atm, c.oa, k);
  const BranchPartials ao = branch_flow_partials(pp.p_atm, p, c.ao, k);
  // The receiver pressure is downstream for so/ao and upstream for os/oa.
  const double d_so = so.d_down;
  const double d_os = os.d_up;
  const double d_oa = oa.d_up;
  const double d_ao = ao.d_down;
  const double gain = pp.pressure_gain();

  AffineSlopes out;
  out.value = {gain * (ao.value - oa.value), gain * (so.value - ao.value + oa.value),
               gain * (-os.value - ao.value + oa.value)};
  out.df = gain * (d_ao - d_oa);
  out.dg_inflate = gain * (d_so - d_ao + d_oa);
  out.dg_deflate = gain * (-d_os - d_ao + d_oa);
  return out;
}

double drift_f(double p_out, const PlantParams& params, Shape shape) {
  return affine_terms(p_out, params, shape).f;
}

double control_gain_g(double p_out, Mode mode, const PlantParams& params, Shape shape) {
  return affine_terms(p_out, params, shape).gain(mode);
}

PlantState step_euler(const PlantState& state, Mode mode, double u, double dt_sim,
                      const PlantParams& params) {
  const double dz = mode == Mode::inflation ? params.dz_I : params.dz_D;
  const AffineTerms terms = affine_terms(state.p_out, params, Shape::exact);
  const double rate = terms.f + terms.gain(mode) * spool_map(u, dz);
  const double next = std::clamp(state.p_out + dt_sim * rate, params.p_sink, params.p_sup);
  return {next, state.t + dt_sim};
}

int hold_substeps(double t_hold, double dt_sim) {
  if (!(dt_sim > 0.0) || !(t_hold > 0.0)) {
    throw ConfigError("hold and sub-step durations must be positive");
  }
  const double n = std::round(t_hold / dt_sim);
  if (n < 1.0 || std::abs(n * dt_sim - t_hold) > 1e-9) {
    throw ConfigError("hold time " + std::to_string(t_hold) +
                      " s is not a multiple of the simulation step " +
                      std::to_string(dt_sim) + " s");
  }
  return static_cast<int>(n);
}

PlantState simulate_hold(const PlantState& state, Mode mode, double u, double t_hold,
                         double dt_sim, const PlantParams& params) {
  const int steps = hold_substeps(t_hold, dt_sim);
  PlantState s = state;
  for (int i = 0; i < steps; ++i) s = step_euler(s, mode, u, dt_sim, params);
  return s;
}

}  // namespace pnmpc
