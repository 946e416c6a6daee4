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

#ifndef PNMPC_PLANT_HPP_
#define PNMPC_PLANT_HPP_

#include "pnmpc/gas_flow.hpp"
#include "pnmpc/params.hpp"

namespace pnmpc {

struct PlantState {
  double p_out = 100e3;  // absolute Pa
  double t = 0.0;        // s
};

/// Averaged spool opening for a PWM duty u (%): closed inside the dead zone,
/// affine above it, fully open at 100 %.
double spool_map(double u, double dz);

/// Slope of spool_map on the admissible range u >= dz (right derivative at
/// the dead-zone edge).
double spool_map_slope(double u, double dz);

/// Drift and per-mode input gains of dP/dt = f(P) + g_m(P) * x_bar.
struct AffineTerms {
  double f = 0.0;
  double g_inflate = 0.0;
  double g_deflate = 0.0;

  double gain(Mode m) const { return m == Mode::inflation ? g_inflate : g_deflate; }
};

struct AffineSlopes {
  AffineTerms value;
  double df = 0.0;
  double dg_inflate = 0.0;
  double dg_deflate = 0.0;
};

AffineTerms affine_terms(double p_out, const PlantParams& params, Shape shape);

/// affine_terms of the smoothed model together with d/dP of each term.
AffineSlopes affine_slopes(double p_out, const PlantParams& params);

double drift_f(double p_out, const PlantParams& params, Shape shape = Shape::exact);
double control_gain_g(double p_out, Mode mode, const PlantParams& params,
                      Shape shape = Shape::exact);

/// One forward-Euler step of the exact plant, clamped to [p_sink, p_sup].
PlantState step_euler(const PlantState& state, Mode mode, double u, double dt_sim,
                      const PlantParams& params);

/// Zero-order hold of (mode, u) for t_hold seconds in dt_sim sub-steps.
/// Throws ConfigError unless t_hold is a positive multiple of dt_sim.
PlantState simulate_hold(const PlantState& state, Mode mode, double u, double t_hold,
                         double dt_sim, const PlantParams& params);

/// Number of Euler sub-steps in one hold; throws ConfigError as simulate_hold.
int hold_substeps(double t_hold, double dt_sim);

}  // namespace pnmpc

#endif  // PNMPC_PLANT_HPP_
