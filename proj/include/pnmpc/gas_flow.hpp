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

#ifndef PNMPC_GAS_FLOW_HPP_
#define PNMPC_GAS_FLOW_HPP_

// Compressible orifice flow: shape factor, per-branch flow functions and the
// case-by-case receiver inflow used to cross-check the control-affine model.

#include "pnmpc/params.hpp"

namespace pnmpc {

/// Half-width (in pressure-ratio units) of the C^1 blend bands used by the
/// controller's internal model.
inline constexpr double kSmoothingHalfWidth = 1e-3;

enum class Shape { exact, smoothed };

enum class Mode : int { deflation = 0, inflation = 1 };

inline int to_int(Mode m) { return static_cast<int>(m); }
inline Mode mode_from_int(int m) { return m != 0 ? Mode::inflation : Mode::deflation; }

struct ValueAndSlope {
  double value = 0.0;
  double slope = 0.0;
};

/// Piecewise shape factor: 1 when choked (r <= b), the elliptic subsonic
/// branch for b < r < 1, 0 when the pressure ratio is reversed (r >= 1).
double shape_factor(double r, double b);

/// C^1 surrogate of shape_factor. Identical to it outside
/// [b - eps, b + eps] and [1 - eps, 1 + eps], never further than eps away.
double shape_factor_smoothed(double r, double b, double eps = kSmoothingHalfWidth);
ValueAndSlope shape_factor_smoothed_slope(double r, double b,
                                          double eps = kSmoothingHalfWidth);

/// Mass flow (kg/s) through one fully open branch from p_up to p_down.
/// Throws DomainError when p_up <= 0 or p_down < 0.
double branch_flow(double p_up, double p_down, double conductance,
                   const FlowConstants& k, Shape shape = Shape::exact);

struct BranchPartials {
  double value = 0.0;
  double d_up = 0.0;    // d value / d p_up
  double d_down = 0.0;  // d value / d p_down
};

/// branch_flow with its pressure derivatives, using the smoothed shape factor.
BranchPartials branch_flow_partials(double p_up, double p_down, double conductance,
                                    const FlowConstants& k);

/// Net mass flow into the receiver evaluated case by case: the main path is
/// scaled by x_bar, the leak to or from atmosphere by (1 - x_bar).
/// Throws DomainError unless p_sink < p_out < p_sup.
double q_out_cases(double p_out, double x_bar, Mode mode, const PlantParams& params,
                   Shape shape = Shape::exact);

}  // namespace pnmpc

#endif  // PNMPC_GAS_FLOW_HPP_
