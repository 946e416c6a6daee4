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

#ifndef PNMPC_TRANSCRIPTION_HPP_
#define PNMPC_TRANSCRIPTION_HPP_

// Single-shooting transcription of the relaxed mixed-integer tracking
// problem. Decisions per stage are the inflation duty u_I, the deflation duty
// u_D and the relaxed mode omega in [0,1]. States are eliminated by an RK4
// rollout of the outer-convexified model
//
//   dP/dt = f(P) + omega * g_1(P) * x_I(u_I) + (1 - omega) * g_0(P) * x_D(u_D)
//
// which uses the smoothed shape factor so that the objective is C^1.

#include <span>
#include <vector>

#include "pnmpc/params.hpp"

namespace pnmpc {

/// Tracking errors enter the cost in kPa.
inline constexpr double kPascalPerKilopascal = 1000.0;

struct CostWeights {
  double q_e = 1.0;
  double r_I = 1e-2;
  double lambda_bin = 1e2;
};

struct InputBounds {
  double u_I_min = 20.0;
  double u_I_max = 100.0;
  double u_D_min = 25.0;
  double u_D_max = 100.0;

  /// Lower bounds at the dead-zone edges, upper bounds at full duty.
  static InputBounds from_dead_zones(const PlantParams& params);
  void validate() const;
};

struct HorizonSpec {
  int N = 10;
  double dt = 0.02;
  double p0 = 100e3;          // absolute Pa
  std::vector<double> p_ref;  // N absolute-Pa targets for P_1..P_N
  CostWeights weights;
  InputBounds bounds;

  void validate() const;
};

/// Decision trajectories. The flat layout used by the solver is
/// [u_I(0..N-1), u_D(0..N-1), omega(0..N-1)].
struct DecisionVector {
  std::vector<double> u_I;
  std::vector<double> u_D;
  std::vector<double> omega;

  int stages() const { return static_cast<int>(u_I.size()); }
  bool empty() const { return u_I.empty(); }
  std::vector<double> flatten() const;
  static DecisionVector unflatten(std::span<const double> z);
  static DecisionVector constant(int N, double u_I, double u_D, double omega);
};

struct Box {
  std::vector<double> lower;
  std::vector<double> upper;

  std::size_t size() const { return lower.size(); }
  std::vector<double> project(std::span<const double> z) const;
};

/// Duty bounds of the horizon with omega free in [0,1].
Box relaxed_box(const HorizonSpec& spec);

/// Same duty bounds with omega_k pinned to modes[k] in {0,1}.
Box fixed_mode_box(const HorizonSpec& spec, std::span<const int> modes);

/// One classical RK4 step of the outer-convexified smoothed model.
double rk4_step(double p, double u_I, double u_D, double omega, double dt,
                const PlantParams& params);

struct StepSensitivity {
  double next = 0.0;
  double d_p = 0.0;
  double d_u_I = 0.0;
  double d_u_D = 0.0;
  double d_omega = 0.0;
};

/// rk4_step with exact derivatives of the result.
StepSensitivity rk4_step_sensitivity(double p, double u_I, double u_D, double omega,
                                     double dt, const PlantParams& params);

struct Rollout {
  std::vector<double> states;  // P_1..P_N
  double J = 0.0;
};

Rollout rollout(const HorizonSpec& spec, const DecisionVector& z, const PlantParams& params);

/// Objective of the flat decision vector; writes dJ/dz into grad when it is
/// non-empty (reverse sweep through the RK4 recursion).
double objective(const HorizonSpec& spec, std::span<const double> z,
                 const PlantParams& params, std::span<double> grad = {});

std::vector<double> gradient(const HorizonSpec& spec, const DecisionVector& z,
                             const PlantParams& params);

}  // namespace pnmpc

#endif  // PNMPC_TRANSCRIPTION_HPP_
