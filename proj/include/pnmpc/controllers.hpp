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

#ifndef PNMPC_CONTROLLERS_HPP_
#define PNMPC_CONTROLLERS_HPP_

#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "pnmpc/gas_flow.hpp"
#include "pnmpc/nlp_solver.hpp"
#include "pnmpc/params.hpp"
#include "pnmpc/transcription.hpp"

namespace pnmpc {

struct ControlAction {
  Mode mode = Mode::inflation;
  double u_applied = 0.0;  // duty % sent to the active valve
  double u_I = 0.0;        // inflation candidate
  double u_D = 0.0;        // deflation candidate
  double omega_rel = 1.0;  // relaxed mode of stage 0 (equals the mode for baselines)
  double solve_ms = 0.0;
  bool degraded = false;   // solver failure, fail-safe action issued
};

/// Predicted trajectory and diagnostics of one MPC step.
struct HorizonSolution {
  DecisionVector relaxed;
  DecisionVector z;  // fixed-mode decisions
  std::vector<int> modes;
  std::vector<double> states;  // predicted P_1..P_N
  double J_relaxed = 0.0;
  double J = 0.0;
  SolveStatus relaxed_status = SolveStatus::converged;
  SolveStatus status = SolveStatus::converged;
  int iters = 0;
};

/// Baseline mode rule: inflate when the tracking error ref - p is >= 0.
Mode heuristic_mode(double error);

/// Standard rounding of a relaxed mode at 0.5 (ties inflate).
Mode round_omega(double omega_rel);

struct MpcSettings {
  int N = 10;
  double dt = 0.02;
  CostWeights weights;
  InputBounds bounds;
  SolveOptions solver;

  HorizonSpec horizon(double p_now, std::span<const double> ref_window) const;
};

/// One control instant as seen by a controller.
struct ControlInput {
  double t = 0.0;
  double p_now = 0.0;      // absolute Pa
  double p_ref_now = 0.0;  // reference at t, absolute Pa
  std::span<const double> ref_window;  // references at t + (i+1) * dt
};

class Controller {
 public:
  virtual ~Controller() = default;
  virtual std::string_view name() const = 0;
  /// Number of future reference samples the controller reads.
  virtual int horizon() const { return 0; }
  virtual ControlAction step(const ControlInput& in) = 0;
  virtual void reset() = 0;
};

/// Mixed-integer NMPC: relaxed solve over (u_I, u_D, omega), per-stage
/// rounding, fixed-mode re-solve, first action applied.
class MinmpcController final : public Controller {
 public:
  /// Which initial points the relaxed solve starts from each step.
  enum class RelaxedStarts { warm, cold, warm_and_cold };

  MinmpcController(PlantParams params, MpcSettings settings,
                   RelaxedStarts starts = RelaxedStarts::warm_and_cold);

  std::string_view name() const override { return "minmpc"; }
  int horizon() const override { return settings_.N; }
  ControlAction step(const ControlInput& in) override;
  void reset() override;

  std::pair<ControlAction, HorizonSolution> solve(double p_now,
                                                  std::span<const double> ref_window);

 private:
  PlantParams params_;
  MpcSettings settings_;
  RelaxedStarts starts_;
  DecisionVector previous_;
  Mode last_mode_ = Mode::inflation;
};

/// NMPC with the mode fixed over the horizon by heuristic_mode.
class NmpcController final : public Controller {
 public:
  NmpcController(PlantParams params, MpcSettings settings);

  std::string_view name() const override { return "nmpc"; }
  int horizon() const override { return settings_.N; }
  ControlAction step(const ControlInput& in) override;
  void reset() override;

  std::pair<ControlAction, HorizonSolution> solve(double p_now, double p_ref_now,
                                                  std::span<const double> ref_window);

 private:
  PlantParams params_;
  MpcSettings settings_;
  DecisionVector previous_;
  Mode last_mode_ = Mode::inflation;
};

struct PidGains {
  double kp = 0.0;
  double ki = 0.0;
  double kd = 0.0;
};

/// Separate gain sets for the inflation and deflation valves; error in Pa.
struct DualPidGains {
  PidGains inflate;
  PidGains deflate;

  static DualPidGains gentle();
  static DualPidGains aggressive();
};

/// Integral state is mode specific: it restarts from zero on a mode change.
struct PidState {
  double z = 0.0;       // Pa s, in the active mode's error sign
  double e_prev = 0.0;  // Pa
  Mode mode = Mode::inflation;
  bool started = false;
};

/// Dual-gain PID with dead-zone aware mapping of the raw command (0..100)
/// onto [u_min, u_max] of the active valve. In deflation the error is
/// sign-flipped so that a positive command always means "open the valve".
std::pair<ControlAction, PidState> pid_step(double p_now, double p_ref_now, PidState state,
                                            const DualPidGains& gains, double dt,
                                            const InputBounds& bounds);

class PidController final : public Controller {
 public:
  PidController(std::string_view name, DualPidGains gains, InputBounds bounds, double dt);

  std::string_view name() const override { return name_; }
  ControlAction step(const ControlInput& in) override;
  void reset() override { state_ = {}; }
  const PidState& state() const { return state_; }

 private:
  std::string name_;
  DualPidGains gains_;
  InputBounds bounds_;
  double dt_;
  PidState state_;
};

/// Solve the horizon problem with a given box from z0.
SolveResult solve_horizon(const HorizonSpec& spec, const Box& box, const DecisionVector& z0,
                          const PlantParams& params, const SolveOptions& opts);

struct MiocpOptimum {
  std::vector<int> modes;
  DecisionVector z;
  double J = 0.0;
};

/// Exhaustive search over all 2^N mode sequences, each with its continuous
/// duties optimized. Intended as a test oracle; requires N <= 6.
MiocpOptimum brute_force_miocp(const HorizonSpec& spec, const PlantParams& params,
                               const SolveOptions& opts = {});

/// Best relaxed solution found from the mid-box and both uniform-mode starts,
/// refined by re-solving from single-stage mode flips. Much costlier than the
/// in-loop relaxed solve; it estimates the value of the relaxation itself.
SolveResult relaxed_nlp_optimum(const HorizonSpec& spec, const PlantParams& params,
                                const SolveOptions& opts = {});

}  // namespace pnmpc

#endif  // PNMPC_CONTROLLERS_HPP_
