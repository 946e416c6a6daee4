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

#ifndef PNMPC_NLP_SOLVER_HPP_
#define PNMPC_NLP_SOLVER_HPP_

#include <functional>
#include <span>
#include <string_view>
#include <vector>

#include "pnmpc/transcription.hpp"

namespace pnmpc {

struct SolveOptions {
  int max_iters = 200;
  double grad_tol = 1e-6;   // infinity norm of the projected gradient
  double step_tol = 1e-12;  // smallest accepted step, in box-normalized units
  double armijo_c = 1e-4;
  int memory = 10;
  double backtrack = 0.5;

  void validate() const;
};

enum class SolveStatus { converged, max_iters, stalled };

std::string_view to_string(SolveStatus s);

struct SolveResult {
  std::vector<double> z_opt;
  double J_opt = 0.0;
  int iters = 0;  // accepted steps
  SolveStatus status = SolveStatus::stalled;
  double wall_time = 0.0;  // s
  double projected_grad_norm = 0.0;
};

/// Returns J(z) and, when grad is non-empty, writes dJ/dz into it.
using ObjectiveFn = std::function<double(std::span<const double> z, std::span<double> grad)>;

/// Projected limited-memory quasi-Newton method for min J(z) s.t. lower <= z <= upper.
///
/// Iterates are kept feasible by projection, the objective never increases,
/// and variables with lower == upper are held fixed. Internally every free
/// variable is rescaled to [0,1] by its box width.
SolveResult solve_box_nlp(const ObjectiveFn& fn, std::span<const double> z0, const Box& box,
                          const SolveOptions& opts = {});

/// Receding-horizon warm start: every stage moves one step earlier and the
/// last stage is duplicated. An empty previous solution yields the mid-box
/// duties with omega = 0.5.
DecisionVector warm_start_shift(const DecisionVector& previous, const HorizonSpec& spec);

}  // namespace pnmpc

#endif  // PNMPC_NLP_SOLVER_HPP_
