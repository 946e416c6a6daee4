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

#ifndef PNMPC_BENCH_HPP_
#define PNMPC_BENCH_HPP_

#include <functional>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "pnmpc/controllers.hpp"
#include "pnmpc/params.hpp"

namespace pnmpc {

/// A reference profile in relative pressure (kPa above atmosphere).
struct Scenario {
  std::string name;
  double duration = 0.0;  // s
  std::function<double(double)> ref_kpa;
  double control_period = 0.02;  // s

  /// Reference at t, held at its final value past the end of the scenario.
  double reference_kpa(double t) const;
  int steps() const;
};

/// Plateaus 0, 40, 80, 120, 80, 40, 0, -40, -80, -40, 0 kPa of 2 s each.
Scenario step_scenario(double control_period = 0.02);

/// 40 sin(2 pi t) kPa.
Scenario sine_scenario(double duration = 5.0, double control_period = 0.02);

/// "step" or "sine"; throws ConfigError otherwise.
Scenario scenario_by_name(std::string_view name, double sine_duration = 5.0,
                          double control_period = 0.02);

/// Absolute-Pa references for t_now + (i+1) * control_period, i = 0..N-1.
std::vector<double> reference_window(const Scenario& scenario, double t_now, int N,
                                     double p_atm);

struct TraceRow {
  double t = 0.0;
  double p_out_kPa_rel = 0.0;
  double p_ref_kPa_rel = 0.0;
  double e_kPa = 0.0;
  int mode = 1;
  double u_applied = 0.0;
  double u_I = 0.0;
  double u_D = 0.0;
  double omega_rel = 0.0;
  double solve_ms = 0.0;
};

struct RunTrace {
  std::vector<TraceRow> rows;
};

struct RunOptions {
  double dt_sim = 1e-3;       // Euler sub-step of the plant
  bool record_timing = true;  // false writes solve_ms = 0 for byte-stable traces
};

/// Closed loop from p_out = p_atm at t = 0. Throws std::runtime_error if the
/// plant state becomes non-finite.
RunTrace run_closed_loop(const Scenario& scenario, Controller& controller,
                         const PlantParams& params, const RunOptions& opts = {});

struct Metrics {
  double aae = 0.0;        // kPa
  double max_abs_e = 0.0;  // kPa
  int switches = 0;
  double pwm_energy = 0.0;  // % s
  double act_ms = 0.0;
};

Metrics compute_metrics(const RunTrace& trace, double control_period);

/// Metrics with the control period taken from the first two timestamps.
Metrics compute_metrics(const RunTrace& trace);

inline constexpr std::string_view kTraceHeader =
    "t,p_out_kPa_rel,p_ref_kPa_rel,e_kPa,mode,u_applied,u_I,u_D,omega_rel,solve_ms";

void write_csv(const RunTrace& trace, std::ostream& os);
void write_csv(const RunTrace& trace, const std::string& path);

/// Parses a trace; throws ConfigError naming the offending column or line.
RunTrace read_csv(std::istream& is);
RunTrace read_csv(const std::string& path);

}  // namespace pnmpc

#endif  // PNMPC_BENCH_HPP_
