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

#include "pnmpc/bench.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "pnmpc/plant.hpp"

namespace pnmpc {

double Scenario::reference_kpa(double t) const { return ref_kpa(std::min(t, duration)); }

int Scenario::steps() const { return static_cast<int>(std::lround(duration / control_period)); }

Scenario step_scenario(double control_period) {
  static constexpr std::array<double, 11> kPlateaus = {0, 40, 80, 120, 80, 40, 0, -40, -80, -40, 0};
  constexpr double kHold = 2.0;
  Scenario s;
  s.name = "step";
  s.duration = kHold * kPlateaus.size();
  s.control_period = control_period;
  s.ref_kpa = [](double t) {
    // The small offset keeps k * 0.02 landing on the plateau it names.
    const auto idx = static_cast<long>(std::floor(t / kHold + 1e-9));
    return kPlateaus[static_cast<std::size_t>(std::clamp(idx, 0L, 10L))];
  };
  return s;
}

Scenario sine_scenario(double duration, double control_period) {
  Scenario s;
  s.name = "sine";
  s.duration = duration;
  s.control_period = control_period;
  s.ref_kpa = [](double t) { return 40.0 * std::sin(2.0 * std::numbers::pi * t); };
  return s;
}

Scenario scenario_by_name(std::string_view name, double sine_duration, double control_period) {
  if (name == "step") return step_scenario(control_period);
  if (name == "sine") return sine_scenario(sine_duration, control_period);
  throw ConfigError("unknown scenario '" + std::string(name) + "' (expected step or sine)");
}

std::vector<double> reference_window(const Scenario& scenario, double t_now, int N,
                                     double p_atm) {
  std::vector<double> w(static_cast<std::size_t>(std::max(N, 0)));
  for (int i = 0; i < N; ++i) {
    const double t = t_now + (i + 1) * scenario.control_period;
    w[i] = p_atm + kPascalPerKilopascal * scenario.reference_kpa(t);
  }
  return w;
}

RunTrace run_closed_loop(const Scenario& scenario, Controller& controller,
                         const PlantParams& params, const RunOptions& opts) {
  params.validate();
  if (!(scenario.duration > 0.0)) throw ConfigError("scenario duration must be positive");
  hold_substeps(scenario.control_period, opts.dt_sim);

  controller.reset();
  RunTrace trace;
  const int steps = scenario.steps();
  trace.rows.reserve(static_cast<std::size_t>(steps));
  PlantState state{params.p_atm, 0.0};

  for (int k = 0; k < steps; ++k) {
    const double t = k * scenario.control_period;
    const double ref_now = params.p_atm + kPascalPerKilopascal * scenario.reference_kpa(t);
    const std::vector<double> window =
        reference_window(scenario, t, controller.horizon(), params.p_atm);

    const ControlAction a = controller.step({t, state.p_out, ref_now, window});

    TraceRow row;
    row.t = t;
    row.p_out_kPa_rel = (state.p_out - params.p_atm) / kPascalPerKilopascal;
    row.p_ref_kPa_rel = (ref_now - params.p_atm) / kPascalPerKilopascal;
    row.e_kPa = (ref_now - state.p_out) / kPascalPerKilopascal;
    row.mode = to_int(a.mode);
    row.u_applied = a.u_applied;
    row.u_I = a.u_I;
    row.u_D = a.u_D;
    row.omega_rel = a.omega_rel;
    row.solve_ms = opts.record_timing ? a.solve_ms : 0.0;
    trace.rows.push_back(row);

    state = simulate_hold(state, a.mode, a.u_applied, scenario.control_period, opts.dt_sim,
                          params);
    if (!std::isfinite(state.p_out)) {
      throw std::runtime_error("plant state became non-finite at t = " + std::to_string(t) +
                               " s (controller " + std::string(controller.name()) + ")");
    }
  }
  return trace;
}

Metrics compute_metrics(const RunTrace& trace, double control_period) {
  if (trace.rows.empty()) throw ConfigError("cannot compute metrics of an empty trace");
  Metrics m;
  double sum_abs = 0.0;
  double sum_ms = 0.0;
  for (std::size_t k = 0; k < trace.rows.size(); ++k) {
    const TraceRow& r = trace.rows[k];
    sum_abs += std::abs(r.e_kPa);
    m.max_abs_e = std::max(m.max_abs_e, std::abs(r.e_kPa));
    if (k > 0 && r.mode != trace.rows[k - 1].mode) ++m.switches;
    m.pwm_energy += r.u_applied * control_period;
    sum_ms += r.solve_ms;
  }
  const auto n = static_cast<double>(trace.rows.size());
  m.aae = sum_abs / n;
  m.act_ms = sum_ms / n;
  return m;
}

Metrics compute_metrics(const RunTrace& trace) {
  double period = 0.02;
  if (trace.rows.size() >= 2) period = trace.rows[1].t - trace.rows[0].t;
  return compute_metrics(trace, period);
}

void write_csv(const RunTrace& trace, std::ostream& os) {
  os << kTraceHeader << '\n';
  char buf[512];
  for (const TraceRow& r : trace.rows) {
    std::snprintf(buf, sizeof buf, "%.9g,%.9g,%.9g,%.9g,%d,%.9g,%.9g,%.9g,%.9g,%.9g\n", r.t,
                  r.p_out_kPa_rel, r.p_ref_kPa_rel, r.e_kPa, r.mode, r.u_applied, r.u_I, r.u_D,
                  r.omega_rel, r.solve_ms);
    os << buf;
  }
}

void write_csv(const RunTrace& trace, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw ConfigError("cannot open '" + path + "' for writing");
  write_csv(trace, os);
  if (!os) throw ConfigError("failed writing '" + path + "'");
}

namespace {

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double parse_number(const std::string& cell, std::string_view column, std::size_t line_no) {
  try {
    std::size_t used = 0;
    const double v = std::stod(cell, &used);
    if (used != cell.size()) throw std::invalid_argument(cell);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("line " + std::to_string(line_no) + ": column '" + std::string(column) +
                      "' is not a number: '" + cell + "'");
  }
}

}  // namespace

RunTrace read_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw ConfigError("empty trace file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const std::vector<std::string> header = split(line);
  const std::vector<std::string> expected = split(std::string(kTraceHeader));
  for (std::size_t i = 0; i < expected.size(); ++i) {
    if (i >= header.size()) throw ConfigError("trace header is missing column '" + expected[i] + "'");
    if (header[i] != expected[i]) {
      throw ConfigError("trace header column " + std::to_string(i + 1) + " is '" + header[i] +
                        "', expected '" + expected[i] + "'");
    }
  }
  if (header.size() != expected.size()) {
    throw ConfigError("trace header has unexpected column '" + header[expected.size()] + "'");
  }

  RunTrace trace;
  std::size_t line_no = 1;
  while (std::getline(is, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::vector<std::string> c = split(line);
    if (c.size() != expected.size()) {
      throw ConfigError("line " + std::to_string(line_no) + " has " + std::to_string(c.size()) +
                        " fields, expected " + std::to_string(expected.size()));
    }
    TraceRow r;
    r.t = parse_number(c[0], expected[0], line_no);
    r.p_out_kPa_rel = parse_number(c[1], expected[1], line_no);
    r.p_ref_kPa_rel = parse_number(c[2], expected[2], line_no);
    r.e_kPa = parse_number(c[3], expected[3], line_no);
    const double mode = parse_number(c[4], expected[4], line_no);
    if (mode != 0.0 && mode != 1.0) {
      throw ConfigError("line " + std::to_string(line_no) + ": column 'mode' must be 0 or 1");
    }
    r.mode = static_cast<int>(mode);
    r.u_applied = parse_number(c[5], expected[5], line_no);
    r.u_I = parse_number(c[6], expected[6], line_no);
    r.u_D = parse_number(c[7], expected[7], line_no);
    r.omega_rel = parse_number(c[8], expected[8], line_no);
    r.solve_ms = parse_number(c[9], expected[9], line_no);
    if (!trace.rows.empty() && !(r.t > trace.rows.back().t)) {
      throw ConfigError("line " + std::to_string(line_no) + ": column 't' is not increasing");
    }
    trace.rows.push_back(r);
  }
  return trace;
}

RunTrace read_csv(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open trace '" + path + "'");
  return read_csv(is);
}

}  // namespace pnmpc
