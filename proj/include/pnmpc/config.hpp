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

#ifndef PNMPC_CONFIG_HPP_
#define PNMPC_CONFIG_HPP_

// Benchmark configuration: plant parameters, controller weights and gains,
// solver options and simulation settings. Stored as JSON with one object per
// section; pressures in the "plant" section are kPa (absolute) and are
// converted to Pa on load. Missing keys keep their defaults, unknown keys
// are rejected.

#include <memory>
#include <string>
#include <string_view>

#include "pnmpc/bench.hpp"
#include "pnmpc/controllers.hpp"
#include "pnmpc/params.hpp"

namespace pnmpc {

struct BenchConfig {
  PlantParams plant;
  MpcSettings minmpc;
  MpcSettings nmpc;
  DualPidGains pid_gentle = DualPidGains::gentle();
  DualPidGains pid_aggressive = DualPidGains::aggressive();
  RunOptions run;
  double control_period = 0.02;
  double sine_duration = 5.0;

  void validate() const;
};

BenchConfig default_config();
BenchConfig parse_config(std::string_view json_text);
BenchConfig load_config(const std::string& path);
std::string dump_config(const BenchConfig& cfg);

/// Reads a numeric entry addressed as "section.key", e.g. "plant.p_sup".
double config_get(const BenchConfig& cfg, std::string_view dotted_key);

/// Sets a numeric entry and re-validates; throws ConfigError on unknown keys.
void config_set(BenchConfig& cfg, std::string_view dotted_key, double value);

inline constexpr std::string_view kControllerNames[] = {"minmpc", "nmpc", "pid-gentle",
                                                        "pid-aggressive"};

std::unique_ptr<Controller> make_controller(std::string_view kind, const BenchConfig& cfg);

}  // namespace pnmpc

#endif  // PNMPC_CONFIG_HPP_
