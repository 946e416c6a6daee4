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

// Command-line front end. Talks to the library only through the C API.

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "pnmpc/pnmpc.h"

namespace fs = std::filesystem;

namespace {

struct ConfigDeleter {
  void operator()(pnmpc_config* c) const { pnmpc_config_destroy(c); }
};
struct TraceDeleter {
  void operator()(pnmpc_trace* t) const { pnmpc_trace_destroy(t); }
};
using ConfigPtr = std::unique_ptr<pnmpc_config, ConfigDeleter>;
using TracePtr = std::unique_ptr<pnmpc_trace, TraceDeleter>;

class CliFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

void check(pnmpc_status st, const std::string& what) {
  if (st != PNMPC_OK) {
    throw CliFailure(what + ": " + pnmpc_status_string(st) + ": " + pnmpc_last_error());
  }
}

ConfigPtr open_config(const std::string& path, const std::vector<std::string>& overrides) {
  pnmpc_config* raw = nullptr;
  if (path.empty()) {
    check(pnmpc_config_create_default(&raw), "default config");
  } else {
    check(pnmpc_config_load(path.c_str(), &raw), "config '" + path + "'");
  }
  ConfigPtr cfg(raw);
  for (const std::string& kv : overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw CliFailure("--set expects section.key=value, got '" + kv + "'");
    const std::string key = kv.substr(0, eq);
    double value = 0.0;
    try {
      value = std::stod(kv.substr(eq + 1));
    } catch (const std::exception&) {
      throw CliFailure("--set " + key + ": value is not a number");
    }
    check(pnmpc_config_set(cfg.get(), key.c_str(), value), "--set " + key);
  }
  return cfg;
}

TracePtr load_trace(const std::string& path) {
  pnmpc_trace* raw = nullptr;
  check(pnmpc_trace_load_csv(path.c_str(), &raw), "trace '" + path + "'");
  return TracePtr(raw);
}

pnmpc_metrics metrics_of(const pnmpc_trace* trace, const std::string& label) {
  pnmpc_metrics m{};
  check(pnmpc_trace_metrics(trace, &m), "metrics of " + label);
  return m;
}

void print_metrics_csv(const pnmpc_metrics& m) {
  std::printf("aae,max_abs_e,switches,pwm_energy,act_ms\n");
  std::printf("%.9g,%.9g,%ld,%.9g,%.9g\n", m.aae, m.max_abs_e, m.switches, m.pwm_energy,
              m.act_ms);
}

// "<controller>_<scenario>.csv" -> (scenario, controller); otherwise the
// whole stem is the label and the scenario is unknown.
std::pair<std::string, std::string> label_of(const fs::path& p) {
  const std::string stem = p.stem().string();
  for (const char* sc : {"step", "sine"}) {
    const std::string suffix = std::string("_") + sc;
    if (stem.size() > suffix.size() &&
        stem.compare(stem.size() - suffix.size(), suffix.size(), suffix) == 0) {
      return {sc, stem.substr(0, stem.size() - suffix.size())};
    }
  }
  return {"-", stem};
}

int cmd_run(const std::string& controller, const std::string& scenario,
            const std::string& config_path, const std::vector<std::string>& overrides,
            const std::string& out, bool no_timing) {
  const ConfigPtr cfg = open_config(config_path, overrides);
  pnmpc_trace* raw = nullptr;
  check(pnmpc_run(cfg.get(), controller.c_str(), scenario.c_str(), no_timing ? 0 : 1, &raw),
        "run " + controller + " on " + scenario);
  const TracePtr trace(raw);
  check(pnmpc_trace_save_csv(trace.get(), out.c_str()), "write '" + out + "'");
  const pnmpc_metrics m = metrics_of(trace.get(), out);
  std::fprintf(stderr,
               "%s/%s: %zu rows, AAE %.2f kPa, max|e| %.2f kPa, %ld switches, "
               "PWM-E %.1f %%s, ACT %.3f ms -> %s\n",
               controller.c_str(), scenario.c_str(), pnmpc_trace_rows(trace.get()), m.aae,
               m.max_abs_e, m.switches, m.pwm_energy, m.act_ms, out.c_str());
  return 0;
}

int cmd_metrics(const std::string& in) {
  const TracePtr trace = load_trace(in);
  print_metrics_csv(metrics_of(trace.get(), in));
  return 0;
}

int cmd_compare(const std::string& dir) {
  if (!fs::is_directory(dir)) throw CliFailure("'" + dir + "' is not a directory");
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".csv") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  if (files.empty()) throw CliFailure("no .csv traces in '" + dir + "'");

  std::map<std::string, std::vector<std::pair<std::string, pnmpc_metrics>>> by_scenario;
  for (const fs::path& f : files) {
    const TracePtr trace = load_trace(f.string());
    const auto [scenario, label] = label_of(f);
    by_scenario[scenario].emplace_back(label, metrics_of(trace.get(), f.string()));
  }
  for (const auto& [scenario, rows] : by_scenario) {
    std::printf("Scenario: %s\n", scenario.c_str());
    std::printf("%-16s %10s %12s %9s %14s %12s\n", "Controller", "AAE[kPa]", "Max|e|[kPa]",
                "Switches", "PWM-E[%s]", "ACT[ms]");
    for (const auto& [label, m] : rows) {
      std::printf("%-16s %10.2f %12.2f %9ld %14.1f %12.5f\n", label.c_str(), m.aae, m.max_abs_e,
                  m.switches, m.pwm_energy, m.act_ms);
    }
    std::printf("\n");
  }
  return 0;
}

int cmd_config(const std::string& config_path, const std::vector<std::string>& overrides) {
  const ConfigPtr cfg = open_config(config_path, overrides);
  size_t needed = 0;
  check(pnmpc_config_dump(cfg.get(), nullptr, 0, &needed), "dump config");
  std::string buf(needed, '\0');
  check(pnmpc_config_dump(cfg.get(), buf.data(), buf.size(), &needed), "dump config");
  std::fputs(buf.c_str(), stdout);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Positive/negative pressure MPC benchmark"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(pnmpc_version()));

  std::string controller;
  std::string scenario;
  std::string config_path;
  std::string out;
  std::vector<std::string> overrides;
  bool no_timing = false;
  auto* run = app.add_subcommand("run", "Run one controller on one scenario and write a CSV trace");
  run->add_option("--controller", controller, "Controller")
      ->required()
      ->check(CLI::IsMember({"minmpc", "nmpc", "pid-gentle", "pid-aggressive"}));
  run->add_option("--scenario", scenario, "Reference scenario")
      ->required()
      ->check(CLI::IsMember({"step", "sine"}));
  run->add_option("--config", config_path, "JSON config (defaults when omitted)");
  run->add_option("--set", overrides, "Override a config entry, section.key=value");
  run->add_option("--out", out, "Output CSV path")->required();
  run->add_flag("--no-timing", no_timing, "Write solve_ms = 0 for byte-stable traces");

  std::string in;
  auto* metrics = app.add_subcommand("metrics", "Print the summary metrics of a CSV trace");
  metrics->add_option("--in", in, "Trace CSV")->required();

  std::string dir;
  auto* compare = app.add_subcommand("compare", "Tabulate metrics of every CSV in a directory");
  compare->add_option("--dir", dir, "Directory of <controller>_<scenario>.csv traces")->required();

  auto* config = app.add_subcommand("config", "Print the effective configuration as JSON");
  config->add_option("--config", config_path, "JSON config (defaults when omitted)");
  config->add_option("--set", overrides, "Override a config entry, section.key=value");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) return cmd_run(controller, scenario, config_path, overrides, out, no_timing);
    if (*metrics) return cmd_metrics(in);
    if (*compare) return cmd_compare(dir);
    if (*config) return cmd_config(config_path, overrides);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 1;
}
