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

#include "pnmpc/config.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"

namespace pnmpc {

using nlohmann::json;

void BenchConfig::validate() const {
  plant.validate();
  for (const MpcSettings* s : {&minmpc, &nmpc}) {
    if (s->N < 1) throw ConfigError("horizon N must be at least 1");
    if (!(s->dt > 0.0)) throw ConfigError("horizon dt must be positive");
    s->bounds.validate();
    s->solver.validate();
  }
  if (!(control_period > 0.0)) throw ConfigError("control_period must be positive");
  if (!(sine_duration > 0.0)) throw ConfigError("sine_duration must be positive");
  if (!(run.dt_sim > 0.0)) throw ConfigError("dt_sim must be positive");
}

BenchConfig default_config() {
  BenchConfig cfg;
  cfg.minmpc.bounds = InputBounds::from_dead_zones(cfg.plant);
  cfg.nmpc.bounds = cfg.minmpc.bounds;
  cfg.nmpc.weights = {1.0, 3e-4, 0.0};
  return cfg;
}

namespace {

json mpc_to_json(const MpcSettings& s) {
  return {{"N", s.N},
          {"dt", s.dt},
          {"q_e", s.weights.q_e},
          {"r_I", s.weights.r_I},
          {"lambda_bin", s.weights.lambda_bin},
          {"u_I_min", s.bounds.u_I_min},
          {"u_I_max", s.bounds.u_I_max},
          {"u_D_min", s.bounds.u_D_min},
          {"u_D_max", s.bounds.u_D_max}};
}

json pid_to_json(const DualPidGains& g) {
  return {{"kp_I", g.inflate.kp}, {"ki_I", g.inflate.ki}, {"kd_I", g.inflate.kd},
          {"kp_D", g.deflate.kp}, {"ki_D", g.deflate.ki}, {"kd_D", g.deflate.kd}};
}

json to_json(const BenchConfig& c) {
  const PlantParams& p = c.plant;
  json j;
  j["plant"] = {{"p_sup", p.p_sup / 1e3}, {"p_sink", p.p_sink / 1e3}, {"p_atm", p.p_atm / 1e3},
                {"gamma", p.gamma},        {"R", p.R},                  {"V", p.V},
                {"b", p.flow.b},           {"rho_ref", p.flow.rho_ref}, {"T_ref", p.flow.T_ref},
                {"T", p.flow.T},           {"c_so", p.cond.so},         {"c_os", p.cond.os},
                {"c_oa", p.cond.oa},       {"c_ao", p.cond.ao},         {"dz_I", p.dz_I},
                {"dz_D", p.dz_D}};
  j["minmpc"] = mpc_to_json(c.minmpc);
  j["nmpc"] = mpc_to_json(c.nmpc);
  j["pid_gentle"] = pid_to_json(c.pid_gentle);
  j["pid_aggressive"] = pid_to_json(c.pid_aggressive);
  const SolveOptions& o = c.minmpc.solver;
  j["solver"] = {{"max_iters", o.max_iters}, {"grad_tol", o.grad_tol},
                 {"step_tol", o.step_tol},   {"armijo_c", o.armijo_c},
                 {"memory", o.memory},       {"backtrack", o.backtrack}};
  j["simulation"] = {{"dt_sim", c.run.dt_sim},
                     {"control_period", c.control_period},
                     {"sine_duration", c.sine_duration}};
  return j;
}

double number(const json& v, const std::string& where) {
  if (!v.is_number()) throw ConfigError("config entry '" + where + "' must be a number");
  return v.get<double>();
}

int integer(const json& v, const std::string& where) {
  const double d = number(v, where);
  if (d != static_cast<double>(static_cast<int>(d))) {
    throw ConfigError("config entry '" + where + "' must be an integer");
  }
  return static_cast<int>(d);
}

BenchConfig from_json(const json& j) {
  if (!j.is_object()) throw ConfigError("config root must be a JSON object");
  // Overlay the supplied entries on the defaults; reject anything unknown.
  json merged = to_json(default_config());
  const bool bounds_given_min = j.contains("minmpc") && j["minmpc"].is_object() &&
                                (j["minmpc"].contains("u_I_min") || j["minmpc"].contains("u_D_min"));
  const bool bounds_given_n = j.contains("nmpc") && j["nmpc"].is_object() &&
                              (j["nmpc"].contains("u_I_min") || j["nmpc"].contains("u_D_min"));
  for (const auto& [section, body] : j.items()) {
    if (!merged.contains(section)) throw ConfigError("unknown config section '" + section + "'");
    if (!body.is_object()) throw ConfigError("config section '" + section + "' must be an object");
    for (const auto& [key, value] : body.items()) {
      if (!merged[section].contains(key)) {
        throw ConfigError("unknown config key '" + section + "." + key + "'");
      }
      merged[section][key] = value;
    }
  }

  BenchConfig c;
  const json& p = merged["plant"];
  auto pv = [&](const char* k) { return number(p[k], std::string("plant.") + k); };
  c.plant.p_sup = pv("p_sup") * 1e3;
  c.plant.p_sink = pv("p_sink") * 1e3;
  c.plant.p_atm = pv("p_atm") * 1e3;
  c.plant.gamma = pv("gamma");
  c.plant.R = pv("R");
  c.plant.V = pv("V");
  c.plant.flow = {pv("b"), pv("rho_ref"), pv("T_ref"), pv("T")};
  c.plant.cond = {pv("c_so"), pv("c_os"), pv("c_oa"), pv("c_ao")};
  c.plant.dz_I = pv("dz_I");
  c.plant.dz_D = pv("dz_D");

  const json& s = merged["solver"];
  SolveOptions opts;
  opts.max_iters = integer(s["max_iters"], "solver.max_iters");
  opts.grad_tol = number(s["grad_tol"], "solver.grad_tol");
  opts.step_tol = number(s["step_tol"], "solver.step_tol");
  opts.armijo_c = number(s["armijo_c"], "solver.armijo_c");
  opts.memory = integer(s["memory"], "solver.memory");
  opts.backtrack = number(s["backtrack"], "solver.backtrack");

  auto mpc = [&](const char* name, bool explicit_min) {
    const json& m = merged[name];
    auto mv = [&](const char* k) { return number(m[k], std::string(name) + "." + k); };
    MpcSettings out;
    out.N = integer(m["N"], std::string(name) + ".N");
    out.dt = mv("dt");
    out.weights = {mv("q_e"), mv("r_I"), mv("lambda_bin")};
    // Lower duty bounds follow the dead zones unless set explicitly.
    out.bounds = {explicit_min ? mv("u_I_min") : c.plant.dz_I, mv("u_I_max"),
                  explicit_min ? mv("u_D_min") : c.plant.dz_D, mv("u_D_max")};
    out.solver = opts;
    return out;
  };
  c.minmpc = mpc("minmpc", bounds_given_min);
  c.nmpc = mpc("nmpc", bounds_given_n);

  auto pid = [&](const char* name) {
    const json& g = merged[name];
    auto gv = [&](const char* k) { return number(g[k], std::string(name) + "." + k); };
    return DualPidGains{{gv("kp_I"), gv("ki_I"), gv("kd_I")}, {gv("kp_D"), gv("ki_D"), gv("kd_D")}};
  };
  c.pid_gentle = pid("pid_gentle");
  c.pid_aggressive = pid("pid_aggressive");

  const json& sim = merged["simulation"];
  c.run.dt_sim = number(sim["dt_sim"], "simulation.dt_sim");
  c.control_period = number(sim["control_period"], "simulation.control_period");
  c.sine_duration = number(sim["sine_duration"], "simulation.sine_duration");
  c.validate();
  return c;
}

std::pair<std::string, std::string> split_key(std::string_view dotted) {
  const auto dot = dotted.find('.');
  if (dot == std::string_view::npos) {
    throw ConfigError("config key '" + std::string(dotted) + "' must look like section.key");
  }
  return {std::string(dotted.substr(0, dot)), std::string(dotted.substr(dot + 1))};
}

}  // namespace

BenchConfig parse_config(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("malformed config: ") + e.what());
  }
  return from_json(j);
}

BenchConfig load_config(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open config '" + path + "'");
  std::stringstream ss;
  ss << is.rdbuf();
  return parse_config(ss.str());
}

std::string dump_config(const BenchConfig& cfg) { return to_json(cfg).dump(2) + "\n"; }

double config_get(const BenchConfig& cfg, std::string_view dotted_key) {
  const auto [section, key] = split_key(dotted_key);
  const json j = to_json(cfg);
  if (!j.contains(section) || !j[section].contains(key)) {
    throw ConfigError("unknown config key '" + std::string(dotted_key) + "'");
  }
  return j[section][key].get<double>();
}

void config_set(BenchConfig& cfg, std::string_view dotted_key, double value) {
  const auto [section, key] = split_key(dotted_key);
  json j = to_json(cfg);
  if (!j.contains(section) || !j[section].contains(key)) {
    throw ConfigError("unknown config key '" + std::string(dotted_key) + "'");
  }
  // Duty lower bounds that track a dead zone keep tracking it.
  if (section == "plant" && (key == "dz_I" || key == "dz_D")) {
    const std::string bound = key == "dz_I" ? "u_I_min" : "u_D_min";
    const double old_dz = j["plant"][key].get<double>();
    for (const char* mpc : {"minmpc", "nmpc"}) {
      if (j[mpc][bound].get<double>() == old_dz) j[mpc][bound] = value;
    }
  }
  j[section][key] = value;
  cfg = from_json(j);
}

std::unique_ptr<Controller> make_controller(std::string_view kind, const BenchConfig& cfg) {
  if (kind == "minmpc") return std::make_unique<MinmpcController>(cfg.plant, cfg.minmpc);
  if (kind == "nmpc") return std::make_unique<NmpcController>(cfg.plant, cfg.nmpc);
  if (kind == "pid-gentle") {
    return std::make_unique<PidController>(kind, cfg.pid_gentle, cfg.minmpc.bounds,
                                           cfg.control_period);
  }
  if (kind == "pid-aggressive") {
    return std::make_unique<PidController>(kind, cfg.pid_aggressive, cfg.minmpc.bounds,
                                           cfg.control_period);
  }
  throw ConfigError("unknown controller '" + std::string(kind) +
                    "' (expected minmpc, nmpc, pid-gentle or pid-aggressive)");
}

}  // namespace pnmpc
