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

#include <cmath>
#include <filesystem>
#include <sstream>

#include "doctest.h"
#include "pnmpc/bench.hpp"
#include "pnmpc/config.hpp"

using namespace pnmpc;

namespace {

const PlantParams kPlant{};

std::string csv_of(const RunTrace& t) {
  std::ostringstream os;
  write_csv(t, os);
  return os.str();
}

RunTrace rows_with_error(std::initializer_list<double> e, std::initializer_list<int> modes = {}) {
  RunTrace t;
  int k = 0;
  for (double v : e) {
    TraceRow r;
    r.t = 0.02 * k++;
    r.e_kPa = v;
    t.rows.push_back(r);
  }
  k = 0;
  for (int m : modes) t.rows[k++].mode = m;
  return t;
}

}  // namespace

TEST_CASE("scenarios") {
  const Scenario s = step_scenario();
  CHECK(s.steps() == 1100);
  CHECK(s.reference_kpa(0.0) == 0.0);
  CHECK(s.reference_kpa(1.999) == 0.0);
  CHECK(s.reference_kpa(2.0) == 40.0);
  CHECK(s.reference_kpa(6.5) == 120.0);
  CHECK(s.reference_kpa(16.0) == -80.0);
  CHECK(s.reference_kpa(21.99) == 0.0);
  CHECK(s.reference_kpa(100.0) == 0.0);

  const Scenario sine = sine_scenario();
  CHECK(sine.steps() == 250);
  CHECK(sine.reference_kpa(0.25) == doctest::Approx(40.0));
  CHECK(scenario_by_name("sine", 3.0).steps() == 150);
  CHECK_THROWS_AS(scenario_by_name("ramp"), ConfigError);
}

TEST_CASE("reference window") {
  const std::vector<double> w0 = reference_window(step_scenario(), 0.0, 10, kPlant.p_atm);
  CHECK(w0 == std::vector<double>(10, kPlant.p_atm));

  const std::vector<double> ws = reference_window(sine_scenario(), 0.0, 10, kPlant.p_atm);
  CHECK(ws[0] == doctest::Approx(100000 + 5013.3).epsilon(1e-5));

  const std::vector<double> edge = reference_window(step_scenario(), 1.9, 10, kPlant.p_atm);
  CHECK(edge[3] == kPlant.p_atm);          // t = 1.98
  CHECK(edge[4] == kPlant.p_atm + 40000);  // t = 2.00

  // Sine ends at sin(10 pi) = 0 and is held there.
  for (double v : reference_window(sine_scenario(), 7.0, 5, kPlant.p_atm)) {
    CHECK(v == doctest::Approx(kPlant.p_atm).epsilon(1e-12));
  }
  const std::vector<double> past = reference_window(step_scenario(), 30.0, 4, kPlant.p_atm);
  CHECK(past == std::vector<double>(4, kPlant.p_atm));
}

TEST_CASE("metrics") {
  const Metrics m = compute_metrics(rows_with_error({2, -2, 2, 2}), 0.02);
  CHECK(m.aae == 2.0);
  CHECK(m.max_abs_e == 2.0);

  CHECK(compute_metrics(rows_with_error({0, 0, 0, 0}, {1, 1, 0, 1}), 0.02).switches == 2);

  RunTrace e;
  for (int k = 0; k < 100; ++k) {
    TraceRow r;
    r.t = 0.02 * k;
    r.u_applied = 50.0;
    r.solve_ms = k % 2 ? 3.0 : 1.0;
    e.rows.push_back(r);
  }
  const Metrics me = compute_metrics(e);
  CHECK(me.pwm_energy == doctest::Approx(100.0));
  CHECK(me.act_ms == doctest::Approx(2.0));
  CHECK_THROWS(compute_metrics(RunTrace{}, 0.02));
}

TEST_CASE("closed loop basics") {
  const BenchConfig cfg = default_config();
  const Scenario zero{"zero", 1.0, [](double) { return 0.0; }, 0.02};
  auto pid = make_controller("pid-gentle", cfg);
  const RunTrace t = run_closed_loop(zero, *pid, cfg.plant);
  CHECK(t.rows.size() == 50);
  for (const TraceRow& r : t.rows) {
    CHECK(r.mode == 1);
    CHECK(r.e_kPa == 0.0);
  }

  auto gentle = make_controller("pid-gentle", cfg);
  const RunTrace step = run_closed_loop(step_scenario(), *gentle, cfg.plant);
  CHECK(step.rows.size() == 1100);
  for (std::size_t k = 1; k < step.rows.size(); ++k) CHECK(step.rows[k].t > step.rows[k - 1].t);
  // The logged error uses the reference at the same instant.
  for (const TraceRow& r : step.rows) {
    CHECK(r.e_kPa == doctest::Approx(r.p_ref_kPa_rel - r.p_out_kPa_rel).epsilon(1e-9));
    CHECK(r.u_applied == (r.mode == 1 ? r.u_I : r.u_D));
  }
}

TEST_CASE("identical runs give byte-identical traces") {
  const BenchConfig cfg = default_config();
  RunOptions opts;
  opts.record_timing = false;
  for (std::string_view kind : kControllerNames) {
    auto a = make_controller(kind, cfg);
    auto b = make_controller(kind, cfg);
    const Scenario s = sine_scenario(1.0);
    CHECK(csv_of(run_closed_loop(s, *a, cfg.plant, opts)) ==
          csv_of(run_closed_loop(s, *b, cfg.plant, opts)));
  }
  // Reusing an instance restarts it from scratch.
  auto c = make_controller("minmpc", cfg);
  const std::string first = csv_of(run_closed_loop(sine_scenario(1.0), *c, cfg.plant, opts));
  CHECK(first == csv_of(run_closed_loop(sine_scenario(1.0), *c, cfg.plant, opts)));
}

TEST_CASE("csv round trip and schema errors") {
  const BenchConfig cfg = default_config();
  auto pid = make_controller("pid-aggressive", cfg);
  const RunTrace t = run_closed_loop(sine_scenario(1.0), *pid, cfg.plant);
  const std::string text = csv_of(t);
  CHECK(text.substr(0, text.find('\n')) == kTraceHeader);
  std::istringstream is(text);
  const RunTrace back = read_csv(is);
  REQUIRE(back.rows.size() == t.rows.size());
  const Metrics m1 = compute_metrics(t), m2 = compute_metrics(back);
  CHECK(m2.aae == doctest::Approx(m1.aae).epsilon(1e-8));
  CHECK(m2.switches == m1.switches);
  CHECK(csv_of(back) == text);

  auto parse = [](std::string s) {
    std::istringstream in(s);
    return read_csv(in);
  };
  const std::string h = std::string(kTraceHeader) + "\n";
  CHECK_THROWS_AS(parse(""), ConfigError);
  CHECK_THROWS_AS(parse("t,p_out\n0,1\n"), ConfigError);
  CHECK_THROWS_AS(parse(h + "0,0,0,0,1,20,20,25,1\n"), ConfigError);
  CHECK_THROWS_AS(parse(h + "0,0,0,0,2,20,20,25,1,0\n"), ConfigError);
  CHECK_THROWS_AS(parse(h + "0,0,0,x,1,20,20,25,1,0\n"), ConfigError);
  CHECK_THROWS_AS(parse(h + "0.02,0,0,0,1,20,20,25,1,0\n0.02,0,0,0,1,20,20,25,1,0\n"),
                  ConfigError);
  CHECK(parse(h + "0,0,0,0,1,20,20,25,1,0\n").rows.size() == 1);
}

TEST_CASE("config") {
  BenchConfig cfg = default_config();
  CHECK(cfg.minmpc.N == 10);
  CHECK(cfg.nmpc.weights.r_I == 3e-4);
  CHECK(cfg.nmpc.weights.lambda_bin == 0.0);
  CHECK(config_get(cfg, "plant.p_sup") == 300.0);
  config_set(cfg, "plant.p_sup", 350.0);
  CHECK(cfg.plant.p_sup == 350e3);
  config_set(cfg, "plant.dz_I", 15.0);
  CHECK(cfg.minmpc.bounds.u_I_min == 15.0);
  CHECK(cfg.nmpc.bounds.u_I_min == 15.0);
  CHECK_THROWS_AS(config_set(cfg, "plant.nope", 1.0), ConfigError);
  CHECK_THROWS_AS(config_set(cfg, "minmpc.N", 0.0), ConfigError);
  CHECK_THROWS_AS(config_get(cfg, "solver"), ConfigError);

  const BenchConfig round = parse_config(dump_config(cfg));
  CHECK(dump_config(round) == dump_config(cfg));

  CHECK(parse_config("{}").minmpc.weights.lambda_bin == 100.0);
  CHECK(parse_config(R"({"minmpc": {"N": 4}})").minmpc.N == 4);
  CHECK_THROWS_AS(parse_config(R"({"minmpc": {"Nope": 4}})"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"bogus": {}})"), ConfigError);
  CHECK_THROWS_AS(parse_config("{not json"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"plant": {"p_sink": 200}})"), ConfigError);
  CHECK_THROWS_AS(load_config("/nonexistent/pnmpc.json"), ConfigError);

  const std::string shipped = std::string(PNMPC_SOURCE_DIR) + "/configs/default.json";
  REQUIRE(std::filesystem::exists(shipped));
  CHECK(dump_config(load_config(shipped)) == dump_config(default_config()));

  CHECK_THROWS_AS(make_controller("lqr", default_config()), ConfigError);
  for (std::string_view kind : kControllerNames) {
    CHECK(make_controller(kind, default_config())->name() == kind);
  }
}
