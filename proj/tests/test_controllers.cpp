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
#include <limits>
#include <random>

#include "doctest.h"
#include "pnmpc/controllers.hpp"

using namespace pnmpc;

namespace {

const PlantParams kPlant{};

MpcSettings settings(int N, CostWeights w = {}) {
  MpcSettings s;
  s.N = N;
  s.weights = w;
  s.bounds = InputBounds::from_dead_zones(kPlant);
  return s;
}

}  // namespace

TEST_CASE("heuristic mode and rounding") {
  CHECK(heuristic_mode(5000) == Mode::inflation);
  CHECK(heuristic_mode(0) == Mode::inflation);
  CHECK(heuristic_mode(-1) == Mode::deflation);
  CHECK(round_omega(0.5) == Mode::inflation);
  CHECK(round_omega(0.49) == Mode::deflation);
  CHECK(round_omega(1.0) == Mode::inflation);
  CHECK(round_omega(0.0) == Mode::deflation);
}

TEST_CASE("input cost is minimized at the lower bounds when tracking is perfect") {
  // N=2 grid: with ref == p == p_atm every admissible fixed-mode pair costs at
  // least the dead-zone edge value.
  HorizonSpec spec;
  spec.N = 2;
  spec.p0 = kPlant.p_atm;
  spec.p_ref = {kPlant.p_atm, kPlant.p_atm};
  spec.bounds = InputBounds::from_dead_zones(kPlant);
  for (int mode : {0, 1}) {
    const Box box = fixed_mode_box(spec, std::vector<int>{mode, mode});
    const double at_lower = objective(spec, box.lower, kPlant);
    std::vector<double> z = box.lower;
    const int u0 = mode == 1 ? 0 : 2;
    for (int i = 0; i <= 20; ++i)
      for (int j = 0; j <= 20; ++j) {
        z[u0] = box.lower[u0] + (box.upper[u0] - box.lower[u0]) * i / 20;
        z[u0 + 1] = box.lower[u0 + 1] + (box.upper[u0 + 1] - box.lower[u0 + 1]) * j / 20;
        CHECK(objective(spec, z, kPlant) >= at_lower);
      }
  }

  MinmpcController c(kPlant, settings(10));
  const std::vector<double> window(10, kPlant.p_atm);
  const auto [a, sol] = c.solve(kPlant.p_atm, window);
  const double lo = a.mode == Mode::inflation ? 20.0 : 25.0;
  CHECK(a.u_applied == doctest::Approx(lo).epsilon(1e-6));
  CHECK(std::isfinite(sol.J));
  CHECK(!a.degraded);
}

TEST_CASE("minmpc chooses inflation for a reference far above") {
  MinmpcController c(kPlant, settings(10));
  const std::vector<double> window(10, kPlant.p_atm + 80000);
  const auto [a, sol] = c.solve(kPlant.p_atm, window);
  CHECK(a.mode == Mode::inflation);
  CHECK(a.u_applied == a.u_I);
  CHECK(a.u_applied > 90.0);
  CHECK(sol.modes.size() == 10);
  CHECK(sol.states.size() == 10);
  CHECK(sol.J_relaxed <= sol.J + 1e-6);
}

TEST_CASE("minmpc chooses deflation for a reference far below") {
  MinmpcController c(kPlant, settings(10));
  const std::vector<double> window(10, kPlant.p_atm - 60000);
  const auto [a, sol] = c.solve(kPlant.p_atm, window);
  CHECK(a.mode == Mode::deflation);
  CHECK(a.u_applied == a.u_D);
}

TEST_CASE("minmpc against brute force on random N=3 instances") {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> p(40e3, 220e3);
  std::uniform_real_distribution<double> d(-40e3, 40e3);
  for (int trial = 0; trial < 20; ++trial) {
    const double p0 = p(rng);
    std::vector<double> window(3);
    for (double& r : window) r = std::clamp(p0 + d(rng), 20e3, 290e3);
    MinmpcController c(kPlant, settings(3));
    const auto [a, sol] = c.solve(p0, window);
    const HorizonSpec spec = settings(3).horizon(p0, window);
    const MiocpOptimum opt = brute_force_miocp(spec, kPlant);
    const SolveResult relaxed = relaxed_nlp_optimum(spec, kPlant);
    CHECK_MESSAGE(relaxed.J_opt <= opt.J + 1e-4, "trial " << trial);
    CHECK(relaxed.J_opt <= sol.J_relaxed + 1e-9);
    CHECK_MESSAGE(sol.J <= 1.10 * opt.J + 1e-9, "trial " << trial << " J " << sol.J << " J* " << opt.J);
    CHECK(sol.J_relaxed <= sol.J + 1e-6);
  }
}

TEST_CASE("brute force examples") {
  HorizonSpec one = settings(1).horizon(kPlant.p_atm, std::vector<double>{kPlant.p_atm + 50000});
  CHECK(brute_force_miocp(one, kPlant).modes == std::vector<int>{1});

  HorizonSpec two = settings(2).horizon(kPlant.p_atm, std::vector<double>(2, kPlant.p_atm));
  const MiocpOptimum flat = brute_force_miocp(two, kPlant);
  // Only the dead-zone edge input cost remains.
  CHECK(flat.J == doctest::Approx(2 * 1e-2 * 20 * 20).epsilon(1e-9));

  HorizonSpec seven = settings(7).horizon(kPlant.p_atm, std::vector<double>(7, kPlant.p_atm));
  CHECK_THROWS_AS(brute_force_miocp(seven, kPlant), ConfigError);
}

TEST_CASE("nmpc keeps one mode over the whole horizon") {
  NmpcController c(kPlant, settings(10, {1.0, 3e-4, 0.0}));
  // Zero error now, reference rising then falling within the horizon.
  std::vector<double> window = {110e3, 120e3, 130e3, 120e3, 100e3, 80e3, 70e3, 70e3, 70e3, 70e3};
  const auto [a, sol] = c.solve(kPlant.p_atm, kPlant.p_atm, window);
  CHECK(a.mode == Mode::inflation);
  for (int m : sol.modes) CHECK(m == 1);
  for (double w : sol.z.omega) CHECK(w == 1.0);

  const auto [b, sol2] = c.solve(120e3, 110e3, window);
  CHECK(b.mode == Mode::deflation);
  for (int m : sol2.modes) CHECK(m == 0);
}

TEST_CASE("nmpc and minmpc agree when rounding yields the heuristic mode throughout") {
  const std::vector<double> window(10, kPlant.p_atm + 80000);
  MinmpcController mi(kPlant, settings(10));
  NmpcController nm(kPlant, settings(10));
  const auto [a, sa] = mi.solve(kPlant.p_atm, window);
  REQUIRE(sa.modes == std::vector<int>(10, 1));
  const auto [b, sb] = nm.solve(kPlant.p_atm, kPlant.p_atm + 80000, window);
  CHECK(b.mode == a.mode);
  CHECK(b.u_applied == doctest::Approx(a.u_applied).epsilon(1e-3));
}

TEST_CASE("pid examples") {
  const InputBounds bounds = InputBounds::from_dead_zones(kPlant);
  const DualPidGains gentle = DualPidGains::gentle();

  auto [a, s] = pid_step(kPlant.p_atm, kPlant.p_atm + 10000, {}, gentle, 0.02, bounds);
  CHECK(a.mode == Mode::inflation);
  CHECK(a.u_applied == doctest::Approx(36.0));
  CHECK(s.z == doctest::Approx(200.0));

  // Zero raw command maps onto the dead-zone edge.
  auto [b, s2] = pid_step(kPlant.p_atm, kPlant.p_atm, {}, gentle, 0.02, bounds);
  CHECK(b.u_applied == 20.0);
  CHECK(b.mode == Mode::inflation);

  // Saturated raw command maps onto u_max.
  auto [c, s3] = pid_step(kPlant.p_atm, kPlant.p_atm + 200000, {}, gentle, 0.02, bounds);
  CHECK(c.u_applied == 100.0);

  // Deflation uses its own gains on the sign-flipped error: 0.010 * 2000 = 20.
  auto [d, s4] = pid_step(kPlant.p_atm, kPlant.p_atm - 2000, {}, gentle, 0.02, bounds);
  CHECK(d.mode == Mode::deflation);
  CHECK(d.u_applied == doctest::Approx(25 + 0.75 * 20));
  CHECK(d.u_I == 20.0);
}

TEST_CASE("pid anti-windup and integral reset") {
  const InputBounds bounds = InputBounds::from_dead_zones(kPlant);
  const DualPidGains gentle = DualPidGains::gentle();
  PidState s;
  for (int i = 0; i < 50; ++i) s = pid_step(kPlant.p_atm, kPlant.p_atm + 100000, s, gentle, 0.02, bounds).second;
  // kp * e = 200 saturates from the start, so the integral never grows.
  CHECK(s.z == 0.0);

  PidState t;
  for (int i = 0; i < 5; ++i) t = pid_step(kPlant.p_atm, kPlant.p_atm + 1000, t, gentle, 0.02, bounds).second;
  CHECK(t.z == doctest::Approx(5 * 1000 * 0.02));
  t = pid_step(kPlant.p_atm, kPlant.p_atm - 1000, t, gentle, 0.02, bounds).second;
  CHECK(t.mode == Mode::deflation);
  CHECK(t.z == doctest::Approx(1000 * 0.02));

  // Derivative: aggressive kd = 0.001 on a 1000 Pa error change over 0.02 s adds 50.
  const DualPidGains aggr = DualPidGains::aggressive();
  PidState u = pid_step(kPlant.p_atm, kPlant.p_atm + 1000, {}, aggr, 0.02, bounds).second;
  auto [act, u2] = pid_step(kPlant.p_atm, kPlant.p_atm + 2000, u, aggr, 0.02, bounds);
  CHECK(act.u_applied == doctest::Approx(20 + 0.8 * (0.004 * 2000 + 50)));

  PidController pc("pid-gentle", gentle, bounds, 0.02);
  std::vector<double> none;
  pc.step({0.0, kPlant.p_atm, kPlant.p_atm + 1000, none});
  CHECK(pc.state().started);
  pc.reset();
  CHECK(!pc.state().started);
  CHECK_THROWS_AS(pid_step(0, 0, {}, gentle, 0.0, bounds), ConfigError);
}
