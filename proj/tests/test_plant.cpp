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
#include <random>

#include "doctest.h"
#include "pnmpc/plant.hpp"

using namespace pnmpc;

namespace {
const PlantParams kPlant{};
}

TEST_CASE("spool map") {
  CHECK(spool_map(20, 20) == 0.0);
  CHECK(spool_map(100, 20) == 1.0);
  CHECK(spool_map(60, 20) == doctest::Approx(0.5));
  CHECK(spool_map(0, 25) == 0.0);
  double prev = 0.0;
  for (double u = 0.0; u <= 100.0; u += 0.25) {
    const double x = spool_map(u, 25.0);
    CHECK(x >= prev);
    prev = x;
  }
  CHECK(spool_map_slope(20, 20) == doctest::Approx(1.0 / 80.0));
  CHECK(spool_map_slope(10, 20) == 0.0);
}

TEST_CASE("pressure gain") {
  // 1.4 * 287 * 293.15 / 2e-5
  CHECK(kPlant.pressure_gain() == doctest::Approx(5889383500.0).epsilon(1e-14));
}

TEST_CASE("drift pulls toward atmosphere") {
  CHECK(drift_f(kPlant.p_atm, kPlant) == 0.0);
  CHECK(drift_f(180000, kPlant) < 0.0);
  CHECK(drift_f(60000, kPlant) > 0.0);
  // gamma R T / V * A_ao(60 kPa), evaluated offline.
  CHECK(drift_f(60000, kPlant) == doctest::Approx(2801.797697837956).epsilon(1e-12));
  for (double p = kPlant.p_sink + 1.0; p < kPlant.p_sup; p += 1234.5) {
    const double f = drift_f(p, kPlant);
    if (p < kPlant.p_atm) CHECK(f > 0.0);
    if (p > kPlant.p_atm) CHECK(f < 0.0);
  }
}

TEST_CASE("control gains") {
  CHECK(control_gain_g(kPlant.p_atm, Mode::inflation, kPlant) ==
        doctest::Approx(550009.64295085759).epsilon(1e-12));
  CHECK(control_gain_g(kPlant.p_atm, Mode::deflation, kPlant) ==
        doctest::Approx(-240074.828994).epsilon(1e-12));
  for (double p = kPlant.p_sink + 1.0; p < kPlant.p_sup; p += 777.0) {
    CHECK(control_gain_g(p, Mode::inflation, kPlant) >= control_gain_g(p, Mode::deflation, kPlant));
    for (Mode m : {Mode::inflation, Mode::deflation}) {
      const AffineTerms a = affine_terms(p, kPlant, Shape::exact);
      CHECK(a.f + a.gain(m) * 0.0 == drift_f(p, kPlant));
    }
  }
}

TEST_CASE("affine slopes match finite differences of the smoothed model") {
  for (double p : {30000.0, 60000.0, 99950.0, 100040.0, 150000.0, 250000.0}) {
    const AffineSlopes s = affine_slopes(p, kPlant);
    const double h = 1e-2;
    const AffineTerms up = affine_terms(p + h, kPlant, Shape::smoothed);
    const AffineTerms dn = affine_terms(p - h, kPlant, Shape::smoothed);
    CHECK(s.df == doctest::Approx((up.f - dn.f) / (2 * h)).epsilon(1e-5));
    CHECK(s.dg_inflate == doctest::Approx((up.g_inflate - dn.g_inflate) / (2 * h)).epsilon(1e-5));
    CHECK(s.dg_deflate == doctest::Approx((up.g_deflate - dn.g_deflate) / (2 * h)).epsilon(1e-5));
    const AffineTerms v = affine_terms(p, kPlant, Shape::smoothed);
    CHECK(s.value.f == doctest::Approx(v.f).epsilon(1e-14));
  }
}

TEST_CASE("euler step examples") {
  for (Mode m : {Mode::inflation, Mode::deflation}) {
    const PlantState s = step_euler({kPlant.p_atm, 0.0}, m, 0.0, 1e-3, kPlant);
    CHECK(s.p_out == kPlant.p_atm);
    CHECK(s.t == 1e-3);
  }
  const PlantState up = step_euler({kPlant.p_atm, 0.0}, Mode::inflation, 100.0, 1e-3, kPlant);
  CHECK(up.p_out - kPlant.p_atm == doctest::Approx(550.00964295085759).epsilon(1e-9));
  const PlantState top = step_euler({kPlant.p_sup - 1.0, 0.0}, Mode::inflation, 100.0, 10.0, kPlant);
  CHECK(top.p_out == kPlant.p_sup);
  const PlantState bottom =
      step_euler({kPlant.p_sink + 1.0, 0.0}, Mode::deflation, 100.0, 10.0, kPlant);
  CHECK(bottom.p_out >= kPlant.p_sink);
  const PlantState floor_hit = step_euler({20000.0, 0.0}, Mode::deflation, 100.0, 10.0, kPlant);
  CHECK(floor_hit.p_out == kPlant.p_sink);
}

TEST_CASE("zero-order hold") {
  CHECK(hold_substeps(0.02, 0.001) == 20);
  CHECK_THROWS_AS(hold_substeps(0.0205, 0.001), ConfigError);
  CHECK_THROWS_AS(hold_substeps(0.02, 0.0), ConfigError);
  CHECK_THROWS_AS(simulate_hold({kPlant.p_atm, 0.0}, Mode::inflation, 50, 0.0205, 0.001, kPlant),
                  ConfigError);

  const PlantState rest = simulate_hold({kPlant.p_atm, 0.0}, Mode::deflation, 0.0, 0.02, 0.001, kPlant);
  CHECK(rest.p_out == kPlant.p_atm);
  CHECK(rest.t == doctest::Approx(0.02));

  const PlantState one = simulate_hold({123456.0, 0.0}, Mode::inflation, 47.0, 0.001, 0.001, kPlant);
  const PlantState ref = step_euler({123456.0, 0.0}, Mode::inflation, 47.0, 0.001, kPlant);
  CHECK(one.p_out == ref.p_out);

  PlantState manual{123456.0, 0.0};
  for (int i = 0; i < 20; ++i) manual = step_euler(manual, Mode::deflation, 61.0, 0.001, kPlant);
  CHECK(simulate_hold({123456.0, 0.0}, Mode::deflation, 61.0, 0.02, 0.001, kPlant).p_out ==
        manual.p_out);
}

TEST_CASE("monotone actuation") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> pressure(kPlant.p_sink, kPlant.p_sup);
  for (int i = 0; i < 2000; ++i) {
    const PlantState s{pressure(rng), 0.0};
    double prev_up = -1.0;
    double prev_dn = 1e300;
    for (double u = 0.0; u <= 100.0; u += 5.0) {
      const double up = step_euler(s, Mode::inflation, u, 1e-3, kPlant).p_out;
      const double dn = step_euler(s, Mode::deflation, u, 1e-3, kPlant).p_out;
      CHECK(up >= prev_up);
      CHECK(dn <= prev_dn);
      prev_up = up;
      prev_dn = dn;
    }
  }
}

TEST_CASE("euler converges at first order") {
  auto endpoint = [](double dt) {
    PlantState s{120000.0, 0.0};
    const int n = static_cast<int>(std::lround(2.0 / dt));
    for (int i = 0; i < n; ++i) s = step_euler(s, Mode::inflation, 25.0 + 20.0 * (i * dt > 1.0), dt, kPlant);
    return s.p_out;
  };
  const double a = endpoint(1e-3);
  const double b = endpoint(5e-4);
  const double c = endpoint(2.5e-4);
  const double ratio = std::abs(a - b) / std::abs(b - c);
  CHECK(ratio == doctest::Approx(2.0).epsilon(0.2));
}

TEST_CASE("parameter validation") {
  PlantParams p;
  CHECK_NOTHROW(p.validate());
  p.p_sink = 200e3;
  CHECK_THROWS_AS(p.validate(), ConfigError);
  p = {};
  p.flow.b = 1.0;
  CHECK_THROWS_AS(p.validate(), ConfigError);
  p = {};
  p.dz_D = 100.0;
  CHECK_THROWS_AS(p.validate(), ConfigError);
  p = {};
  p.cond.oa = 0.0;
  CHECK_THROWS_AS(p.validate(), ConfigError);
}
