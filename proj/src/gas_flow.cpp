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

#include "pnmpc/gas_flow.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace pnmpc {

double FlowConstants::density_scale() const { return rho_ref * std::sqrt(T_ref / T); }

void FlowConstants::validate() const {
  if (!(b > 0.0 && b < 1.0)) throw ConfigError("critical pressure ratio b must lie in (0,1)");
  if (!(rho_ref > 0.0)) throw ConfigError("rho_ref must be positive");
  if (!(T_ref > 0.0)) throw ConfigError("T_ref must be positive");
  if (!(T > 0.0)) throw ConfigError("T must be positive");
}

void Conductances::validate() const {
  if (!(so > 0.0 && os > 0.0 && oa > 0.0 && ao > 0.0)) {
    throw ConfigError("sonic conductances must all be positive");
  }
}

double shape_factor(double r, double b) {
  if (r <= b) return 1.0;
  if (r >= 1.0) return 0.0;
  const double s = (r - b) / (1.0 - b);
  return std::sqrt(std::max(0.0, 1.0 - s * s));
}

ValueAndSlope shape_factor_smoothed_slope(double r, double b, double eps) {
  const double width = 1.0 - b;

  // Near r = 1 the subsonic branch has unbounded slope. It is replaced by a
  // cubic Hermite segment from the point where the branch has fallen to eps
  // down to (1, 0) with zero end slope, so the surrogate stays within eps of
  // the exact value and still vanishes for r >= 1.
  if (r >= 1.0) return {0.0, 0.0};
  const double s_cap = std::sqrt(1.0 - eps * eps);
  const double cap = width * (1.0 - s_cap);
  if (r > 1.0 - cap) {
    const double t = (r - (1.0 - cap)) / cap;
    const double m = -s_cap / (width * eps) * cap;  // slope in t units
    const double h00 = (2.0 * t - 3.0) * t * t + 1.0;
    const double h10 = ((t - 2.0) * t + 1.0) * t;
    const double dh00 = 6.0 * t * t - 6.0 * t;
    const double dh10 = (3.0 * t - 4.0) * t + 1.0;
    return {h00 * eps + h10 * m, (dh00 * eps + dh10 * m) / cap};
  }

  if (r <= b - eps) return {1.0, 0.0};

  const double s = (r - b) / width;
  const double q = std::sqrt(1.0 - s * s);
  const double dq = -s / (width * q);
  if (r >= b + eps) return {q, dq};

  // Smoothstep blend between the choked plateau and the subsonic branch.
  const double t = (r - (b - eps)) / (2.0 * eps);
  const double w = t * t * (3.0 - 2.0 * t);
  const double dw = 6.0 * t * (1.0 - t) / (2.0 * eps);
  return {(1.0 - w) + w * q, dw * (q - 1.0) + w * dq};
}

double shape_factor_smoothed(double r, double b, double eps) {
  return shape_factor_smoothed_slope(r, b, eps).value;
}

namespace {

void check_branch_domain(double p_up, double p_down) {
  if (!(p_up > 0.0)) {
    throw DomainError("branch_flow: upstream pressure must be positive, got " +
                      std::to_string(p_up));
  }
  if (!(p_down >= 0.0)) {
    throw DomainError("branch_flow: downstream pressure must be non-negative, got " +
                      std::to_string(p_down));
  }
}

}  // namespace

double branch_flow(double p_up, double p_down, double conductance, const FlowConstants& k,
                   Shape shape) {
  check_branch_domain(p_up, p_down);
  const double r = p_down / p_up;
  const double phi =
      shape == Shape::exact ? shape_factor(r, k.b) : shape_factor_smoothed(r, k.b);
  return p_up * (conductance * k.density_scale()) * phi;
}

BranchPartials branch_flow_partials(double p_up, double p_down, double conductance,
                                    const FlowConstants& k) {
  check_branch_domain(p_up, p_down);
  const double r = p_down / p_up;
  const ValueAndSlope phi = shape_factor_smoothed_slope(r, k.b);
  const double ck = conductance * k.density_scale();
  return {p_up * ck * phi.value, ck * (phi.value - r * phi.slope), ck * phi.slope};
}

double q_out_cases(double p_out, double x_bar, Mode mode, const PlantParams& params,
                   Shape shape) {
  if (!(params.p_sink < p_out && p_out < params.p_sup)) {
    throw DomainError("q_out_cases: receiver pressure " + std::to_string(p_out) +
                      " Pa outside (p_sink, p_sup)");
  }
  if (!(x_bar >= 0.0 && x_bar <= 1.0)) {
    throw DomainError("q_out_cases: spool ratio must lie in [0,1]");
  }
  const auto& k = params.flow;
  const auto& c = params.cond;
  const double leak_share = 1.0 - x_bar;

  if (mode == Mode::inflation) {
    const double feed = branch_flow(params.p_sup, p_out, c.so, k, shape) * x_bar;
    if (p_out >= params.p_atm) {
      return feed - branch_flow(p_out, params.p_atm, c.oa, k, shape) * leak_share;
    }
    return feed + branch_flow(params.p_atm, p_out, c.ao, k, shape) * leak_share;
  }

  const double drain = branch_flow(p_out, params.p_sink, c.os, k, shape) * x_bar;
  if (p_out >= params.p_atm) {
    return -drain - branch_flow(p_out, params.p_atm, c.oa, k, shape) * leak_share;
  }
  return -drain + branch_flow(params.p_atm, p_out, c.ao, k, shape) * leak_share;
}

}  // namespace pnmpc
