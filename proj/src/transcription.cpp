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

#include "pnmpc/transcription.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "pnmpc/plant.hpp"

namespace pnmpc {

InputBounds InputBounds::from_dead_zones(const PlantParams& params) {
  return {params.dz_I, 100.0, params.dz_D, 100.0};
}

void InputBounds::validate() const {
  if (!(u_I_min <= u_I_max && u_D_min <= u_D_max)) {
    throw ConfigError("input bounds must satisfy min <= max");
  }
  if (u_I_min < 0.0 || u_D_min < 0.0 || u_I_max > 100.0 || u_D_max > 100.0) {
    throw ConfigError("input bounds must lie within [0,100] %");
  }
}

void HorizonSpec::validate() const {
  if (N < 1) throw ConfigError("horizon length N must be at least 1");
  if (!(dt > 0.0)) throw ConfigError("horizon step dt must be positive");
  if (static_cast<int>(p_ref.size()) != N) {
    throw ConfigError("reference window has " + std::to_string(p_ref.size()) +
                      " entries, expected N = " + std::to_string(N));
  }
  bounds.validate();
}

std::vector<double> DecisionVector::flatten() const {
  std::vector<double> z;
  z.reserve(3 * u_I.size());
  z.insert(z.end(), u_I.begin(), u_I.end());
  z.insert(z.end(), u_D.begin(), u_D.end());
  z.insert(z.end(), omega.begin(), omega.end());
  return z;
}

DecisionVector DecisionVector::unflatten(std::span<const double> z) {
  const std::size_t n = z.size() / 3;
  DecisionVector out;
  out.u_I.assign(z.begin(), z.begin() + n);
  out.u_D.assign(z.begin() + n, z.begin() + 2 * n);
  out.omega.assign(z.begin() + 2 * n, z.begin() + 3 * n);
  return out;
}

DecisionVector DecisionVector::constant(int N, double u_I, double u_D, double omega) {
  const auto n = static_cast<std::size_t>(N);
  return {std::vector<double>(n, u_I), std::vector<double>(n, u_D),
          std::vector<double>(n, omega)};
}

std::vector<double> Box::project(std::span<const double> z) const {
  std::vector<double> out(z.begin(), z.end());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::clamp(out[i], lower[i], upper[i]);
  return out;
}

Box relaxed_box(const HorizonSpec& spec) {
  const auto n = static_cast<std::size_t>(spec.N);
  Box box;
  box.lower.reserve(3 * n);
  box.upper.reserve(3 * n);
  box.lower.insert(box.lower.end(), n, spec.bounds.u_I_min);
  box.upper.insert(box.upper.end(), n, spec.bounds.u_I_max);
  box.lower.insert(box.lower.end(), n, spec.bounds.u_D_min);
  box.upper.insert(box.upper.end(), n, spec.bounds.u_D_max);
  box.lower.insert(box.lower.end(), n, 0.0);
  box.upper.insert(box.upper.end(), n, 1.0);
  return box;
}

Box fixed_mode_box(const HorizonSpec& spec, std::span<const int> modes) {
  if (static_cast<int>(modes.size()) != spec.N) {
    throw ConfigError("mode sequence length does not match the horizon");
  }
  Box box = relaxed_box(spec);
  const auto n = static_cast<std::size_t>(spec.N);
  for (std::size_t k = 0; k < n; ++k) {
    const double m = modes[k] != 0 ? 1.0 : 0.0;
    box.lower[2 * n + k] = m;
    box.upper[2 * n + k] = m;
  }
  return box;
}

namespace {

struct Field {
  double rate = 0.0;
  double d_p = 0.0;
  double d_u_I = 0.0;
  double d_u_D = 0.0;
  double d_omega = 0.0;
};

Field blended_field(double p, double u_I, double u_D, double omega, const PlantParams& pp) {
  const AffineSlopes a = affine_slopes(p, pp);
  const double x_I = spool_map(u_I, pp.dz_I);
  const double x_D = spool_map(u_D, pp.dz_D);
  const double dev = 1.0 - omega;
  Field out;
  out.rate = a.value.f + omega * a.value.g_inflate * x_I + dev * a.value.g_deflate * x_D;
  out.d_p = a.df + omega * a.dg_inflate * x_I + dev * a.dg_deflate * x_D;
  out.d_u_I = omega * a.value.g_inflate * spool_map_slope(u_I, pp.dz_I);
  out.d_u_D = dev * a.value.g_deflate * spool_map_slope(u_D, pp.dz_D);
  out.d_omega = a.value.g_inflate * x_I - a.value.g_deflate * x_D;
  return out;
}

double blended_rate(double p, double x_I, double x_D, double omega, const PlantParams& pp) {
  const AffineTerms a = affine_terms(p, pp, Shape::smoothed);
  return a.f + omega * a.g_inflate * x_I + (1.0 - omega) * a.g_deflate * x_D;
}

}  // namespace

double rk4_step(double p, double u_I, double u_D, double omega, double dt,
                const PlantParams& params) {
  const double x_I = spool_map(u_I, params.dz_I);
  const double x_D = spool_map(u_D, params.dz_D);
  const double k1 = blended_rate(p, x_I, x_D, omega, params);
  const double k2 = blended_rate(p + 0.5 * dt * k1, x_I, x_D, omega, params);
  const double k3 = blended_rate(p + 0.5 * dt * k2, x_I, x_D, omega, params);
  const double k4 = blended_rate(p + dt * k3, x_I, x_D, omega, params);
  return p + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

StepSensitivity rk4_step_sensitivity(double p, double u_I, double u_D, double omega,
                                     double dt, const PlantParams& params) {
  // Forward-mode propagation of (d/dp, d/du_I, d/du_D, d/domega) through the
  // four stages. Stage input p_s = p + c * dt * k_prev.
  struct Stage {
    double k, dp, du_I, du_D, domega;
  };
  auto eval = [&](const Stage* prev, double c) {
    const double p_s = prev ? p + c * dt * prev->k : p;
    const Field fd = blended_field(p_s, u_I, u_D, omega, params);
    if (!prev) return Stage{fd.rate, fd.d_p, fd.d_u_I, fd.d_u_D, fd.d_omega};
    const double s = c * dt * fd.d_p;
    return Stage{fd.rate, fd.d_p * (1.0 + c * dt * prev->dp), fd.d_u_I + s * prev->du_I,
                 fd.d_u_D + s * prev->du_D, fd.d_omega + s * prev->domega};
  };
  const Stage s1 = eval(nullptr, 0.0);
  const Stage s2 = eval(&s1, 0.5);
  const Stage s3 = eval(&s2, 0.5);
  const Stage s4 = eval(&s3, 1.0);
  const double w = dt / 6.0;
  auto combine = [&](double Stage::*m) {
    return w * (s1.*m + 2.0 * s2.*m + 2.0 * s3.*m + s4.*m);
  };
  return {p + combine(&Stage::k), 1.0 + combine(&Stage::dp), combine(&Stage::du_I),
          combine(&Stage::du_D), combine(&Stage::domega)};
}

Rollout rollout(const HorizonSpec& spec, const DecisionVector& z, const PlantParams& params) {
  const std::vector<double> flat = z.flatten();
  Rollout out;
  out.states.reserve(static_cast<std::size_t>(spec.N));
  double p = spec.p0;
  for (int k = 0; k < spec.N; ++k) {
    p = rk4_step(p, z.u_I[k], z.u_D[k], z.omega[k], spec.dt, params);
    out.states.push_back(p);
  }
  out.J = objective(spec, flat, params);
  return out;
}

double objective(const HorizonSpec& spec, std::span<const double> z, const PlantParams& params,
                 std::span<double> grad) {
  const auto n = static_cast<std::size_t>(spec.N);
  if (z.size() != 3 * n) throw ConfigError("decision vector size does not match 3N");
  const auto u_I = z.subspan(0, n);
  const auto u_D = z.subspan(n, n);
  const auto omega = z.subspan(2 * n, n);
  const auto& w = spec.weights;
  const bool want_grad = !grad.empty();

  std::vector<StepSensitivity> sens;
  std::vector<double> d_state;  // direct dJ/dP_{k+1}
  if (want_grad) {
    sens.reserve(n);
    d_state.reserve(n);
  }

  double J = 0.0;
  double p = spec.p0;
  for (std::size_t k = 0; k < n; ++k) {
    if (want_grad) {
      sens.push_back(rk4_step_sensitivity(p, u_I[k], u_D[k], omega[k], spec.dt, params));
      p = sens.back().next;
    } else {
      p = rk4_step(p, u_I[k], u_D[k], omega[k], spec.dt, params);
    }
    const double e = (p - spec.p_ref[k]) / kPascalPerKilopascal;
    const double om = omega[k];
    J += w.q_e * e * e + w.r_I * (om * u_I[k] * u_I[k] + (1.0 - om) * u_D[k] * u_D[k]) +
         w.lambda_bin * om * (1.0 - om);
    if (want_grad) d_state.push_back(2.0 * w.q_e * e / kPascalPerKilopascal);
  }
  if (!want_grad) return J;

  if (grad.size() != z.size()) throw ConfigError("gradient buffer size does not match 3N");
  double adj = 0.0;  // dJ/dP_{k+1} including everything downstream
  for (std::size_t k = n; k-- > 0;) {
    adj += d_state[k];
    const StepSensitivity& s = sens[k];
    const double om = omega[k];
    grad[k] = 2.0 * w.r_I * om * u_I[k] + adj * s.d_u_I;
    grad[n + k] = 2.0 * w.r_I * (1.0 - om) * u_D[k] + adj * s.d_u_D;
    grad[2 * n + k] = w.r_I * (u_I[k] * u_I[k] - u_D[k] * u_D[k]) +
                      w.lambda_bin * (1.0 - 2.0 * om) + adj * s.d_omega;
    adj *= s.d_p;
  }
  return J;
}

std::vector<double> gradient(const HorizonSpec& spec, const DecisionVector& z,
                             const PlantParams& params) {
  const std::vector<double> flat = z.flatten();
  std::vector<double> g(flat.size());
  objective(spec, flat, params, g);
  return g;
}

}  // namespace pnmpc
