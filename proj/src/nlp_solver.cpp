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

#include "pnmpc/nlp_solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <deque>
#include <numeric>

namespace pnmpc {

void SolveOptions::validate() const {
  if (max_iters < 1) throw ConfigError("solver max_iters must be at least 1");
  if (!(grad_tol > 0.0) || !(step_tol > 0.0)) throw ConfigError("solver tolerances must be positive");
  if (!(armijo_c > 0.0 && armijo_c < 1.0)) throw ConfigError("armijo_c must lie in (0,1)");
  if (memory < 1) throw ConfigError("solver memory must be at least 1");
  if (!(backtrack > 0.0 && backtrack < 1.0)) throw ConfigError("backtrack factor must lie in (0,1)");
}

std::string_view to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::converged:
      return "converged";
    case SolveStatus::max_iters:
      return "max_iters";
    case SolveStatus::stalled:
      return "stalled";
  }
  return "unknown";
}

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
  return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

double inf_norm(std::span<const double> a) {
  double m = 0.0;
  for (double v : a) m = std::max(m, std::abs(v));
  return m;
}

struct Pair {
  std::vector<double> s;
  std::vector<double> y;
  double rho;
};

// Maps between user coordinates z and box-normalized coordinates x in [0,1]
// for the free variables.
class Scaling {
 public:
  explicit Scaling(const Box& box) : box_(box) {
    for (std::size_t i = 0; i < box.size(); ++i) {
      if (box.upper[i] > box.lower[i]) free_.push_back(i);
    }
  }

  std::size_t dim() const { return free_.size(); }

  std::vector<double> to_x(std::span<const double> z) const {
    std::vector<double> x(free_.size());
    for (std::size_t j = 0; j < free_.size(); ++j) {
      const std::size_t i = free_[j];
      x[j] = (z[i] - box_.lower[i]) / width(i);
    }
    return x;
  }

  void to_z(std::span<const double> x, std::vector<double>& z) const {
    for (std::size_t j = 0; j < free_.size(); ++j) {
      const std::size_t i = free_[j];
      z[i] = std::clamp(box_.lower[i] + x[j] * width(i), box_.lower[i], box_.upper[i]);
    }
  }

  void grad_to_x(std::span<const double> g, std::vector<double>& gx) const {
    for (std::size_t j = 0; j < free_.size(); ++j) gx[j] = g[free_[j]] * width(free_[j]);
  }

  double projected_grad_norm(std::span<const double> z, std::span<const double> g) const {
    double m = 0.0;
    for (std::size_t i : free_) {
      const double moved = std::clamp(z[i] - g[i], box_.lower[i], box_.upper[i]);
      m = std::max(m, std::abs(z[i] - moved));
    }
    return m;
  }

 private:
  double width(std::size_t i) const { return box_.upper[i] - box_.lower[i]; }

  const Box& box_;
  std::vector<std::size_t> free_;
};

// Two-loop recursion restricted to the free (non-binding) coordinates.
std::vector<double> lbfgs_direction(const std::deque<Pair>& mem, std::span<const double> q0,
                                    const std::vector<bool>& active) {
  std::vector<double> q(q0.begin(), q0.end());
  auto mask = [&](std::vector<double>& v) {
    for (std::size_t j = 0; j < v.size(); ++j)
      if (active[j]) v[j] = 0.0;
  };
  mask(q);
  std::vector<double> alpha(mem.size());
  for (std::size_t m = mem.size(); m-- > 0;) {
    alpha[m] = mem[m].rho * dot(mem[m].s, q);
    for (std::size_t j = 0; j < q.size(); ++j) q[j] -= alpha[m] * mem[m].y[j];
  }
  mask(q);
  const Pair& last = mem.back();
  const double h0 = dot(last.s, last.y) / dot(last.y, last.y);
  for (double& v : q) v *= h0;
  for (std::size_t m = 0; m < mem.size(); ++m) {
    const double beta = mem[m].rho * dot(mem[m].y, q);
    for (std::size_t j = 0; j < q.size(); ++j) q[j] += (alpha[m] - beta) * mem[m].s[j];
  }
  mask(q);
  for (double& v : q) v = -v;
  return q;
}

}  // namespace

SolveResult solve_box_nlp(const ObjectiveFn& fn, std::span<const double> z0, const Box& box,
                          const SolveOptions& opts) {
  opts.validate();
  if (z0.size() != box.size()) throw ConfigError("initial point and box sizes differ");
  const auto start = std::chrono::steady_clock::now();

  const Scaling scale(box);
  const std::size_t n = scale.dim();
  std::vector<double> z = box.project(z0);
  std::vector<double> g(z.size(), 0.0);
  double f = fn(z, g);

  SolveResult res;
  res.status = SolveStatus::max_iters;

  std::vector<double> x = scale.to_x(z);
  std::vector<double> gx(n);
  scale.grad_to_x(g, gx);

  std::vector<double> z_trial(z);
  std::vector<double> g_trial(z.size(), 0.0);
  std::vector<double> x_trial(n);
  std::vector<double> gx_trial(n);
  std::deque<Pair> mem;

  while (true) {
    res.projected_grad_norm = scale.projected_grad_norm(z, g);
    if (!std::isfinite(f)) {
      res.status = SolveStatus::stalled;
      break;
    }
    if (res.projected_grad_norm <= opts.grad_tol) {
      res.status = SolveStatus::converged;
      break;
    }
    if (res.iters >= opts.max_iters) {
      res.status = SolveStatus::max_iters;
      break;
    }

    std::vector<bool> active(n, false);
    for (std::size_t j = 0; j < n; ++j) {
      active[j] = (x[j] <= 0.0 && gx[j] > 0.0) || (x[j] >= 1.0 && gx[j] < 0.0);
    }
    std::vector<double> steepest(n);
    for (std::size_t j = 0; j < n; ++j) steepest[j] = active[j] ? 0.0 : -gx[j];

    bool accepted = false;
    for (int attempt = 0; attempt < 2 && !accepted; ++attempt) {
      const bool quasi_newton = attempt == 0 && !mem.empty();
      std::vector<double> d = quasi_newton ? lbfgs_direction(mem, gx, active) : steepest;
      if (quasi_newton && dot(d, gx) >= 0.0) d = steepest;
      double alpha = 1.0;
      if (!quasi_newton) alpha = std::min(1.0, 1.0 / std::max(inf_norm(d), 1e-300));

      for (int ls = 0; ls < 60; ++ls, alpha *= opts.backtrack) {
        double step_inf = 0.0;
        double decrease = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
          x_trial[j] = std::clamp(x[j] + alpha * d[j], 0.0, 1.0);
          const double s = x_trial[j] - x[j];
          step_inf = std::max(step_inf, std::abs(s));
          decrease += gx[j] * s;
        }
        if (step_inf < opts.step_tol) break;
        scale.to_z(x_trial, z_trial);
        const double f_trial = fn(z_trial, g_trial);
        if (std::isfinite(f_trial) && f_trial <= f + opts.armijo_c * decrease) {
          scale.grad_to_x(g_trial, gx_trial);
          Pair p;
          p.s.resize(n);
          p.y.resize(n);
          for (std::size_t j = 0; j < n; ++j) {
            p.s[j] = x_trial[j] - x[j];
            p.y[j] = gx_trial[j] - gx[j];
          }
          const double sy = dot(p.s, p.y);
          if (sy > 1e-12 * std::sqrt(dot(p.s, p.s) * dot(p.y, p.y))) {
            p.rho = 1.0 / sy;
            mem.push_back(std::move(p));
            if (static_cast<int>(mem.size()) > opts.memory) mem.pop_front();
          }
          x.swap(x_trial);
          gx.swap(gx_trial);
          z.swap(z_trial);
          g.swap(g_trial);
          f = f_trial;
          accepted = true;
          break;
        }
      }
      if (!accepted) mem.clear();
    }
    if (!accepted) {
      res.status = SolveStatus::stalled;
      break;
    }
    ++res.iters;
  }

  res.z_opt = std::move(z);
  res.J_opt = f;
  res.wall_time =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return res;
}

DecisionVector warm_start_shift(const DecisionVector& previous, const HorizonSpec& spec) {
  const auto& b = spec.bounds;
  if (previous.empty() || previous.stages() != spec.N) {
    return DecisionVector::constant(spec.N, 0.5 * (b.u_I_min + b.u_I_max),
                                    0.5 * (b.u_D_min + b.u_D_max), 0.5);
  }
  DecisionVector out = previous;
  const int n = spec.N;
  for (int k = 0; k + 1 < n; ++k) {
    out.u_I[k] = previous.u_I[k + 1];
    out.u_D[k] = previous.u_D[k + 1];
    out.omega[k] = previous.omega[k + 1];
  }
  for (int k = 0; k < n; ++k) {
    out.u_I[k] = std::clamp(out.u_I[k], b.u_I_min, b.u_I_max);
    out.u_D[k] = std::clamp(out.u_D[k], b.u_D_min, b.u_D_max);
    out.omega[k] = std::clamp(out.omega[k], 0.0, 1.0);
  }
  return out;
}

}  // namespace pnmpc
