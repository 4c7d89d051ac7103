// Copyright 2026 the dflx authors
//
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

#include <algorithm>
#include <cmath>
#include <vector>

#include "dflx/diagnostics.hpp"
#include "dflx/errors.hpp"
#include "dflx/pressure.hpp"
#include "dflx/spectral.hpp"

namespace dflx {

namespace {

// wrap a real coordinate into grid units [0, n)
double wrap_units(double x, int n) {
  double u = (x - std::floor(x)) * n;
  if (u >= n) u -= n;  // guards the x == 1.0 - ulp roundoff case
  return u;
}

long count_bound_violations(const ScalarField& w, const State& s,
                            double lambda0, double tol) {
  long bad = 0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    const double theta = s.rho[i] + s.n[i];
    if (w[i] > std::exp(-lambda0 * theta) + tol) ++bad;
  }
  return bad;
}

}  // namespace

double sample_periodic_linear(const ScalarField& f,
                              const std::array<double, 3>& x) {
  const Grid& g = f.grid();
  const int d = g.dim();
  const int n = g.n();
  int base[3] = {0, 0, 0};
  double frac[3] = {0.0, 0.0, 0.0};
  for (int a = 0; a < d; ++a) {
    const double u = wrap_units(x[a], n);
    base[a] = static_cast<int>(u);
    frac[a] = u - base[a];
  }
  double acc = 0.0;
  for (int corner = 0; corner < (1 << d); ++corner) {
    double weight = 1.0;
    std::array<int, 3> idx{0, 0, 0};
    for (int a = 0; a < d; ++a) {
      const int hi = (corner >> a) & 1;
      weight *= hi ? frac[a] : 1.0 - frac[a];
      idx[a] = base[a] + hi;
      if (idx[a] >= n) idx[a] -= n;
    }
    if (weight != 0.0) acc += weight * f[g.encode(idx)];
  }
  return acc;
}

ScalarField xi_damping(const State& s, const ArtificialPressure& ap,
                       double m_const) {
  if (!(m_const >= 0.0))
    throw ParamDomain("maximal coefficient must be nonnegative");
  const LawParams& lp = ap.params();
  ScalarField divu = divergence(s.u);

  ScalarField grad_u_norm(s.grid());
  for (int a = 0; a < s.grid().dim(); ++a) {
    VectorField ga = gradient(s.u[a]);
    for (std::size_t i = 0; i < grad_u_norm.size(); ++i) {
      double sq = 0.0;
      for (int b = 0; b < s.grid().dim(); ++b) sq += ga[b][i] * ga[b][i];
      grad_u_norm[i] += sq;
    }
  }
  for (std::size_t i = 0; i < grad_u_norm.size(); ++i)
    grad_u_norm[i] = std::sqrt(grad_u_norm[i]);
  ScalarField maximal = maximal_m(grad_u_norm);

  ScalarField xi(s.grid());
  for (std::size_t i = 0; i < xi.size(); ++i) {
    const double rho = std::max(s.rho[i], 0.0);
    const double n = std::max(s.n[i], 0.0);
    const double theta = rho + n;
    xi[i] = theta * std::abs(divu[i]) + std::abs(divu[i]) +
            m_const * std::max(maximal[i], 0.0) + std::pow(rho, lp.gamma) +
            std::pow(rho, lp.gamma_t) + std::pow(n, lp.alpha) +
            std::pow(n, lp.alpha_t) + 1.0;
  }
  return xi;
}

std::vector<WeightField> weight_evolve(const std::vector<State>& traj,
                                       const ArtificialPressure& ap,
                                       const WeightParams& wp) {
  if (traj.empty()) throw ParamDomain("weight evolution needs a trajectory");
  if (!(wp.lambda0 >= 1.0))
    throw ParamDomain("weight damping rate lambda0 must be at least 1");
  if (!(wp.m_const >= 0.0))
    throw ParamDomain("maximal coefficient must be nonnegative");
  if (!(wp.bound_tol >= 0.0))
    throw ParamDomain("weight bound tolerance must be nonnegative");
  const Grid& g = traj.front().grid();

  std::vector<WeightField> out;
  out.reserve(traj.size());

  WeightField first(g);
  first.lambda0 = wp.lambda0;
  first.m_const = wp.m_const;
  long clips = 0;
  for (std::size_t i = 0; i < first.w.size(); ++i) {
    const double theta = traj.front().rho[i] + traj.front().n[i];
    double w = std::exp(-wp.lambda0 * theta);
    if (w < 0.0 || w > 1.0) {
      w = std::clamp(w, 0.0, 1.0);
      ++clips;
    }
    first.w[i] = w;
  }
  first.clip_count = clips;
  first.bound_violations =
      count_bound_violations(first.w, traj.front(), wp.lambda0, wp.bound_tol);
  out.push_back(std::move(first));

  for (std::size_t k = 1; k < traj.size(); ++k) {
    const State& s = traj[k];
    if (!(s.grid() == g))
      throw ParamDomain("weight evolution needs one common grid");
    const double dt = s.t - traj[k - 1].t;
    if (!(dt > 0.0))
      throw ParamDomain("weight evolution needs strictly increasing times");

    // semi-Lagrangian step: backtrace along the arrival velocity, then
    // damp exactly over the interval
    ScalarField xi = xi_damping(s, ap, wp.m_const);
    WeightField next(g);
    next.lambda0 = wp.lambda0;
    next.m_const = wp.m_const;
    const ScalarField& prev = out.back().w;
    for (std::size_t i = 0; i < next.w.size(); ++i) {
      auto idx = g.decode(i);
      std::array<double, 3> foot{0.0, 0.0, 0.0};
      for (int a = 0; a < g.dim(); ++a)
        foot[a] = static_cast<double>(idx[a]) * g.spacing() - dt * s.u[a][i];
      double w = sample_periodic_linear(prev, foot) *
                 std::exp(-wp.lambda0 * xi[i] * dt);
      if (w < 0.0 || w > 1.0) {
        w = std::clamp(w, 0.0, 1.0);
        ++clips;
      }
      next.w[i] = w;
    }
    next.clip_count = clips;
    next.bound_violations =
        count_bound_violations(next.w, s, wp.lambda0, wp.bound_tol);
    out.push_back(std::move(next));
  }
  return out;
}

}  // namespace dflx
