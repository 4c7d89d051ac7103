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

#pragma once

#include <functional>
#include <vector>

#include "dflx/grid.hpp"
#include "dflx/pressure.hpp"

namespace dflx {

// Two-phase state on one grid: mass densities rho, n and the shared velocity.
struct State {
  ScalarField rho;
  ScalarField n;
  VectorField u;
  double t = 0.0;

  explicit State(const Grid& g) : rho(g), n(g), u(g) {}
  const Grid& grid() const { return rho.grid(); }
};

// Regularization knobs of one approximation stage.
struct CascadeParams {
  double eps;     // density diffusion, in [0,1)
  double delta;   // pressure augmentation / data floor, in (0,1)
  int ell;        // Fourier cutoff of the momentum projection
  double mu;      // shear viscosity, > 0
  double lambda;  // bulk viscosity, 2 mu + lambda > 0
  double p0;      // augmentation exponent, > 1

  CascadeParams(double eps_, double delta_, int ell_, double mu_,
                double lambda_, double p0_);
};

struct StepControls {
  double cfl = 0.4;       // in (0,1]
  double max_dt = 0.05;   // cap when the acoustic bound degenerates
  double fixed_dt = 0.0;  // > 0 bypasses the CFL policy (testing)
};

struct RunConfig {
  double t_end = 1.0;
  StepControls stepping;
  int sample_every = 8;          // observer cadence in steps
  bool advect = true;            // disable to isolate diffusion (testing)
  bool freeze_velocity = false;  // hold u fixed in time (testing)
};

// Time derivative triple returned by the spatial discretization.
struct Derivative {
  ScalarField drho;
  ScalarField dn;
  VectorField du;

  explicit Derivative(const Grid& g) : drho(g), dn(g), du(g) {}
};

struct TimeSample {
  double t = 0.0;
  double mass_rho = 0.0;
  double mass_n = 0.0;
  double energy = 0.0;
  double dissipation_cum = 0.0;
  double min_theta = 0.0;
};

struct RunResult {
  State final_state;
  std::vector<TimeSample> samples;
  long steps = 0;
  bool stiffness_flagged = false;
  double dissipation_integral = 0.0;

  explicit RunResult(const Grid& g) : final_state(g) {}
};

// Mollify the raw data at scale delta, floor both densities by +delta, and
// rebuild the velocity from the mollified momentum ratio m0/sqrt(rho0+n0).
// Throws InconsistentData where m0 is nonzero on vacuum of the raw data.
State regularize_initial_data(const ScalarField& rho0, const ScalarField& n0,
                              const VectorField& m0, double delta,
                              double p0 = 8.0);

// Semi-discrete right-hand side: densities get -div(. u) + eps Lap, the
// velocity equation is the momentum balance divided pointwise by rho+n,
//   du = -(u.grad)u - [grad P_delta + eps grad u . grad(rho+n)]/(rho+n)
//        + [mu Lap u + (mu+lambda) grad div u]/(rho+n),
// Fourier-projected to |k|_inf <= ell. Bilinear products are dealiased.
// Throws VacuumEncountered when min(rho+n) < delta/2.
Derivative rhs_approximate(const State& s, const CascadeParams& cp,
                           const ArtificialPressure& ap, bool advect = true);

// Acoustic CFL bound cfl * h / (max|u| + c_max), c_max the largest sampled
// sqrt(dP/drho + dP/dn) (clamped at 1e-8; negative radicands count as 0 and
// set *stiff). Capped at max_dt.
double cfl_dt(const State& s, const CascadeParams& cp,
              const ArtificialPressure& ap, const StepControls& ctl,
              bool* stiff = nullptr);

// Largest stable step for the explicit variable-coefficient viscosity
// remainder (1/theta - 1/mean theta)[mu Lap + (mu+lambda) grad div]u, which
// the integrating factor cannot absorb. Infinity when theta is uniform.
double viscous_remainder_dt(const State& s, const CascadeParams& cp);

// One integrating-factor RK3 step (forward abscissae 0, 1/3, 2/3): the
// constant-coefficient part of the linear terms (eps Lap on densities;
// [mu Lap + (mu+lambda) grad div]/mean theta on the velocity) decays exactly
// in Fourier space between stages, the rest advances explicitly. Preserves
// the means of rho and n to rounding.
State step(const State& s, double dt, const CascadeParams& cp,
           const ArtificialPressure& ap, const RunConfig& rc);

// int [ (rho+n)|u|^2 / 2 + G_delta(rho, n) ] dx
double state_energy(const State& s, const ArtificialPressure& ap);

// int [ mu |grad u|^2 + (mu+lambda)(div u)^2 ] dx
double dissipation_rate(const State& s, const CascadeParams& cp);

using RunObserver = std::function<void(const State&, const TimeSample&)>;

// Advance to rc.t_end, sampling mass/energy/dissipation every
// rc.sample_every steps (and at both ends). The dissipation integral is the
// trapezoidal accumulation of dissipation_rate over the taken steps.
RunResult run(const State& init, const CascadeParams& cp,
              const ArtificialPressure& ap, const RunConfig& rc,
              const RunObserver& observer = nullptr);

struct CascadeStage {
  int ell;
  double eps;
  double delta;
};

struct StageOutcome {
  CascadeStage stage;
  RunResult result;
};

struct CascadeResult {
  std::vector<StageOutcome> stages;
  // L1 distances between consecutive terminal stage fields
  std::vector<double> l1_rho_diff;
  std::vector<double> l1_n_diff;
};

using StageObserver =
    std::function<void(std::size_t, const State&, const TimeSample&)>;

// Run every stage from the same raw data, re-regularized with the stage
// delta. The schedule must be nonempty and monotone: ell nondecreasing, eps
// and delta nonincreasing. Stage failures rethrow with the stage index. The
// observer, when set, receives every sampled state tagged with its stage.
CascadeResult run_cascade(const ScalarField& rho0, const ScalarField& n0,
                          const VectorField& m0, LawPtr base,
                          const std::vector<CascadeStage>& schedule, double mu,
                          double lambda, double p0, const RunConfig& rc,
                          const StageObserver& observer = nullptr);

}  // namespace dflx
