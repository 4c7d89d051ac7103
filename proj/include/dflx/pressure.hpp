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

#include <memory>
#include <string>
#include <vector>

#include "dflx/errors.hpp"

namespace dflx {

// Declared structural constants of a two-phase pressure law: growth
// exponents (gamma, alpha), derivative-growth exponents (gamma_t, alpha_t),
// and the envelope constants of
//   (1/C0)(rho^gamma + n^alpha) - C1 <= P <= C0(rho^gamma + n^alpha) + C1,
//   |dP/drho| + |dP/dn| <= C2 (rho^{gamma_t-1} + n^{alpha_t-1} + 1).
// beta is carried for reporting only; nothing downstream consumes it.
struct LawParams {
  double gamma = 2.0;
  double alpha = 2.0;
  double gamma_t = 2.0;
  double alpha_t = 2.0;
  double C0 = 1.0;
  double C1 = 0.0;
  double C2 = 1.0;
  double beta = 1.0;
};

class PressureLaw {
 public:
  virtual ~PressureLaw() = default;
  virtual double eval(double rho, double n) const = 0;
  virtual double d_rho(double rho, double n) const = 0;
  virtual double d_n(double rho, double n) const = 0;
  virtual std::string name() const = 0;
  const LawParams& params() const { return params_; }

 protected:
  LawParams params_;
};

using LawPtr = std::shared_ptr<const PressureLaw>;

// Built-in law catalog.
LawPtr two_gamma(double gamma, double alpha);

struct CrossTerm {
  double c;        // coefficient, may be negative
  double gamma_i;  // 0 <= gamma_i < gamma
  double alpha_i;  // 0 <= alpha_i < alpha, gamma_i + alpha_i < max(gamma, alpha)
};
LawPtr cross_terms(double gamma, double alpha,
                   const std::vector<CrossTerm>& terms);

// rho^gamma (1 + a cos rho) + n^alpha (1 + a cos n). Default amplitude 0.5
// keeps the lower growth envelope valid; larger amplitudes are accepted and
// left to check_growth_bounds to report.
LawPtr oscillatory(double gamma, double alpha, double amplitude = 0.5);

// Smooth indicator of {s <= k}: 1 for s <= k, 0 for s >= 2k, cubic Hermite
// bridge (3t^2 - 2t^3 profile) in between. C1 monotone.
double smooth_cutoff_leq(double s, double k);
double smooth_cutoff_leq_prime(double s, double k);

// P_delta = 1_{rho+n >= delta} P + delta (rho+n)^{p0}.
class ArtificialPressure : public PressureLaw {
 public:
  // delta must lie in (0,1) and p0 > 1; the sharper requirement
  // p0 > gamma + gamma_t + alpha + alpha_t + 1 is recorded in
  // exponent_margin_ok() rather than enforced (the canonical worked
  // parameters p0 = 8 with quadratic laws sit just below it).
  ArtificialPressure(LawPtr base, double delta, double p0);

  double eval(double rho, double n) const override;
  double d_rho(double rho, double n) const override;
  double d_n(double rho, double n) const override;
  std::string name() const override;

  const PressureLaw& base() const { return *base_; }
  double delta() const { return delta_; }
  double p0() const { return p0_; }
  double cutoff_width() const { return delta_; }
  bool exponent_margin_ok() const { return margin_ok_; }

 private:
  LawPtr base_;
  double delta_;
  double p0_;
  bool margin_ok_;
};

using ArtificialPtr = std::shared_ptr<const ArtificialPressure>;

ArtificialPtr artificial_pressure(LawPtr base, double delta, double p0);

// Least-violation constant fit for the growth envelope on a sample grid over
// [0,R]^2. The fit minimizes C0 * max(1, needed_C1/C1_scale) over a
// geometric C0 ladder (refined by bisection), where C1_scale =
// 1 + 1e-3 * max(rho^gamma + n^alpha); this keeps C1 from silently absorbing
// polynomial growth. The tail audit refits on the inner quarter box and
// counts outer-sample violations, which is what detects envelopes that only
// hold on compact sets (e.g. oscillatory amplitude 2).
struct GrowthReport {
  double C0_fitted = 0.0;
  double C1_fitted = 0.0;
  double C2_fitted = 0.0;
  double C0_declared = 0.0;
  double C1_declared = 0.0;
  double C2_declared = 0.0;
  bool envelope_ok = false;    // fitted C1 within 1e6
  bool derivative_ok = false;  // fitted C2 within 1e6
  long tail_lower_violations = 0;
  long tail_upper_violations = 0;
  bool pass = false;
};

GrowthReport check_growth_bounds(const PressureLaw& law, double R,
                                 int samples_per_axis = 201);

// Helmholtz free energy G(rho, n) = theta * int_1^theta P(A s, B s) s^-2 ds,
// theta = rho + n, (A,B) = (rho,n)/theta; 0 at theta = 0. Works for any law,
// in particular G_delta = helmholtz_G(artificial law, .). Absolute error
// <= tol or QuadratureNoConvergence.
double helmholtz_G(const PressureLaw& law, double rho, double n,
                   double tol = 1e-8);

// |rho dG/drho + n dG/dn - G - P| with centered differences of step
// 1e-5 * max(1, rho+n); the quadrature correctness oracle. The second-order
// stencil caps its own validity: above rho + n ~ 4 the truncation term of
// the delta (rho+n)^p0 tail alone exceeds 1e-4, so callers pinning small
// residuals must sample inside that region.
double helmholtz_identity_residual(const PressureLaw& law, double rho,
                                   double n);

// Monotone decomposition P_delta = P1 - P2 with
// P2 = C* 1_{rho+n <= C* c_delta} ((rho+n)^{gamma_t+alpha_t} + (rho+n)).
class MonotoneSplit {
 public:
  MonotoneSplit(ArtificialPtr ap, double c_delta, double c_star);

  double p1(double rho, double n) const;
  double p2(double rho, double n) const;
  double p1_d_rho(double rho, double n) const;
  double p1_d_n(double rho, double n) const;

  double c_delta() const { return c_delta_; }
  double c_star() const { return c_star_; }
  const ArtificialPressure& pressure() const { return *ap_; }

 private:
  double correction(double theta) const;
  double correction_prime(double theta) const;
  ArtificialPtr ap_;
  double c_delta_;
  double c_star_;
  double q_;  // gamma_t + alpha_t
};

// c_delta from a log grid spanning a decade either side of the dominance
// radius (C2/delta)^{1/(p0 - max(gamma_t,alpha_t))} of the augmentation term;
// C* doubles from 2 until sampled slopes of P1 are >= -1e-8, SplitNotFound
// past 2^16.
MonotoneSplit monotone_split(ArtificialPtr ap, int radial_samples = 512,
                             int directions = 9);

}  // namespace dflx
