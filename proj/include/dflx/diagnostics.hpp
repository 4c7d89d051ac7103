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

#include <cstdint>
#include <utility>
#include <vector>

#include "dflx/grid.hpp"
#include "dflx/solver.hpp"

namespace dflx {

// Symmetric periodic kernel concentrating logarithmic mass near the origin:
// (h + |x|)^{-d} up to radius 1/2, zero beyond 3/4, monotone cubic Hermite
// bridge in between. norm_l1 integrates the radial profile with the full
// spherical measure on a 256-point quadrature (log-spaced around the h
// scale); the ratio norm_l1/|log h| stays inside one fixed bracket.
class Kernel {
 public:
  // h must lie in (0, 0.1): HTooLarge at or above, ParamDomain at or below 0.
  Kernel(const Grid& g, double h);

  double h() const { return h_; }
  const Grid& grid() const { return values_.grid(); }
  // kernel sampled at the periodic displacement of every grid node
  const ScalarField& values() const { return values_; }
  double norm_l1() const { return norm_l1_; }
  // radial profile at distance r >= 0
  double radial(double r) const;

 private:
  double h_;
  ScalarField values_;
  double norm_l1_;
};

// Translation-averaged p-oscillation
//   (1/norm_l1) sum_z vol K_h(z) int |f(x) - f(x-z)|^p dx,
// the compactness functional: uniform smallness as h -> 0 on a family is
// strong L^p compactness. Constants drop out; scaling is |c|^p.
double L_hp(const ScalarField& f, const Kernel& kernel, double p);
double L_hp(const ScalarField& f, double h, double p);

// Even C1 truncation: s^2 inside the unit ball, |s| outside radius 2, a
// monotone quintic bridge between (value and slope matched at both joints).
double chi(double s);
double chi_prime(double s);

struct ChiAudit {
  double upper_c;       // sup of max(chi'(s) s / chi, chi / |s|)
  double lower_c;       // sup over |s| >= 1 of |s| / chi
  double halves_ratio;  // sup |chi - chi' s / 2| / (chi' s / 2)
};
ChiAudit audit_chi(int samples = 4001, double range = 8.0);

// Concave C1 level truncation: s below k, 2k above 3k, quadratic bridge
// with slope 1 at k and 0 at 3k. k > 0 and s >= 0 required.
double truncate_tk(double s, double k);

// Phase fractions (rho, n) -> (rho/(rho+n), n/(rho+n)), (0,0) on vacuum.
// The pair sums to exactly one off vacuum.
std::pair<ScalarField, ScalarField> fractions(const ScalarField& rho,
                                              const ScalarField& n);

// Localized maximal operator: pointwise max of ball averages over the
// dyadic radius ladder 2^-j, j = 0..log2(n/2) (averages via FFT masks).
ScalarField maximal_m(const ScalarField& f);

// Fractional-gradient average (1/r) int_{|z|<=r} |grad f(x+z)| |z|^{1-d} dz
// with the singular weight integrated exactly over radial shells.
ScalarField d_r_operator(const ScalarField& f, double r);

// F = P_delta - mean(P_delta) - (2 mu + lambda) div u.
ScalarField effective_viscous_flux(const State& s, const CascadeParams& cp,
                                   const ArtificialPressure& ap);

struct EvfReport {
  ScalarField direct;       // pressure/divergence combination above
  ScalarField represented;  // (-Lap)^{-1} div of the momentum balance, with
                            // the density-diffusion commutator removed
  double raw_discrepancy_l2;  // against the plain (-Lap)^{-1} div form
  double discrepancy_l2;      // against `represented`

  EvfReport(const Grid& g) : direct(g), represented(g) {}
};
// Cross-check of the two flux representations on one snapshot; the time
// derivative of the momentum density is evaluated from the semi-discrete
// right-hand side, not from finite differences in time.
EvfReport effective_viscous_flux_audit(const State& s, const CascadeParams& cp,
                                       const ArtificialPressure& ap);

// sum_{i,j} [ u_j R_iR_j g - R_iR_j(u_j g) ] with R the Riesz transforms.
ScalarField riesz_commutator(const VectorField& u, const ScalarField& g);
// Quadratic variant sum_{i,j} [ R_iR_j(g u_i u_j) - u_j R_iR_j(g u_i) ].
ScalarField riesz_commutator_quadratic(const VectorField& u,
                                       const ScalarField& g);

struct CommutatorAudit {
  double fitted_c;    // max over pairs of |comm|_{4/3} / (|grad u|_2 |g|_4)
  double mean_ratio;  // average of the same ratio
  int pairs;
};
// Random band-limited inputs; the draw depends only on (seed, kmax), so the
// same audit on a finer grid sees the same underlying fields.
CommutatorAudit riesz_commutator_audit(const Grid& g, int pairs,
                                       std::uint64_t seed, int kmax);

struct WeightParams {
  double lambda0 = 1.0;   // damping rate, >= 1
  double m_const = 1.0;   // coefficient of the maximal term in the damping
  double bound_tol = 1e-3;
};

struct WeightField {
  ScalarField w;          // in [0,1]
  double lambda0;
  double m_const;
  long clip_count;        // cumulative clips to [0,1] up to this time
  long bound_violations;  // nodes with w > exp(-lambda0 theta) + bound_tol

  explicit WeightField(const Grid& g)
      : w(g), lambda0(1.0), m_const(1.0), clip_count(0), bound_violations(0) {}
};

// Damping field theta|div u| + |div u| + M_const M|grad u| + rho^gamma +
// rho^gamma_t + n^alpha + n^alpha_t + 1 (exponents from the law parameters).
ScalarField xi_damping(const State& s, const ArtificialPressure& ap,
                       double m_const = 1.0);

// Damped transport of w along a state trajectory: w(0) = exp(-lambda0
// theta(0)), then per interval a semi-Lagrangian advection step (periodic
// multilinear interpolation at foot points) followed by exact exponential
// damping. Values are clipped to [0,1] with clips counted; the pointwise
// upper bound exp(-lambda0 theta) + bound_tol is checked at every output.
std::vector<WeightField> weight_evolve(const std::vector<State>& traj,
                                       const ArtificialPressure& ap,
                                       const WeightParams& wp = {});

// Periodic multilinear interpolation of grid samples at a torus point.
double sample_periodic_linear(const ScalarField& f,
                              const std::array<double, 3>& x);

// E_w = sum_z vol Kbar_h(z) int chi(theta(x) - theta(x-z))
//                              (w(x) + w(x-z)) dx,  Kbar = K / norm_l1.
double weighted_compactness(const ScalarField& theta, const ScalarField& w,
                            const Kernel& kernel);
double weighted_compactness(const ScalarField& theta, const ScalarField& w,
                            double h);

// Integrability gain exponents; ExponentNonpositive when the formula leaves
// the admissible regime.
double higher_exponent(double gamma, double alpha, int d);  // (2/d)max - 1
// ((2/d)gamma - gamma/min, (2/d)alpha - alpha/min)
std::pair<double, double> higher_exponents_pair(double gamma, double alpha,
                                                int d);

struct HigherIntegrability {
  double combined;   // int_t int_x theta^{max(gamma,alpha) + exponent}
  double split_rho;  // int_t int_x rho^{gamma + exponent_1}
  double split_n;    // int_t int_x n^{alpha + exponent_2}
};
HigherIntegrability higher_integrability_probe(const std::vector<State>& traj,
                                               const ArtificialPressure& ap);

struct EnergyDissipation {
  double energy;
  double dissipation;
};
EnergyDissipation energy_and_dissipation(const State& s,
                                         const CascadeParams& cp,
                                         const ArtificialPressure& ap);

struct DiagnosticsRow {
  double t;
  double mass_rho;
  double mass_n;
  double energy;
  double dissipation_cum;
  double ratio_min;  // pointwise n/rho extremes
  double ratio_max;
  std::vector<double> l_h1;  // L_{h,1}(rho+n), one entry per configured h
  double e_w;                // weighted functional at the first configured h
  // (1+lambda0)/log(1+|log sigma*|) + e_w/sigma*, the unit-constant right
  // side of the bound L_{h,1}^2 <= C chain_rhs
  double chain_rhs;
  // |sum_ij u_j R_iR_j theta - R_iR_j(u_j theta)|_{4/3} over
  // |grad u|_{L2} |theta|_{L4}; zero when the state is at rest
  double comm_ratio;
  long weight_clips;
  long weight_bound_violations;
};

struct DiagnosticsReport {
  std::vector<double> h_list;
  double lambda0 = 1.0;
  double sigma_star = 1e-2;
  std::vector<DiagnosticsRow> rows;

  // rows time-ordered with every entry finite; throws NonFinite/ParamDomain
  void validate() const;
};

DiagnosticsReport diagnose_trajectory(const std::vector<State>& traj,
                                      const CascadeParams& cp,
                                      const ArtificialPressure& ap,
                                      const std::vector<double>& h_list,
                                      const WeightParams& wp = {},
                                      double sigma_star = 1e-2);

}  // namespace dflx
