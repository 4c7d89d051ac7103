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

#include "dflx/solver.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "dflx/errors.hpp"
#include "dflx/fft.hpp"
#include "dflx/spectral.hpp"

namespace dflx {
namespace {

constexpr double kPi = 3.14159265358979323846;
// densities may round below zero by this much before the step is rejected
constexpr double kNegativityTol = 1e-10;

void axpy(ScalarField& y, const ScalarField& x, double a) {
  for (std::size_t i = 0; i < y.size(); ++i) y[i] += a * x[i];
}

// e^{nu t Lap} as a diagonal Fourier factor (t < 0 grows; used by the
// downwind stage of the integrating-factor Runge-Kutta scheme).
ScalarField heat_decay(const ScalarField& f, double nu, double t) {
  const double c = 4.0 * kPi * kPi * nu * t;
  return apply_multiplier(f, [c](const std::array<int, 3>& k) {
    const double k2 =
        double(k[0]) * k[0] + double(k[1]) * k[1] + double(k[2]) * k[2];
    return std::complex<double>(std::exp(-c * k2), 0.0);
  });
}

// Exact Fourier flow of the frozen-coefficient Lame operator
// [mu Lap + (mu+lambda) grad div] / theta_bar on modes |k|_inf <= ell.
// Each mode decouples into the component along k, which decays with
// 2 mu + lambda, and the complement, which decays with mu alone. Modes
// above the cutoff belong to the frozen complement of the velocity
// projection and pass through unchanged.
VectorField lame_decay(const VectorField& u, double mu, double lambda,
                       double theta_bar, double t, int ell) {
  const Grid& g = u.grid();
  const int d = g.dim();
  const double cperp = 4.0 * kPi * kPi * mu / theta_bar * t;
  const double cpar = 4.0 * kPi * kPi * (2.0 * mu + lambda) / theta_bar * t;
  std::vector<Spectrum> sp;
  sp.reserve(d);
  for (int c = 0; c < d; ++c) sp.push_back(fft_forward(u[c]));
  for (std::size_t i = 0; i < sp[0].size(); ++i) {
    const std::array<int, 3> k = sp[0].wavenumbers(i);
    const int kinf = std::max({std::abs(k[0]), std::abs(k[1]), std::abs(k[2])});
    if (kinf == 0 || kinf > ell) continue;
    const double k2 =
        double(k[0]) * k[0] + double(k[1]) * k[1] + double(k[2]) * k[2];
    const double ep = std::exp(-cperp * k2);
    const double ea = std::exp(-cpar * k2);
    std::complex<double> dot(0.0, 0.0);
    for (int c = 0; c < d; ++c) dot += double(k[c]) * sp[c][i];
    for (int c = 0; c < d; ++c) {
      const std::complex<double> par = (double(k[c]) / k2) * dot;
      sp[c][i] = ep * (sp[c][i] - par) + ea * par;
    }
  }
  VectorField out(g);
  const double inv = 1.0 / double(g.size());
  for (int c = 0; c < d; ++c) {
    ScalarField b = fft_backward(sp[c]);
    for (std::size_t i = 0; i < b.size(); ++i) b[i] *= inv;
    out[c] = b;
  }
  return out;
}

// Explicit part of the semi-discrete system: advection fluxes for the
// densities and the full velocity balance minus the frozen-coefficient
// viscous term handled by the integrating factor. The remainder
// (1/theta - 1/theta_bar) [mu Lap u + (mu+lambda) grad div u] keeps the
// split consistent with the pointwise division by theta.
Derivative explicit_rhs(const State& s, const CascadeParams& cp,
                        const ArtificialPressure& ap, double theta_bar,
                        bool advect, bool freeze_velocity) {
  const Grid& g = s.grid();
  const int d = g.dim();
  Derivative out(g);
  ScalarField th = s.rho;
  th += s.n;
  const double th_min = th.min();
  if (th_min < 0.5 * cp.delta) {
    std::ostringstream os;
    os << "vacuum: min(rho+n) = " << th_min << " fell below delta/2 = "
       << 0.5 * cp.delta;
    throw VacuumEncountered(os.str());
  }

  if (advect) {
    VectorField frho(g);
    VectorField fn(g);
    for (int a = 0; a < d; ++a) {
      frho[a] = dealiased_product(s.rho, s.u[a]);
      fn[a] = dealiased_product(s.n, s.u[a]);
    }
    out.drho -= divergence(frho);
    out.dn -= divergence(fn);
  }
  if (freeze_velocity) return out;

  ScalarField p(g);
  for (std::size_t i = 0; i < p.size(); ++i)
    p[i] = ap.eval(s.rho[i], s.n[i]);
  const VectorField gp = gradient(p);
  const VectorField gth = gradient(th);
  const VectorField lap_u = laplacian(s.u);
  const VectorField gdiv = grad_div(s.u);
  std::vector<VectorField> gu;  // gu[i][j] = d_j u_i
  gu.reserve(d);
  for (int i = 0; i < d; ++i) gu.push_back(gradient(s.u[i]));

  for (int i = 0; i < d; ++i) {
    ScalarField adv(g);  // (u . grad) u_i
    ScalarField gug(g);  // sum_j (d_j u_i)(d_j theta)
    for (int j = 0; j < d; ++j) {
      adv += dealiased_product(s.u[j], gu[i][j]);
      gug += dealiased_product(gu[i][j], gth[j]);
    }
    ScalarField& du = out.du[i];
    for (std::size_t m = 0; m < du.size(); ++m) {
      const double inv_th = 1.0 / th[m];
      const double visc =
          cp.mu * lap_u[i][m] + (cp.mu + cp.lambda) * gdiv[i][m];
      du[m] = -adv[m] - (gp[i][m] + cp.eps * gug[m]) * inv_th +
              (inv_th - 1.0 / theta_bar) * visc;
    }
  }
  out.du = galerkin_project(out.du, cp.ell);
  return out;
}

State apply_decay(const State& s, const CascadeParams& cp, double theta_bar,
                  double t, bool freeze_velocity) {
  State y = s;
  if (t == 0.0) return y;
  if (cp.eps > 0.0) {
    y.rho = heat_decay(s.rho, cp.eps, t);
    y.n = heat_decay(s.n, cp.eps, t);
  }
  if (!freeze_velocity)
    y.u = lame_decay(s.u, cp.mu, cp.lambda, theta_bar, t, cp.ell);
  return y;
}

// decay operators applied to a stage derivative (same factors as states)
Derivative decay_rhs(const Derivative& d, const CascadeParams& cp,
                     double theta_bar, double t, bool freeze_velocity) {
  Derivative out(d.drho.grid());
  if (cp.eps > 0.0) {
    out.drho = heat_decay(d.drho, cp.eps, t);
    out.dn = heat_decay(d.dn, cp.eps, t);
  } else {
    out.drho = d.drho;
    out.dn = d.dn;
  }
  if (!freeze_velocity)
    out.du = lame_decay(d.du, cp.mu, cp.lambda, theta_bar, t, cp.ell);
  return out;
}

State euler_update(const State& s, const Derivative& d, double dt) {
  State y = s;
  axpy(y.rho, d.drho, dt);
  axpy(y.n, d.dn, dt);
  for (int c = 0; c < y.u.dim(); ++c) axpy(y.u[c], d.du[c], dt);
  return y;
}

std::string stage_message(std::size_t k, const CascadeStage& st,
                          const char* what) {
  std::ostringstream os;
  os << "cascade stage " << k << " (ell = " << st.ell << ", eps = " << st.eps
     << ", delta = " << st.delta << "): " << what;
  return os.str();
}

}  // namespace

CascadeParams::CascadeParams(double eps_, double delta_, int ell_, double mu_,
                             double lambda_, double p0_)
    : eps(eps_), delta(delta_), ell(ell_), mu(mu_), lambda(lambda_), p0(p0_) {
  if (!(eps >= 0.0) || !(eps < 1.0))
    throw ParamDomain("eps must lie in [0,1)");
  if (!(delta > 0.0) || !(delta < 1.0))
    throw DeltaOutOfRange("delta must lie in (0,1)");
  if (ell < 1) throw ParamDomain("ell must be at least 1");
  if (!(mu > 0.0)) throw ParamDomain("mu must be positive");
  if (!(2.0 * mu + lambda > 0.0))
    throw ParamDomain("2 mu + lambda must be positive");
  if (!(p0 > 1.0)) throw ParamDomain("p0 must exceed 1");
}

State regularize_initial_data(const ScalarField& rho0, const ScalarField& n0,
                              const VectorField& m0, double delta, double p0) {
  const Grid& g = rho0.grid();
  if (n0.grid() != g || m0.grid() != g)
    throw ParamDomain("initial data fields live on different grids");
  if (rho0.min() < -kNegativityTol || n0.min() < -kNegativityTol)
    throw ParamDomain("initial densities must be nonnegative");
  const int d = g.dim();

  VectorField ratio(g);  // m0 / sqrt(rho0 + n0), zero on vacuum
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double th0 = std::max(rho0[i], 0.0) + std::max(n0[i], 0.0);
    if (th0 <= 1e-14) {
      for (int c = 0; c < d; ++c)
        if (std::abs(m0[c][i]) > 1e-12)
          throw InconsistentData(
              "momentum must vanish where the raw densities do");
    } else {
      const double inv_sqrt = 1.0 / std::sqrt(th0);
      for (int c = 0; c < d; ++c) ratio[c][i] = m0[c][i] * inv_sqrt;
    }
  }

  State out(g);
  out.rho = mollify(rho0, delta, p0);
  out.n = mollify(n0, delta, p0);
  for (std::size_t i = 0; i < g.size(); ++i) {
    out.rho[i] += delta;
    out.n[i] += delta;
  }
  for (int c = 0; c < d; ++c) {
    const ScalarField mc = mollify(ratio[c], delta, p0);
    for (std::size_t i = 0; i < g.size(); ++i)
      out.u[c][i] = mc[i] / std::sqrt(out.rho[i] + out.n[i]);
  }
  out.t = 0.0;
  return out;
}

Derivative rhs_approximate(const State& s, const CascadeParams& cp,
                           const ArtificialPressure& ap, bool advect) {
  const double tb = mean(s.rho) + mean(s.n);
  Derivative out = explicit_rhs(s, cp, ap, tb, advect, false);
  if (cp.eps > 0.0) {
    ScalarField lr = laplacian(s.rho);
    lr *= cp.eps;
    out.drho += lr;
    ScalarField ln = laplacian(s.n);
    ln *= cp.eps;
    out.dn += ln;
  }
  const VectorField lap_u = laplacian(s.u);
  const VectorField gdiv = grad_div(s.u);
  VectorField lin(s.grid());
  for (int c = 0; c < lin.dim(); ++c)
    for (std::size_t i = 0; i < s.rho.size(); ++i)
      lin[c][i] =
          (cp.mu * lap_u[c][i] + (cp.mu + cp.lambda) * gdiv[c][i]) / tb;
  lin = galerkin_project(lin, cp.ell);
  for (int c = 0; c < lin.dim(); ++c) out.du[c] += lin[c];
  return out;
}

double cfl_dt(const State& s, const CascadeParams&,
              const ArtificialPressure& ap, const StepControls& ctl,
              bool* stiff) {
  if (!(ctl.cfl > 0.0) || !(ctl.cfl <= 1.0))
    throw ParamDomain("cfl must lie in (0,1]");
  if (!(ctl.max_dt > 0.0)) throw ParamDomain("max_dt must be positive");
  if (stiff) *stiff = false;
  double c2_max = 0.0;
  bool negative = false;
  for (std::size_t i = 0; i < s.rho.size(); ++i) {
    const double c2 = ap.d_rho(s.rho[i], s.n[i]) + ap.d_n(s.rho[i], s.n[i]);
    if (c2 < 0.0)
      negative = true;
    else
      c2_max = std::max(c2_max, c2);
  }
  if (negative && stiff) *stiff = true;
  const double c_max = std::max(std::sqrt(c2_max), 1e-8);
  const double dt = ctl.cfl * s.grid().spacing() / (s.u.max_norm() + c_max);
  return std::min(dt, ctl.max_dt);
}

double viscous_remainder_dt(const State& s, const CascadeParams& cp) {
  const double tb = mean(s.rho) + mean(s.n);
  if (!(tb > 0.0)) return 1e-8;
  double dev = 0.0;
  for (std::size_t i = 0; i < s.rho.size(); ++i) {
    const double theta = s.rho[i] + s.n[i];
    if (!(theta > 0.0)) return 1e-8;  // step will report the vacuum itself
    dev = std::max(dev, std::abs(1.0 / theta - 1.0 / tb));
  }
  if (dev == 0.0) return std::numeric_limits<double>::infinity();
  const int kmax = std::min(cp.ell, s.grid().n() / 2);
  const double k2 = static_cast<double>(s.grid().dim()) *
                    static_cast<double>(kmax) * static_cast<double>(kmax);
  const double coeff = std::max(cp.mu, 2.0 * cp.mu + cp.lambda);
  const double rate = dev * coeff * 4.0 * M_PI * M_PI * k2;
  // explicit RK3 keeps the real-axis interval (-2.51, 0]; stay inside
  return 2.0 / rate;
}

State step(const State& s, double dt, const CascadeParams& cp,
           const ArtificialPressure& ap, const RunConfig& rc) {
  if (!(dt > 0.0) || !std::isfinite(dt))
    throw ParamDomain("dt must be positive and finite");
  const double tb = mean(s.rho) + mean(s.n);
  const bool fv = rc.freeze_velocity;

  // Third-order integrating-factor Runge-Kutta with forward abscissae
  // (0, 1/3, 2/3): every decay factor acts with a nonnegative time, so no
  // stage ever amplifies the strongly damped modes. The backward-looking
  // Shu-Osher combination would apply the inverse factor exp(+nu k^2 dt/2),
  // which explodes roundoff once nu k^2 dt is large.
  const Derivative k0 = explicit_rhs(s, cp, ap, tb, rc.advect, fv);
  State sa = apply_decay(euler_update(s, k0, dt / 3.0), cp, tb, dt / 3.0, fv);
  sa.t = s.t + dt / 3.0;

  const Derivative ka = explicit_rhs(sa, cp, ap, tb, rc.advect, fv);
  State sb = euler_update(apply_decay(s, cp, tb, 2.0 * dt / 3.0, fv),
                          decay_rhs(ka, cp, tb, dt / 3.0, fv), 2.0 * dt / 3.0);
  sb.t = s.t + 2.0 * dt / 3.0;

  const Derivative kb = explicit_rhs(sb, cp, ap, tb, rc.advect, fv);
  State out = euler_update(
      euler_update(apply_decay(s, cp, tb, dt, fv),
                   decay_rhs(k0, cp, tb, dt, fv), 0.25 * dt),
      decay_rhs(kb, cp, tb, dt / 3.0, fv), 0.75 * dt);
  out.t = s.t + dt;

  if (!out.rho.finite() || !out.n.finite() || !out.u.finite())
    throw NonFinite("step produced non-finite fields");
  if (out.rho.min() < -kNegativityTol || out.n.min() < -kNegativityTol) {
    std::ostringstream os;
    os << "density negativity beyond tolerance: min(rho) = " << out.rho.min()
       << ", min(n) = " << out.n.min();
    throw NonFinite(os.str());
  }
  return out;
}

double state_energy(const State& s, const ArtificialPressure& ap) {
  double acc = 0.0;
  for (std::size_t i = 0; i < s.rho.size(); ++i) {
    double u2 = 0.0;
    for (int c = 0; c < s.u.dim(); ++c) u2 += s.u[c][i] * s.u[c][i];
    const double rho = std::max(s.rho[i], 0.0);
    const double n = std::max(s.n[i], 0.0);
    acc += 0.5 * (rho + n) * u2 + helmholtz_G(ap, rho, n);
  }
  return acc * s.grid().cell_volume();
}

double dissipation_rate(const State& s, const CascadeParams& cp) {
  const double gsq = grad_sq_integral(s.u);
  const double div2 = l_p_norm(divergence(s.u), 2.0);
  return cp.mu * gsq + (cp.mu + cp.lambda) * div2 * div2;
}

RunResult run(const State& init, const CascadeParams& cp,
              const ArtificialPressure& ap, const RunConfig& rc,
              const RunObserver& observer) {
  if (!std::isfinite(rc.t_end) || rc.t_end < init.t)
    throw ParamDomain("t_end must be finite and not precede the start time");
  if (rc.sample_every < 1) throw ParamDomain("sample_every must be >= 1");

  RunResult rr(init.grid());
  State s = init;
  double dis = 0.0;
  double d_prev = dissipation_rate(s, cp);
  const auto record = [&](const State& x) {
    TimeSample ts;
    ts.t = x.t;
    ts.mass_rho = integrate(x.rho);
    ts.mass_n = integrate(x.n);
    ts.energy = state_energy(x, ap);
    ts.dissipation_cum = dis;
    ScalarField th = x.rho;
    th += x.n;
    ts.min_theta = th.min();
    rr.samples.push_back(ts);
    if (observer) observer(x, ts);
  };

  record(s);
  const double tol = 1e-12 * std::max(1.0, std::abs(rc.t_end));
  while (s.t < rc.t_end - tol) {
    bool stiff = false;
    double dt = rc.stepping.fixed_dt > 0.0
                    ? rc.stepping.fixed_dt
                    : std::min(cfl_dt(s, cp, ap, rc.stepping, &stiff),
                               rc.freeze_velocity
                                   ? std::numeric_limits<double>::infinity()
                                   : viscous_remainder_dt(s, cp));
    rr.stiffness_flagged = rr.stiffness_flagged || stiff;
    dt = std::min(dt, rc.t_end - s.t);
    s = step(s, dt, cp, ap, rc);
    ++rr.steps;
    const double d_now = dissipation_rate(s, cp);
    dis += 0.5 * (d_prev + d_now) * dt;
    d_prev = d_now;
    if (rr.steps % rc.sample_every == 0 && s.t < rc.t_end - tol) record(s);
  }
  if (rr.steps > 0) record(s);
  rr.final_state = s;
  rr.dissipation_integral = dis;
  return rr;
}

CascadeResult run_cascade(const ScalarField& rho0, const ScalarField& n0,
                          const VectorField& m0, LawPtr base,
                          const std::vector<CascadeStage>& schedule, double mu,
                          double lambda, double p0, const RunConfig& rc,
                          const StageObserver& observer) {
  if (schedule.empty()) throw ParamDomain("cascade schedule is empty");
  for (std::size_t k = 1; k < schedule.size(); ++k) {
    if (schedule[k].ell < schedule[k - 1].ell ||
        schedule[k].eps > schedule[k - 1].eps ||
        schedule[k].delta > schedule[k - 1].delta)
      throw ParamDomain(
          "cascade schedule must tighten monotonically: ell nondecreasing, "
          "eps and delta nonincreasing");
  }

  CascadeResult cr;
  for (std::size_t k = 0; k < schedule.size(); ++k) {
    const CascadeStage& st = schedule[k];
    try {
      const CascadeParams cp(st.eps, st.delta, st.ell, mu, lambda, p0);
      const ArtificialPtr ap = artificial_pressure(base, st.delta, p0);
      const State s0 = regularize_initial_data(rho0, n0, m0, st.delta, p0);
      RunObserver stage_obs = nullptr;
      if (observer)
        stage_obs = [&observer, k](const State& s, const TimeSample& ts) {
          observer(k, s, ts);
        };
      RunResult r = run(s0, cp, *ap, rc, stage_obs);
      cr.stages.push_back(StageOutcome{st, std::move(r)});
    } catch (const VacuumEncountered& e) {
      throw VacuumEncountered(stage_message(k, st, e.what()));
    } catch (const NonFinite& e) {
      throw NonFinite(stage_message(k, st, e.what()));
    } catch (const SplitNotFound& e) {
      throw SplitNotFound(stage_message(k, st, e.what()));
    } catch (const QuadratureNoConvergence& e) {
      throw QuadratureNoConvergence(stage_message(k, st, e.what()));
    }
  }

  for (std::size_t k = 1; k < cr.stages.size(); ++k) {
    ScalarField dr = cr.stages[k].result.final_state.rho;
    dr -= cr.stages[k - 1].result.final_state.rho;
    cr.l1_rho_diff.push_back(l_p_norm(dr, 1.0));
    ScalarField dn = cr.stages[k].result.final_state.n;
    dn -= cr.stages[k - 1].result.final_state.n;
    cr.l1_n_diff.push_back(l_p_norm(dn, 1.0));
  }
  return cr;
}

}  // namespace dflx
