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

#include "dflx/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "dflx/errors.hpp"
#include "dflx/fft.hpp"
#include "dflx/pressure.hpp"
#include "dflx/rng.hpp"
#include "dflx/spectral.hpp"

namespace dflx {

namespace {

constexpr double kSupportEnd = 0.75;   // kernel vanishes from here on
constexpr double kPlateauEnd = 0.5;    // pure power law up to here
constexpr double kMaxKernelH = 0.1;

double sphere_area(int d) {
  // measure of the unit sphere S^{d-1}: two points, circle, sphere
  switch (d) {
    case 1: return 2.0;
    case 2: return 2.0 * M_PI;
    default: return 4.0 * M_PI;
  }
}

double torus_radius(const Grid& g, std::size_t flat) {
  auto idx = g.decode(flat);
  double r2 = 0.0;
  for (int a = 0; a < g.dim(); ++a) {
    double z = g.periodic_coord(idx[a]);
    r2 += z * z;
  }
  return std::sqrt(r2);
}

// sum over displacements z of kernel(z) * sum over x of term(x, x - z)
template <typename Term>
double displacement_weighted_sum(const ScalarField& kernel_values,
                                 Term&& term) {
  const Grid& g = kernel_values.grid();
  const int n = g.n();
  double total = 0.0;
  if (g.dim() == 1) {
    for (int ox = 0; ox < n; ++ox) {
      const double kw = kernel_values[static_cast<std::size_t>(ox)];
      if (kw == 0.0) continue;
      double inner = 0.0;
      for (int x = 0; x < n; ++x) {
        int xs = x - ox;
        if (xs < 0) xs += n;
        inner += term(static_cast<std::size_t>(x), static_cast<std::size_t>(xs));
      }
      total += kw * inner;
    }
  } else if (g.dim() == 2) {
    for (int ox = 0; ox < n; ++ox) {
      for (int oy = 0; oy < n; ++oy) {
        const double kw =
            kernel_values[static_cast<std::size_t>(ox) * n + oy];
        if (kw == 0.0) continue;
        double inner = 0.0;
        for (int x = 0; x < n; ++x) {
          int xs = x - ox;
          if (xs < 0) xs += n;
          const std::size_t row = static_cast<std::size_t>(x) * n;
          const std::size_t row_s = static_cast<std::size_t>(xs) * n;
          for (int y = 0; y < n; ++y) {
            int ys = y - oy;
            if (ys < 0) ys += n;
            inner += term(row + y, row_s + ys);
          }
        }
        total += kw * inner;
      }
    }
  } else {
    for (int ox = 0; ox < n; ++ox) {
      for (int oy = 0; oy < n; ++oy) {
        for (int oz = 0; oz < n; ++oz) {
          const double kw =
              kernel_values[(static_cast<std::size_t>(ox) * n + oy) * n + oz];
          if (kw == 0.0) continue;
          double inner = 0.0;
          for (int x = 0; x < n; ++x) {
            int xs = x - ox;
            if (xs < 0) xs += n;
            for (int y = 0; y < n; ++y) {
              int ys = y - oy;
              if (ys < 0) ys += n;
              const std::size_t row =
                  (static_cast<std::size_t>(x) * n + y) * n;
              const std::size_t row_s =
                  (static_cast<std::size_t>(xs) * n + ys) * n;
              for (int z = 0; z < n; ++z) {
                int zs = z - oz;
                if (zs < 0) zs += n;
                inner += term(row + z, row_s + zs);
              }
            }
          }
          total += kw * inner;
        }
      }
    }
  }
  return total;
}

// circular convolution of f with a mask, both on the same grid
ScalarField fft_convolve(const ScalarField& f, const ScalarField& mask) {
  Spectrum fs = fft_forward(f);
  Spectrum ms = fft_forward(mask);
  for (std::size_t i = 0; i < fs.size(); ++i) fs[i] *= ms[i];
  ScalarField out = fft_backward(fs);
  const double scale = 1.0 / static_cast<double>(f.grid().size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] *= scale;
  return out;
}

ScalarField gradient_norm(const ScalarField& f) {
  VectorField gf = gradient(f);
  ScalarField out(f.grid());
  for (std::size_t i = 0; i < out.size(); ++i) {
    double s = 0.0;
    for (int a = 0; a < f.grid().dim(); ++a) s += gf[a][i] * gf[a][i];
    out[i] = std::sqrt(s);
  }
  return out;
}

void require_same_grid(const Grid& a, const Grid& b, const char* what) {
  if (!(a == b))
    throw ParamDomain(std::string(what) + ": fields live on different grids");
}

}  // namespace

Kernel::Kernel(const Grid& g, double h) : h_(h), values_(g), norm_l1_(0.0) {
  if (!(h > 0.0)) throw ParamDomain("kernel width h must be positive");
  if (h >= kMaxKernelH)
    throw HTooLarge("kernel width h must stay below 0.1");

  for (std::size_t i = 0; i < values_.size(); ++i)
    values_[i] = radial(torus_radius(g, i));

  // L1 norm of the continuum kernel: 256-point radial quadrature, log-spaced
  // via t = log(h + r) so the near-origin power law is resolved exactly in
  // one dimension and smoothly otherwise.
  const int d = g.dim();
  const double t0 = std::log(h_);
  const double t1 = std::log(h_ + kSupportEnd);
  constexpr int kIntervals = 64;  // 4 Gauss nodes each: 256 evaluations
  const double gauss_x[2] = {0.3399810435848563, 0.8611363115940526};
  const double gauss_w[2] = {0.6521451548625461, 0.3478548451374538};
  const double dt = (t1 - t0) / kIntervals;
  double acc = 0.0;
  for (int m = 0; m < kIntervals; ++m) {
    const double mid = t0 + (m + 0.5) * dt;
    for (int q = 0; q < 2; ++q) {
      for (int sign = -1; sign <= 1; sign += 2) {
        const double t = mid + sign * 0.5 * dt * gauss_x[q];
        const double r = std::max(std::exp(t) - h_, 0.0);
        acc += gauss_w[q] * 0.5 * dt * radial(r) *
               std::pow(r, d - 1) * std::exp(t);
      }
    }
  }
  norm_l1_ = sphere_area(d) * acc;
}

double Kernel::radial(double r) const {
  r = std::abs(r);
  const int d = grid().dim();
  if (r >= kSupportEnd) return 0.0;
  if (r <= kPlateauEnd) return std::pow(h_ + r, -d);
  // cubic Hermite from (value, slope) at 1/2 down to (0, 0) at 3/4;
  // monotone for d <= 3
  const double width = kSupportEnd - kPlateauEnd;
  const double t = (r - kPlateauEnd) / width;
  const double value = std::pow(h_ + kPlateauEnd, -d);
  const double slope = -d * std::pow(h_ + kPlateauEnd, -d - 1);
  const double h00 = (2.0 * t - 3.0) * t * t + 1.0;
  const double h10 = ((t - 2.0) * t + 1.0) * t;
  return value * h00 + slope * width * h10;
}

double L_hp(const ScalarField& f, const Kernel& kernel, double p) {
  require_same_grid(f.grid(), kernel.grid(), "L_hp");
  if (!(p >= 1.0)) throw ParamDomain("L_hp exponent p must be at least 1");
  const ScalarField& kv = kernel.values();
  double raw;
  if (p == 1.0) {
    raw = displacement_weighted_sum(kv, [&](std::size_t i, std::size_t j) {
      return std::abs(f[i] - f[j]);
    });
  } else if (p == 2.0) {
    raw = displacement_weighted_sum(kv, [&](std::size_t i, std::size_t j) {
      const double d = f[i] - f[j];
      return d * d;
    });
  } else {
    raw = displacement_weighted_sum(kv, [&](std::size_t i, std::size_t j) {
      return std::pow(std::abs(f[i] - f[j]), p);
    });
  }
  const double vol = f.grid().cell_volume();
  return raw * vol * vol / kernel.norm_l1();
}

double L_hp(const ScalarField& f, double h, double p) {
  return L_hp(f, Kernel(f.grid(), h), p);
}

double chi(double s) {
  const double a = std::abs(s);
  if (a <= 1.0) return s * s;
  if (a >= 2.0) return a;
  // quintic Hermite on [1,2]: value/slope/curvature (1,2,2) -> (2,1,0)
  const double t = a - 1.0;
  return 1.0 + t * (2.0 + t * (1.0 + t * (-9.0 + t * (11.0 - 4.0 * t))));
}

double chi_prime(double s) {
  const double a = std::abs(s);
  const double sign = s < 0.0 ? -1.0 : 1.0;
  if (a <= 1.0) return 2.0 * s;
  if (a >= 2.0) return sign;
  const double t = a - 1.0;
  return sign * (2.0 + t * (2.0 + t * (-27.0 + t * (44.0 - 20.0 * t))));
}

ChiAudit audit_chi(int samples, double range) {
  if (samples < 3 || !(range > 2.0))
    throw ParamDomain("chi audit needs samples >= 3 and range > 2");
  ChiAudit out{0.0, 0.0, 0.0};
  for (int i = 0; i < samples; ++i) {
    const double s = -range + 2.0 * range * i / (samples - 1);
    if (s == 0.0) continue;
    const double c = chi(s);
    const double ps = chi_prime(s) * s;
    out.upper_c = std::max(out.upper_c, std::max(ps / c, c / std::abs(s)));
    if (std::abs(s) >= 1.0)
      out.lower_c = std::max(out.lower_c, std::abs(s) / c);
    out.halves_ratio =
        std::max(out.halves_ratio, std::abs(c - 0.5 * ps) / (0.5 * ps));
  }
  return out;
}

double truncate_tk(double s, double k) {
  if (!(k > 0.0)) throw ParamDomain("truncation level k must be positive");
  if (!(s >= 0.0)) throw ParamDomain("truncation argument must be nonnegative");
  if (s <= k) return s;
  if (s >= 3.0 * k) return 2.0 * k;
  const double t = (s - k) / (2.0 * k);  // concave bridge, slope 1 -> 0
  return k * (1.0 + t * (2.0 - t));
}

std::pair<ScalarField, ScalarField> fractions(const ScalarField& rho,
                                              const ScalarField& n) {
  require_same_grid(rho.grid(), n.grid(), "fractions");
  ScalarField a(rho.grid());
  ScalarField b(rho.grid());
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double theta = rho[i] + n[i];
    if (theta <= 0.0) {
      a[i] = 0.0;
      b[i] = 0.0;
      continue;
    }
    double frac = rho[i] / theta;
    frac = std::clamp(frac, 0.0, 1.0);
    a[i] = frac;
    b[i] = 1.0 - frac;  // exact complement: a + b == 1 in floating point
  }
  return {std::move(a), std::move(b)};
}

ScalarField maximal_m(const ScalarField& f) {
  const Grid& g = f.grid();
  const int n = g.n();
  int levels = 0;  // radii 2^-j for j = 0..levels, smallest radius 2/n
  while ((1 << (levels + 1)) < n) ++levels;

  Spectrum fs = fft_forward(f);
  ScalarField out(g, -std::numeric_limits<double>::infinity());
  for (int j = 0; j <= levels; ++j) {
    const double r = std::ldexp(1.0, -j);
    const double r2 = r * r * (1.0 + 1e-12);
    ScalarField mask(g);
    double count = 0.0;
    for (std::size_t i = 0; i < mask.size(); ++i) {
      const double rr = torus_radius(g, i);
      if (rr * rr <= r2) {
        mask[i] = 1.0;
        count += 1.0;
      }
    }
    Spectrum ms = fft_forward(mask);
    for (std::size_t i = 0; i < ms.size(); ++i) ms[i] *= fs[i];
    ScalarField avg = fft_backward(ms);
    const double scale = 1.0 / (count * static_cast<double>(g.size()));
    for (std::size_t i = 0; i < out.size(); ++i)
      out[i] = std::max(out[i], avg[i] * scale);
  }
  return out;
}

ScalarField d_r_operator(const ScalarField& f, double r) {
  const Grid& g = f.grid();
  if (!(r > 0.0 && r <= 1.0))
    throw ParamDomain("d_r radius must lie in (0, 1]");
  const int n = g.n();
  const int d = g.dim();

  // exact radial weight per shell of width 1/n, shared across its nodes
  const int shells = static_cast<int>(std::floor(r * n)) + 1;
  std::vector<double> count(shells, 0.0);
  std::vector<int> shell_of(g.size(), -1);
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double rr = torus_radius(g, i);
    if (rr > r) continue;
    int m = static_cast<int>(std::floor(rr * n));
    if (m >= shells) m = shells - 1;
    shell_of[i] = m;
    count[m] += 1.0;
  }
  ScalarField mask(g);
  const double area = sphere_area(d);
  for (std::size_t i = 0; i < g.size(); ++i) {
    const int m = shell_of[i];
    if (m < 0) continue;
    const double lo = static_cast<double>(m) / n;
    const double hi = std::min(static_cast<double>(m + 1) / n, r);
    if (hi <= lo) continue;
    mask[i] = area * (hi - lo) / count[m];
  }

  ScalarField conv = fft_convolve(gradient_norm(f), mask);
  for (std::size_t i = 0; i < conv.size(); ++i) conv[i] /= r;
  return conv;
}

ScalarField effective_viscous_flux(const State& s, const CascadeParams& cp,
                                   const ArtificialPressure& ap) {
  const Grid& g = s.grid();
  ScalarField pressure(g);
  for (std::size_t i = 0; i < pressure.size(); ++i)
    pressure[i] = ap.eval(std::max(s.rho[i], 0.0), std::max(s.n[i], 0.0));
  const double pbar = mean(pressure);
  ScalarField divu = divergence(s.u);
  ScalarField out(g);
  const double visc = 2.0 * cp.mu + cp.lambda;
  for (std::size_t i = 0; i < out.size(); ++i)
    out[i] = pressure[i] - pbar - visc * divu[i];
  return out;
}

EvfReport effective_viscous_flux_audit(const State& s, const CascadeParams& cp,
                                       const ArtificialPressure& ap) {
  const Grid& g = s.grid();
  EvfReport report(g);
  report.direct = effective_viscous_flux(s, cp, ap);

  // momentum density rate from the semi-discrete evolution
  Derivative der = rhs_approximate(s, cp, ap);
  ScalarField theta(g);
  ScalarField dtheta(g);
  for (std::size_t i = 0; i < theta.size(); ++i) {
    theta[i] = s.rho[i] + s.n[i];
    dtheta[i] = der.drho[i] + der.dn[i];
  }
  VectorField balance(g);  // d/dt (theta u) + div(theta u x u)
  for (int a = 0; a < g.dim(); ++a) {
    for (std::size_t i = 0; i < theta.size(); ++i)
      balance[a][i] = theta[i] * der.du[a][i] + s.u[a][i] * dtheta[i];
    for (int b = 0; b < g.dim(); ++b) {
      ScalarField flux(g);
      for (std::size_t i = 0; i < flux.size(); ++i)
        flux[i] = theta[i] * s.u[a][i] * s.u[b][i];
      ScalarField dflux = derivative(flux, b);
      for (std::size_t i = 0; i < flux.size(); ++i)
        balance[a][i] += dflux[i];
    }
  }
  ScalarField raw = inv_neg_laplacian(divergence(balance));

  // density diffusion shifts the balance by eps (u lap(theta) - grad u
  // grad theta); remove it to isolate the flux combination
  VectorField comm(g);
  ScalarField lap_theta = laplacian(theta);
  VectorField grad_theta = gradient(theta);
  for (int a = 0; a < g.dim(); ++a) {
    VectorField grad_ua = gradient(s.u[a]);
    for (std::size_t i = 0; i < theta.size(); ++i) {
      double gug = 0.0;
      for (int b = 0; b < g.dim(); ++b)
        gug += grad_ua[b][i] * grad_theta[b][i];
      comm[a][i] = s.u[a][i] * lap_theta[i] - gug;
    }
  }
  ScalarField correction = inv_neg_laplacian(divergence(comm));
  for (std::size_t i = 0; i < raw.size(); ++i)
    report.represented[i] = raw[i] - cp.eps * correction[i];

  report.raw_discrepancy_l2 = l_p_norm(report.direct - raw, 2.0);
  report.discrepancy_l2 = l_p_norm(report.direct - report.represented, 2.0);
  return report;
}

ScalarField riesz_commutator(const VectorField& u, const ScalarField& g) {
  require_same_grid(u.grid(), g.grid(), "riesz_commutator");
  ScalarField out(g.grid());
  for (int j = 0; j < u.dim(); ++j) {
    ScalarField ujg(g.grid());
    for (std::size_t i = 0; i < ujg.size(); ++i) ujg[i] = u[j][i] * g[i];
    for (int i = 0; i < u.dim(); ++i) {
      ScalarField smooth = riesz_riesz(i, j, g);
      ScalarField mixed = riesz_riesz(i, j, ujg);
      for (std::size_t x = 0; x < out.size(); ++x)
        out[x] += u[j][x] * smooth[x] - mixed[x];
    }
  }
  return out;
}

ScalarField riesz_commutator_quadratic(const VectorField& u,
                                       const ScalarField& g) {
  require_same_grid(u.grid(), g.grid(), "riesz_commutator_quadratic");
  ScalarField out(g.grid());
  for (int i = 0; i < u.dim(); ++i) {
    ScalarField gui(g.grid());
    for (std::size_t x = 0; x < gui.size(); ++x) gui[x] = g[x] * u[i][x];
    for (int j = 0; j < u.dim(); ++j) {
      ScalarField guij(g.grid());
      for (std::size_t x = 0; x < guij.size(); ++x)
        guij[x] = gui[x] * u[j][x];
      ScalarField full = riesz_riesz(i, j, guij);
      ScalarField partial = riesz_riesz(i, j, gui);
      for (std::size_t x = 0; x < out.size(); ++x)
        out[x] += full[x] - u[j][x] * partial[x];
    }
  }
  return out;
}

CommutatorAudit riesz_commutator_audit(const Grid& g, int pairs,
                                       std::uint64_t seed, int kmax) {
  if (pairs < 1) throw ParamDomain("commutator audit needs at least one pair");
  CommutatorAudit out{0.0, 0.0, pairs};
  for (int p = 0; p < pairs; ++p) {
    const std::uint64_t base = seed + 1000003ULL * static_cast<std::uint64_t>(p);
    VectorField u(g);
    for (int a = 0; a < g.dim(); ++a)
      u[a] = random_band_limited(g, base + static_cast<std::uint64_t>(a), kmax,
                                 1.0);
    ScalarField gf = random_band_limited(g, base + 97ULL, kmax, 1.0);
    ScalarField comm = riesz_commutator(u, gf);
    const double denom =
        std::sqrt(grad_sq_integral(u)) * l_p_norm(gf, 4.0);
    const double ratio = l_p_norm(comm, 4.0 / 3.0) / denom;
    out.fitted_c = std::max(out.fitted_c, ratio);
    out.mean_ratio += ratio / pairs;
  }
  return out;
}

double higher_exponent(double gamma, double alpha, int d) {
  if (d < 1 || d > 3) throw ParamDomain("dimension must be 1, 2, or 3");
  if (!(gamma >= 1.0 && alpha >= 1.0))
    throw ParamDomain("growth exponents must be at least 1");
  const double value = (2.0 / d) * std::max(gamma, alpha) - 1.0;
  if (!(value > 0.0)) {
    std::ostringstream msg;
    msg << "integrability gain exponent " << value << " is not positive";
    throw ExponentNonpositive(msg.str());
  }
  return value;
}

std::pair<double, double> higher_exponents_pair(double gamma, double alpha,
                                                int d) {
  if (d < 1 || d > 3) throw ParamDomain("dimension must be 1, 2, or 3");
  if (!(gamma >= 1.0 && alpha >= 1.0))
    throw ParamDomain("growth exponents must be at least 1");
  const double lo = std::min(gamma, alpha);
  const double e1 = (2.0 / d) * gamma - gamma / lo;
  const double e2 = (2.0 / d) * alpha - alpha / lo;
  if (!(e1 > 0.0 && e2 > 0.0)) {
    std::ostringstream msg;
    msg << "split integrability exponents (" << e1 << ", " << e2
        << ") must both be positive";
    throw ExponentNonpositive(msg.str());
  }
  return {e1, e2};
}

HigherIntegrability higher_integrability_probe(
    const std::vector<State>& traj, const ArtificialPressure& ap) {
  if (traj.empty())
    throw ParamDomain("integrability probe needs a nonempty trajectory");
  const LawParams& lp = ap.params();
  const int d = traj.front().grid().dim();
  const double gain = higher_exponent(lp.gamma, lp.alpha, d);
  const auto split = higher_exponents_pair(lp.gamma, lp.alpha, d);
  const double pow_theta = std::max(lp.gamma, lp.alpha) + gain;
  const double pow_rho = lp.gamma + split.first;
  const double pow_n = lp.alpha + split.second;

  HigherIntegrability out{0.0, 0.0, 0.0};
  double prev_t = 0.0, prev_c = 0.0, prev_r = 0.0, prev_n = 0.0;
  for (std::size_t k = 0; k < traj.size(); ++k) {
    const State& s = traj[k];
    require_same_grid(s.grid(), traj.front().grid(), "integrability probe");
    ScalarField theta_p(s.grid());
    ScalarField rho_p(s.grid());
    ScalarField n_p(s.grid());
    for (std::size_t i = 0; i < theta_p.size(); ++i) {
      const double rho = std::max(s.rho[i], 0.0);
      const double n = std::max(s.n[i], 0.0);
      theta_p[i] = std::pow(rho + n, pow_theta);
      rho_p[i] = std::pow(rho, pow_rho);
      n_p[i] = std::pow(n, pow_n);
    }
    const double c = integrate(theta_p);
    const double r = integrate(rho_p);
    const double nn = integrate(n_p);
    if (k > 0) {
      const double dt = s.t - prev_t;
      if (!(dt > 0.0))
        throw ParamDomain("integrability probe needs increasing times");
      out.combined += 0.5 * dt * (c + prev_c);
      out.split_rho += 0.5 * dt * (r + prev_r);
      out.split_n += 0.5 * dt * (nn + prev_n);
    }
    prev_t = s.t;
    prev_c = c;
    prev_r = r;
    prev_n = nn;
  }
  return out;
}

EnergyDissipation energy_and_dissipation(const State& s,
                                         const CascadeParams& cp,
                                         const ArtificialPressure& ap) {
  return {state_energy(s, ap), dissipation_rate(s, cp)};
}

double weighted_compactness(const ScalarField& theta, const ScalarField& w,
                            const Kernel& kernel) {
  require_same_grid(theta.grid(), kernel.grid(), "weighted_compactness");
  require_same_grid(theta.grid(), w.grid(), "weighted_compactness");
  const double raw = displacement_weighted_sum(
      kernel.values(), [&](std::size_t i, std::size_t j) {
        return chi(theta[i] - theta[j]) * (w[i] + w[j]);
      });
  const double vol = theta.grid().cell_volume();
  return raw * vol * vol / kernel.norm_l1();
}

double weighted_compactness(const ScalarField& theta, const ScalarField& w,
                            double h) {
  return weighted_compactness(theta, w, Kernel(theta.grid(), h));
}

void DiagnosticsReport::validate() const {
  for (double h : h_list)
    if (!(h > 0.0) || !std::isfinite(h))
      throw ParamDomain("diagnostics h values must be positive and finite");
  if (!(lambda0 >= 1.0) || !(sigma_star > 0.0))
    throw ParamDomain("diagnostics needs lambda0 >= 1 and sigma_star > 0");
  double prev = -std::numeric_limits<double>::infinity();
  for (const DiagnosticsRow& row : rows) {
    if (!(row.t > prev))
      throw ParamDomain("diagnostics rows must be strictly time-ordered");
    prev = row.t;
    if (row.l_h1.size() != h_list.size())
      throw ParamDomain("diagnostics row has a mismatched oscillation table");
    bool ok = std::isfinite(row.t) && std::isfinite(row.mass_rho) &&
              std::isfinite(row.mass_n) && std::isfinite(row.energy) &&
              std::isfinite(row.dissipation_cum) &&
              std::isfinite(row.ratio_min) && std::isfinite(row.ratio_max) &&
              std::isfinite(row.e_w) && std::isfinite(row.chain_rhs) &&
              std::isfinite(row.comm_ratio);
    for (double v : row.l_h1) ok = ok && std::isfinite(v);
    if (!ok) throw NonFinite("diagnostics row contains a non-finite entry");
  }
}

DiagnosticsReport diagnose_trajectory(const std::vector<State>& traj,
                                      const CascadeParams& cp,
                                      const ArtificialPressure& ap,
                                      const std::vector<double>& h_list,
                                      const WeightParams& wp,
                                      double sigma_star) {
  if (traj.empty())
    throw ParamDomain("diagnostics need a nonempty trajectory");
  if (h_list.empty())
    throw ParamDomain("diagnostics need at least one kernel width");
  const Grid& g = traj.front().grid();

  std::vector<Kernel> kernels;
  kernels.reserve(h_list.size());
  for (double h : h_list) kernels.emplace_back(g, h);

  std::vector<WeightField> weights = weight_evolve(traj, ap, wp);

  DiagnosticsReport report;
  report.h_list = h_list;
  report.lambda0 = wp.lambda0;
  report.sigma_star = sigma_star;
  double dissipation_cum = 0.0;
  double prev_t = 0.0, prev_rate = 0.0;
  for (std::size_t k = 0; k < traj.size(); ++k) {
    const State& s = traj[k];
    require_same_grid(s.grid(), g, "diagnose_trajectory");
    const double rate = dissipation_rate(s, cp);
    if (k > 0) dissipation_cum += 0.5 * (s.t - prev_t) * (rate + prev_rate);
    prev_t = s.t;
    prev_rate = rate;

    DiagnosticsRow row;
    row.t = s.t;
    row.mass_rho = integrate(s.rho);
    row.mass_n = integrate(s.n);
    row.energy = state_energy(s, ap);
    row.dissipation_cum = dissipation_cum;
    row.ratio_min = std::numeric_limits<double>::infinity();
    row.ratio_max = -std::numeric_limits<double>::infinity();
    ScalarField theta(g);
    for (std::size_t i = 0; i < theta.size(); ++i) {
      theta[i] = s.rho[i] + s.n[i];
      if (s.rho[i] > 0.0) {
        const double ratio = s.n[i] / s.rho[i];
        row.ratio_min = std::min(row.ratio_min, ratio);
        row.ratio_max = std::max(row.ratio_max, ratio);
      }
    }
    if (row.ratio_min > row.ratio_max) {  // fully vacuous density
      row.ratio_min = 0.0;
      row.ratio_max = 0.0;
    }
    for (const Kernel& kernel : kernels)
      row.l_h1.push_back(L_hp(theta, kernel, 1.0));
    row.e_w = weighted_compactness(theta, weights[k].w, kernels.front());
    row.chain_rhs =
        (1.0 + wp.lambda0) /
            std::log(1.0 + std::abs(std::log(report.sigma_star))) +
        row.e_w / report.sigma_star;
    const double comm_denom =
        std::sqrt(grad_sq_integral(s.u)) * l_p_norm(theta, 4.0);
    row.comm_ratio =
        comm_denom > 0.0
            ? l_p_norm(riesz_commutator(s.u, theta), 4.0 / 3.0) / comm_denom
            : 0.0;
    row.weight_clips = weights[k].clip_count;
    row.weight_bound_violations = weights[k].bound_violations;
    report.rows.push_back(std::move(row));
  }
  report.validate();
  return report;
}

}  // namespace dflx
