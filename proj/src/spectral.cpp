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

#include "dflx/spectral.hpp"

#include <cmath>
#include <numbers>

namespace dflx {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Odd multipliers must vanish on Nyquist planes (|k_i| = n/2) to keep the
// half-complex spectrum Hermitian-consistent; fields passing through the
// solver are dealiased well below that band anyway.
bool on_nyquist(const std::array<int, 3>& k, int d, int n) {
  for (int a = 0; a < d; ++a)
    if (k[a] == n / 2 || k[a] == -n / 2) return true;
  return false;
}

double k_sq(const std::array<int, 3>& k, int d) {
  double s = 0.0;
  for (int a = 0; a < d; ++a) s += static_cast<double>(k[a]) * k[a];
  return s;
}

}  // namespace

ScalarField derivative(const ScalarField& f, int axis) {
  const int d = f.grid().dim();
  const int n = f.grid().n();
  if (axis < 0 || axis >= d) throw ParamDomain("derivative axis out of range");
  return apply_multiplier(f, [=](const std::array<int, 3>& k) {
    if (k[axis] == n / 2 || k[axis] == -n / 2) return std::complex<double>(0.0);
    return std::complex<double>(0.0, kTwoPi * k[axis]);
  });
}

VectorField gradient(const ScalarField& f) {
  VectorField g(f.grid());
  for (int a = 0; a < f.grid().dim(); ++a) g[a] = derivative(f, a);
  return g;
}

ScalarField divergence(const VectorField& u) {
  ScalarField out(u.grid());
  for (int a = 0; a < u.dim(); ++a) out += derivative(u[a], a);
  return out;
}

ScalarField laplacian(const ScalarField& f) {
  const int d = f.grid().dim();
  return apply_multiplier(f, [=](const std::array<int, 3>& k) {
    return std::complex<double>(-kTwoPi * kTwoPi * k_sq(k, d), 0.0);
  });
}

VectorField laplacian(const VectorField& u) {
  VectorField out(u.grid());
  for (int a = 0; a < u.dim(); ++a) out[a] = laplacian(u[a]);
  return out;
}

VectorField grad_div(const VectorField& u) {
  return gradient(divergence(u));
}

ScalarField inv_neg_laplacian(const ScalarField& f, bool auto_demean,
                              double mean_tol) {
  const int d = f.grid().dim();
  double m = mean(f);
  if (!auto_demean && std::abs(m) > mean_tol)
    throw MeanNotZero("inv_neg_laplacian: field mean " + std::to_string(m) +
                      " exceeds tolerance");
  return apply_multiplier(f, [=](const std::array<int, 3>& k) {
    double ks = k_sq(k, d);
    if (ks == 0.0) return std::complex<double>(0.0);
    return std::complex<double>(1.0 / (kTwoPi * kTwoPi * ks), 0.0);
  });
}

ScalarField riesz(int axis, const ScalarField& f) {
  const int d = f.grid().dim();
  const int n = f.grid().n();
  if (axis < 0 || axis >= d) throw ParamDomain("riesz axis out of range");
  return apply_multiplier(f, [=](const std::array<int, 3>& k) {
    double ks = k_sq(k, d);
    if (ks == 0.0 || on_nyquist(k, d, n)) return std::complex<double>(0.0);
    return std::complex<double>(0.0, k[axis] / std::sqrt(ks));
  });
}

ScalarField riesz_riesz(int i, int j, const ScalarField& f) {
  const int d = f.grid().dim();
  const int n = f.grid().n();
  if (i < 0 || i >= d || j < 0 || j >= d)
    throw ParamDomain("riesz_riesz axis out of range");
  return apply_multiplier(f, [=](const std::array<int, 3>& k) {
    double ks = k_sq(k, d);
    if (ks == 0.0 || on_nyquist(k, d, n)) return std::complex<double>(0.0);
    return std::complex<double>(k[i] * k[j] / ks, 0.0);
  });
}

ScalarField galerkin_project(const ScalarField& f, int ell) {
  if (ell < 0) throw ParamDomain("galerkin cutoff must be nonnegative");
  if (ell >= f.grid().n() / 2) return f;
  const int d = f.grid().dim();
  return apply_multiplier(f, [=](const std::array<int, 3>& k) {
    for (int a = 0; a < d; ++a)
      if (k[a] > ell || k[a] < -ell) return std::complex<double>(0.0);
    return std::complex<double>(1.0, 0.0);
  });
}

VectorField galerkin_project(const VectorField& u, int ell) {
  VectorField out(u.grid());
  for (int a = 0; a < u.dim(); ++a) out[a] = galerkin_project(u[a], ell);
  return out;
}

ScalarField dealiased_product(const ScalarField& a, const ScalarField& b) {
  if (a.grid() != b.grid()) throw ParamDomain("product on mismatched grids");
  const int cut = a.grid().n() / 3;
  ScalarField ta = galerkin_project(a, cut);
  ScalarField tb = galerkin_project(b, cut);
  ScalarField prod(a.grid());
  for (std::size_t i = 0; i < prod.size(); ++i) prod[i] = ta[i] * tb[i];
  return galerkin_project(prod, cut);
}

namespace {

// Per-axis factor of the discrete heat-kernel maximum
// sum_k exp(-4 pi^2 tau |k|^2) over grid wavenumbers.
double axis_theta_sum(int n, double tau) {
  double s = 0.0;
  for (int idx = 0; idx < n; ++idx) {
    int k = idx <= n / 2 ? idx : idx - n;
    s += std::exp(-kTwoPi * kTwoPi * tau * k * k);
  }
  return s;
}

}  // namespace

double mollifier_time(const Grid& g, double delta, double p0) {
  if (!(delta > 0.0 && delta < 1.0))
    throw DeltaOutOfRange("mollifier delta must lie in (0,1)");
  if (!(p0 > 1.0)) throw ParamDomain("mollifier p0 must exceed 1");
  const double target_max = std::pow(delta, -1.0 / (2.0 * p0));
  const double axis_target = std::pow(target_max, 1.0 / g.dim());
  if (axis_target >= static_cast<double>(g.n())) return 0.0;  // delta kernel
  // Bisection in log tau; axis sum is strictly decreasing in tau.
  double lo = -40.0, hi = 10.0;
  for (int it = 0; it < 200; ++it) {
    double mid = 0.5 * (lo + hi);
    if (axis_theta_sum(g.n(), std::exp(mid)) > axis_target)
      lo = mid;
    else
      hi = mid;
  }
  return std::exp(0.5 * (lo + hi));
}

ScalarField mollify(const ScalarField& f, double delta, double p0) {
  const double tau = mollifier_time(f.grid(), delta, p0);
  const int d = f.grid().dim();
  return apply_multiplier(f, [=](const std::array<int, 3>& k) {
    return std::complex<double>(
        std::exp(-kTwoPi * kTwoPi * tau * k_sq(k, d)), 0.0);
  });
}

ScalarField mollifier_kernel(const Grid& g, double delta, double p0) {
  ScalarField delta_field(g);
  delta_field[0] = static_cast<double>(g.size());  // unit-mass discrete delta
  return mollify(delta_field, delta, p0);
}

double integrate(const ScalarField& f) {
  double s = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) s += f[i];
  return s * f.grid().cell_volume();
}

double mean(const ScalarField& f) { return integrate(f); }

double l_p_norm(const ScalarField& f, double p) {
  if (p < 1.0) throw ParamDomain("l_p_norm requires p >= 1");
  double s = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) s += std::pow(std::abs(f[i]), p);
  return std::pow(s * f.grid().cell_volume(), 1.0 / p);
}

double max_norm(const ScalarField& f) {
  double m = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) m = std::max(m, std::abs(f[i]));
  return m;
}

double l_p_norm(const VectorField& u, double p) {
  if (p < 1.0) throw ParamDomain("l_p_norm requires p >= 1");
  double s = 0.0;
  for (std::size_t i = 0; i < u.grid().size(); ++i) {
    double q = 0.0;
    for (int c = 0; c < u.dim(); ++c) q += u[c][i] * u[c][i];
    s += std::pow(q, 0.5 * p);
  }
  return std::pow(s * u.grid().cell_volume(), 1.0 / p);
}

double grad_sq_integral(const VectorField& u) {
  double s = 0.0;
  for (int c = 0; c < u.dim(); ++c) {
    for (int a = 0; a < u.dim(); ++a) {
      ScalarField dca = derivative(u[c], a);
      for (std::size_t i = 0; i < dca.size(); ++i) s += dca[i] * dca[i];
    }
  }
  return s * u.grid().cell_volume();
}

}  // namespace dflx
