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

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>

#include "dflx/pressure.hpp"

namespace dflx {

double helmholtz_G(const PressureLaw& law, double rho, double n, double tol) {
  if (rho < 0.0 || n < 0.0)
    throw ParamDomain("free energy requires nonnegative densities");
  const double theta = rho + n;
  if (theta == 0.0) return 0.0;
  if (theta < 1e-8) {
    // The quadrature interval end sits against 0; only the augmentation
    // term of an artificial pressure contributes at this magnitude.
    if (const auto* ap = dynamic_cast<const ArtificialPressure*>(&law))
      return ap->delta() * (std::pow(theta, ap->p0()) - theta) /
             (ap->p0() - 1.0);
    return 0.0;
  }
  if (theta == 1.0) return 0.0;

  const double A = rho / theta, B = n / theta;
  auto integrand = [&](double s) { return law.eval(A * s, B * s) / (s * s); };
  const double lo = std::min(1.0, theta), hi = std::max(1.0, theta);
  double err = 0.0;
  double I = boost::math::quadrature::gauss_kronrod<double, 15>::integrate(
      integrand, lo, hi, 12, 1e-12, &err);
  if (theta < 1.0) I = -I;
  const double G = theta * I;
  if (!std::isfinite(G) || theta * err > std::max(tol, tol * std::abs(G)))
    throw QuadratureNoConvergence("free energy quadrature error above target");
  return G;
}

double helmholtz_identity_residual(const PressureLaw& law, double rho,
                                   double n) {
  const double theta = rho + n;
  if (theta <= 0.0)
    throw ParamDomain("identity residual requires rho + n > 0");
  const double h = 1e-5 * std::max(1.0, theta);
  auto partial = [&](double x, double y, bool wrt_rho) {
    double step = std::min(h, wrt_rho ? x : y);
    if (step <= 0.0) {
      double up = wrt_rho ? helmholtz_G(law, x + h, y)
                          : helmholtz_G(law, x, y + h);
      return (up - helmholtz_G(law, x, y)) / h;
    }
    double up = wrt_rho ? helmholtz_G(law, x + step, y)
                        : helmholtz_G(law, x, y + step);
    double dn = wrt_rho ? helmholtz_G(law, x - step, y)
                        : helmholtz_G(law, x, y - step);
    return (up - dn) / (2.0 * step);
  };
  const double G = helmholtz_G(law, rho, n);
  double euler = -G;
  if (rho > 0.0) euler += rho * partial(rho, n, true);
  if (n > 0.0) euler += n * partial(rho, n, false);
  return std::abs(euler - law.eval(rho, n));
}

}  // namespace dflx
