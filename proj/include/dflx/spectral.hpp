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

#include "dflx/fft.hpp"
#include "dflx/grid.hpp"

namespace dflx {

// Fourier-multiplier calculus on the unit torus. All operators are exact on
// the resolved band |k|_inf <= n/2 and diagonal in the e^{2 pi i k.x} basis.

VectorField gradient(const ScalarField& f);
ScalarField derivative(const ScalarField& f, int axis);
ScalarField divergence(const VectorField& u);
ScalarField laplacian(const ScalarField& f);
VectorField laplacian(const VectorField& u);
VectorField grad_div(const VectorField& u);

// Zero-mean solution g of -Lap g = f. Requires integrate(f) ~ 0; with
// auto_demean the mean is projected out first, otherwise |mean| > tol raises
// MeanNotZero.
ScalarField inv_neg_laplacian(const ScalarField& f, bool auto_demean = false,
                              double mean_tol = 1e-10);

// Riesz transform with the standard multiplier i k_i/|k| (zero mode -> 0).
// Convention pinned by riesz(0, cos(2 pi x1)) = -sin(2 pi x1).
ScalarField riesz(int axis, const ScalarField& f);

// Second-order Riesz operator with multiplier k_i k_j / |k|^2 (zero mode 0).
// Equals minus the composition riesz(i, riesz(j, .)); with this sign
// sum_i riesz_riesz(i, i, f) = f - mean(f).
ScalarField riesz_riesz(int i, int j, const ScalarField& f);

// Sharp Fourier projector onto modes |k|_inf <= ell (identity for ell >= n/2).
ScalarField galerkin_project(const ScalarField& f, int ell);
VectorField galerkin_project(const VectorField& u, int ell);

// Dealiased pointwise product: both factors are truncated to |k|_inf <=
// floor(n/3), multiplied on the grid, and the result truncated again, so the
// retained modes equal the exact convolution of the truncated factors.
ScalarField dealiased_product(const ScalarField& a, const ScalarField& b);

// Mollification by the periodic heat kernel j_delta: positive, unit mass,
// with the kernel time tuned so the realized discrete kernel maximum equals
// delta^{-1/(2 p0)}. delta outside (0,1) raises DeltaOutOfRange.
ScalarField mollify(const ScalarField& f, double delta, double p0 = 8.0);

// Heat-kernel time tau(delta) and the kernel itself (for tests/inspection).
double mollifier_time(const Grid& g, double delta, double p0 = 8.0);
ScalarField mollifier_kernel(const Grid& g, double delta, double p0 = 8.0);

// Trapezoid-exact quadrature of periodic samples: cell_volume * sum.
double integrate(const ScalarField& f);
double mean(const ScalarField& f);

// L^p grid norm, p >= 1; p = inf via max_norm.
double l_p_norm(const ScalarField& f, double p);
double max_norm(const ScalarField& f);
double l_p_norm(const VectorField& u, double p);

// int |grad u|^2 (Frobenius) and int (div u)^2, used by the energy balance.
double grad_sq_integral(const VectorField& u);

}  // namespace dflx
