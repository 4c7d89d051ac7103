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

#include <complex>
#include <vector>

#include "dflx/grid.hpp"

namespace dflx {

// Real-to-complex spectrum of a d-dimensional field: the last axis is stored
// half (n/2+1 entries), all others full. Coefficients follow the unnormalized
// FFTW forward convention; Spectrum::normalize() divides by n^d so that
// coefficients are the Fourier coefficients of f(x) = sum_k c_k e^{2 pi i k.x}.
class Spectrum {
 public:
  explicit Spectrum(const Grid& g);

  const Grid& grid() const { return grid_; }
  std::size_t size() const { return c_.size(); }
  std::complex<double>& operator[](std::size_t i) { return c_[i]; }
  const std::complex<double>& operator[](std::size_t i) const { return c_[i]; }

  int last_size() const { return last_; }

  // Signed wavenumber tuple for a flat spectral index (unused axes are 0).
  std::array<int, 3> wavenumbers(std::size_t flat) const;

 private:
  Grid grid_;
  int last_;
  std::vector<std::complex<double>> c_;
};

// Forward/backward transforms with cached FFTW plans per grid shape.
// Deterministic: plans use FFTW_ESTIMATE, so algorithm choice is fixed.
Spectrum fft_forward(const ScalarField& f);

// Unnormalized inverse of the unnormalized forward; callers that did not
// normalize the spectrum must divide by grid.size().
ScalarField fft_backward(const Spectrum& s);

// Round trip helper: forward, apply multiplier(k) to each normalized mode,
// backward. multiplier receives the signed wavenumber tuple.
ScalarField apply_multiplier(
    const ScalarField& f,
    const std::function<std::complex<double>(const std::array<int, 3>&)>& m);

}  // namespace dflx
