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

#include "dflx/rng.hpp"

#include <cmath>

#include "dflx/fft.hpp"

namespace dflx {

namespace {

std::uint64_t splitmix_finalize(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

// Half-complex flat index of a signed wavenumber tuple with k_last >= 0.
std::size_t half_index(const Grid& g, std::array<int, 3> k) {
  const int d = g.dim();
  const int n = g.n();
  const int last = n / 2 + 1;
  std::size_t flat = 0;
  for (int a = 0; a < d - 1; ++a)
    flat = flat * n + static_cast<std::size_t>(((k[a] % n) + n) % n);
  return flat * last + static_cast<std::size_t>(k[d - 1]);
}

}  // namespace

std::uint64_t CounterRng::word(std::uint64_t counter) const {
  return splitmix_finalize(seed_ ^ (0x9E3779B97F4A7C15ull * (counter + 1)));
}

double CounterRng::uniform(std::uint64_t counter) const {
  return static_cast<double>(word(counter) >> 11) * 0x1.0p-53;
}

double CounterRng::symmetric(std::uint64_t counter) const {
  return 2.0 * uniform(counter) - 1.0;
}

ScalarField random_band_limited(const Grid& g, std::uint64_t seed, int kmax,
                                double amplitude) {
  if (kmax < 1 || kmax >= g.n() / 2)
    throw ParamDomain("random field band must satisfy 1 <= kmax < n/2");
  CounterRng rng(seed);
  const int d = g.dim();
  const int w = 2 * kmax + 1;
  Spectrum s(g);
  // One representative per +-k pair: tuples with |k_i| <= kmax whose first
  // nonzero component is positive, enumerated in fixed row-major order. The
  // pair contributes a*cos(2 pi k.x) + b*sin(2 pi k.x) with a, b drawn from
  // consecutive counters, i.e. coefficient (a - i b)/2 at +k.
  std::uint64_t counter = 0;
  for (int t0 = 0; t0 < (d >= 1 ? w : 1); ++t0) {
    for (int t1 = 0; t1 < (d >= 2 ? w : 1); ++t1) {
      for (int t2 = 0; t2 < (d >= 3 ? w : 1); ++t2) {
        std::array<int, 3> k{t0 - kmax, d >= 2 ? t1 - kmax : 0,
                             d >= 3 ? t2 - kmax : 0};
        int lead = 0;
        for (int a = 0; a < d; ++a) {
          if (k[a] != 0) {
            lead = k[a];
            break;
          }
        }
        if (lead <= 0) continue;  // zero mode and conjugate partners skipped
        const double a = rng.symmetric(2 * counter);
        const double b = rng.symmetric(2 * counter + 1);
        ++counter;
        std::complex<double> c(0.5 * a, -0.5 * b);
        if (k[d - 1] > 0) {
          s[half_index(g, k)] = c;
        } else if (k[d - 1] == 0) {
          s[half_index(g, k)] = c;
          std::array<int, 3> mk{-k[0], -k[1], -k[2]};
          s[half_index(g, mk)] = std::conj(c);
        } else {
          std::array<int, 3> mk{-k[0], -k[1], -k[2]};
          s[half_index(g, mk)] = std::conj(c);
        }
      }
    }
  }
  ScalarField f = fft_backward(s);  // coefficients stored normalized
  double m = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) m = std::max(m, std::abs(f[i]));
  if (m > 0.0) f *= amplitude / m;
  return f;
}

}  // namespace dflx
