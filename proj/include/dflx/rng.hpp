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

#include "dflx/grid.hpp"

namespace dflx {

// Counter-based generator: value(i) depends only on (seed, i), so streams are
// reproducible across platforms and independent of call order. Word i is
// splitmix64_finalizer(seed ^ (0x9E3779B97F4A7C15 * (i+1))); uniform doubles
// take the top 53 bits / 2^53. This exact recipe is part of the output
// contract (documented in the README for cross-implementation reproduction).
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed) : seed_(seed) {}

  std::uint64_t word(std::uint64_t counter) const;
  double uniform(std::uint64_t counter) const;            // in [0,1)
  double symmetric(std::uint64_t counter) const;          // in [-1,1)

 private:
  std::uint64_t seed_;
};

// Deterministic random band-limited real field: independent symmetric
// amplitudes on modes with 0 < |k|_inf <= kmax (Hermitian pairs tied), zero
// mean, scaled so the max norm equals `amplitude`. Counter layout is a fixed
// function of the mode tuple, so the field is resolution-independent for
// fixed (seed, kmax) up to grid sampling.
ScalarField random_band_limited(const Grid& g, std::uint64_t seed, int kmax,
                                double amplitude);

}  // namespace dflx
