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

#include "dflx/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>

namespace dflx {

Spectrum::Spectrum(const Grid& g) : grid_(g), last_(g.n() / 2 + 1) {
  std::size_t sz = static_cast<std::size_t>(last_);
  for (int a = 0; a + 1 < g.dim(); ++a) sz *= static_cast<std::size_t>(g.n());
  c_.assign(sz, {0.0, 0.0});
}

std::array<int, 3> Spectrum::wavenumbers(std::size_t flat) const {
  std::array<int, 3> k{0, 0, 0};
  const int d = grid_.dim();
  k[d - 1] = static_cast<int>(flat % last_);  // half axis, always >= 0
  flat /= last_;
  for (int axis = d - 2; axis >= 0; --axis) {
    k[axis] = grid_.signed_wavenumber(static_cast<int>(flat % grid_.n()));
    flat /= grid_.n();
  }
  return k;
}

namespace {

// Plans are cached per (dim, n, direction). FFTW planning mutates global
// state, so guard creation; execution on distinct arrays is thread safe via
// the new-array interface.
struct PlanPair {
  fftw_plan fwd = nullptr;
  fftw_plan bwd = nullptr;
  std::vector<double> rbuf;
  std::vector<std::complex<double>> cbuf;  // layout-compatible with fftw_complex
};

fftw_complex* as_fftw(std::vector<std::complex<double>>& v) {
  return reinterpret_cast<fftw_complex*>(v.data());
}

std::mutex plan_mutex;
std::map<std::pair<int, int>, PlanPair>& plan_cache() {
  static std::map<std::pair<int, int>, PlanPair> cache;
  return cache;
}

PlanPair& plans_for(const Grid& g) {
  std::lock_guard<std::mutex> lock(plan_mutex);
  auto key = std::make_pair(g.dim(), g.n());
  auto& cache = plan_cache();
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;

  PlanPair& p = cache[key];
  std::size_t csz = static_cast<std::size_t>(g.n() / 2 + 1);
  for (int a = 0; a + 1 < g.dim(); ++a) csz *= static_cast<std::size_t>(g.n());
  p.rbuf.assign(g.size(), 0.0);
  p.cbuf.assign(csz, {0.0, 0.0});
  std::vector<int> dims(g.dim(), g.n());
  p.fwd = fftw_plan_dft_r2c(g.dim(), dims.data(), p.rbuf.data(),
                            as_fftw(p.cbuf), FFTW_ESTIMATE);
  p.bwd = fftw_plan_dft_c2r(g.dim(), dims.data(), as_fftw(p.cbuf),
                            p.rbuf.data(), FFTW_ESTIMATE);
  return p;
}

}  // namespace

Spectrum fft_forward(const ScalarField& f) {
  const Grid& g = f.grid();
  PlanPair& p = plans_for(g);
  Spectrum out(g);
  std::vector<double> rbuf(f.values());
  std::vector<std::complex<double>> cbuf(out.size());
  fftw_execute_dft_r2c(p.fwd, rbuf.data(), as_fftw(cbuf));
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = cbuf[i];
  return out;
}

ScalarField fft_backward(const Spectrum& s) {
  const Grid& g = s.grid();
  PlanPair& p = plans_for(g);
  std::vector<std::complex<double>> cbuf(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) cbuf[i] = s[i];
  ScalarField out(g);
  fftw_execute_dft_c2r(p.bwd, as_fftw(cbuf), out.values().data());
  return out;
}

ScalarField apply_multiplier(
    const ScalarField& f,
    const std::function<std::complex<double>(const std::array<int, 3>&)>& m) {
  Spectrum s = fft_forward(f);
  const double scale = 1.0 / static_cast<double>(f.grid().size());
  for (std::size_t i = 0; i < s.size(); ++i)
    s[i] *= m(s.wavenumbers(i)) * scale;
  return fft_backward(s);
}

}  // namespace dflx
