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

#include "dflx/grid.hpp"

#include <algorithm>
#include <cmath>

namespace dflx {

namespace {
bool power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }
}  // namespace

Grid::Grid(int d, int n) : d_(d), n_(n) {
  if (d < 1 || d > 3) throw ParamDomain("grid dimension must be 1, 2 or 3");
  if (!power_of_two(n) || n < 4)
    throw ParamDomain("grid points per axis must be a power of two >= 4");
  size_ = 1;
  for (int i = 0; i < d; ++i) size_ *= static_cast<std::size_t>(n);
  cell_volume_ = 1.0 / static_cast<double>(size_);
}

std::array<int, 3> Grid::decode(std::size_t flat) const {
  std::array<int, 3> idx{0, 0, 0};
  for (int axis = d_ - 1; axis >= 0; --axis) {
    idx[axis] = static_cast<int>(flat % n_);
    flat /= n_;
  }
  return idx;
}

std::size_t Grid::encode(const std::array<int, 3>& idx) const {
  std::size_t flat = 0;
  for (int axis = 0; axis < d_; ++axis) {
    int w = ((idx[axis] % n_) + n_) % n_;
    flat = flat * n_ + static_cast<std::size_t>(w);
  }
  return flat;
}

void ScalarField::sample(
    const std::function<double(const std::array<double, 3>&)>& f) {
  const int d = grid_.dim();
  for (std::size_t i = 0; i < v_.size(); ++i) {
    auto idx = grid_.decode(i);
    std::array<double, 3> x{0.0, 0.0, 0.0};
    for (int a = 0; a < d; ++a) x[a] = static_cast<double>(idx[a]) / grid_.n();
    v_[i] = f(x);
  }
}

double ScalarField::min() const { return *std::min_element(v_.begin(), v_.end()); }
double ScalarField::max() const { return *std::max_element(v_.begin(), v_.end()); }

bool ScalarField::finite() const {
  for (double x : v_)
    if (!std::isfinite(x)) return false;
  return true;
}

ScalarField& ScalarField::operator+=(const ScalarField& o) {
  for (std::size_t i = 0; i < v_.size(); ++i) v_[i] += o.v_[i];
  return *this;
}
ScalarField& ScalarField::operator-=(const ScalarField& o) {
  for (std::size_t i = 0; i < v_.size(); ++i) v_[i] -= o.v_[i];
  return *this;
}
ScalarField& ScalarField::operator*=(double s) {
  for (double& x : v_) x *= s;
  return *this;
}

ScalarField operator+(ScalarField a, const ScalarField& b) { return a += b; }
ScalarField operator-(ScalarField a, const ScalarField& b) { return a -= b; }
ScalarField operator*(double s, ScalarField a) { return a *= s; }

double VectorField::max_norm() const {
  double m = 0.0;
  for (std::size_t i = 0; i < grid_.size(); ++i) {
    double s = 0.0;
    for (int c = 0; c < dim(); ++c) s += comp_[c][i] * comp_[c][i];
    m = std::max(m, s);
  }
  return std::sqrt(m);
}

bool VectorField::finite() const {
  for (int c = 0; c < dim(); ++c)
    if (!comp_[c].finite()) return false;
  return true;
}

}  // namespace dflx
