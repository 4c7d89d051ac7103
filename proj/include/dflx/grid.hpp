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

#include <array>
#include <cstddef>
#include <functional>
#include <vector>

#include "dflx/errors.hpp"

namespace dflx {

// Uniform periodic grid on the unit torus [0,1)^d, d in {1,2,3}, with the
// same power-of-two point count n per axis. Nodes are x_i = j/n, values are
// stored row major (axis 0 slowest, axis d-1 fastest).
class Grid {
 public:
  Grid(int d, int n);

  int dim() const { return d_; }
  int n() const { return n_; }
  std::size_t size() const { return size_; }
  double cell_volume() const { return cell_volume_; }
  double spacing() const { return 1.0 / n_; }

  // Node coordinates of the flat index.
  std::array<int, 3> decode(std::size_t flat) const;
  std::size_t encode(const std::array<int, 3>& idx) const;

  // Signed wavenumber on the given axis for a spectral index in [0, n).
  int signed_wavenumber(int idx) const { return idx <= n_ / 2 ? idx : idx - n_; }

  // Shortest periodic displacement of a node offset in [0,n) to [-1/2,1/2).
  double periodic_coord(int idx) const {
    double x = static_cast<double>(idx) / n_;
    return x >= 0.5 ? x - 1.0 : x;
  }

  bool operator==(const Grid& o) const { return d_ == o.d_ && n_ == o.n_; }
  bool operator!=(const Grid& o) const { return !(*this == o); }

 private:
  int d_;
  int n_;
  std::size_t size_;
  double cell_volume_;
};

// Scalar sample values on a Grid.
class ScalarField {
 public:
  explicit ScalarField(const Grid& g) : grid_(g), v_(g.size(), 0.0) {}
  ScalarField(const Grid& g, double fill) : grid_(g), v_(g.size(), fill) {}

  const Grid& grid() const { return grid_; }
  std::size_t size() const { return v_.size(); }
  double& operator[](std::size_t i) { return v_[i]; }
  double operator[](std::size_t i) const { return v_[i]; }
  std::vector<double>& values() { return v_; }
  const std::vector<double>& values() const { return v_; }

  // Fill from a callable of the node coordinates (array of d doubles in [0,1)).
  void sample(const std::function<double(const std::array<double, 3>&)>& f);

  double min() const;
  double max() const;
  bool finite() const;

  ScalarField& operator+=(const ScalarField& o);
  ScalarField& operator-=(const ScalarField& o);
  ScalarField& operator*=(double s);

 private:
  Grid grid_;
  std::vector<double> v_;
};

ScalarField operator+(ScalarField a, const ScalarField& b);
ScalarField operator-(ScalarField a, const ScalarField& b);
ScalarField operator*(double s, ScalarField a);

// d scalar components.
class VectorField {
 public:
  explicit VectorField(const Grid& g) : grid_(g), comp_(g.dim(), ScalarField(g)) {}

  const Grid& grid() const { return grid_; }
  int dim() const { return grid_.dim(); }
  ScalarField& operator[](int c) { return comp_[c]; }
  const ScalarField& operator[](int c) const { return comp_[c]; }

  double max_norm() const;  // max over nodes of the Euclidean component norm
  bool finite() const;

 private:
  Grid grid_;
  std::vector<ScalarField> comp_;
};

}  // namespace dflx
