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
#include <iosfwd>
#include <string>
#include <vector>

#include "dflx/diagnostics.hpp"
#include "dflx/pressure.hpp"
#include "dflx/solver.hpp"

namespace dflx {

// Everything a command needs, parsed from a sectioned key = value file.
// Sections and keys are listed in the README; unknown ones are hard errors
// so typos cannot silently fall back to defaults.
struct Scenario {
  // [grid]
  int dim = 2;
  int n = 64;

  // [initial]
  std::string preset = "single_mode";  // constant | single_mode | dominated
                                       // | random
  double amplitude = 0.1;
  double mean_rho = 1.0;
  double mean_n = 1.0;
  double ratio = 2.0;  // dominated preset: n0 = ratio * rho0
  std::uint64_t seed = 1;
  int kmax = 4;

  // [pressure]
  std::string law = "two_gamma";  // two_gamma | cross_terms | oscillatory
  double gamma = 2.0;
  double alpha = 2.0;
  double osc_amplitude = 0.5;
  std::vector<CrossTerm> cross;   // "g:a" pairs, cross_terms only
  double audit_radius = 10.0;     // check-pressure domain
  int audit_samples = 201;        // samples per axis

  // [cascade]
  double eps = 1e-3;
  double delta = 1e-2;
  int ell = 0;  // 0 resolves to n / 3 at build time
  double mu = 1.0;
  double lambda = 0.0;
  double p0 = 8.0;
  std::vector<CascadeStage> schedule;  // "ell:eps:delta" triples

  // [run]
  RunConfig run;

  // [diagnostics]
  std::vector<double> h_list = {1e-2, 1e-3};
  WeightParams weight;
  double sigma_star = 1e-2;
  double tk_level = 1.0;

  // Eager validation: resolves the law name, constructs the grid, cascade
  // parameters and artificial pressure once, checks list-valued entries.
  // Throws ConfigError (or a subclass) on the first violation.
  void validate() const;

  int resolved_ell() const { return ell > 0 ? ell : n / 3; }
};

// Parse from a file or stream; both end with Scenario::validate().
Scenario load_scenario(const std::string& path);
Scenario parse_scenario(std::istream& in, const std::string& origin = "<stream>");

// Resolve the pressure-law name; unknown names raise ConfigError
// ("unknown pressure law ...").
LawPtr make_law(const Scenario& sc);

CascadeParams make_cascade_params(const Scenario& sc);

// Raw (unregularized) initial data of the configured preset.
struct RawData {
  ScalarField rho0;
  ScalarField n0;
  VectorField m0;

  explicit RawData(const Grid& g) : rho0(g), n0(g), m0(g) {}
};
RawData build_initial_data(const Scenario& sc);

}  // namespace dflx
