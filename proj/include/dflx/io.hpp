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

#include <fstream>
#include <string>
#include <vector>

#include "dflx/solver.hpp"

namespace dflx {

// State snapshot on disk. Layout, all little-endian:
//   bytes 0..3   magic "DFLX"
//   u32          format version (currently 1)
//   u32          dimension d
//   u32          nodes per axis n
//   u32          field count (2 + d: rho, n, u_1..u_d)
//   f64          time
//   field data   row-major f64, one block per field in the order above
// Reads reproduce the written doubles bitwise. Throws IoFailure on any
// open, short-read, or header mismatch.
void write_state_snapshot(const std::string& path, const State& s);
State read_state_snapshot(const std::string& path);

// Shortest decimal form that round-trips the double exactly; never NaN or
// infinity (throws NonFinite instead, callers abort before writing junk).
std::string csv_double(double v);

// Line-oriented CSV with a fixed header written up front. All numeric cells
// go through csv_double, so output is deterministic for identical inputs.
class CsvWriter {
 public:
  CsvWriter(const std::string& path, const std::vector<std::string>& columns);

  void row(const std::vector<double>& values);
  // mixed row for cells that are names or intentionally empty
  void row_text(const std::vector<std::string>& cells);

 private:
  std::ofstream out_;
  std::string path_;
  std::size_t columns_;
};

}  // namespace dflx
