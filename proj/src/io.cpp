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

#include "dflx/io.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>

#include "dflx/errors.hpp"

// the on-disk format is little-endian; plain memory copies are correct here
static_assert(std::endian::native == std::endian::little,
              "snapshot io assumes a little-endian host");

namespace dflx {

namespace {

constexpr char kMagic[4] = {'D', 'F', 'L', 'X'};
constexpr std::uint32_t kVersion = 1;

void put_u32(std::ofstream& out, std::uint32_t v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

std::uint32_t get_u32(std::ifstream& in, const std::string& path) {
  std::uint32_t v = 0;
  if (!in.read(reinterpret_cast<char*>(&v), sizeof v))
    throw IoFailure("snapshot truncated: " + path);
  return v;
}

void put_field(std::ofstream& out, const ScalarField& f) {
  out.write(reinterpret_cast<const char*>(f.values().data()),
            static_cast<std::streamsize>(f.size() * sizeof(double)));
}

void get_field(std::ifstream& in, ScalarField& f, const std::string& path) {
  if (!in.read(reinterpret_cast<char*>(f.values().data()),
               static_cast<std::streamsize>(f.size() * sizeof(double))))
    throw IoFailure("snapshot truncated: " + path);
}

}  // namespace

void write_state_snapshot(const std::string& path, const State& s) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoFailure("cannot open snapshot for writing: " + path);
  out.write(kMagic, 4);
  const Grid& g = s.grid();
  put_u32(out, kVersion);
  put_u32(out, static_cast<std::uint32_t>(g.dim()));
  put_u32(out, static_cast<std::uint32_t>(g.n()));
  put_u32(out, static_cast<std::uint32_t>(2 + g.dim()));
  out.write(reinterpret_cast<const char*>(&s.t), sizeof s.t);
  put_field(out, s.rho);
  put_field(out, s.n);
  for (int c = 0; c < g.dim(); ++c) put_field(out, s.u[c]);
  out.flush();
  if (!out) throw IoFailure("cannot write snapshot: " + path);
}

State read_state_snapshot(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoFailure("cannot open snapshot: " + path);
  char magic[4] = {};
  if (!in.read(magic, 4) || std::memcmp(magic, kMagic, 4) != 0)
    throw IoFailure("not a snapshot file: " + path);
  const std::uint32_t version = get_u32(in, path);
  if (version != kVersion)
    throw IoFailure("unsupported snapshot version in " + path);
  const std::uint32_t d = get_u32(in, path);
  const std::uint32_t n = get_u32(in, path);
  const std::uint32_t fields = get_u32(in, path);
  if (d < 1 || d > 3 || fields != 2 + d)
    throw IoFailure("inconsistent snapshot header in " + path);
  double t = 0.0;
  if (!in.read(reinterpret_cast<char*>(&t), sizeof t))
    throw IoFailure("snapshot truncated: " + path);

  Grid g(static_cast<int>(d), static_cast<int>(n));
  State s(g);
  s.t = t;
  get_field(in, s.rho, path);
  get_field(in, s.n, path);
  for (int c = 0; c < g.dim(); ++c) get_field(in, s.u[c], path);
  return s;
}

std::string csv_double(double v) {
  if (!std::isfinite(v)) throw NonFinite("refusing to write a non-finite value");
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

CsvWriter::CsvWriter(const std::string& path,
                     const std::vector<std::string>& columns)
    : out_(path, std::ios::trunc), path_(path), columns_(columns.size()) {
  if (!out_) throw IoFailure("cannot open csv for writing: " + path);
  for (std::size_t i = 0; i < columns.size(); ++i)
    out_ << (i ? "," : "") << columns[i];
  out_ << "\n";
  out_.flush();
}

void CsvWriter::row(const std::vector<double>& values) {
  if (values.size() != columns_)
    throw IoFailure("csv row width mismatch: " + path_);
  for (std::size_t i = 0; i < values.size(); ++i)
    out_ << (i ? "," : "") << csv_double(values[i]);
  out_ << "\n";
  out_.flush();
  if (!out_) throw IoFailure("cannot write csv row: " + path_);
}

void CsvWriter::row_text(const std::vector<std::string>& cells) {
  if (cells.size() != columns_)
    throw IoFailure("csv row width mismatch: " + path_);
  for (std::size_t i = 0; i < cells.size(); ++i)
    out_ << (i ? "," : "") << cells[i];
  out_ << "\n";
  out_.flush();
  if (!out_) throw IoFailure("cannot write csv row: " + path_);
}

}  // namespace dflx
