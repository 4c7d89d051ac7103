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

#include <sys/wait.h>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "dflx/errors.hpp"
#include "dflx/io.hpp"
#include "dflx/rng.hpp"
#include "dflx/scenario.hpp"
#include "dflx/spectral.hpp"
#include "dflx/solver.hpp"
#include "doctest.h"

using namespace dflx;
namespace fs = std::filesystem;

namespace {

// Every integration test shells out to the real binary, located by ctest.
std::string cli_binary() {
  const char* p = std::getenv("DFLX_CLI");
  REQUIRE_MESSAGE(p != nullptr, "DFLX_CLI must point at the dflx binary");
  return p;
}

struct TempDir {
  fs::path path;

  TempDir() {
    static int counter = 0;
    path = fs::temp_directory_path() /
           ("dflx_cli_test_" + std::to_string(::getpid()) + "_" +
            std::to_string(counter++));
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
  std::string str() const { return path.string(); }
};

void write_file(const fs::path& p, const std::string& text) {
  std::ofstream f(p);
  REQUIRE(f.good());
  f << text;
}

std::string read_file(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  REQUIRE_MESSAGE(f.good(), "missing file: " << p.string());
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

struct CliResult {
  int exit_code;
  std::string out;
  std::string err;
};

// Runs `dflx <args>` with stdout/stderr captured in `dir`. An optional
// env prefix such as "DFLX_OUT=..." is prepended for the shell.
CliResult run_cli(const std::string& args, const TempDir& dir,
                  const std::string& env = "") {
  fs::path out_txt = dir.path / "stdout.txt";
  fs::path err_txt = dir.path / "stderr.txt";
  std::string cmd = env + (env.empty() ? "" : " ") + cli_binary() + " " +
                    args + " > " + out_txt.string() + " 2> " +
                    err_txt.string();
  int rc = std::system(cmd.c_str());
  CliResult r;
  r.exit_code = WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
  r.out = read_file(out_txt);
  r.err = read_file(err_txt);
  return r;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) cells.push_back(cell);
  return cells;
}

struct Csv {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::size_t col(const std::string& name) const {
    for (std::size_t j = 0; j < header.size(); ++j)
      if (header[j] == name) return j;
    REQUIRE_MESSAGE(false, "no column named " << name);
    return 0;
  }
  double value(std::size_t i, const std::string& name) const {
    return std::stod(rows[i][col(name)]);
  }
};

Csv read_csv(const fs::path& p) {
  std::istringstream in(read_file(p));
  Csv csv;
  std::string line;
  REQUIRE(std::getline(in, line));
  csv.header = split_csv_line(line);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    csv.rows.push_back(split_csv_line(line));
    REQUIRE(csv.rows.back().size() == csv.header.size());
  }
  return csv;
}

State random_state(const Grid& g, std::uint64_t seed) {
  int kmax = std::min(5, g.n() / 2 - 1);
  State s(g);
  s.rho = random_band_limited(g, seed, kmax, 0.3);
  s.rho += ScalarField(g, 1.2);
  s.n = random_band_limited(g, seed + 7, kmax, 0.2);
  s.n += ScalarField(g, 2.1);
  for (int c = 0; c < g.dim(); ++c)
    s.u[c] = random_band_limited(g, seed + 20 + c, kmax, 0.4);
  s.t = 0.8125;
  return s;
}

// A short smooth run on a small grid, cheap enough for repeated CLI calls.
std::string smooth_config(int n, const std::string& extra_run = "") {
  std::ostringstream ss;
  ss << "[grid]\ndim = 2\nn = " << n
     << "\n\n[initial]\npreset = single_mode\namplitude = 0.05\n"
     << "\n[pressure]\nlaw = two_gamma\n"
     << "\n[cascade]\neps = 1e-3\ndelta = 1e-2\n"
     << "\n[run]\nt_end = 0.05\nsample_every = 2\n"
     << extra_run << "\n[diagnostics]\nh_list = 1e-2,1e-3\n";
  return ss.str();
}

// Undamped acoustics at forty times the stable step size. The integrating
// factor cannot absorb the stiffness once mu is this small, so the run is
// guaranteed to leave the admissible set within a step or two.
const char* kBlowupRun =
    "\n[run]\nfixed_dt = 0.5\nt_end = 5\nsample_every = 4\n";

}  // namespace

TEST_CASE("snapshot files round-trip bitwise") {
  for (int d = 1; d <= 3; ++d) {
    Grid g(d, d == 3 ? 8 : 16);
    State s = random_state(g, 99 + d);
    TempDir dir;
    fs::path p = dir.path / "state.dflx";
    write_state_snapshot(p.string(), s);
    State r = read_state_snapshot(p.string());

    CHECK(r.grid().dim() == d);
    CHECK(r.grid().n() == g.n());
    CHECK(r.t == s.t);
    for (std::size_t i = 0; i < g.size(); ++i) {
      CHECK(r.rho[i] == s.rho[i]);
      CHECK(r.n[i] == s.n[i]);
      for (int c = 0; c < d; ++c) CHECK(r.u[c][i] == s.u[c][i]);
    }
  }
}

TEST_CASE("snapshot reader rejects missing or damaged files") {
  TempDir dir;
  CHECK_THROWS_AS(read_state_snapshot((dir.path / "absent.dflx").string()),
                  IoFailure);

  fs::path garbage = dir.path / "garbage.dflx";
  write_file(garbage, "XXXX not a snapshot");
  CHECK_THROWS_AS(read_state_snapshot(garbage.string()), IoFailure);

  Grid g(2, 16);
  fs::path good = dir.path / "good.dflx";
  write_state_snapshot(good.string(), random_state(g, 3));
  std::string bytes = read_file(good);
  fs::path cut = dir.path / "cut.dflx";
  write_file(cut, bytes.substr(0, bytes.size() - 8));
  CHECK_THROWS_AS(read_state_snapshot(cut.string()), IoFailure);
}

TEST_CASE("csv numbers round-trip exactly and reject non-finite values") {
  for (double v : {1.0 / 3.0, 0.1, -2.5e-300, 1.7e308, 0.0, -42.0}) {
    CHECK(std::stod(csv_double(v)) == v);
  }
  CHECK_THROWS_AS(csv_double(std::nan("")), NonFinite);
  CHECK_THROWS_AS(csv_double(HUGE_VAL), NonFinite);
}

TEST_CASE("csv writer pins the column count per file") {
  TempDir dir;
  fs::path p = dir.path / "table.csv";
  {
    CsvWriter w(p.string(), {"a", "b"});
    w.row({1.0, 2.0});
    w.row_text({"x", "y"});
    CHECK_THROWS_AS(w.row({1.0}), IoFailure);
    CHECK_THROWS_AS(w.row_text({"1", "2", "3"}), IoFailure);
  }
  CHECK(read_file(p) == "a,b\n1,2\nx,y\n");
}

TEST_CASE("scenario defaults describe a runnable configuration") {
  std::istringstream empty("");
  Scenario sc = parse_scenario(empty);
  CHECK(sc.dim == 2);
  CHECK(sc.n == 64);
  CHECK(sc.preset == "single_mode");
  CHECK(sc.law == "two_gamma");
  CHECK(sc.eps == 1e-3);
  CHECK(sc.delta == 1e-2);
  CHECK(sc.resolved_ell() == 64 / 3);
  CHECK(sc.h_list.size() == 2);
  CHECK_NOTHROW(sc.validate());
}

TEST_CASE("scenario parser covers every section") {
  std::istringstream in(
      "# comment\n"
      "[grid]\n"
      "dim = 3\n"
      "n = 8\n"
      "[initial]\n"
      "preset = random\n"
      "amplitude = 0.2\n"
      "mean_rho = 1.5\n"
      "mean_n = 2.5\n"
      "ratio = 3.0\n"
      "seed = 77\n"
      "kmax = 2\n"
      "[pressure]\n"
      "law = cross_terms\n"
      "gamma = 4.0\n"
      "alpha = 3.0 # trailing comment\n"
      "cross = 1:2:1.5, 0.5:1.5:2\n"
      "audit_radius = 5\n"
      "audit_samples = 11\n"
      "[cascade]\n"
      "eps = 1e-4\n"
      "delta = 1e-3\n"
      "ell = 2\n"
      "mu = 0.5\n"
      "lambda = 0.1\n"
      "p0 = 4\n"
      "schedule = 2:1e-3:1e-1, 2:1e-3:3e-2\n"
      "[run]\n"
      "t_end = 0.25\n"
      "cfl = 0.2\n"
      "fixed_dt = 1e-3\n"
      "sample_every = 5\n"
      "[diagnostics]\n"
      "h_list = 1e-2, 1e-3, 1e-4\n"
      "lambda0 = 2.0\n"
      "sigma_star = 5e-3\n"
      "tk_level = 2.5\n");
  Scenario sc = parse_scenario(in, "inline");
  CHECK(sc.dim == 3);
  CHECK(sc.n == 8);
  CHECK(sc.preset == "random");
  CHECK(sc.amplitude == 0.2);
  CHECK(sc.mean_rho == 1.5);
  CHECK(sc.mean_n == 2.5);
  CHECK(sc.ratio == 3.0);
  CHECK(sc.seed == 77);
  CHECK(sc.kmax == 2);
  CHECK(sc.law == "cross_terms");
  CHECK(sc.gamma == 4.0);
  CHECK(sc.alpha == 3.0);
  REQUIRE(sc.cross.size() == 2);
  CHECK(sc.cross[0].c == 1.0);
  CHECK(sc.cross[0].gamma_i == 2.0);
  CHECK(sc.cross[0].alpha_i == 1.5);
  CHECK(sc.cross[1].c == 0.5);
  CHECK(sc.eps == 1e-4);
  CHECK(sc.delta == 1e-3);
  CHECK(sc.resolved_ell() == 2);
  CHECK(sc.mu == 0.5);
  CHECK(sc.lambda == 0.1);
  CHECK(sc.p0 == 4);
  REQUIRE(sc.schedule.size() == 2);
  CHECK(sc.schedule[0].ell == 2);
  CHECK(sc.schedule[0].eps == 1e-3);
  CHECK(sc.schedule[0].delta == 1e-1);
  CHECK(sc.schedule[1].delta == 3e-2);
  CHECK(sc.run.t_end == 0.25);
  CHECK(sc.run.stepping.cfl == 0.2);
  CHECK(sc.run.stepping.fixed_dt == 1e-3);
  CHECK(sc.run.sample_every == 5);
  REQUIRE(sc.h_list.size() == 3);
  CHECK(sc.h_list[2] == 1e-4);
  CHECK(sc.weight.lambda0 == 2.0);
  CHECK(sc.sigma_star == 5e-3);
  CHECK(sc.tk_level == 2.5);
  CHECK_NOTHROW(sc.validate());
}

TEST_CASE("scenario parser reports the offending file and line") {
  auto message_of = [](const std::string& text) {
    std::istringstream in(text);
    try {
      parse_scenario(in, "case.cfg");
    } catch (const ConfigError& e) {
      return std::string(e.what());
    }
    return std::string();
  };

  std::string m = message_of("[grid]\nwobble = 3\n");
  CHECK(m.find("case.cfg:2") != std::string::npos);
  CHECK(m.find("wobble") != std::string::npos);

  m = message_of("[grid]\nn = twelve\n");
  CHECK(m.find("case.cfg:2") != std::string::npos);

  // Unknown sections surface once a key inside them is applied.
  m = message_of("[orbit]\nn = 12\n");
  CHECK(m.find("case.cfg:2") != std::string::npos);

  m = message_of("[cascade]\nschedule = 8:1e-3\n");
  CHECK(m.find("case.cfg:2") != std::string::npos);

  m = message_of("[pressure]\ncross = 1:2\n");
  CHECK(m.find("case.cfg:2") != std::string::npos);

  m = message_of("[grid]\ndim 2\n");
  CHECK(m.find("case.cfg:2") != std::string::npos);
}

TEST_CASE("scenario loading validates names and shapes eagerly") {
  auto parse_error = [](const std::string& text) {
    std::istringstream in(text);
    try {
      parse_scenario(in);
    } catch (const ConfigError& e) {
      return std::string(e.what());
    }
    return std::string();
  };

  CHECK(parse_error("[pressure]\nlaw = van_der_waals\n")
            .find("unknown pressure law") != std::string::npos);
  CHECK(parse_error("[initial]\npreset = banana\n")
            .find("unknown initial preset") != std::string::npos);
  CHECK(!parse_error("[grid]\nn = 48\n").empty());
  CHECK(!parse_error("[run]\nt_end = -1\n").empty());
  CHECK(!parse_error("[diagnostics]\nh_list = 0.5\n").empty());
  // Cross exponents must satisfy gamma_i + alpha_i < max(gamma, alpha).
  CHECK(!parse_error("[pressure]\nlaw = cross_terms\ngamma = 4\nalpha = 3\n"
                     "cross = 1:2:2\n")
             .empty());
}

TEST_CASE("initial presets honor their advertised structure") {
  std::istringstream cfg(
      "[grid]\nn = 16\n[initial]\npreset = constant\nmean_rho = 1.25\n"
      "mean_n = 2.5\n");
  Scenario sc = parse_scenario(cfg);
  RawData raw = build_initial_data(sc);
  for (std::size_t i = 0; i < raw.rho0.grid().size(); ++i) {
    CHECK(raw.rho0[i] == 1.25);
    CHECK(raw.n0[i] == 2.5);
    CHECK(raw.m0[0][i] == 0.0);
    CHECK(raw.m0[1][i] == 0.0);
  }

  std::istringstream dom(
      "[grid]\nn = 16\n[initial]\npreset = dominated\nratio = 3.5\n");
  sc = parse_scenario(dom);
  raw = build_initial_data(sc);
  for (std::size_t i = 0; i < raw.rho0.grid().size(); ++i)
    CHECK(raw.n0[i] == 3.5 * raw.rho0[i]);

  std::istringstream rnd(
      "[grid]\nn = 16\n[initial]\npreset = random\nseed = 12\n");
  sc = parse_scenario(rnd);
  RawData a = build_initial_data(sc);
  RawData b = build_initial_data(sc);
  double mean = 0.0;
  for (std::size_t i = 0; i < a.rho0.grid().size(); ++i) {
    CHECK(a.rho0[i] == b.rho0[i]);
    CHECK(a.m0[1][i] == b.m0[1][i]);
    mean += a.rho0[i];
  }
  mean /= static_cast<double>(a.rho0.grid().size());
  CHECK(std::abs(mean - sc.mean_rho) < 1e-12);

  sc.seed = 13;
  RawData c = build_initial_data(sc);
  CHECK(max_norm(c.rho0 - a.rho0) > 1e-4);
}

TEST_CASE("simulate writes deterministic artifacts") {
  TempDir work;
  fs::path cfg = work.path / "run.cfg";
  write_file(cfg, smooth_config(16));

  TempDir out_a;
  CliResult r1 = run_cli("simulate --config " + cfg.string() + " --out " +
                             out_a.str(), work);
  CHECK(r1.exit_code == 0);
  CHECK(fs::exists(out_a.path / "timeseries.csv"));
  CHECK(fs::exists(out_a.path / "snap_000000.dflx"));
  CHECK(fs::exists(out_a.path / "final.dflx"));

  TempDir out_b;
  CliResult r2 = run_cli("simulate --config " + cfg.string() + " --out " +
                             out_b.str(), work);
  CHECK(r2.exit_code == 0);
  CHECK(read_file(out_a.path / "timeseries.csv") ==
        read_file(out_b.path / "timeseries.csv"));
  CHECK(read_file(out_a.path / "final.dflx") ==
        read_file(out_b.path / "final.dflx"));
}

TEST_CASE("constant data stays at equilibrium") {
  TempDir work;
  fs::path cfg = work.path / "eq.cfg";
  write_file(cfg,
             "[grid]\nn = 16\n[initial]\npreset = constant\n"
             "[run]\nt_end = 0.1\nsample_every = 2\n");
  TempDir out;
  CliResult r = run_cli("simulate --config " + cfg.string() + " --out " +
                            out.str(), work);
  REQUIRE(r.exit_code == 0);

  Csv ts = read_csv(out.path / "timeseries.csv");
  REQUIRE(ts.rows.size() >= 3);
  double e0 = ts.value(0, "energy");
  double m0 = ts.value(0, "mass_rho");
  for (std::size_t i = 0; i < ts.rows.size(); ++i) {
    CHECK(std::abs(ts.value(i, "energy") - e0) <= 1e-10 * std::abs(e0));
    CHECK(std::abs(ts.value(i, "mass_rho") - m0) <= 1e-12 * std::abs(m0));
  }
}

TEST_CASE("dominated data keeps its density ratio through a run") {
  TempDir work;
  fs::path cfg = work.path / "dom.cfg";
  write_file(cfg,
             "[grid]\nn = 32\n[initial]\npreset = dominated\nratio = 2.0\n"
             "[cascade]\ndelta = 1e-4\n[run]\nt_end = 0.05\n"
             "sample_every = 2\n");
  TempDir out;
  CliResult r = run_cli("simulate --config " + cfg.string() + " --out " +
                            out.str(), work);
  REQUIRE(r.exit_code == 0);

  Csv ts = read_csv(out.path / "timeseries.csv");
  for (std::size_t i = 0; i < ts.rows.size(); ++i) {
    CHECK(ts.value(i, "ratio_min") >= 2.0 - 1e-3);
    CHECK(ts.value(i, "ratio_max") <= 2.0 + 1e-3);
  }
}

TEST_CASE("configuration mistakes exit with status 3") {
  TempDir work;
  fs::path cfg = work.path / "bad.cfg";
  write_file(cfg, "[pressure]\nlaw = van_der_waals\n");
  CliResult r = run_cli("simulate --config " + cfg.string(), work);
  CHECK(r.exit_code == 3);
  CHECK(r.err.find("config error:") != std::string::npos);
  CHECK(r.err.find("unknown pressure law") != std::string::npos);

  r = run_cli("simulate", work);
  CHECK(r.exit_code == 3);
  CHECK(r.err.find("missing --config") != std::string::npos);

  r = run_cli("orbit --config " + cfg.string(), work);
  CHECK(r.exit_code == 3);

  write_file(cfg,
             "[pressure]\nlaw = cross_terms\ngamma = 4\nalpha = 3\n"
             "cross = 1:2:2\n");
  r = run_cli("check-pressure --config " + cfg.string(), work);
  CHECK(r.exit_code == 3);

  write_file(cfg, smooth_config(16));
  r = run_cli("diagnose --config " + cfg.string(), work);
  CHECK(r.exit_code == 3);
  CHECK(r.err.find("snapshot directory") != std::string::npos);

  r = run_cli("simulate --config " + cfg.string() + " --retries 3", work);
  CHECK(r.exit_code == 3);
}

TEST_CASE("runtime blowups exit with status 2") {
  TempDir work;
  fs::path cfg = work.path / "blowup.cfg";
  write_file(cfg,
             "[grid]\nn = 32\n[initial]\npreset = dominated\n"
             "[cascade]\neps = 0\nmu = 1e-4\n" +
                 std::string(kBlowupRun));
  TempDir out;
  CliResult r = run_cli("simulate --config " + cfg.string() + " --out " +
                            out.str(), work);
  CHECK(r.exit_code == 2);
  CHECK(r.err.find("runtime error: simulate failed after t = ") !=
        std::string::npos);

  fs::path casc = work.path / "blowup_cascade.cfg";
  write_file(casc,
             "[grid]\nn = 32\n[initial]\npreset = single_mode\n"
             "[cascade]\nmu = 1e-4\nschedule = 16:0:1e-1, 16:0:3e-2\n" +
                 std::string(kBlowupRun));
  TempDir out2;
  r = run_cli("cascade --config " + casc.string() + " --out " + out2.str(),
              work);
  CHECK(r.exit_code == 2);
  CHECK(r.err.find("cascade failed after t = ") != std::string::npos);
  CHECK(r.err.find("cascade stage 0") != std::string::npos);

  // The summary of completed stages is still written before the rethrow.
  std::string summary = read_file(out2.path / "cascade_summary.csv");
  CHECK(summary.rfind("stage,ell,eps,delta,t_final,l1_rho_diff,l1_n_diff",
                      0) == 0);
}

TEST_CASE("environment variable overrides the output directory") {
  TempDir work;
  fs::path cfg = work.path / "run.cfg";
  write_file(cfg, smooth_config(16));

  TempDir ignored;
  TempDir chosen;
  CliResult r = run_cli("simulate --config " + cfg.string() + " --out " +
                            ignored.str(), work,
                        "DFLX_OUT=" + chosen.str());
  CHECK(r.exit_code == 0);
  CHECK(fs::exists(chosen.path / "timeseries.csv"));
  CHECK(!fs::exists(ignored.path / "timeseries.csv"));
}

TEST_CASE("kernel study writes one row per mollification scale") {
  TempDir work;
  fs::path cfg = work.path / "ks.cfg";
  write_file(cfg,
             "[grid]\ndim = 1\nn = 256\n[initial]\npreset = single_mode\n"
             "[diagnostics]\nh_list = 1e-2, 1e-3, 1e-4\n");
  TempDir out;
  CliResult r = run_cli("kernel-study --config " + cfg.string() + " --out " +
                            out.str(), work);
  REQUIRE(r.exit_code == 0);

  Csv ks = read_csv(out.path / "kernel_study.csv");
  REQUIRE(ks.rows.size() == 3);
  CHECK(ks.col("h") == 0);
  double prev = 1e300;
  for (std::size_t i = 0; i < ks.rows.size(); ++i) {
    double lh1 = ks.value(i, "l_h1");
    CHECK(lh1 > 0.0);
    CHECK(lh1 < prev);
    prev = lh1;
    CHECK(ks.value(i, "abs_log_h") ==
          doctest::Approx(std::abs(std::log(ks.value(i, "h")))));
  }

  // Constant data oscillates nowhere: both functionals are exactly zero.
  write_file(cfg,
             "[grid]\ndim = 1\nn = 64\n[initial]\npreset = constant\n"
             "[diagnostics]\nh_list = 1e-2, 1e-3\n");
  TempDir out2;
  r = run_cli("kernel-study --config " + cfg.string() + " --out " +
                  out2.str(), work);
  REQUIRE(r.exit_code == 0);
  ks = read_csv(out2.path / "kernel_study.csv");
  REQUIRE(ks.rows.size() == 2);
  for (std::size_t i = 0; i < ks.rows.size(); ++i) {
    CHECK(ks.value(i, "l_h1") == 0.0);
    CHECK(ks.value(i, "l_h2") == 0.0);
  }
}

TEST_CASE("check-pressure reports pass and fail verdicts with exit 0") {
  TempDir work;
  fs::path cfg = work.path / "ok.cfg";
  write_file(cfg, "[pressure]\nlaw = two_gamma\ngamma = 2\nalpha = 2\n");
  TempDir out;
  CliResult r = run_cli("check-pressure --config " + cfg.string() +
                            " --out " + out.str(), work);
  CHECK(r.exit_code == 0);
  Csv rep = read_csv(out.path / "pressure_report.csv");
  REQUIRE(rep.rows.size() == 1);
  CHECK(rep.value(0, "pass") == 1.0);

  fs::path bad = work.path / "wild.cfg";
  write_file(bad,
             "[pressure]\nlaw = oscillatory\ngamma = 2\nalpha = 2\n"
             "osc_amplitude = 2.0\n");
  TempDir out2;
  r = run_cli("check-pressure --config " + bad.string() + " --out " +
                  out2.str(), work);
  CHECK(r.exit_code == 0);
  rep = read_csv(out2.path / "pressure_report.csv");
  REQUIRE(rep.rows.size() == 1);
  CHECK(rep.value(0, "pass") == 0.0);
  CHECK(rep.value(0, "tail_lower_violations") > 0.0);
}

TEST_CASE("diagnose rebuilds a time series from stored snapshots") {
  TempDir work;
  fs::path cfg = work.path / "run.cfg";
  write_file(cfg, smooth_config(16));
  TempDir out;
  CliResult r = run_cli("simulate --config " + cfg.string() + " --out " +
                            out.str(), work);
  REQUIRE(r.exit_code == 0);

  std::size_t snaps = 0;
  for (const auto& e : fs::directory_iterator(out.path))
    if (e.path().filename().string().rfind("snap_", 0) == 0) ++snaps;
  REQUIRE(snaps >= 3);

  TempDir dout;
  r = run_cli("diagnose --config " + cfg.string() + " --out " + dout.str() +
                  " " + out.str(), work);
  REQUIRE(r.exit_code == 0);

  Csv diag = read_csv(dout.path / "diagnostics.csv");
  CHECK(diag.rows.size() == snaps);
  for (const char* name : {"t", "mass_rho", "energy", "lh1_0", "lh1_1",
                           "e_w", "chain_rhs", "comm_ratio",
                           "weight_clips"}) {
    CHECK(diag.col(name) < diag.header.size());
  }
  double m0 = diag.value(0, "mass_rho");
  double prev_t = -1.0;
  for (std::size_t i = 0; i < diag.rows.size(); ++i) {
    CHECK(diag.value(i, "t") > prev_t);
    prev_t = diag.value(i, "t");
    CHECK(std::abs(diag.value(i, "mass_rho") - m0) <= 1e-12 * std::abs(m0));
    CHECK(std::isfinite(diag.value(i, "chain_rhs")));
    CHECK(diag.value(i, "weight_bound_violations") == 0.0);
  }
}
