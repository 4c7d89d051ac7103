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

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "dflx/diagnostics.hpp"
#include "dflx/errors.hpp"
#include "dflx/io.hpp"
#include "dflx/scenario.hpp"
#include "dflx/solver.hpp"
#include "dflx/spectral.hpp"

namespace {

using namespace dflx;

const char kUsage[] =
    "usage: dflx <command> --config PATH [--out DIR] [--seed N] [--threads N]\n"
    "\n"
    "commands:\n"
    "  simulate        run one regularization stage, write time series and\n"
    "                  snapshots\n"
    "  cascade         run the configured stage schedule, write per-stage\n"
    "                  snapshots and a convergence summary\n"
    "  check-pressure  audit the configured pressure law's growth envelope\n"
    "  kernel-study    tabulate kernel norms and oscillation functionals over\n"
    "                  the configured h list\n"
    "  diagnose DIR    recompute the diagnostics report from the snapshots in\n"
    "                  DIR\n"
    "\n"
    "The DFLX_OUT environment variable overrides --out. --threads is\n"
    "advisory: execution stays single-threaded so artifact bytes do not\n"
    "depend on it. Exit codes: 0 ok, 2 runtime failure (vacuum, non-finite,\n"
    "io), 3 configuration error.\n";

struct CliOptions {
  std::string command;
  std::string config;
  std::string out = ".";
  std::optional<std::uint64_t> seed;
  int threads = 1;  // advisory; kept for interface stability
  std::vector<std::string> positional;
};

long parse_long(const std::string& text, const std::string& flag) {
  char* end = nullptr;
  long v = std::strtol(text.c_str(), &end, 10);
  if (text.empty() || end != text.c_str() + text.size())
    throw ConfigError("flag " + flag + " expects an integer, got '" + text +
                      "'");
  return v;
}

CliOptions parse_cli(int argc, char** argv) {
  CliOptions opt;
  if (argc < 2) throw ConfigError("missing command\n" + std::string(kUsage));
  opt.command = argv[1];
  for (int i = 2; i < argc; ++i) {
    const std::string a = argv[i];
    auto value = [&](const char* flag) -> std::string {
      if (i + 1 >= argc)
        throw ConfigError(std::string("flag ") + flag + " expects a value");
      return argv[++i];
    };
    if (a == "--config") {
      opt.config = value("--config");
    } else if (a == "--out") {
      opt.out = value("--out");
    } else if (a == "--seed") {
      opt.seed = static_cast<std::uint64_t>(parse_long(value("--seed"), "--seed"));
    } else if (a == "--threads") {
      opt.threads = static_cast<int>(parse_long(value("--threads"), "--threads"));
      if (opt.threads < 1) throw ConfigError("flag --threads must be >= 1");
    } else if (a.rfind("--", 0) == 0) {
      throw ConfigError("unknown flag '" + a + "'");
    } else {
      opt.positional.push_back(a);
    }
  }
  if (const char* env = std::getenv("DFLX_OUT"); env && *env) opt.out = env;
  return opt;
}

std::string join_path(const std::string& dir, const std::string& name) {
  return (std::filesystem::path(dir) / name).string();
}

std::string snapshot_name(const char* prefix, int index) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%s%06d.dflx", prefix, index);
  return buf;
}

// ratio extremes of n / rho over nodes with rho > 0; (0, 0) if none
std::pair<double, double> ratio_extremes(const State& s) {
  double lo = 1e300, hi = -1e300;
  for (std::size_t i = 0; i < s.rho.size(); ++i) {
    if (s.rho[i] > 0.0) {
      const double r = s.n[i] / s.rho[i];
      lo = std::min(lo, r);
      hi = std::max(hi, r);
    }
  }
  if (lo > hi) return {0.0, 0.0};
  return {lo, hi};
}

int cmd_simulate(const Scenario& sc, const std::string& out) {
  RawData raw = build_initial_data(sc);
  State init = regularize_initial_data(raw.rho0, raw.n0, raw.m0, sc.delta,
                                       sc.p0);
  CascadeParams cp = make_cascade_params(sc);
  ArtificialPtr ap = artificial_pressure(make_law(sc), sc.delta, sc.p0);

  CsvWriter ts(join_path(out, "timeseries.csv"),
               {"t", "mass_rho", "mass_n", "energy", "dissipation_cum",
                "min_theta", "ratio_min", "ratio_max"});
  int snaps = 0;
  double last_t = init.t;
  auto observer = [&](const State& s, const TimeSample& row) {
    auto [rlo, rhi] = ratio_extremes(s);
    ts.row({row.t, row.mass_rho, row.mass_n, row.energy, row.dissipation_cum,
            row.min_theta, rlo, rhi});
    write_state_snapshot(join_path(out, snapshot_name("snap_", snaps)), s);
    ++snaps;
    last_t = s.t;
  };

  RunResult rr(init.grid());
  try {
    rr = run(init, cp, *ap, sc.run, observer);
  } catch (const RuntimeFailure& e) {
    std::ostringstream os;
    os << "simulate failed after t = " << csv_double(last_t) << ": "
       << e.what();
    throw RuntimeFailure(os.str());
  }
  write_state_snapshot(join_path(out, "final.dflx"), rr.final_state);
  std::cout << "simulate: " << rr.steps << " steps to t = "
            << csv_double(rr.final_state.t) << ", " << snaps
            << " snapshots, stiffness "
            << (rr.stiffness_flagged ? "flagged" : "clear") << "\n";
  return 0;
}

int cmd_cascade(const Scenario& sc, const std::string& out) {
  if (sc.schedule.empty())
    throw ConfigError("cascade needs a cascade.schedule entry");
  RawData raw = build_initial_data(sc);
  const Grid& g = raw.rho0.grid();

  std::vector<Kernel> kernels;
  for (double h : sc.h_list) kernels.emplace_back(g, h);

  struct StageTrack {
    CascadeStage stage;
    std::vector<double> esssup_lh1;
    State last;
    explicit StageTrack(const Grid& gr) : last(gr) {}
  };
  std::vector<StageTrack> done;
  std::optional<StageTrack> current;
  std::size_t current_k = 0;
  double last_t = 0.0;

  auto observer = [&](std::size_t k, const State& s, const TimeSample&) {
    if (!current || current_k != k) {
      if (current) done.push_back(std::move(*current));
      current.emplace(g);
      current->stage = sc.schedule[k];
      current->esssup_lh1.assign(sc.h_list.size(), 0.0);
      current_k = k;
    }
    ScalarField theta = s.rho + s.n;
    for (std::size_t j = 0; j < kernels.size(); ++j)
      current->esssup_lh1[j] =
          std::max(current->esssup_lh1[j], L_hp(theta, kernels[j], 1.0));
    current->last = s;
    last_t = s.t;
  };

  std::string failure;
  try {
    run_cascade(raw.rho0, raw.n0, raw.m0, make_law(sc), sc.schedule, sc.mu,
                sc.lambda, sc.p0, sc.run, observer);
    if (current) done.push_back(std::move(*current));
  } catch (const RuntimeFailure& e) {
    current.reset();  // the failing stage has no terminal state
    std::ostringstream os;
    os << "cascade failed after t = " << csv_double(last_t) << ": "
       << e.what();
    failure = os.str();
  }

  std::vector<std::string> cols = {"stage",        "ell",      "eps",
                                   "delta",        "t_final",  "l1_rho_diff",
                                   "l1_n_diff"};
  for (std::size_t j = 0; j < sc.h_list.size(); ++j)
    cols.push_back("esssup_lh1_" + std::to_string(j));
  CsvWriter summary(join_path(out, "cascade_summary.csv"), cols);

  for (std::size_t k = 0; k < done.size(); ++k) {
    const StageTrack& st = done[k];
    write_state_snapshot(
        join_path(out, "stage_" + std::to_string(k) + "_final.dflx"), st.last);
    std::vector<std::string> cells = {
        std::to_string(k), std::to_string(st.stage.ell),
        csv_double(st.stage.eps), csv_double(st.stage.delta),
        csv_double(st.last.t)};
    if (k == 0) {
      cells.push_back("");
      cells.push_back("");
    } else {
      ScalarField dr = st.last.rho - done[k - 1].last.rho;
      ScalarField dn = st.last.n - done[k - 1].last.n;
      cells.push_back(csv_double(l_p_norm(dr, 1.0)));
      cells.push_back(csv_double(l_p_norm(dn, 1.0)));
    }
    for (double v : st.esssup_lh1) cells.push_back(csv_double(v));
    summary.row_text(cells);
  }

  if (!failure.empty()) throw RuntimeFailure(failure);
  std::cout << "cascade: " << done.size() << " stages to t = "
            << csv_double(sc.run.t_end) << "\n";
  return 0;
}

int cmd_check_pressure(const Scenario& sc, const std::string& out) {
  LawPtr law = make_law(sc);
  GrowthReport gr = check_growth_bounds(*law, sc.audit_radius,
                                        sc.audit_samples);
  CsvWriter report(join_path(out, "pressure_report.csv"),
                   {"law", "radius", "samples", "c0_fitted", "c1_fitted",
                    "c2_fitted", "c0_declared", "c1_declared", "c2_declared",
                    "envelope_ok", "derivative_ok", "tail_lower_violations",
                    "tail_upper_violations", "pass"});
  report.row_text({law->name(), csv_double(sc.audit_radius),
                   std::to_string(sc.audit_samples), csv_double(gr.C0_fitted),
                   csv_double(gr.C1_fitted), csv_double(gr.C2_fitted),
                   csv_double(gr.C0_declared), csv_double(gr.C1_declared),
                   csv_double(gr.C2_declared), gr.envelope_ok ? "1" : "0",
                   gr.derivative_ok ? "1" : "0",
                   std::to_string(gr.tail_lower_violations),
                   std::to_string(gr.tail_upper_violations),
                   gr.pass ? "1" : "0"});
  std::cout << "check-pressure: " << law->name() << " "
            << (gr.pass ? "pass" : "fail") << "\n";
  return 0;
}

int cmd_kernel_study(const Scenario& sc, const std::string& out) {
  RawData raw = build_initial_data(sc);
  const ScalarField& f = raw.rho0;
  CsvWriter table(join_path(out, "kernel_study.csv"),
                  {"h", "norm_l1", "abs_log_h", "l_h1", "l_h2"});
  for (double h : sc.h_list) {
    Kernel k(f.grid(), h);
    table.row({h, k.norm_l1(), std::abs(std::log(h)), L_hp(f, k, 1.0),
               L_hp(f, k, 2.0)});
  }
  std::cout << "kernel-study: " << sc.h_list.size() << " widths\n";
  return 0;
}

int cmd_diagnose(const Scenario& sc, const std::string& out,
                 const std::vector<std::string>& positional) {
  if (positional.empty())
    throw ConfigError("diagnose needs a snapshot directory argument");
  const std::string& dir = positional.front();
  std::vector<std::string> files;
  std::error_code ec;
  for (const auto& entry : std::filesystem::directory_iterator(dir, ec)) {
    const std::string name = entry.path().filename().string();
    if (name.rfind("snap_", 0) == 0 && name.size() > 5 &&
        entry.path().extension() == ".dflx")
      files.push_back(entry.path().string());
  }
  if (ec) throw ConfigError("cannot list snapshot directory: " + dir);
  if (files.empty())
    throw ConfigError("no snap_*.dflx files found in: " + dir);
  std::sort(files.begin(), files.end());

  std::vector<State> traj;
  traj.reserve(files.size());
  for (const std::string& f : files) traj.push_back(read_state_snapshot(f));
  std::sort(traj.begin(), traj.end(),
            [](const State& a, const State& b) { return a.t < b.t; });

  CascadeParams cp = make_cascade_params(sc);
  ArtificialPtr ap = artificial_pressure(make_law(sc), sc.delta, sc.p0);
  DiagnosticsReport rep = diagnose_trajectory(traj, cp, *ap, sc.h_list,
                                              sc.weight, sc.sigma_star);

  std::vector<std::string> cols = {"t",          "mass_rho", "mass_n",
                                   "energy",     "dissipation_cum",
                                   "ratio_min",  "ratio_max"};
  for (std::size_t j = 0; j < sc.h_list.size(); ++j)
    cols.push_back("lh1_" + std::to_string(j));
  cols.push_back("e_w");
  cols.push_back("chain_rhs");
  cols.push_back("comm_ratio");
  cols.push_back("weight_clips");
  cols.push_back("weight_bound_violations");
  CsvWriter table(join_path(out, "diagnostics.csv"), cols);
  for (const DiagnosticsRow& row : rep.rows) {
    std::vector<double> vals = {row.t,          row.mass_rho, row.mass_n,
                                row.energy,     row.dissipation_cum,
                                row.ratio_min,  row.ratio_max};
    for (double v : row.l_h1) vals.push_back(v);
    vals.push_back(row.e_w);
    vals.push_back(row.chain_rhs);
    vals.push_back(row.comm_ratio);
    vals.push_back(static_cast<double>(row.weight_clips));
    vals.push_back(static_cast<double>(row.weight_bound_violations));
    table.row(vals);
  }
  std::cout << "diagnose: " << rep.rows.size() << " rows from "
            << files.size() << " snapshots\n";
  return 0;
}

int dispatch(const CliOptions& opt) {
  if (opt.command == "help" || opt.command == "--help" ||
      opt.command == "-h") {
    std::cout << kUsage;
    return 0;
  }
  if (opt.command != "simulate" && opt.command != "cascade" &&
      opt.command != "check-pressure" && opt.command != "kernel-study" &&
      opt.command != "diagnose")
    throw ConfigError("unknown command '" + opt.command + "'\n" +
                      std::string(kUsage));
  if (opt.config.empty()) throw ConfigError("missing --config PATH");

  Scenario sc = load_scenario(opt.config);
  if (opt.seed) sc.seed = *opt.seed;

  std::error_code ec;
  std::filesystem::create_directories(opt.out, ec);
  if (ec) throw IoFailure("cannot create output directory: " + opt.out);

  if (opt.command == "simulate") return cmd_simulate(sc, opt.out);
  if (opt.command == "cascade") return cmd_cascade(sc, opt.out);
  if (opt.command == "check-pressure") return cmd_check_pressure(sc, opt.out);
  if (opt.command == "kernel-study") return cmd_kernel_study(sc, opt.out);
  return cmd_diagnose(sc, opt.out, opt.positional);
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return dispatch(parse_cli(argc, argv));
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 3;
  } catch (const RuntimeFailure& e) {
    std::cerr << "runtime error: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "unexpected error: " << e.what() << "\n";
    return 1;
  }
}
