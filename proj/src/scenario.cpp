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

#include "dflx/scenario.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "dflx/errors.hpp"
#include "dflx/rng.hpp"

namespace dflx {

namespace {

const double kPi = std::acos(-1.0);

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : s) {
    if (ch == sep) {
      out.push_back(trim(cur));
      cur.clear();
    } else {
      cur += ch;
    }
  }
  out.push_back(trim(cur));
  return out;
}

struct Parser {
  std::string origin;
  int line = 0;

  [[noreturn]] void fail(const std::string& msg) const {
    std::ostringstream os;
    os << "config " << origin << ":" << line << ": " << msg;
    throw ConfigError(os.str());
  }

  double number(const std::string& text) const {
    const std::string t = trim(text);
    char* end = nullptr;
    double v = std::strtod(t.c_str(), &end);
    if (t.empty() || end != t.c_str() + t.size())
      fail("invalid number '" + t + "'");
    return v;
  }

  long integer(const std::string& text) const {
    double v = number(text);
    long l = static_cast<long>(v);
    if (static_cast<double>(l) != v) fail("expected an integer, got '" + trim(text) + "'");
    return l;
  }

  std::vector<double> number_list(const std::string& text) const {
    std::vector<double> out;
    for (const std::string& tok : split(text, ','))
      if (!tok.empty()) out.push_back(number(tok));
    if (out.empty()) fail("expected a comma-separated list of numbers");
    return out;
  }

  // "ell:eps:delta" triples separated by commas
  std::vector<CascadeStage> schedule_list(const std::string& text) const {
    std::vector<CascadeStage> out;
    for (const std::string& tok : split(text, ',')) {
      if (tok.empty()) continue;
      std::vector<std::string> parts = split(tok, ':');
      if (parts.size() != 3) fail("schedule entries are 'ell:eps:delta'");
      CascadeStage st;
      st.ell = static_cast<int>(integer(parts[0]));
      st.eps = number(parts[1]);
      st.delta = number(parts[2]);
      out.push_back(st);
    }
    if (out.empty()) fail("schedule must list at least one stage");
    return out;
  }

  // "c:gamma_i:alpha_i" triples separated by commas
  std::vector<CrossTerm> cross_list(const std::string& text) const {
    std::vector<CrossTerm> out;
    for (const std::string& tok : split(text, ',')) {
      if (tok.empty()) continue;
      std::vector<std::string> parts = split(tok, ':');
      if (parts.size() != 3) fail("cross entries are 'c:gamma_i:alpha_i'");
      out.push_back(CrossTerm{number(parts[0]), number(parts[1]),
                              number(parts[2])});
    }
    if (out.empty()) fail("cross must list at least one term");
    return out;
  }
};

void apply_key(Scenario& sc, const Parser& p, const std::string& section,
               const std::string& key, const std::string& value) {
  const std::string full = section + "." + key;
  if (full == "grid.dim") sc.dim = static_cast<int>(p.integer(value));
  else if (full == "grid.n") sc.n = static_cast<int>(p.integer(value));
  else if (full == "initial.preset") sc.preset = value;
  else if (full == "initial.amplitude") sc.amplitude = p.number(value);
  else if (full == "initial.mean_rho") sc.mean_rho = p.number(value);
  else if (full == "initial.mean_n") sc.mean_n = p.number(value);
  else if (full == "initial.ratio") sc.ratio = p.number(value);
  else if (full == "initial.seed")
    sc.seed = static_cast<std::uint64_t>(p.integer(value));
  else if (full == "initial.kmax") sc.kmax = static_cast<int>(p.integer(value));
  else if (full == "pressure.law") sc.law = value;
  else if (full == "pressure.gamma") sc.gamma = p.number(value);
  else if (full == "pressure.alpha") sc.alpha = p.number(value);
  else if (full == "pressure.osc_amplitude") sc.osc_amplitude = p.number(value);
  else if (full == "pressure.cross") sc.cross = p.cross_list(value);
  else if (full == "pressure.audit_radius") sc.audit_radius = p.number(value);
  else if (full == "pressure.audit_samples")
    sc.audit_samples = static_cast<int>(p.integer(value));
  else if (full == "cascade.eps") sc.eps = p.number(value);
  else if (full == "cascade.delta") sc.delta = p.number(value);
  else if (full == "cascade.ell") sc.ell = static_cast<int>(p.integer(value));
  else if (full == "cascade.mu") sc.mu = p.number(value);
  else if (full == "cascade.lambda") sc.lambda = p.number(value);
  else if (full == "cascade.p0") sc.p0 = p.number(value);
  else if (full == "cascade.schedule") sc.schedule = p.schedule_list(value);
  else if (full == "run.t_end") sc.run.t_end = p.number(value);
  else if (full == "run.cfl") sc.run.stepping.cfl = p.number(value);
  else if (full == "run.max_dt") sc.run.stepping.max_dt = p.number(value);
  else if (full == "run.fixed_dt") sc.run.stepping.fixed_dt = p.number(value);
  else if (full == "run.sample_every")
    sc.run.sample_every = static_cast<int>(p.integer(value));
  else if (full == "diagnostics.h_list") sc.h_list = p.number_list(value);
  else if (full == "diagnostics.lambda0")
    sc.weight.lambda0 = p.number(value);
  else if (full == "diagnostics.m_const") sc.weight.m_const = p.number(value);
  else if (full == "diagnostics.bound_tol")
    sc.weight.bound_tol = p.number(value);
  else if (full == "diagnostics.sigma_star") sc.sigma_star = p.number(value);
  else if (full == "diagnostics.tk_level") sc.tk_level = p.number(value);
  else p.fail("unknown key '" + full + "'");
}

}  // namespace

void Scenario::validate() const {
  Grid g(dim, n);  // rejects bad dim / n
  if (preset != "constant" && preset != "single_mode" &&
      preset != "dominated" && preset != "random")
    throw ConfigError("unknown initial preset '" + preset + "'");
  if (!(amplitude >= 0.0)) throw ConfigError("initial amplitude must be >= 0");
  if (!(mean_rho > 0.0) || !(mean_n > 0.0))
    throw ConfigError("initial means must be positive");
  if (!(ratio > 0.0)) throw ConfigError("dominated ratio must be positive");
  if (kmax < 1) throw ConfigError("initial kmax must be at least 1");

  LawPtr law_ptr = make_law(*this);           // rejects unknown names
  artificial_pressure(law_ptr, delta, p0);    // rejects bad delta / p0
  make_cascade_params(*this);                 // rejects bad viscosities etc.
  for (const CascadeStage& st : schedule)
    CascadeParams(st.eps, st.delta, st.ell, mu, lambda, p0);

  if (!(run.t_end > 0.0)) throw ConfigError("run t_end must be positive");
  if (!(run.stepping.cfl > 0.0) || run.stepping.cfl > 1.0)
    throw ConfigError("run cfl must lie in (0, 1]");
  if (!(run.stepping.max_dt > 0.0))
    throw ConfigError("run max_dt must be positive");
  if (run.stepping.fixed_dt < 0.0)
    throw ConfigError("run fixed_dt must be >= 0");
  if (run.sample_every < 1)
    throw ConfigError("run sample_every must be at least 1");

  if (h_list.empty()) throw ConfigError("diagnostics h_list must be nonempty");
  for (double h : h_list)
    if (!(h > 0.0) || h >= 0.1)
      throw ConfigError("diagnostics h values must lie in (0, 0.1)");
  if (!(weight.lambda0 >= 1.0))
    throw ConfigError("diagnostics lambda0 must be at least 1");
  if (weight.m_const < 0.0 || weight.bound_tol < 0.0)
    throw ConfigError("diagnostics weight knobs must be nonnegative");
  if (!(sigma_star > 0.0))
    throw ConfigError("diagnostics sigma_star must be positive");
  if (!(tk_level > 0.0))
    throw ConfigError("diagnostics tk_level must be positive");
  if (!(audit_radius > 1.0))
    throw ConfigError("pressure audit_radius must exceed 1");
  if (audit_samples < 3)
    throw ConfigError("pressure audit_samples must be at least 3");
  (void)g;
}

Scenario parse_scenario(std::istream& in, const std::string& origin) {
  Scenario sc;
  Parser p;
  p.origin = origin;
  std::string section = "global";
  std::string line;
  while (std::getline(in, line)) {
    ++p.line;
    std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') p.fail("unterminated section header");
      section = trim(line.substr(1, line.size() - 2));
      if (section.empty()) p.fail("empty section name");
      continue;
    }
    std::size_t eq = line.find('=');
    if (eq == std::string::npos) p.fail("expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty()) p.fail("expected 'key = value'");
    apply_key(sc, p, section, key, value);
  }
  sc.validate();
  return sc;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  return parse_scenario(in, path);
}

LawPtr make_law(const Scenario& sc) {
  if (sc.law == "two_gamma") return two_gamma(sc.gamma, sc.alpha);
  if (sc.law == "cross_terms") {
    if (sc.cross.empty())
      throw ConfigError("cross_terms law needs a pressure.cross list");
    return cross_terms(sc.gamma, sc.alpha, sc.cross);
  }
  if (sc.law == "oscillatory")
    return oscillatory(sc.gamma, sc.alpha, sc.osc_amplitude);
  throw ConfigError("unknown pressure law '" + sc.law + "'");
}

CascadeParams make_cascade_params(const Scenario& sc) {
  return CascadeParams(sc.eps, sc.delta, sc.resolved_ell(), sc.mu, sc.lambda,
                       sc.p0);
}

RawData build_initial_data(const Scenario& sc) {
  Grid g(sc.dim, sc.n);
  RawData data(g);
  const double amp = sc.amplitude;
  const int d = sc.dim;

  auto mode_rho = [&](const std::array<double, 3>& x) {
    double v = std::sin(2.0 * kPi * x[0]);
    if (d >= 2) v *= std::cos(2.0 * kPi * x[1]);
    return sc.mean_rho + amp * v;
  };
  auto mode_momentum = [&](const std::array<double, 3>& x) {
    return amp * std::sin(2.0 * kPi * x[d >= 2 ? 1 : 0]);
  };

  if (sc.preset == "constant") {
    data.rho0 = ScalarField(g, sc.mean_rho);
    data.n0 = ScalarField(g, sc.mean_n);
  } else if (sc.preset == "single_mode") {
    data.rho0.sample(mode_rho);
    data.n0.sample([&](const std::array<double, 3>& x) {
      return sc.mean_n + amp * std::cos(2.0 * kPi * x[0]);
    });
    data.m0[0].sample(mode_momentum);
  } else if (sc.preset == "dominated") {
    data.rho0.sample(mode_rho);
    for (std::size_t i = 0; i < data.n0.size(); ++i)
      data.n0[i] = sc.ratio * data.rho0[i];
    data.m0[0].sample(mode_momentum);
  } else if (sc.preset == "random") {
    ScalarField pr = random_band_limited(g, sc.seed, sc.kmax, amp);
    ScalarField pn = random_band_limited(g, sc.seed + 11, sc.kmax, amp);
    for (std::size_t i = 0; i < pr.size(); ++i) {
      data.rho0[i] = sc.mean_rho + pr[i];
      data.n0[i] = sc.mean_n + pn[i];
    }
    for (int c = 0; c < d; ++c)
      data.m0[c] = random_band_limited(g, sc.seed + 101 + c, sc.kmax, amp);
  } else {
    throw ConfigError("unknown initial preset '" + sc.preset + "'");
  }
  return data;
}

}  // namespace dflx
