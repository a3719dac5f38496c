#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "rpde/harness.hpp"

namespace rpde::harness {

namespace {
constexpr double kPi = 3.14159265358979323846;

[[noreturn]] void fail(const std::string& msg) { throw ConfigError(msg); }

double to_double(const std::string& s, const std::string& where) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) fail("config: bad number '" + s + "' in " + where);
    return v;
  } catch (const std::logic_error&) {
    fail("config: bad number '" + s + "' in " + where);
  }
}

int to_int(const std::string& s, const std::string& where) {
  const double v = to_double(s, where);
  if (v != std::floor(v)) fail("config: integer expected in " + where);
  return int(v);
}

bool to_bool(const std::string& s, const std::string& where) {
  if (s == "true") return true;
  if (s == "false") return false;
  fail("config: expected true/false in " + where);
}

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

using Section = std::map<std::string, std::string>;
using RawConfig = std::map<std::string, Section>;

RawConfig tokenize(const std::string& text) {
  RawConfig raw;
  std::istringstream in(text);
  std::string line;
  std::string section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') {
        fail("config: line " + std::to_string(lineno) + ": unterminated section");
      }
      section = trim(line.substr(1, line.size() - 2));
      raw[section];
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos || section.empty()) {
      fail("config: line " + std::to_string(lineno) + ": expected 'key = value'");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty()) {
      fail("config: line " + std::to_string(lineno) + ": empty key or value");
    }
    if (raw[section].count(key)) {
      fail("config: line " + std::to_string(lineno) + ": duplicate key '" +
           key + "'");
    }
    raw[section][key] = value;
  }
  return raw;
}

// Reads and removes a key; remaining keys are reported as unknown.
std::optional<std::string> take(Section& s, const std::string& key) {
  auto it = s.find(key);
  if (it == s.end()) return std::nullopt;
  std::string v = it->second;
  s.erase(it);
  return v;
}

std::string require(Section& s, const std::string& key,
                    const std::string& section) {
  auto v = take(s, key);
  if (!v) fail("config: [" + section + "] missing required key '" + key + "'");
  return *v;
}

void expect_empty(const Section& s, const std::string& section) {
  if (!s.empty()) {
    fail("config: [" + section + "] unknown key '" + s.begin()->first + "'");
  }
}

std::function<double(double)> make_delay(const KindSpec& k, double r,
                                         const std::string& where) {
  if (k.kind == "const") {
    if (k.params.size() != 1) fail("config: const delay needs one value");
    const double c = k.params[0];
    if (c < 0.0 || c > r) fail("config: " + where + " outside [0, r]");
    return [c](double) { return c; };
  }
  if (k.kind == "osc") {
    if (k.params.size() != 3) fail("config: osc delay needs center:amp:freq");
    const double c = k.params[0], a = k.params[1], w = k.params[2];
    if (c - std::abs(a) < 0.0 || c + std::abs(a) > r) {
      fail("config: " + where + " range outside [0, r]");
    }
    return [c, a, w](double t) { return c + a * std::sin(w * t); };
  }
  fail("config: unknown delay kind '" + k.kind + "' in " + where);
}

}  // namespace

KindSpec KindSpec::parse(const std::string& text) {
  KindSpec k;
  std::string rest = text;
  const auto colon = rest.find(':');
  k.kind = rest.substr(0, colon);
  while (colon != std::string::npos) {
    rest = rest.substr(rest.find(':') + 1);
    const auto next = rest.find(':');
    k.params.push_back(to_double(rest.substr(0, next), "kind '" + text + "'"));
    if (next == std::string::npos) break;
  }
  return k;
}

RunConfig parse_config(const std::string& text) {
  RawConfig raw = tokenize(text);
  const RawConfig retained = raw;
  for (const auto& [name, _] : raw) {
    static const char* known[] = {"domain", "f",       "g",       "delays",
                                  "h",      "history", "solver",  "estimates",
                                  "output"};
    if (std::find_if(std::begin(known), std::end(known), [&](const char* s) {
          return name == s;
        }) == std::end(known)) {
      fail("config: unknown section [" + name + "]");
    }
  }

  RunConfig cfg;
  cfg.raw = retained;
  auto& p = cfg.problem;

  {
    Section s = raw["domain"];
    p.length = to_double(require(s, "L", "domain"), "[domain] L");
    if (!(p.length > 0.0)) fail("config: [domain] L > 0 required");
    expect_empty(s, "domain");
  }

  {
    Section s = raw["f"];
    const KindSpec k = KindSpec::parse(require(s, "kind", "f"));
    auto& sc = p.constants;
    if (k.kind == "cubic") {
      p.f.value = [](double u) { return -u * u * u; };
      p.f.deriv = [](double u) { return -3.0 * u * u; };
    } else if (k.kind == "power") {
      if (k.params.size() != 1 || !(k.params[0] >= 1.0)) {
        fail("config: [f] power kind needs exponent >= 1");
      }
      const double pw = k.params[0];
      p.f.value = [pw](double u) { return -u * std::pow(std::abs(u), pw - 1.0); };
      p.f.deriv = [pw](double u) { return -pw * std::pow(std::abs(u), pw - 1.0); };
    } else if (k.kind == "linear") {
      if (k.params.size() != 1) fail("config: [f] linear kind needs a gain");
      const double gain = k.params[0];
      p.f.value = [gain](double u) { return gain * u; };
      p.f.deriv = [gain](double) { return gain; };
    } else if (k.kind == "zero") {
      p.f.value = nullptr;
    } else {
      fail("config: [f] unknown kind '" + k.kind + "'");
    }
    sc.lambda_diss = to_double(require(s, "lambda", "f"), "[f] lambda");
    sc.n_diss = to_double(require(s, "N", "f"), "[f] N");
    sc.gamma = to_double(require(s, "gamma", "f"), "[f] gamma");
    sc.alpha = to_double(require(s, "alpha", "f"), "[f] alpha");
    sc.a0 = to_double(require(s, "a0", "f"), "[f] a0");
    if (auto a1 = take(s, "a1")) sc.a1 = to_double(*a1, "[f] a1");
    expect_empty(s, "f");
  }

  {
    Section s = raw["delays"];
    auto& d = p.delays;
    d.r = to_double(require(s, "r", "delays"), "[delays] r");
    if (d.r < 0.0) fail("config: [delays] r >= 0 required");
    for (int i = 1;; ++i) {
      auto v = take(s, "r" + std::to_string(i));
      if (!v) break;
      d.r_i.push_back(make_delay(KindSpec::parse(*v), d.r,
                                 "[delays] r" + std::to_string(i)));
    }
    d.m = int(d.r_i.size());
    expect_empty(s, "delays");
  }

  {
    Section s = raw["g"];
    const KindSpec k = KindSpec::parse(require(s, "kind", "g"));
    auto& sc = p.constants;
    auto& g = p.g;
    g.m = std::max(1, p.delays.m);
    const int m = g.m;
    if (k.kind == "zero") {
      g.value = nullptr;
      sc.b0 = sc.b1 = sc.b0p = sc.b1p = 1e-12;
    } else if (k.kind == "linear") {
      if (k.params.size() != 1) fail("config: [g] linear kind needs a gain");
      if (p.delays.m < 1) fail("config: [g] requires at least one delay r1");
      const double gain = k.params[0];
      g.value = [gain](const Eigen::VectorXd& v) { return gain * v.sum(); };
      g.separated = true;
      g.terms.resize(m);
      for (auto& term : g.terms) {
        term.value = [gain](double u) { return gain * u; };
        term.deriv = [gain](double) { return gain; };
      }
      sc.b0 = std::abs(gain) * std::sqrt(double(m));
      sc.b0p = std::abs(gain) * std::sqrt(double(m));
      sc.b1 = std::abs(gain) * double(m);
      sc.b1p = std::abs(gain) * double(m);
    } else if (k.kind == "sinsum") {
      if (p.delays.m < 1) fail("config: [g] requires at least one delay r1");
      g.value = [](const Eigen::VectorXd& v) {
        return v.array().sin().sum();
      };
      g.separated = true;
      g.terms.resize(m);
      for (auto& term : g.terms) {
        term.value = [](double u) { return std::sin(u); };
        term.deriv = [](double u) { return std::cos(u); };
      }
      sc.b0 = std::sqrt(double(m));
      sc.b0p = std::sqrt(double(m));
      sc.b1 = double(m);
      sc.b1p = double(m);
    } else {
      fail("config: [g] unknown kind '" + k.kind + "'");
    }
    sc.beta = to_double(require(s, "beta", "g"), "[g] beta");
    if (auto v = take(s, "separated")) g.separated = to_bool(*v, "[g] separated");
    if (auto v = take(s, "b0")) sc.b0 = to_double(*v, "[g] b0");
    if (auto v = take(s, "b1")) sc.b1 = to_double(*v, "[g] b1");
    if (auto v = take(s, "b0p")) sc.b0p = to_double(*v, "[g] b0p");
    if (auto v = take(s, "b1p")) sc.b1p = to_double(*v, "[g] b1p");
    expect_empty(s, "g");
    if (!(sc.beta >= 1.0)) fail("config: [g] beta >= 1 required");
    if (!(sc.beta < sc.gamma)) fail("config: beta < gamma required");
    if (g.value && p.delays.m < 1) {
      fail("config: [g] nonzero coupling requires delay functions");
    }
  }

  {
    Section s = raw["h"];
    const KindSpec k = KindSpec::parse(require(s, "kind", "h"));
    if (k.kind == "zero") {
      p.h.value = nullptr;
    } else if (k.kind == "mode") {
      if (k.params.size() != 2) fail("config: [h] mode kind needs mode:amp");
      const int j = int(k.params[0]);
      const double amp = k.params[1];
      const double L = p.length;
      if (j < 1) fail("config: [h] mode index >= 1 required");
      p.h.value = [j, amp, L](double x, double) {
        return amp * std::sin(double(j) * kPi * x / L);
      };
      p.h.linf_bound = std::abs(amp);
      p.h.h1_bound =
          std::abs(amp) * double(j) * kPi / L * std::sqrt(L / 2.0);
    } else {
      fail("config: [h] unknown kind '" + k.kind + "'");
    }
    if (auto v = take(s, "linf")) p.h.linf_bound = to_double(*v, "[h] linf");
    if (auto v = take(s, "h1norm")) p.h.h1_bound = to_double(*v, "[h] h1norm");
    if (auto v = take(s, "lp")) p.h.lp_bound = to_double(*v, "[h] lp");
    expect_empty(s, "h");
  }

  {
    Section s = raw["history"];
    const KindSpec k = KindSpec::parse(require(s, "phi", "history"));
    if (k.kind == "mode") {
      if (k.params.size() != 2) {
        fail("config: [history] mode kind needs mode:amp");
      }
      const int j = int(k.params[0]);
      const double amp = k.params[1];
      const double L = p.length;
      if (j < 1) fail("config: [history] mode index >= 1 required");
      cfg.phi = [j, amp, L](double, double x) {
        return amp * std::sin(double(j) * kPi * x / L);
      };
    } else if (k.kind == "zero") {
      cfg.phi = [](double, double) { return 0.0; };
    } else {
      fail("config: [history] unknown phi kind '" + k.kind + "'");
    }
    if (auto v = take(s, "n_times")) {
      cfg.n_history_times = to_int(*v, "[history] n_times");
      if (cfg.n_history_times < 2) {
        fail("config: [history] n_times >= 2 required");
      }
    }
    expect_empty(s, "history");
  }

  {
    Section s = raw["solver"];
    cfg.solver.dt = to_double(require(s, "dt", "solver"), "[solver] dt");
    cfg.solver.t_end = to_double(require(s, "T", "solver"), "[solver] T");
    cfg.solver.n_modes =
        to_int(require(s, "n_modes", "solver"), "[solver] n_modes");
    cfg.solver.n_quad =
        to_int(require(s, "n_quad", "solver"), "[solver] n_quad");
    expect_empty(s, "solver");
    try {
      cfg.solver.validate(p.delays.r);
    } catch (const ConfigError& e) {
      fail(std::string("config: ") + e.what());
    }
  }

  {
    Section s = raw["estimates"];
    cfg.q = to_double(require(s, "q", "estimates"), "[estimates] q");
    if (auto v = take(s, "rel_tol")) cfg.rel_tol = to_double(*v, "rel_tol");
    if (auto v = take(s, "abs_tol")) cfg.abs_tol = to_double(*v, "abs_tol");
    expect_empty(s, "estimates");
    const auto crit = model::critical_exponents(
        p.constants.gamma, p.constants.beta, p.constants.alpha);
    if (!(cfg.q > crit.q_star)) {
      std::ostringstream msg;
      msg << "config: [estimates] q = " << cfg.q
          << " must exceed q* = " << crit.q_star
          << " (out-of-theory regime)";
      throw OutOfTheoryError(msg.str());
    }
  }

  if (raw.count("output")) {
    Section s = raw["output"];
    if (auto v = take(s, "stride")) {
      cfg.stride = to_int(*v, "[output] stride");
      if (cfg.stride < 1) fail("config: [output] stride >= 1 required");
    }
    expect_empty(s, "output");
  }

  // The forcing bound the L^q chain consumes: fill analytically for the
  // mode kind when not declared.
  if (p.h.value && !p.h.lp_bound) {
    const double ph = model::q_gamma(cfg.q, p.constants.gamma) /
                      p.constants.gamma;
    spectral::Grid grid(p.length, 1, 256);
    Eigen::VectorXd vals(grid.n_quad() + 1);
    for (int i = 0; i <= grid.n_quad(); ++i) {
      vals[i] = std::abs(p.h.value(grid.nodes()[i], 0.0));
    }
    const Eigen::VectorXd integrand = vals.array().pow(ph).matrix();
    p.h.lp_bound = std::pow(spectral::trapezoid(integrand, grid), 1.0 / ph);
  }

  return cfg;
}

RunConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail("config: cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

}  // namespace rpde::harness
