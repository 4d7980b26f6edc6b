#include "cmaflow/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

#include <toml.hpp>

#include "cmaflow/errors.hpp"

namespace cmaflow {

namespace {

const std::set<std::string>& known_keys() {
  static const std::set<std::string> keys = {
      "n",        "N",         "chi",        "chi_imag",  "f",      "u0",     "speed",
      "scheme",   "cfl_safety", "dt_max",    "residual_tol", "t_max", "max_steps", "output_dir",
      "dump_every", "checks",  "A",          "B",         "check_steps", "check_dt"};
  return keys;
}

double get_real(const toml::node& node, const std::string& key) {
  if (auto v = node.value<double>()) return *v;  // integers convert too
  throw ConfigError(key, "expected a number");
}

std::int64_t get_int(const toml::node& node, const std::string& key) {
  if (!node.is_integer()) throw ConfigError(key, "expected an integer");
  return *node.value<std::int64_t>();
}

std::vector<double> get_reals(const toml::node& node, const std::string& key) {
  const auto* arr = node.as_array();
  if (!arr) throw ConfigError(key, "expected an array of numbers");
  std::vector<double> out;
  for (const auto& el : *arr) out.push_back(get_real(el, key));
  return out;
}

std::vector<CosineMode> get_modes(const toml::node& node, const std::string& key, int n) {
  const auto* arr = node.as_array();
  if (!arr) throw ConfigError(key, "expected an array of {k, amplitude, phase} tables");
  std::vector<CosineMode> out;
  for (std::size_t i = 0; i < arr->size(); ++i) {
    const std::string where = key + "[" + std::to_string(i) + "]";
    const auto* tbl = (*arr)[i].as_table();
    if (!tbl) throw ConfigError(where, "expected a table");
    CosineMode m;
    bool has_k = false, has_a = false;
    for (const auto& [k, v] : *tbl) {
      const std::string name(k.str());
      if (name == "k") {
        const auto* ks = v.as_array();
        if (!ks) throw ConfigError(where + ".k", "expected an array of integers");
        for (const auto& e : *ks) m.k.push_back(static_cast<int>(get_int(e, where + ".k")));
        has_k = true;
      } else if (name == "amplitude") {
        m.amplitude = get_real(v, where + ".amplitude");
        has_a = true;
      } else if (name == "phase") {
        m.phase = get_real(v, where + ".phase");
      } else {
        throw ConfigError(where + "." + name, "unknown key");
      }
    }
    if (!has_k) throw ConfigError(where + ".k", "missing wave vector");
    if (!has_a) throw ConfigError(where + ".amplitude", "missing amplitude");
    if (static_cast<int>(m.k.size()) != 2 * n)
      throw ConfigError(where + ".k", "wave vector needs " + std::to_string(2 * n) + " entries");
    out.push_back(std::move(m));
  }
  return out;
}

void require_finite(double v, const std::string& key) {
  if (!std::isfinite(v)) throw ConfigError(key, "must be finite");
}

void validate(const RunConfig& c) {
  if (c.n != 1 && c.n != 2) throw ConfigError("n", "must be 1 or 2");
  if (c.N < 8 || (c.N & (c.N - 1)) != 0) throw ConfigError("N", "must be a power of two, at least 8");
  if (!c.chi.empty() && c.chi.size() != static_cast<std::size_t>(c.n * c.n))
    throw ConfigError("chi", "needs n*n entries");
  if (!c.chi_imag.empty() && c.chi.empty()) throw ConfigError("chi_imag", "given without chi");
  if (!c.chi_imag.empty() && c.chi_imag.size() != c.chi.size())
    throw ConfigError("chi_imag", "needs n*n entries");
  if (!c.chi.empty()) {
    try {
      make_metric(c);
    } catch (const InvalidInput& e) {
      throw ConfigError("chi", e.what());
    }
  }
  try {
    c.speed.build();
  } catch (const Error& e) {
    throw ConfigError("speed", e.what());
  }
  if (c.scheme != "imex" && c.scheme != "rk4") throw ConfigError("scheme", "must be \"imex\" or \"rk4\"");
  if (!(c.cfl_safety > 0.0 && c.cfl_safety <= 1.0)) throw ConfigError("cfl_safety", "must lie in (0, 1]");
  if (!(c.dt_max > 0.0)) throw ConfigError("dt_max", "must be positive");
  if (!(c.residual_tol > 0.0)) throw ConfigError("residual_tol", "must be positive");
  if (!(c.t_max > 0.0)) throw ConfigError("t_max", "must be positive");
  if (c.check_steps < 2) throw ConfigError("check_steps", "must be at least 2");
  if (!(c.check_dt > 0.0)) throw ConfigError("check_dt", "must be positive");
  require_finite(c.A, "A");
  require_finite(c.B, "B");
  for (const auto* modes : {&c.f, &c.u0})
    for (const auto& m : *modes) {
      require_finite(m.amplitude, modes == &c.f ? "f" : "u0");
      require_finite(m.phase, modes == &c.f ? "f" : "u0");
    }
}

SpeedSpec get_speed(const toml::node& node) {
  if (node.is_string()) {
    try {
      return SpeedSpec::of(SpeedFunction::from_token(*node.value<std::string>()));
    } catch (const Error& e) {
      throw ConfigError("speed", e.what());
    }
  }
  const auto* tbl = node.as_table();
  if (!tbl) throw ConfigError("speed", "expected a table { kind = ..., a = ... } or a token string");
  SpeedSpec sp;
  bool has_kind = false, has_a = false;
  for (const auto& [k, v] : *tbl) {
    const std::string name(k.str());
    const std::string key = "speed." + name;
    if (name == "kind") {
      if (!v.is_string()) throw ConfigError(key, "expected a string");
      sp.kind = *v.value<std::string>();
      has_kind = true;
    } else if (name == "a") {
      sp.a = get_real(v, key);
      has_a = true;
    } else if (name == "scale") {
      sp.scale = get_real(v, key);
    } else if (name == "coeffs") {
      const auto* arr = v.as_array();
      if (!arr) throw ConfigError(key, "expected [[k, c], ...]");
      for (const auto& el : *arr) {
        const auto* pair = el.as_array();
        if (!pair || pair->size() != 2) throw ConfigError(key, "expected [[k, c], ...]");
        sp.coeffs.emplace_back(static_cast<int>(get_int((*pair)[0], key)), get_real((*pair)[1], key));
      }
    } else {
      throw ConfigError(key, "unknown key");
    }
  }
  if (!has_kind) throw ConfigError("speed.kind", "missing");
  const bool takes_a = sp.kind == "power" || sp.kind == "negative_power";
  if (takes_a && !has_a) throw ConfigError("speed.a", "required for kind \"" + sp.kind + "\"");
  if (!takes_a && (has_a || tbl->contains("scale")))
    throw ConfigError(has_a ? "speed.a" : "speed.scale", "not used by kind \"" + sp.kind + "\"");
  if (sp.kind != "custom" && !sp.coeffs.empty())
    throw ConfigError("speed.coeffs", "only used by kind \"custom\"");
  try {
    sp.build();
  } catch (const Error& e) {
    throw ConfigError("speed.kind", e.what());
  }
  return sp;
}

std::string fmt(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  std::string s(buf, end);
  if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
  return s;
}

std::string quoted(const std::string& s) {
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"' || ch == '\\') out += '\\';
    out += ch;
  }
  return out + "\"";
}

std::string reals(const std::vector<double>& v) {
  std::string s = "[";
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + fmt(v[i]);
  return s + "]";
}

std::string modes(const std::vector<CosineMode>& ms) {
  if (ms.empty()) return "[]";
  std::string s = "[\n";
  for (const auto& m : ms) {
    s += "  { k = [";
    for (std::size_t i = 0; i < m.k.size(); ++i) s += (i ? ", " : "") + std::to_string(m.k[i]);
    s += "], amplitude = " + fmt(m.amplitude) + ", phase = " + fmt(m.phase) + " },\n";
  }
  return s + "]";
}

}  // namespace

RunConfig parse_config(std::string_view text) {
  toml::table tbl;
  try {
    tbl = toml::parse(text);
  } catch (const toml::parse_error& e) {
    std::ostringstream msg;
    msg << e.description() << " (line " << e.source().begin.line << ")";
    throw ConfigError("<syntax>", msg.str());
  }
  for (const auto& [k, v] : tbl) {
    const std::string key(k.str());
    if (!known_keys().count(key)) throw ConfigError(key, "unknown key");
  }
  RunConfig c;
  auto at = [&](const char* key) { return tbl.get(key); };
  if (auto* v = at("n")) c.n = static_cast<int>(get_int(*v, "n"));
  if (auto* v = at("N")) c.N = static_cast<int>(get_int(*v, "N"));
  if (c.n != 1 && c.n != 2) throw ConfigError("n", "must be 1 or 2");
  if (auto* v = at("chi")) c.chi = get_reals(*v, "chi");
  if (auto* v = at("chi_imag")) c.chi_imag = get_reals(*v, "chi_imag");
  if (auto* v = at("f")) c.f = get_modes(*v, "f", c.n);
  if (auto* v = at("u0")) c.u0 = get_modes(*v, "u0", c.n);
  auto str = [&](const char* key, std::string& dst) {
    if (auto* v = at(key)) {
      if (!v->is_string()) throw ConfigError(key, "expected a string");
      dst = *v->value<std::string>();
    }
  };
  auto real = [&](const char* key, double& dst) {
    if (auto* v = at(key)) dst = get_real(*v, key);
  };
  auto count = [&](const char* key, std::size_t& dst) {
    if (auto* v = at(key)) {
      const auto i = get_int(*v, key);
      if (i < 0) throw ConfigError(key, "must be non-negative");
      dst = static_cast<std::size_t>(i);
    }
  };
  if (auto* v = at("speed")) c.speed = get_speed(*v);
  str("scheme", c.scheme);
  real("cfl_safety", c.cfl_safety);
  real("dt_max", c.dt_max);
  real("residual_tol", c.residual_tol);
  real("t_max", c.t_max);
  count("max_steps", c.max_steps);
  str("output_dir", c.output_dir);
  count("dump_every", c.dump_every);
  if (auto* v = at("checks")) {
    if (!v->is_boolean()) throw ConfigError("checks", "expected true or false");
    c.checks = *v->value<bool>();
  }
  real("A", c.A);
  real("B", c.B);
  if (auto* v = at("check_steps")) c.check_steps = static_cast<int>(get_int(*v, "check_steps"));
  real("check_dt", c.check_dt);
  validate(c);
  return c;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("<file>", "cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string serialize_config(const RunConfig& c) {
  std::string s;
  s += "n = " + std::to_string(c.n) + "\n";
  s += "N = " + std::to_string(c.N) + "\n";
  if (!c.chi.empty()) s += "chi = " + reals(c.chi) + "\n";
  if (!c.chi_imag.empty()) s += "chi_imag = " + reals(c.chi_imag) + "\n";
  s += "f = " + modes(c.f) + "\n";
  s += "u0 = " + modes(c.u0) + "\n";
  s += "speed = { kind = " + quoted(c.speed.kind);
  if (c.speed.kind == "power" || c.speed.kind == "negative_power")
    s += ", a = " + fmt(c.speed.a) + ", scale = " + fmt(c.speed.scale);
  if (c.speed.kind == "custom") {
    s += ", coeffs = [";
    for (std::size_t i = 0; i < c.speed.coeffs.size(); ++i)
      s += (i ? ", [" : "[") + std::to_string(c.speed.coeffs[i].first) + ", " + fmt(c.speed.coeffs[i].second) + "]";
    s += "]";
  }
  s += " }\n";
  s += "scheme = " + quoted(c.scheme) + "\n";
  s += "cfl_safety = " + fmt(c.cfl_safety) + "\n";
  s += "dt_max = " + fmt(c.dt_max) + "\n";
  s += "residual_tol = " + fmt(c.residual_tol) + "\n";
  s += "t_max = " + fmt(c.t_max) + "\n";
  s += "max_steps = " + std::to_string(c.max_steps) + "\n";
  s += "output_dir = " + quoted(c.output_dir) + "\n";
  s += "dump_every = " + std::to_string(c.dump_every) + "\n";
  s += std::string("checks = ") + (c.checks ? "true" : "false") + "\n";
  s += "A = " + fmt(c.A) + "\n";
  s += "B = " + fmt(c.B) + "\n";
  s += "check_steps = " + std::to_string(c.check_steps) + "\n";
  s += "check_dt = " + fmt(c.check_dt) + "\n";
  return s;
}

Grid make_grid(const RunConfig& c) { return Grid(c.n, c.N); }

BackgroundMetric make_metric(const RunConfig& c) {
  if (c.chi.empty()) return BackgroundMetric::identity(c.n);
  CMat m = CMat::identity(c.n);
  for (int r = 0; r < c.n; ++r)
    for (int col = 0; col < c.n; ++col) {
      const std::size_t i = static_cast<std::size_t>(r * c.n + col);
      m(r, col) = cplx(c.chi[i], c.chi_imag.empty() ? 0.0 : c.chi_imag[i]);
    }
  return BackgroundMetric(m);
}

SpeedFunction SpeedSpec::build() const {
  if (kind == "log") return SpeedFunction::log();
  if (kind == "linear") return SpeedFunction::linear();
  if (kind == "inverse_ma") return SpeedFunction::inverse_ma();
  if (kind == "power") return SpeedFunction::power(a, scale);
  if (kind == "negative_power") return SpeedFunction::negative_power(a, scale);
  if (kind == "custom") return SpeedFunction::custom(coeffs);
  throw InvalidInput("unknown speed kind '" + kind + "'");
}

SpeedSpec SpeedSpec::of(const SpeedFunction& F) {
  SpeedSpec s;
  switch (F.kind()) {
    case SpeedFunction::Kind::Log: s.kind = "log"; break;
    case SpeedFunction::Kind::Linear: s.kind = "linear"; break;
    case SpeedFunction::Kind::InverseMA: s.kind = "inverse_ma"; break;
    case SpeedFunction::Kind::Power:
    case SpeedFunction::Kind::NegativePower:
      s.kind = F.kind() == SpeedFunction::Kind::Power ? "power" : "negative_power";
      s.a = F.exponent();
      s.scale = F.scale();
      break;
    case SpeedFunction::Kind::Custom:
      s.kind = "custom";
      s.coeffs = F.coeffs();
      break;
  }
  return s;
}

SpeedFunction make_speed(const RunConfig& c) { return c.speed.build(); }

StepPolicy make_policy(const RunConfig& c) {
  StepPolicy p;
  p.scheme = c.scheme == "rk4" ? Scheme::ExplicitRK4 : Scheme::ImexStabilized;
  p.cfl_safety = c.cfl_safety;
  p.dt_max = c.dt_max;
  p.residual_tol = c.residual_tol;
  p.t_max = c.t_max;
  p.max_steps = c.max_steps;
  return p;
}

GMonitor make_monitor(const RunConfig& c) { return GMonitor{c.A, c.B}; }

ScalarField cosine_series(const Grid& grid, const std::vector<CosineMode>& ms) {
  for (const auto& m : ms)
    if (static_cast<int>(m.k.size()) != grid.axes())
      throw InvalidInput("cosine mode wave vector needs " + std::to_string(grid.axes()) + " entries");
  return ScalarField::sample(grid, [&](std::span<const double> x) {
    double s = 0.0;
    for (const auto& m : ms) {
      double arg = m.phase;
      for (int a = 0; a < grid.axes(); ++a) arg += 2.0 * std::numbers::pi * m.k[a] * x[a];
      s += m.amplitude * std::cos(arg);
    }
    return s;
  });
}

}  // namespace cmaflow
